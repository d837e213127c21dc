import math

import pytest
from hypothesis import given, strategies as st

from avoider.actuators import Maneuver, PULSE_STOP, named_command
from avoider.controller import (
    ControllerConfig, ControllerState, Mode, classify_obstacles, controller_step, default_scan_budget,
)
from avoider.sensors import LightReading, PingReading, SensorFrame, comparator
from avoider.world import SimParams

CFG = ControllerConfig()


def ping(cm):
    return PingReading(cm, None if cm is None else 2 * cm / 34000 * 1e6, 0.0)


def frame(front=100, right=100, left=100, flame=False, tick=0):
    light = comparator(0.85 if flame else 4.0, 1.47)
    return SensorFrame(ping(front), ping(right), ping(left), light, tick)


def test_classify_examples():
    assert classify_obstacles(frame(100, 50, 50), CFG) is Maneuver.FORWARD
    assert classify_obstacles(frame(15, 80, 30), CFG) is Maneuver.SPIN_RIGHT
    assert classify_obstacles(frame(10, 10, 10), CFG) is Maneuver.REVERSE


def test_classify_tie_and_timeouts():
    assert classify_obstacles(frame(10, 40, 40), CFG) is Maneuver.SPIN_LEFT
    assert classify_obstacles(frame(None, 5, 5), CFG) is Maneuver.FORWARD
    assert classify_obstacles(frame(10, None, 30), CFG) is Maneuver.SPIN_RIGHT


def test_wander_to_approach():
    out = controller_step(ControllerState(), frame(flame=True), CFG)
    assert out.next.mode is Mode.APPROACH
    assert not out.command.fan_on


def test_approach_lost_flame_scans():
    out = controller_step(ControllerState(Mode.APPROACH), frame(flame=False), CFG)
    assert out.next.mode is Mode.SCAN
    assert out.next.scan_ticks_left == CFG.scan_budget_ticks
    assert out.command == named_command(Maneuver.SPIN_LEFT)


def test_approach_reaches_flame():
    cfg = ControllerConfig(extinguish_distance=25)
    out = controller_step(ControllerState(Mode.APPROACH), frame(front=18, flame=True), cfg)
    assert out.next.mode is Mode.EXTINGUISH
    assert out.command.fan_on
    assert (out.command.left, out.command.right) == (PULSE_STOP, PULSE_STOP)


def test_approach_drives_forward_and_dodges_side_walls():
    out = controller_step(ControllerState(Mode.APPROACH), frame(front=60, flame=True), CFG)
    assert out.command == named_command(Maneuver.FORWARD) and out.next.mode is Mode.APPROACH
    out = controller_step(ControllerState(Mode.APPROACH), frame(front=60, left=8, right=50, flame=True), CFG)
    assert out.command == named_command(Maneuver.SPIN_RIGHT)


def test_scan_reacquires_or_gives_up():
    state = ControllerState(Mode.SCAN, scan_ticks_left=3)
    assert controller_step(state, frame(flame=True), CFG).next.mode is Mode.APPROACH
    out = controller_step(ControllerState(Mode.SCAN, scan_ticks_left=1), frame(), CFG)
    assert out.next.mode is Mode.WANDER
    assert out.command == named_command(Maneuver.SPIN_LEFT)


def test_extinguish_confirms_before_standing_down():
    cfg = ControllerConfig(extinguish_confirm_ticks=4)
    state = ControllerState(Mode.EXTINGUISH)
    for _ in range(3):
        out = controller_step(state, frame(flame=False), cfg)
        assert out.next.mode is Mode.EXTINGUISH and out.command.fan_on
        state = out.next
    # flame flickers back: counter resets
    state = controller_step(state, frame(flame=True), cfg).next
    assert state.extinguish_clear_ticks == 0
    for i in range(4):
        out = controller_step(state, frame(flame=False), cfg)
        state = out.next
    assert state.mode is Mode.WANDER
    assert not out.command.fan_on


def test_default_scan_budget_is_one_revolution():
    params = SimParams()
    assert default_scan_budget(params) == 76
    assert CFG.scan_budget_ticks == default_scan_budget(params)


def test_config_validation():
    with pytest.raises(ValueError):
        ControllerConfig(front_clear=0)
    with pytest.raises(ValueError):
        ControllerConfig(scan_budget_ticks=2.5)


def test_jitter_is_seeded_and_off_by_default():
    f = frame(tick=0)
    assert controller_step(ControllerState(), f, CFG).command == named_command(Maneuver.FORWARD)
    on = ControllerConfig(wander_jitter=True, jitter_seed=5)
    run_a = [controller_step(ControllerState(), frame(tick=t), on).command for t in range(800)]
    run_b = [controller_step(ControllerState(), frame(tick=t), on).command for t in range(800)]
    assert run_a == run_b
    assert any(c != named_command(Maneuver.FORWARD) for c in run_a)


# -- properties over arbitrary (state, frame) pairs

reading = st.one_of(st.none(), st.floats(0.5, 300))
states = st.builds(
    ControllerState,
    mode=st.sampled_from(list(Mode)),
    scan_ticks_left=st.integers(0, 200),
    extinguish_clear_ticks=st.integers(0, 200),
    scan_direction=st.sampled_from([1, -1]),
)
frames = st.builds(frame, reading, reading, reading, st.booleans(), st.integers(0, 10_000))
configs = st.builds(ControllerConfig, wander_jitter=st.booleans(), jitter_seed=st.integers(0, 1000))


@given(states, frames, configs)
def test_total_deterministic_and_fan_discipline(state, f, cfg):
    out = controller_step(state, f, cfg)
    assert out == controller_step(state, f, cfg)
    if out.command.fan_on:
        assert out.next.mode is Mode.EXTINGUISH
    if out.next.mode is not Mode.SCAN:
        assert out.next.scan_ticks_left == 0
    if out.next.mode is not Mode.EXTINGUISH:
        assert out.next.extinguish_clear_ticks == 0


@given(frames, configs)
def test_wander_never_drives_into_close_front(f, cfg):
    out = controller_step(ControllerState(), f, cfg)
    if out.next.mode is Mode.WANDER and f.front.clear_cm < cfg.front_clear:
        assert out.command != named_command(Maneuver.FORWARD)


@given(st.lists(st.builds(frame, reading, reading, reading, st.just(False)), min_size=1, max_size=200))
def test_scan_terminates_within_budget(dark_frames):
    cfg = ControllerConfig(scan_budget_ticks=20)
    state = controller_step(ControllerState(Mode.APPROACH), frame(flame=False), cfg).next
    consecutive = 1
    for f in dark_frames:
        state = controller_step(state, f, cfg).next
        if state.mode is not Mode.SCAN:
            break
        consecutive += 1
    assert consecutive <= cfg.scan_budget_ticks

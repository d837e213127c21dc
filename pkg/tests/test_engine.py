import math
from dataclasses import replace

import pytest

from avoider.actuators import BodyTwist, Maneuver, named_command
from avoider.controller import Mode
from avoider.engine import (
    ALL_FIRES_OUT, TIMEOUT, TRACE_HEADER, initial_state, integrate_motion, run, step, trace_from_csv,
    trace_to_csv, update_fires,
)
from avoider.scenario import Scenario, load_scenario
from avoider.world import FireSource, Pose, SimParams, Vec2, WallSegment, clearance

PARAMS = SimParams()


def test_euler_straight_step():
    pose, contact = integrate_motion(Pose.at(0, 0), BodyTwist(0.2, 0.0), 0.02, [], 0.09)
    assert (pose.x, pose.y) == pytest.approx((0.004, 0.0))
    assert not contact


def test_euler_turn_in_place():
    pose, contact = integrate_motion(Pose.at(1, 1), BodyTwist(0.0, math.pi), 0.02, [], 0.09)
    assert pose.heading == pytest.approx(0.0628, abs=1e-4)
    assert pose.position == Vec2(1, 1) and not contact


def test_contact_cancels_translation_keeps_rotation():
    wall = [WallSegment.from_coords(0.091, -1, 0.091, 1)]
    pose, contact = integrate_motion(Pose.at(0, 0), BodyTwist(0.2, 1.0), 0.02, wall, 0.09)
    assert contact
    assert pose.position == Vec2(0, 0)
    assert pose.heading == pytest.approx(0.02)


def test_update_fires_rules():
    fire = [FireSource.lit(0.2, 0)]
    pose = Pose.at(0, 0)
    assert update_fires(fire, pose, True, [], PARAMS, 0.02)[0].intensity == pytest.approx(0.98)
    assert update_fires(fire, pose, False, [], PARAMS, 0.02) == tuple(fire)
    wall = [WallSegment.from_coords(0.1, -1, 0.1, 1)]
    assert update_fires(fire, pose, True, wall, PARAMS, 0.02) == tuple(fire)
    far = [FireSource.lit(0.5, 0)]
    assert update_fires(far, pose, True, [], PARAMS, 0.02) == tuple(far)
    aside = [FireSource.lit(0.2, 0.2)]
    assert update_fires(aside, pose, True, [], PARAMS, 0.02) == tuple(aside)
    nearly_out = [FireSource(Vec2(0.2, 0), 0.01, 1.0)]
    assert update_fires(nearly_out, pose, True, [], PARAMS, 0.02)[0].intensity == 0.0


def open_scenario(fires=(), duration=1.0, **kw):
    return Scenario(walls=(), fires=fires, robot_start=Pose.at(0, 0), duration_s=duration, **kw)


def test_first_step_in_empty_arena_drives_forward():
    sim, record = step(initial_state(open_scenario()), open_scenario())
    assert record.mode == Mode.WANDER.value
    assert (record.pulse_left, record.pulse_right) == (3500, 1000)
    assert sim.pose.x > 0 and sim.tick == 1


def test_fire_ten_cm_ahead_reads_low():
    sc = open_scenario(fires=(FireSource.lit(0.10, 0),))
    _, record = step(initial_state(sc), sc)
    assert record.v_ldr == pytest.approx(0.85)
    assert record.comparator == 0


def test_dead_fires_stay_dark():
    sc = open_scenario(fires=(FireSource(Vec2(0.1, 0), 0.0, 1.0),), duration=0.5)
    trace, result = run(sc)
    assert all(r.comparator == 1 for r in trace)
    assert result.outcome == ALL_FIRES_OUT


def test_zero_fire_episode_runs_full_duration():
    trace, result = run(open_scenario(duration=1.0))
    assert len(trace) == 50
    assert result.outcome == ALL_FIRES_OUT
    assert result.fires_extinguished == 0


def test_fire_out_of_reach_times_out():
    sc = open_scenario(fires=(FireSource.lit(-1.0, 0.0),), duration=2.0)
    trace, result = run(sc)
    assert result.outcome == TIMEOUT and result.ticks_elapsed == 100
    assert all(r.fire_intensities == (1.0,) for r in trace)


def test_extinguish_episode_stands_down(scenario_path):
    sc = load_scenario(scenario_path("canonical_arena").read_text())
    trace, result = run(sc)
    assert result.outcome == ALL_FIRES_OUT
    out_at = next(i for i, r in enumerate(trace) if r.fire_intensities == (0.0,))
    # the run keeps going for the confirm window once the fire is out
    assert len(trace) - out_at == sc.controller.extinguish_confirm_ticks
    assert trace[-1].mode == Mode.WANDER.value and trace[-1].fan == 0
    modes = [r.mode for r in trace]
    assert "APPROACH" in modes and "EXTINGUISH" in modes


def test_trace_invariants(scenario_path):
    sc = load_scenario(scenario_path("canonical_arena").read_text())
    trace, _ = run(sc)
    levels = [r.fire_intensities[0] for r in trace]
    assert all(a >= b for a, b in zip(levels, levels[1:]))
    assert all(0.0 <= v <= 1.0 for v in levels)
    assert all(clearance(Vec2(r.x, r.y), sc.walls) >= sc.params.robot_radius - 1e-9 for r in trace)
    assert all((r.fan == 1) == (r.mode == "EXTINGUISH") for r in trace if r.fan)
    assert [r.t for r in trace] == sorted(r.t for r in trace)


def test_halving_dt_straight_line():
    full = open_scenario(duration=1.0)
    half = open_scenario(duration=1.0, params=SimParams(dt=0.01))
    a, b = run(full)[0][-1], run(half)[0][-1]
    # final recorded positions differ by exactly one step of travel: O(dt)
    top = PARAMS.wheel_radius * PARAMS.servo_max_speed
    assert a.x == pytest.approx(49 * 0.02 * top)
    assert b.x == pytest.approx(99 * 0.01 * top)
    assert abs(a.x - b.x) == pytest.approx(0.01 * top)
    assert a.heading == b.heading == 0.0


def test_trace_csv_format_and_round_trip(scenario_path):
    sc = load_scenario(scenario_path("canonical_arena").read_text())
    trace, _ = run(sc)
    text = trace_to_csv(trace)
    lines = text.splitlines()
    assert lines[0] == "t,x,y,heading,d_front_cm,d_right_cm,d_left_cm,v_ldr,comp,mode,pulse_left,pulse_right,fan,fires"
    assert len(lines) == len(trace) + 1
    assert tuple(lines[0].split(",")) == TRACE_HEADER
    back = trace_from_csv(text)
    assert [r.mode for r in back] == [r.mode for r in trace]
    assert back[-1].x == pytest.approx(trace[-1].x, rel=1e-5)


def test_timeouts_serialize_as_empty_fields():
    trace, _ = run(open_scenario(duration=0.04))
    row = trace_to_csv(trace).splitlines()[1].split(",")
    assert row[4:7] == ["", "", ""]
    assert row[-1] == ""

"""Fixed-timestep episode runner: sense, decide, act, log.

A run is a pure function of its Scenario. Each tick the robot reads its
sensors, the controller picks a command, the body moves one explicit-Euler
step (translation is cancelled on wall contact), and the fan works on any
fire inside its cone.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .actuators import BodyTwist, command_twist
from .controller import ControllerState, Mode, controller_step
from .scenario import Scenario
from .sensors import sense
from .world import FireSource, Pose, SimParams, Vec2, WallSegment, clearance, line_of_sight, normalize_angle

ALL_FIRES_OUT = "ALL_FIRES_OUT"
TIMEOUT = "TIMEOUT"

TRACE_HEADER = (
    "t", "x", "y", "heading", "d_front_cm", "d_right_cm", "d_left_cm",
    "v_ldr", "comp", "mode", "pulse_left", "pulse_right", "fan", "fires",
)


@dataclass(frozen=True)
class SimState:
    pose: Pose
    fires: tuple
    tick: int = 0
    controller_state: ControllerState = ControllerState()
    collisions: int = 0


@dataclass(frozen=True)
class TraceRecord:
    """One control tick: what the robot saw at time ``t`` and what it commanded.

    ``comparator`` is the comparator output level: 1 high (no flame), 0 low.
    """

    t: float
    x: float
    y: float
    heading: float
    d_front: Optional[float]
    d_right: Optional[float]
    d_left: Optional[float]
    v_ldr: float
    comparator: int
    mode: str
    pulse_left: int
    pulse_right: int
    fan: int
    fire_intensities: tuple


@dataclass(frozen=True)
class SimResult:
    outcome: str
    ticks_elapsed: int
    collisions: int
    fires_extinguished: int

    def summary(self) -> str:
        return (
            f"outcome={self.outcome} ticks={self.ticks_elapsed} "
            f"collisions={self.collisions} fires_extinguished={self.fires_extinguished}"
        )


def integrate_motion(
    pose: Pose,
    twist: BodyTwist,
    dt: float,
    walls: Sequence[WallSegment],
    robot_radius: float,
) -> tuple:
    """Explicit Euler step; returns ``(new_pose, contact)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    heading = normalize_angle(pose.heading + twist.angular * dt)
    if twist.linear == 0.0:
        return Pose(pose.position, heading), False
    step = twist.linear * dt
    moved = Vec2(pose.x + step * math.cos(pose.heading), pose.y + step * math.sin(pose.heading))
    if clearance(moved, walls) < robot_radius:
        return Pose(pose.position, heading), True
    return Pose(moved, heading), False


def _in_fan_cone(pose: Pose, fire: FireSource, walls, params: SimParams) -> bool:
    dx, dy = fire.position.x - pose.x, fire.position.y - pose.y
    dist = math.hypot(dx, dy)
    if dist > params.fan_range:
        return False
    if dist > 0.0 and abs(normalize_angle(math.atan2(dy, dx) - pose.heading)) > params.fan_half_angle:
        return False
    return line_of_sight(pose.position, fire.position, walls)


def update_fires(
    fires: Sequence[FireSource],
    pose: Pose,
    fan_on: bool,
    walls: Sequence[WallSegment],
    params: SimParams,
    dt: float,
) -> tuple:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not fan_on:
        return tuple(fires)
    out = []
    for fire in fires:
        if fire.intensity > 0.0 and _in_fan_cone(pose, fire, walls, params):
            fire = replace(fire, intensity=max(0.0, fire.intensity - params.extinguish_rate * dt))
        out.append(fire)
    return tuple(out)


def initial_state(scenario: Scenario) -> SimState:
    return SimState(pose=scenario.robot_start, fires=scenario.fires)


def step(sim: SimState, scenario: Scenario) -> tuple:
    """Advance one tick; returns ``(next_state, record)``."""
    params = scenario.params
    walls = scenario.walls
    config = replace(scenario.controller, jitter_seed=scenario.seed)
    frame = sense(sim.pose, walls, sim.fires, params, scenario.calibration, sim.tick)
    out = controller_step(sim.controller_state, frame, config)
    cmd = out.command
    record = TraceRecord(
        t=sim.tick * params.dt,
        x=sim.pose.x,
        y=sim.pose.y,
        heading=sim.pose.heading,
        d_front=frame.front.distance,
        d_right=frame.right.distance,
        d_left=frame.left.distance,
        v_ldr=frame.light.v_ldr,
        comparator=0 if frame.light.comparator_low else 1,
        mode=out.next.mode.value,
        pulse_left=cmd.left,
        pulse_right=cmd.right,
        fan=int(cmd.fan_on),
        fire_intensities=tuple(f.intensity for f in sim.fires),
    )
    pose, contact = integrate_motion(sim.pose, command_twist(cmd, params), params.dt, walls, params.robot_radius)
    fires = update_fires(sim.fires, pose, cmd.fan_on, walls, params, params.dt)
    return SimState(pose, fires, sim.tick + 1, out.next, sim.collisions + contact), record


def _all_out(fires: Iterable[FireSource]) -> bool:
    return all(f.intensity == 0.0 for f in fires)


def run(scenario: Scenario) -> tuple:
    """Run one episode; returns ``(trace, SimResult)``.

    Stops at ``duration_s`` or, once every fire is out, after
    ``extinguish_confirm_ticks`` more ticks so the controller can stand down.
    Scenarios without fires run the full duration.
    """
    params = scenario.params
    max_ticks = int(math.floor(scenario.duration_s / params.dt + 1e-9))
    sim = initial_state(scenario)
    trace = []
    out_since = None
    while sim.tick < max_ticks:
        sim, record = step(sim, scenario)
        trace.append(record)
        if scenario.fires and out_since is None and _all_out(sim.fires):
            out_since = sim.tick
        if out_since is not None and sim.tick - out_since >= scenario.controller.extinguish_confirm_ticks:
            break
    outcome = ALL_FIRES_OUT if _all_out(sim.fires) else TIMEOUT
    extinguished = sum(1 for f in sim.fires if f.intensity == 0.0)
    return trace, SimResult(outcome, sim.tick, sim.collisions, extinguished)


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6g}"


def trace_to_csv(trace: Iterable[TraceRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for r in trace:
        writer.writerow((
            _fmt(r.t), _fmt(r.x), _fmt(r.y), _fmt(r.heading),
            _fmt(r.d_front), _fmt(r.d_right), _fmt(r.d_left),
            _fmt(r.v_ldr), r.comparator, r.mode, r.pulse_left, r.pulse_right, r.fan,
            ";".join(_fmt(i) for i in r.fire_intensities),
        ))
    return buf.getvalue()


def _opt(text: str) -> Optional[float]:
    return float(text) if text != "" else None


def trace_from_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != TRACE_HEADER:
        raise ValueError("not a trace CSV: unexpected header")
    records = []
    for row in reader:
        if not row:
            continue
        records.append(TraceRecord(
            t=float(row[0]), x=float(row[1]), y=float(row[2]), heading=float(row[3]),
            d_front=_opt(row[4]), d_right=_opt(row[5]), d_left=_opt(row[6]),
            v_ldr=float(row[7]), comparator=int(row[8]), mode=row[9],
            pulse_left=int(row[10]), pulse_right=int(row[11]), fan=int(row[12]),
            fire_intensities=tuple(float(v) for v in row[13].split(";")) if row[13] else (),
        ))
    return records

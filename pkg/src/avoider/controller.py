"""The robot's firmware loop as a pure finite-state machine.

Modes:

* WANDER      drive around, steering away from obstacles with the three PINGs
* APPROACH    comparator went low, close in on the flame
* SCAN        flame lost, rotate the body until it shows up again
* EXTINGUISH  parked at the flame with the fan running

``controller_step`` sees nothing but a SensorFrame and returns the next state
plus one ActuatorCommand. It keeps no hidden state and never touches the world.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, fields

from .actuators import ActuatorCommand, Maneuver, named_command, spin_rate
from .sensors import SensorFrame
from .world import SimParams


class Mode(str, enum.Enum):
    WANDER = "WANDER"
    APPROACH = "APPROACH"
    SCAN = "SCAN"
    EXTINGUISH = "EXTINGUISH"


@dataclass(frozen=True)
class ControllerConfig:
    front_clear: float = 20.0
    side_clear: float = 15.0
    extinguish_distance: float = 25.0
    scan_budget_ticks: int = 76
    extinguish_confirm_ticks: int = 60
    side_critical: float = 12.0
    wander_jitter: bool = False
    jitter_period_ticks: int = 400
    jitter_max_ticks: int = 76
    jitter_seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("wander_jitter", "jitter_seed"):
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                raise ValueError(f"controller.{f.name} must be positive, got {value!r}")
        for name in ("scan_budget_ticks", "extinguish_confirm_ticks", "jitter_period_ticks", "jitter_max_ticks"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ValueError(f"controller.{name} must be an integer")
        if not isinstance(self.wander_jitter, bool):
            raise ValueError("controller.wander_jitter must be a boolean")
        if isinstance(self.jitter_seed, bool) or not isinstance(self.jitter_seed, int) or self.jitter_seed < 0:
            raise ValueError("controller.jitter_seed must be an unsigned integer")


def default_scan_budget(params: SimParams) -> int:
    """Ticks needed for one full in-place revolution."""
    return math.ceil(2 * math.pi / (spin_rate(params) * params.dt))


@dataclass(frozen=True)
class ControllerState:
    mode: Mode = Mode.WANDER
    scan_ticks_left: int = 0
    extinguish_clear_ticks: int = 0
    scan_direction: int = 1


@dataclass(frozen=True)
class StepOutput:
    next: ControllerState
    command: ActuatorCommand


_WANDER = ControllerState()
_APPROACH = ControllerState(Mode.APPROACH)


def classify_obstacles(frame: SensorFrame, config: ControllerConfig) -> Maneuver:
    """Three-rangefinder avoidance rule; a timeout counts as 300 cm of room."""
    if frame.front.clear_cm >= config.front_clear:
        return Maneuver.FORWARD
    left, right = frame.left.clear_cm, frame.right.clear_cm
    if max(left, right) >= config.side_clear:
        return Maneuver.SPIN_RIGHT if right > left else Maneuver.SPIN_LEFT
    return Maneuver.REVERSE


def _spin(direction: int) -> Maneuver:
    return Maneuver.SPIN_LEFT if direction > 0 else Maneuver.SPIN_RIGHT


def _side_reflex(frame: SensorFrame, limit: float):
    left, right = frame.left.clear_cm, frame.right.clear_cm
    if min(left, right) >= limit or left == right:
        return None
    return Maneuver.SPIN_RIGHT if left < right else Maneuver.SPIN_LEFT


def _jitter(frame: SensorFrame, config: ControllerConfig):
    window, phase = divmod(frame.tick, config.jitter_period_ticks)
    rng = random.Random(f"{config.jitter_seed}:{window}")
    turn_ticks = rng.randint(0, config.jitter_max_ticks)
    direction = rng.choice((1, -1))
    return _spin(direction) if phase < turn_ticks else None


def _wander_maneuver(frame: SensorFrame, config: ControllerConfig) -> Maneuver:
    maneuver = classify_obstacles(frame, config)
    if maneuver is not Maneuver.FORWARD:
        return maneuver
    reflex = _side_reflex(frame, config.side_critical)
    if reflex is not None:
        return reflex
    if config.wander_jitter:
        return _jitter(frame, config) or Maneuver.FORWARD
    return Maneuver.FORWARD


def _approach_maneuver(frame: SensorFrame, config: ControllerConfig) -> Maneuver:
    reflex = _side_reflex(frame, config.side_critical)
    return reflex or Maneuver.FORWARD


def _target_in_reach(frame: SensorFrame, config: ControllerConfig) -> bool:
    front = frame.front.distance
    return front is not None and front <= config.extinguish_distance


def controller_step(state: ControllerState, frame: SensorFrame, config: ControllerConfig) -> StepOutput:
    """One pass of the firmware loop: decide the next mode and the servo/fan command."""
    flame = frame.light.comparator_low
    mode = state.mode

    if mode is Mode.WANDER:
        if flame:
            return StepOutput(_APPROACH, named_command(_approach_maneuver(frame, config)))
        return StepOutput(_WANDER, named_command(_wander_maneuver(frame, config)))

    if mode is Mode.APPROACH:
        if not flame:
            nxt = ControllerState(Mode.SCAN, scan_ticks_left=config.scan_budget_ticks, scan_direction=1)
            return StepOutput(nxt, named_command(_spin(1)))
        if _target_in_reach(frame, config):
            return StepOutput(ControllerState(Mode.EXTINGUISH), named_command(Maneuver.STOP, fan_on=True))
        return StepOutput(_APPROACH, named_command(_approach_maneuver(frame, config)))

    if mode is Mode.SCAN:
        if flame:
            return StepOutput(_APPROACH, named_command(_approach_maneuver(frame, config)))
        left = state.scan_ticks_left - 1
        cmd = named_command(_spin(state.scan_direction))
        if left <= 0:
            return StepOutput(_WANDER, cmd)
        return StepOutput(
            ControllerState(Mode.SCAN, scan_ticks_left=left, scan_direction=state.scan_direction), cmd
        )

    # EXTINGUISH
    clear = 0 if flame else state.extinguish_clear_ticks + 1
    if clear >= config.extinguish_confirm_ticks:
        return StepOutput(_WANDER, named_command(Maneuver.STOP))
    return StepOutput(
        ControllerState(Mode.EXTINGUISH, extinguish_clear_ticks=clear),
        named_command(Maneuver.STOP, fan_on=True),
    )

"""Continuous-rotation servo drive and the fan line.

Pulse widths are the microcontroller's pulse-out counts: 1000 spins a servo
fully clockwise, 3500 fully counter-clockwise, and the midpoint 2250 stops it.
The two servos are mounted mirrored, so driving forward means the right servo
turns CW while the left turns CCW.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .world import SimParams

PULSE_CW = 1000
PULSE_CCW = 3500
PULSE_STOP = (PULSE_CW + PULSE_CCW) // 2
_HALF_SPAN = (PULSE_CCW - PULSE_CW) / 2


class Maneuver(str, enum.Enum):
    FORWARD = "FORWARD"
    REVERSE = "REVERSE"
    SPIN_LEFT = "SPIN_LEFT"
    SPIN_RIGHT = "SPIN_RIGHT"
    STOP = "STOP"


@dataclass(frozen=True)
class ActuatorCommand:
    left: int
    right: int
    fan_on: bool = False

    def __post_init__(self):
        if self.left <= 0 or self.right <= 0:
            raise ValueError(f"pulse widths must be positive, got {self.left}/{self.right}")


@dataclass(frozen=True)
class WheelVelocities:
    v_left: float
    v_right: float


@dataclass(frozen=True)
class BodyTwist:
    linear: float
    angular: float


def servo_normalized(width: float) -> float:
    """Map a pulse width to a signed speed fraction (+1 full CCW, -1 full CW)."""
    n = (width - PULSE_STOP) / _HALF_SPAN
    return max(-1.0, min(1.0, n))


def wheel_velocities(cmd: ActuatorCommand, params: SimParams) -> WheelVelocities:
    top = params.wheel_radius * params.servo_max_speed
    return WheelVelocities(
        v_left=servo_normalized(cmd.left) * top,
        v_right=-servo_normalized(cmd.right) * top,
    )


def body_twist(wheels: WheelVelocities, wheelbase: float) -> BodyTwist:
    if wheelbase <= 0:
        raise ValueError("wheelbase must be positive")
    return BodyTwist(
        linear=(wheels.v_left + wheels.v_right) / 2.0,
        angular=(wheels.v_right - wheels.v_left) / wheelbase,
    )


_PULSES = {
    Maneuver.FORWARD: (PULSE_CCW, PULSE_CW),
    Maneuver.REVERSE: (PULSE_CW, PULSE_CCW),
    Maneuver.SPIN_LEFT: (PULSE_CW, PULSE_CW),
    Maneuver.SPIN_RIGHT: (PULSE_CCW, PULSE_CCW),
    Maneuver.STOP: (PULSE_STOP, PULSE_STOP),
}


def named_command(maneuver: Maneuver, fan_on: bool = False) -> ActuatorCommand:
    left, right = _PULSES[Maneuver(maneuver)]
    return ActuatorCommand(left, right, fan_on)


def command_twist(cmd: ActuatorCommand, params: SimParams) -> BodyTwist:
    return body_twist(wheel_velocities(cmd, params), params.wheelbase)


def spin_rate(params: SimParams) -> float:
    """Magnitude of the in-place turn rate produced by a SPIN command, rad/s."""
    return abs(command_twist(named_command(Maneuver.SPIN_LEFT), params).angular)

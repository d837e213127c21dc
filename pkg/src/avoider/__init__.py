"""Simulation of a fire-extinguishing obstacle-avoider robot.

Three PING ultrasonic rangefinders, an LDR/comparator flame detector and two
continuous-rotation servos feed a small firmware-style state machine that
wanders, avoids walls, homes in on a candle and blows it out with a fan.
"""

from .actuators import ActuatorCommand, Maneuver, named_command
from .controller import ControllerConfig, ControllerState, Mode, controller_step
from .engine import SimResult, TraceRecord, run, trace_to_csv
from .scenario import Scenario, ScenarioError, dump_scenario, load_scenario
from .sensors import CalibrationTable, SensorFrame, sense
from .world import FireSource, Pose, SimParams, Vec2, WallSegment

__all__ = [
    "ActuatorCommand", "CalibrationTable", "ControllerConfig", "ControllerState", "FireSource",
    "Maneuver", "Mode", "Pose", "Scenario", "ScenarioError", "SensorFrame", "SimParams",
    "SimResult", "TraceRecord", "Vec2", "WallSegment", "controller_step", "dump_scenario",
    "load_scenario", "named_command", "run", "sense", "trace_to_csv",
]

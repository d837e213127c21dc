"""Scenario documents: JSON in, validated immutable Scenario out (and back).

Document layout::

    {
      "walls": [[x1, y1, x2, y2], {"segment": [x1, y1, x2, y2], "tag": "red"}],
      "fires": [{"x": 2.2, "y": 2.2, "intensity": 1.0}],
      "robot": {"x": 0.5, "y": 0.5, "heading_deg": 0},
      "params": {"dt": 0.02},
      "controller": {"front_clear": 20},
      "calibration": {"ping_front": [[10, 0.14], [200, 0.62]]},
      "seed": 0,
      "duration_s": 120
    }

Only ``robot`` and ``duration_s`` are required.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Mapping, Optional

from .controller import ControllerConfig, default_scan_budget
from .sensors import DEFAULT_TABLES, CalibrationError, CalibrationTable
from .world import FireSource, Pose, SimParams, Vec2, WallSegment, clearance

_TOP_KEYS = {"walls", "fires", "robot", "params", "controller", "calibration", "seed", "duration_s"}


class ScenarioError(ValueError):
    """Invalid scenario document. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Scenario:
    walls: tuple
    fires: tuple
    robot_start: Pose
    params: SimParams = field(default_factory=SimParams)
    seed: int = 0
    duration_s: float = 60.0
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    calibration: Mapping[str, CalibrationTable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "fires", tuple(self.fires))
        if not self.duration_s > 0:
            raise ScenarioError("duration_s", f"must be > 0, got {self.duration_s}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ScenarioError("seed", f"must be an unsigned integer, got {self.seed!r}")
        for name in self.calibration:
            if name not in DEFAULT_TABLES:
                raise ScenarioError(f"calibration.{name}", "unknown table")
        gap = clearance(self.robot_start.position, self.walls)
        if gap < self.params.robot_radius:
            raise ScenarioError(
                "robot",
                f"start clearance {gap:.4f} m is less than robot radius {self.params.robot_radius} m",
            )

    @property
    def tables(self) -> dict:
        return {**DEFAULT_TABLES, **self.calibration}


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(where, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(where, "must be finite")
    return value


def _object(value: Any, where: str, allowed: set, required: set = frozenset()) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(where, "expected an object")
    for key in value:
        if key not in allowed:
            raise ScenarioError(f"{where}.{key}" if where else key, "unknown key")
    for key in required:
        if key not in value:
            raise ScenarioError(f"{where}.{key}" if where else key, "missing required key")
    return value


def _parse_wall(raw: Any, where: str) -> WallSegment:
    tag = ""
    if isinstance(raw, dict):
        _object(raw, where, {"segment", "tag"}, {"segment"})
        tag = raw.get("tag", "")
        if not isinstance(tag, str):
            raise ScenarioError(f"{where}.tag", "must be a string")
        raw = raw["segment"]
    if not isinstance(raw, list) or len(raw) != 4:
        raise ScenarioError(where, "expected [x1, y1, x2, y2]")
    x1, y1, x2, y2 = (_number(v, where) for v in raw)
    try:
        return WallSegment.from_coords(x1, y1, x2, y2, tag)
    except ValueError:
        raise ScenarioError(where, "zero-length wall") from None


def _parse_fire(raw: Any, where: str) -> FireSource:
    _object(raw, where, {"x", "y", "intensity", "initial_intensity"}, {"x", "y", "intensity"})
    intensity = _number(raw["intensity"], f"{where}.intensity")
    initial = _number(raw.get("initial_intensity", intensity), f"{where}.initial_intensity")
    if not initial > 0:
        raise ScenarioError(f"{where}.intensity", "initial intensity must be > 0")
    if not 0 <= intensity <= initial:
        raise ScenarioError(f"{where}.intensity", f"must lie in [0, {initial}]")
    return FireSource(Vec2(_number(raw["x"], f"{where}.x"), _number(raw["y"], f"{where}.y")), intensity, initial)


def _parse_params(raw: Any) -> SimParams:
    names = {f.name for f in fields(SimParams)}
    _object(raw, "params", names)
    values = {k: _number(v, f"params.{k}") for k, v in raw.items()}
    for key, value in values.items():
        if not value > 0:
            raise ScenarioError(f"params.{key}", f"must be > 0, got {value}")
    if values.get("dt", SimParams.dt) > 0.1:
        raise ScenarioError("params.dt", "must be <= 0.1 s")
    return SimParams(**values)


def _parse_controller(raw: Any, params: SimParams) -> ControllerConfig:
    kinds = {f.name: f.type for f in fields(ControllerConfig)}
    _object(raw, "controller", set(kinds))
    values = {}
    for key, value in raw.items():
        where = f"controller.{key}"
        if key == "wander_jitter":
            if not isinstance(value, bool):
                raise ScenarioError(where, "expected true or false")
        elif key.endswith("_ticks") or key == "jitter_seed":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(where, f"expected an integer, got {value!r}")
        else:
            value = _number(value, where)
        values[key] = value
    values.setdefault("scan_budget_ticks", default_scan_budget(params))
    try:
        return ControllerConfig(**values)
    except ValueError as exc:
        raise ScenarioError("controller", str(exc)) from None


def _parse_calibration(raw: Any) -> dict:
    _object(raw, "calibration", set(DEFAULT_TABLES))
    tables = {}
    for name, knots in raw.items():
        where = f"calibration.{name}"
        if not isinstance(knots, list) or not all(isinstance(k, list) and len(k) == 2 for k in knots):
            raise ScenarioError(where, "expected a list of [distance_cm, volts] pairs")
        try:
            tables[name] = CalibrationTable(
                tuple((_number(d, where), _number(v, where)) for d, v in knots)
            )
        except CalibrationError as exc:
            raise ScenarioError(where, str(exc)) from None
    return tables


def scenario_from_dict(doc: Any) -> Scenario:
    _object(doc, "", _TOP_KEYS, {"robot", "duration_s"})
    walls = doc.get("walls", [])
    if not isinstance(walls, list):
        raise ScenarioError("walls", "expected an array")
    fires = doc.get("fires", [])
    if not isinstance(fires, list):
        raise ScenarioError("fires", "expected an array")
    robot = _object(doc["robot"], "robot", {"x", "y", "heading_deg"}, {"x", "y"})
    params = _parse_params(doc.get("params", {}))
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed", f"must be an unsigned integer, got {seed!r}")
    duration = _number(doc["duration_s"], "duration_s")
    if not duration > 0:
        raise ScenarioError("duration_s", f"must be > 0, got {duration}")
    start = Pose(
        Vec2(_number(robot["x"], "robot.x"), _number(robot["y"], "robot.y")),
        math.radians(_number(robot.get("heading_deg", 0.0), "robot.heading_deg")),
    )
    return Scenario(
        walls=tuple(_parse_wall(w, f"walls[{i}]") for i, w in enumerate(walls)),
        fires=tuple(_parse_fire(f, f"fires[{i}]") for i, f in enumerate(fires)),
        robot_start=start,
        params=params,
        seed=seed,
        duration_s=duration,
        controller=_parse_controller(doc.get("controller", {}), params),
        calibration=_parse_calibration(doc.get("calibration", {})),
    )


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("document", f"parse error: {exc}") from None
    return scenario_from_dict(doc)


def scenario_to_dict(scenario: Scenario) -> dict:
    walls = []
    for wall in scenario.walls:
        coords = list(wall.coords)
        walls.append({"segment": coords, "tag": wall.tag} if wall.tag else coords)
    fires = []
    for fire in scenario.fires:
        entry = {"x": fire.position.x, "y": fire.position.y, "intensity": fire.intensity}
        if fire.intensity != fire.initial_intensity:
            entry["initial_intensity"] = fire.initial_intensity
        fires.append(entry)
    doc = {
        "walls": walls,
        "fires": fires,
        "robot": {
            "x": scenario.robot_start.x,
            "y": scenario.robot_start.y,
            "heading_deg": math.degrees(scenario.robot_start.heading),
        },
        "params": asdict(scenario.params),
        "controller": asdict(scenario.controller),
        "seed": scenario.seed,
        "duration_s": scenario.duration_s,
    }
    if scenario.calibration:
        doc["calibration"] = {name: [list(k) for k in t.knots] for name, t in scenario.calibration.items()}
    return doc


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def with_seed(scenario: Scenario, seed: Optional[int]) -> Scenario:
    return scenario if seed is None else replace(scenario, seed=seed)

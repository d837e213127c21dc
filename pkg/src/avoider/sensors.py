"""PING ultrasonic rangefinders and the LDR/comparator light channel.

Calibration curves are piecewise-linear tables of (distance_cm, volts).
The built-in tables are the bench measurements of the original robot: three
PING columns (front, right, left) and the LDR divider voltage against candle
distance.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .world import FireSource, Pose, SimParams, Vec2, WallSegment, line_of_sight, normalize_angle, raycast

# comparator analog output levels, as measured on the bench
V_OUT_LOW = 0.12
V_OUT_HIGH = 3.50
PING_CEILING_CM = 300.0


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationTable:
    knots: tuple

    def __post_init__(self):
        knots = tuple((float(d), float(v)) for d, v in self.knots)
        if not knots:
            raise CalibrationError("calibration table needs at least one knot")
        for (d0, v0), (d1, v1) in zip(knots, knots[1:]):
            if not d1 > d0:
                raise CalibrationError(f"distances must be strictly increasing ({d0} then {d1})")
            if v1 < v0:
                raise CalibrationError(f"voltages must be nondecreasing ({v0} then {v1})")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_distances", [d for d, _ in knots])

    @property
    def distances(self) -> list:
        return list(self._distances)

    @property
    def voltages(self) -> list:
        return [v for _, v in self.knots]

    @property
    def span(self) -> tuple:
        return self.knots[0][0], self.knots[-1][0]


def _table(distances: Sequence[float], volts: Sequence[float]) -> CalibrationTable:
    return CalibrationTable(tuple(zip(distances, volts)))


_PING_DISTANCES = (10, 20, 30, 40, 50, 80, 100, 200)
PING_FRONT = _table(_PING_DISTANCES, (0.14, 0.16, 0.18, 0.20, 0.23, 0.30, 0.34, 0.62))
PING_RIGHT = _table(_PING_DISTANCES, (0.15, 0.18, 0.19, 0.21, 0.24, 0.30, 0.36, 0.61))
PING_LEFT = _table(_PING_DISTANCES, (0.16, 0.19, 0.20, 0.22, 0.24, 0.30, 0.36, 0.58))
LDR = _table((10, 20, 30, 40, 50, 80, 100), (0.85, 1.43, 1.98, 2.41, 2.66, 3.26, 3.43))

DEFAULT_TABLES = {
    "ping_front": PING_FRONT,
    "ping_right": PING_RIGHT,
    "ping_left": PING_LEFT,
    "ldr": LDR,
}

# comparator bench rows: (potentiometer ohm, distance cm, V_LDR, V_ref, V_out, LED)
COMPARATOR_BENCH = (
    (650, 10, 0.85, 1.47, 0.12, "Off"),
    (650, 20, 1.43, 1.46, 0.13, "Off"),
    (650, 30, 1.98, 1.49, 3.50, "On"),
    (650, 40, 2.41, 1.48, 3.50, "On"),
    (650, 50, 2.66, 1.47, 3.49, "On"),
    (650, 80, 3.26, 1.48, 3.50, "On"),
    (650, 100, 3.43, 1.48, 3.50, "On"),
)


def interp(table: CalibrationTable, distance: float) -> float:
    """Piecewise-linear voltage at ``distance`` cm.

    Outside the table the end segments are extended linearly; below the first
    knot the result is clamped at 0 V.
    """
    knots = table.knots
    if len(knots) == 1:
        return knots[0][1]
    ds = table._distances
    i = bisect.bisect_right(ds, distance)
    if i <= 0:
        (d0, v0), (d1, v1) = knots[0], knots[1]
        return max(0.0, v0 + (distance - d0) * (v1 - v0) / (d1 - d0))
    if i >= len(knots):
        (d0, v0), (d1, v1) = knots[-2], knots[-1]
        if distance == d1:
            return v1
    else:
        (d0, v0), (d1, v1) = knots[i - 1], knots[i]
        if distance == d0:
            return v0
    return v0 + (distance - d0) * (v1 - v0) / (d1 - d0)


def fit_line(table) -> tuple:
    """Ordinary least-squares line through the knots.

    Accepts a CalibrationTable or any sequence of (distance, volts) pairs and
    returns ``(slope, intercept, max_residual)``.
    """
    knots = table.knots if isinstance(table, CalibrationTable) else tuple(table)
    if len(knots) < 2:
        raise CalibrationError("fit_line needs at least two knots")
    n = len(knots)
    mean_d = math.fsum(d for d, _ in knots) / n
    mean_v = math.fsum(v for _, v in knots) / n
    sxx = math.fsum((d - mean_d) ** 2 for d, _ in knots)
    if sxx == 0.0:
        raise CalibrationError("degenerate table: all distances equal")
    sxy = math.fsum((d - mean_d) * (v - mean_v) for d, v in knots)
    slope = sxy / sxx
    intercept = mean_v - slope * mean_d
    max_residual = max(abs(slope * d + intercept - v) for d, v in knots)
    return slope, intercept, max_residual


def load_table_csv(text: str) -> CalibrationTable:
    """Parse a ``distance_cm,volts`` CSV document into a table."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and not row[0].lstrip().startswith("#")]
    if not rows or [c.strip() for c in rows[0]] != ["distance_cm", "volts"]:
        raise CalibrationError("calibration CSV must start with header 'distance_cm,volts'")
    knots = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CalibrationError(f"row {lineno}: expected 2 columns, got {len(row)}")
        try:
            knots.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise CalibrationError(f"row {lineno}: {exc}") from None
    return CalibrationTable(tuple(knots))


def dump_table_csv(table: CalibrationTable) -> str:
    lines = ["distance_cm,volts"]
    lines.extend(f"{d:g},{v:g}" for d, v in table.knots)
    return "\n".join(lines) + "\n"


def echo_time_us(distance: float, sound_speed: float = 340.0) -> float:
    """Round-trip echo time in microseconds for a target ``distance`` cm away."""
    return 2.0 * (distance / 100.0) / sound_speed * 1e6


@dataclass(frozen=True)
class SensorMount:
    id: str
    bearing: float


MOUNTS = {
    "front": SensorMount("front", 0.0),
    "right": SensorMount("right", -math.pi / 2),
    "left": SensorMount("left", math.pi / 2),
}


@dataclass(frozen=True)
class PingReading:
    distance: Optional[float]  # cm; None on timeout
    echo_time: Optional[float]  # us
    voltage: float

    @property
    def clear_cm(self) -> float:
        """Distance with a timeout read as the sensor ceiling."""
        return PING_CEILING_CM if self.distance is None else self.distance


@dataclass(frozen=True)
class LightReading:
    v_ldr: float
    comparator_low: bool
    v_out: float


@dataclass(frozen=True)
class SensorFrame:
    front: PingReading
    right: PingReading
    left: PingReading
    light: LightReading
    tick: int = 0


def ping_measure(
    pose: Pose,
    mount: SensorMount,
    walls: Sequence[WallSegment],
    params: SimParams,
    table: CalibrationTable,
    targets: Iterable[Vec2] = (),
) -> PingReading:
    """Range reading of one PING sensor.

    The beam is three rays at the mount bearing and +/- the beam half-angle;
    the nearest wall hit wins. Point ``targets`` (candles) echo when they sit
    inside the beam cone with a clear line of sight.
    """
    origin = pose.position
    axis = pose.heading + mount.bearing
    half = params.ping_beam_half_angle
    max_range = params.ping_max_range
    nearest = None
    for offset in (-half, 0.0, half):
        hit = raycast(origin, Vec2.from_angle(axis + offset), walls, max_range)
        if hit is not None and hit > 0.0 and (nearest is None or hit < nearest):
            nearest = hit
    for target in targets:
        dx, dy = target.x - origin.x, target.y - origin.y
        dist = math.hypot(dx, dy)
        if dist <= 0.0 or dist > max_range or (nearest is not None and dist >= nearest):
            continue
        if abs(normalize_angle(math.atan2(dy, dx) - axis)) > half:
            continue
        if line_of_sight(origin, target, walls):
            nearest = dist
    if nearest is None:
        return PingReading(None, None, interp(table, PING_CEILING_CM))
    cm = nearest * 100.0
    return PingReading(cm, echo_time_us(cm, params.sound_speed), interp(table, cm))


def ldr_voltage(
    pose: Pose,
    fires: Iterable[FireSource],
    walls: Sequence[WallSegment],
    params: SimParams,
    table: CalibrationTable = LDR,
) -> float:
    """LDR divider voltage; brighter light means lower voltage."""
    dark = params.ldr_dark_voltage
    best = dark
    for fire in fires:
        if fire.intensity <= 0.0:
            continue
        dx, dy = fire.position.x - pose.x, fire.position.y - pose.y
        dist = math.hypot(dx, dy)
        if dist > 0.0 and abs(normalize_angle(math.atan2(dy, dx) - pose.heading)) > params.ldr_half_angle:
            continue
        if not line_of_sight(pose.position, fire.position, walls):
            continue
        candidate = min(interp(table, dist * 100.0), dark)
        candidate += (1.0 - fire.fraction) * (dark - candidate)
        if candidate < best:
            best = candidate
    return best


def comparator(v_ldr: float, v_ref: float) -> LightReading:
    """Ideal comparator: output goes low (flame seen) when V_LDR < V_ref."""
    low = v_ldr < v_ref
    return LightReading(v_ldr, low, V_OUT_LOW if low else V_OUT_HIGH)


def sense(
    pose: Pose,
    walls: Sequence[WallSegment],
    fires: Sequence[FireSource],
    params: SimParams,
    tables: Optional[Mapping[str, CalibrationTable]] = None,
    tick: int = 0,
) -> SensorFrame:
    """Read all three rangefinders and the light channel for one control tick."""
    tables = DEFAULT_TABLES if tables is None else {**DEFAULT_TABLES, **tables}
    candles = [fire.position for fire in fires]
    readings = {
        name: ping_measure(pose, mount, walls, params, tables["ping_" + name], candles)
        for name, mount in MOUNTS.items()
    }
    v_ldr = ldr_voltage(pose, fires, walls, params, tables["ldr"])
    return SensorFrame(
        front=readings["front"],
        right=readings["right"],
        left=readings["left"],
        light=comparator(v_ldr, params.v_ref),
        tick=tick,
    )

"""Arena geometry: poses, line-segment walls, fire sources, ray casting and occlusion.

Everything here is immutable value data plus pure functions over it. The hot
paths (``raycast``, ``line_of_sight``, ``clearance``) work on plain float
tuples cached on each wall, since the simulator calls them thousands of times
per episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

TWO_PI = 2.0 * math.pi
_EPS = 1e-12


def normalize_angle(angle: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = (angle + math.pi) % TWO_PI - math.pi
    # float modulo can land exactly on the upper bound
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    @classmethod
    def from_angle(cls, angle: float) -> Vec2:
        return cls(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class Pose:
    position: Vec2
    heading: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.heading):
            raise ValueError("heading must be finite")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def x(self) -> float:
        return self.position.x

    @property
    def y(self) -> float:
        return self.position.y

    @classmethod
    def at(cls, x: float, y: float, heading: float = 0.0) -> Pose:
        return cls(Vec2(x, y), heading)


@dataclass(frozen=True)
class WallSegment:
    """A straight wall from ``a`` to ``b``.

    ``tag`` is a free-form label (a color, a material) kept for scenario
    authors and renderers. Physics never reads it.
    """

    a: Vec2
    b: Vec2
    tag: str = ""
    coords: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        if dx * dx + dy * dy == 0.0:
            raise ValueError(f"zero-length wall at ({self.a.x}, {self.a.y})")
        object.__setattr__(self, "coords", (self.a.x, self.a.y, self.b.x, self.b.y))

    @classmethod
    def from_coords(cls, x1: float, y1: float, x2: float, y2: float, tag: str = "") -> WallSegment:
        return cls(Vec2(x1, y1), Vec2(x2, y2), tag)

    def length(self) -> float:
        return (self.b - self.a).norm()


@dataclass(frozen=True)
class FireSource:
    position: Vec2
    intensity: float
    initial_intensity: float

    def __post_init__(self):
        if not self.initial_intensity > 0:
            raise ValueError("initial_intensity must be > 0")
        if not 0.0 <= self.intensity <= self.initial_intensity:
            raise ValueError(
                f"intensity {self.intensity} outside [0, {self.initial_intensity}]"
            )

    @classmethod
    def lit(cls, x: float, y: float, intensity: float = 1.0) -> FireSource:
        return cls(Vec2(x, y), intensity, intensity)

    @property
    def burning(self) -> bool:
        return self.intensity > 0.0

    @property
    def fraction(self) -> float:
        return self.intensity / self.initial_intensity


@dataclass(frozen=True)
class SimParams:
    """Physical and timing parameters; every value is overridable per scenario."""

    sound_speed: float = 340.0
    ping_max_range: float = 3.0
    dt: float = 0.02
    robot_radius: float = 0.09
    wheel_radius: float = 0.033
    wheelbase: float = 0.10
    servo_max_speed: float = TWO_PI
    fan_range: float = 0.4
    fan_half_angle: float = math.radians(20.0)
    extinguish_rate: float = 1.0
    v_ref: float = 1.47
    ldr_dark_voltage: float = 4.0
    ldr_half_angle: float = math.radians(15.0)
    ping_beam_half_angle: float = math.radians(15.0)

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"params.{name} must be a positive number, got {value!r}")
        if self.dt > 0.1:
            raise ValueError(f"params.dt must be <= 0.1 s, got {self.dt}")

    @property
    def max_wheel_speed(self) -> float:
        return self.wheel_radius * self.servo_max_speed


def raycast(
    origin: Vec2,
    direction: Vec2,
    walls: Iterable[WallSegment],
    max_range: float,
) -> Optional[float]:
    """Distance along the ray to the nearest wall, or None if nothing within ``max_range``."""
    ox, oy = origin.x, origin.y
    dx, dy = direction.x, direction.y
    best = None
    for wall in walls:
        ax, ay, bx, by = wall.coords
        ex, ey = bx - ax, by - ay
        wx, wy = ax - ox, ay - oy
        denom = dx * ey - dy * ex
        if abs(denom) < _EPS:
            if abs(wx * dy - wy * dx) > _EPS:
                continue
            # collinear: nearest point of the segment that lies ahead
            ta = wx * dx + wy * dy
            tb = (bx - ox) * dx + (by - oy) * dy
            if ta < 0.0 and tb < 0.0:
                continue
            t = 0.0 if min(ta, tb) <= 0.0 else min(ta, tb)
        else:
            t = (wx * ey - wy * ex) / denom
            if t < 0.0:
                continue
            s = (wx * dy - wy * dx) / denom
            if s < 0.0 or s > 1.0:
                continue
        if t <= max_range and (best is None or t < best):
            best = t
    return best


def line_of_sight(a: Vec2, b: Vec2, walls: Iterable[WallSegment]) -> bool:
    """True iff the open segment a-b crosses no wall."""
    # canonical endpoint order makes the test exactly symmetric in (a, b)
    if (b.x, b.y) < (a.x, a.y):
        a, b = b, a
    px, py = a.x, a.y
    dx, dy = b.x - px, b.y - py
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return True
    for wall in walls:
        ax, ay, bx, by = wall.coords
        ex, ey = bx - ax, by - ay
        wx, wy = ax - px, ay - py
        denom = dx * ey - dy * ex
        if abs(denom) < _EPS:
            if abs(wx * dy - wy * dx) > _EPS * math.sqrt(dd):
                continue
            ta = (wx * dx + wy * dy) / dd
            tb = ((bx - px) * dx + (by - py) * dy) / dd
            lo, hi = min(ta, tb), max(ta, tb)
            if max(lo, 0.0) < min(hi, 1.0):
                return False
            continue
        t = (wx * ey - wy * ex) / denom
        if t <= 0.0 or t >= 1.0:
            continue
        s = (wx * dy - wy * dx) / denom
        if 0.0 <= s <= 1.0:
            return False
    return True


def point_segment_distance(px: float, py: float, coords: Sequence[float]) -> float:
    ax, ay, bx, by = coords
    ex, ey = bx - ax, by - ay
    u = ((px - ax) * ex + (py - ay) * ey) / (ex * ex + ey * ey)
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    return math.hypot(px - (ax + u * ex), py - (ay + u * ey))


def clearance(point: Vec2, walls: Iterable[WallSegment]) -> float:
    """Distance from ``point`` to the nearest wall (inf with no walls)."""
    px, py = point.x, point.y
    best = math.inf
    for wall in walls:
        d = point_segment_distance(px, py, wall.coords)
        if d < best:
            best = d
    return best


def bearing_to(pose: Pose, target: Vec2) -> float:
    """Angle of ``target`` relative to the pose heading, in [-pi, pi)."""
    return normalize_angle(math.atan2(target.y - pose.y, target.x - pose.x) - pose.heading)

"""SVG and ASCII drawings of an episode: walls, fires and the robot's path."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import quoteattr

from .scenario import Scenario

_MARGIN_M = 0.2
_DEFAULT_SCALE = {"svg": 100.0, "ascii": 10.0}


@dataclass(frozen=True)
class RenderSpec:
    format: str = "svg"
    scale: Optional[float] = None  # px per meter (svg) or chars per meter (ascii)
    show_path: bool = True
    show_fires: bool = True

    def __post_init__(self):
        if self.format not in ("svg", "ascii"):
            raise ValueError(f"unknown render format {self.format!r}")
        if self.scale is None:
            object.__setattr__(self, "scale", _DEFAULT_SCALE[self.format])
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _bounds(trace, scenario: Scenario) -> tuple:
    xs = [r.x for r in trace]
    ys = [r.y for r in trace]
    for wall in scenario.walls:
        ax, ay, bx, by = wall.coords
        xs += [ax, bx]
        ys += [ay, by]
    for fire in scenario.fires:
        xs.append(fire.position.x)
        ys.append(fire.position.y)
    return min(xs) - _MARGIN_M, min(ys) - _MARGIN_M, max(xs) + _MARGIN_M, max(ys) + _MARGIN_M


def _final_intensities(trace, scenario: Scenario) -> list:
    last = trace[-1].fire_intensities
    if len(last) == len(scenario.fires):
        return list(last)
    return [f.intensity for f in scenario.fires]


def render_svg(trace, scenario: Scenario, spec: RenderSpec) -> str:
    x0, y0, x1, y1 = _bounds(trace, scenario)
    s = spec.scale
    width, height = (x1 - x0) * s, (y1 - y0) * s

    def px(x: float, y: float) -> tuple:
        return (x - x0) * s, (y1 - y) * s

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="{width:.2f}" height="{height:.2f}" fill="white"/>',
    ]
    for wall in scenario.walls:
        ax, ay, bx, by = wall.coords
        (sx, sy), (ex, ey) = px(ax, ay), px(bx, by)
        tag = f" data-tag={quoteattr(wall.tag)}" if wall.tag else ""
        out.append(
            f'<line x1="{sx:.2f}" y1="{sy:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" '
            f'stroke="black" stroke-width="3"{tag}/>'
        )
    if spec.show_fires:
        r = max(3.0, 0.04 * s)
        for fire, level in zip(scenario.fires, _final_intensities(trace, scenario)):
            cx, cy = px(fire.position.x, fire.position.y)
            fill = "orangered" if level > 0 else "none"
            out.append(
                f'<circle class="fire" cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}" '
                f'stroke="orangered" stroke-width="2"/>'
            )
    if spec.show_path:
        points = " ".join("{:.2f},{:.2f}".format(*px(rec.x, rec.y)) for rec in trace)
        out.append(f'<polyline points="{points}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
        sx, sy = px(trace[0].x, trace[0].y)
        out.append(f'<circle class="start" cx="{sx:.2f}" cy="{sy:.2f}" r="4" fill="green"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_ascii(trace, scenario: Scenario, spec: RenderSpec) -> str:
    x0, y0, x1, y1 = _bounds(trace, scenario)
    s = spec.scale
    cols = max(1, int(math.ceil((x1 - x0) * s)))
    rows = max(1, int(math.ceil((y1 - y0) * s)))
    grid = [[" "] * cols for _ in range(rows)]

    def put(x: float, y: float, ch: str) -> None:
        c = min(cols - 1, max(0, int((x - x0) * s)))
        r = min(rows - 1, max(0, int((y1 - y) * s)))
        grid[r][c] = ch

    for wall in scenario.walls:
        ax, ay, bx, by = wall.coords
        n = max(1, int(math.ceil(math.hypot(bx - ax, by - ay) * s * 2)))
        for i in range(n + 1):
            u = i / n
            put(ax + u * (bx - ax), ay + u * (by - ay), "#")
    if spec.show_path:
        for rec in trace:
            put(rec.x, rec.y, ".")
        put(trace[0].x, trace[0].y, "S")
        put(trace[-1].x, trace[-1].y, "R")
    if spec.show_fires:
        for fire, level in zip(scenario.fires, _final_intensities(trace, scenario)):
            put(fire.position.x, fire.position.y, "*" if level > 0 else "o")
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"


def render_trace(trace: Sequence, scenario: Scenario, spec: RenderSpec = RenderSpec()) -> str:
    """Draw walls, fires (filled while burning, hollow once out) and the path."""
    if not trace:
        raise ValueError("cannot render an empty trace")
    if spec.format == "svg":
        return render_svg(trace, scenario, spec)
    return render_ascii(trace, scenario, spec)

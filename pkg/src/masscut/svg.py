"""
Deterministic SVG figures of planar measures and a cut region.

Coordinates are written with a fixed format so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import math
from typing import List, Sequence

import numpy as np

from .errors import DimensionError
from .geometry import (Annulus, Disk, HalfSpace, Hyperplane, PolyRegion, SineWave, Slab,
                       StripeWave, Wedge, clip_polygon)
from .measure import Measure

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
           "#17becf")
SIZE = 600.0
MARGIN = 0.1
FILL = 'fill="#888888" fill-opacity="0.25"'
STROKE = 'stroke="#222222" stroke-width="1.5" fill="none"'


def _f(x: float) -> str:
    return "%.4f" % x


class _Frame:
    """Maps data coordinates to the pixel square, flipping y."""

    def __init__(self, pts: np.ndarray):
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(max(hi - lo)) or 1.0
        mid = (lo + hi) / 2
        half = span * (0.5 + MARGIN)
        self.lo = mid - half
        self.hi = mid + half
        self.scale = SIZE / (2 * half)

    def box(self) -> List[tuple]:
        (x0, y0), (x1, y1) = self.lo, self.hi
        return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]

    def px(self, p) -> str:
        x = (p[0] - self.lo[0]) * self.scale
        y = (self.hi[1] - p[1]) * self.scale
        return _f(x) + "," + _f(y)

    def length(self, r: float) -> str:
        return _f(r * self.scale)


def _segment(plane: Hyperplane, frame: _Frame):
    """The part of a line inside the frame, or None."""
    n = np.asarray(plane.normal, dtype=float)
    t = np.array([-n[1], n[0]])
    base = plane.offset * n
    # base + s t stays inside the frame for s in [s0, s1]
    s0, s1 = -math.inf, math.inf
    for k in range(2):
        if abs(t[k]) < 1e-15:
            if not frame.lo[k] <= base[k] <= frame.hi[k]:
                return None
            continue
        a = (frame.lo[k] - base[k]) / t[k]
        b = (frame.hi[k] - base[k]) / t[k]
        s0, s1 = max(s0, min(a, b)), min(s1, max(a, b))
    if not s1 > s0:
        return None
    return base + s0 * t, base + s1 * t


def _line(plane: Hyperplane, frame: _Frame) -> List[str]:
    seg = _segment(plane, frame)
    if seg is None:
        return []
    a, b = frame.px(seg[0]).split(","), frame.px(seg[1]).split(",")
    return ['<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>' % (a[0], a[1], b[0], b[1], STROKE)]


def _polygon(poly, frame: _Frame) -> List[str]:
    if len(poly) < 3:
        return []
    return ['<polygon points="%s" %s/>' % (" ".join(frame.px(p) for p in poly), FILL)]


def _clipped(halfspaces: Sequence[HalfSpace], frame: _Frame):
    poly = frame.box()
    for h in halfspaces:
        poly = clip_polygon(poly, h)
    return poly


def _circle_path(center, r, frame: _Frame) -> str:
    c = np.asarray(center)
    a = frame.px(c + [r, 0])
    b = frame.px(c - [r, 0])
    rr = frame.length(r)
    return "M%s A%s,%s 0 1,0 %s A%s,%s 0 1,0 %s Z" % (a, rr, rr, b, rr, rr, a)


def _box_path(frame: _Frame) -> str:
    return "M" + " L".join(frame.px(p) for p in frame.box()) + " Z"


def _circle(center, r, frame: _Frame) -> str:
    x, y = frame.px(center).split(",")
    return '<circle cx="%s" cy="%s" r="%s" %s/>' % (x, y, frame.length(r), STROKE)


def _region(region, frame: _Frame) -> List[str]:
    if isinstance(region, Hyperplane):
        return _line(region, frame)
    if isinstance(region, HalfSpace):
        return _polygon(_clipped([region], frame), frame) + _line(region.plane, frame)
    if isinstance(region, Slab):
        u = region.direction
        sides = []
        if math.isfinite(region.lo):
            sides.append(HalfSpace(Hyperplane(u, region.lo), 1))
        if math.isfinite(region.hi):
            sides.append(HalfSpace(Hyperplane(u, region.hi), -1))
        out = _polygon(_clipped(sides, frame), frame)
        for h in sides:
            out += _line(h.plane, frame)
        return out
    if isinstance(region, (Wedge, PolyRegion)):
        hs = region.halfspaces
        out = _polygon(_clipped(hs, frame), frame)
        for h in hs:
            out += _line(h.plane, frame)
        return out
    if isinstance(region, Annulus):
        inner = _circle_path(region.center, region.r_in, frame) if region.r_in > 0 else ""
        if math.isfinite(region.r_out):
            outer = _circle_path(region.center, region.r_out, frame)
        else:
            outer = _box_path(frame)
        out = ['<path d="%s %s" fill-rule="evenodd" %s/>' % (outer, inner, FILL)]
        if region.r_in > 0:
            out.append(_circle(region.center, region.r_in, frame))
        if math.isfinite(region.r_out):
            out.append(_circle(region.center, region.r_out, frame))
        return out
    if isinstance(region, Disk):
        circle = _circle_path(region.center, region.radius, frame)
        d = circle if region.inside else _box_path(frame) + " " + circle
        return ['<path d="%s" fill-rule="evenodd" %s/>' % (d, FILL),
                _circle(region.center, region.radius, frame)]
    if isinstance(region, SineWave):
        xs = np.linspace(frame.lo[0], frame.hi[0], 401)
        curve = [(x, y) for x, y in zip(xs, region.curve(xs))]
        edge = frame.hi[1] if region.above else frame.lo[1]
        shade = curve + [(frame.hi[0], edge), (frame.lo[0], edge)]
        pts = " ".join(frame.px(p) for p in curve)
        return _polygon(shade, frame) + ['<polyline points="%s" %s/>' % (pts, STROKE)]
    if isinstance(region, StripeWave):
        out = []
        width = (region.x1 - region.x0) % region.period
        k0 = math.floor((frame.lo[0] - region.x0) / region.period) - 1
        k1 = math.ceil((frame.hi[0] - region.x0) / region.period) + 1
        for k in range(k0, k1 + 1):
            a = region.x0 + k * region.period
            b = min(a + width, frame.hi[0])
            a = max(a, frame.lo[0])
            if b > a:
                out += _polygon([(a, frame.lo[1]), (b, frame.lo[1]), (b, frame.hi[1]),
                                 (a, frame.hi[1])], frame)
        return out
    raise DimensionError(f"cannot draw region of type {type(region).__name__}")


def render_svg(measures: Sequence[Measure], region) -> str:
    if any(m.dim != 2 for m in measures):
        raise DimensionError("SVG output needs planar measures")
    frame = _Frame(np.vstack([m.points for m in measures]))
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="%s" height="%s" viewBox="0 0 %s %s">'
             % (_f(SIZE), _f(SIZE), _f(SIZE), _f(SIZE)),
             '<rect x="0" y="0" width="%s" height="%s" fill="white"/>' % (_f(SIZE), _f(SIZE))]
    if region is not None:
        lines += ['<g class="region">'] + _region(region, frame) + ['</g>']
    for k, m in enumerate(measures):
        color = PALETTE[k % len(PALETTE)]
        lines.append('<g class="measure" fill="%s">' % color)
        for p in m.points:
            x, y = (float(v) for v in frame.px(p).split(","))
            lines.append('<rect x="%s" y="%s" width="3.0000" height="3.0000"/>'
                         % (_f(x - 1.5), _f(y - 1.5)))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg(measures: Sequence[Measure], region, path) -> None:
    """Write the figure to ``path``."""
    with open(path, "w") as fh:
        fh.write(render_svg(measures, region))

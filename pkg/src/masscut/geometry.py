"""
Geometric primitives and cut regions.

Every region is an immutable closed set with a vectorized ``contains``
method taking an ``(n, d)`` array. Boundary points are members; a point
counts as on the boundary when its defining residual is within
``BOUNDARY_EPS`` of zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InputError

BOUNDARY_EPS = 1e-10

# Shewchuk's ccwerrboundA: (3 + 16 eps) * eps with eps = 2**-53
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53


def as_points(points, dim=None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] == 0:
        raise DimensionError(f"expected an (n, d) array, got shape {pts.shape}")
    if dim is not None and pts.shape[1] != dim:
        raise DimensionError(f"expected dimension {dim}, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise InputError("point coordinates must be finite")
    return pts


def direction(v) -> Tuple[float, ...]:
    """Normalize ``v`` to a unit vector."""
    arr = np.asarray(v, dtype=float).ravel()
    big = float(np.max(np.abs(arr))) if arr.size else 0.0
    if not np.isfinite(big) or big == 0.0:
        raise InputError("direction must be a nonzero finite vector")
    arr = arr / big
    return tuple(float(c) for c in arr / np.linalg.norm(arr))


def _is_unit(v) -> bool:
    return abs(math.sqrt(sum(c * c for c in v)) - 1.0) <= 1e-12


def orient2d(a, b, c) -> float:
    """Twice the signed area of triangle abc; positive when counterclockwise.

    Uses a floating-point filter and falls back to rational arithmetic
    when the sign is uncertain, so the sign is exact for double inputs.
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _CCW_ERRBOUND * (abs(detleft) + abs(detright)):
        return det
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    return float((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


@dataclass(frozen=True)
class Hyperplane:
    """The set {x : <x, normal> = offset} with a unit normal."""

    normal: Tuple[float, ...]
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(c) for c in self.normal))
        object.__setattr__(self, "offset", float(self.offset))
        if not _is_unit(self.normal):
            raise InputError("hyperplane normal must be a unit vector; use Hyperplane.from_normal")

    @classmethod
    def from_normal(cls, normal, offset: float) -> "Hyperplane":
        arr = np.asarray(normal, dtype=float).ravel()
        big = float(np.max(np.abs(arr))) if arr.size else 0.0
        if big == 0.0:
            raise InputError("zero normal")
        # rescale first so tiny normals do not underflow
        arr = arr / big
        norm = float(np.linalg.norm(arr))
        return cls(tuple(float(c) for c in arr / norm), float(offset) / big / norm)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def flip(self) -> "Hyperplane":
        return Hyperplane(tuple(-c for c in self.normal), -self.offset)

    def canonical(self) -> "Hyperplane":
        for c in self.normal:
            if c > 0:
                return self
            if c < 0:
                return self.flip()
        return self

    def signed(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        return pts @ np.asarray(self.normal) - self.offset


def signed_offset(p, h: Hyperplane) -> float:
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != h.dim:
        raise DimensionError(f"point has dimension {p.shape[0]}, hyperplane {h.dim}")
    return float(p @ np.asarray(h.normal) - h.offset)


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space: side=+1 is <x,n> >= offset, side=-1 is <x,n> <= offset."""

    plane: Hyperplane
    side: int = 1

    def __post_init__(self):
        if self.side not in (1, -1):
            raise InputError("side must be +1 or -1")

    @classmethod
    def from_normal(cls, normal, offset: float, side: int = 1) -> "HalfSpace":
        return cls(Hyperplane.from_normal(normal, offset), side)

    @property
    def dim(self) -> int:
        return self.plane.dim

    def canonical(self) -> "HalfSpace":
        c = self.plane.canonical()
        return self if c is self.plane else HalfSpace(c, -self.side)

    def complement_closure(self) -> "HalfSpace":
        return HalfSpace(self.plane, -self.side)

    def slack(self, points) -> np.ndarray:
        """Nonnegative inside; signed distance to the boundary."""
        return self.side * self.plane.signed(points)

    def contains(self, points) -> np.ndarray:
        return self.slack(points) >= -BOUNDARY_EPS


@dataclass(frozen=True)
class Slab:
    """{x : lo <= <x, direction> <= hi}; infinite bounds give a half-space."""

    direction: Tuple[float, ...]
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "direction", tuple(float(c) for c in self.direction))
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not _is_unit(self.direction):
            raise InputError("slab direction must be a unit vector")
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise InputError("slab requires lo <= hi")

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def is_halfspace(self) -> bool:
        return math.isinf(self.lo) or math.isinf(self.hi)

    def contains(self, points) -> np.ndarray:
        proj = as_points(points, self.dim) @ np.asarray(self.direction)
        return (proj >= self.lo - BOUNDARY_EPS) & (proj <= self.hi + BOUNDARY_EPS)


@dataclass(frozen=True)
class Wedge:
    """Intersection of one or two closed half-spaces."""

    halfspaces: Tuple[HalfSpace, ...]

    def __post_init__(self):
        if len(self.halfspaces) not in (1, 2):
            raise InputError("a wedge has one or two half-spaces")
        if len({h.dim for h in self.halfspaces}) != 1:
            raise DimensionError("wedge half-spaces differ in dimension")

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    def contains(self, points) -> np.ndarray:
        out = self.halfspaces[0].contains(points)
        for h in self.halfspaces[1:]:
            out &= h.contains(points)
        return out

    def apex(self) -> Optional[np.ndarray]:
        """Intersection of the two boundary lines (d=2), or None if parallel or single."""
        if len(self.halfspaces) != 2 or self.dim != 2:
            return None
        a = np.array([h.plane.normal for h in self.halfspaces])
        b = np.array([h.plane.offset for h in self.halfspaces])
        if abs(np.linalg.det(a)) < 1e-14:
            return None
        return np.linalg.solve(a, b)


@dataclass(frozen=True)
class Annulus:
    """{x : r_in <= |x - center| <= r_out}; r_out may be infinite."""

    center: Tuple[float, ...]
    r_in: float
    r_out: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "r_in", float(self.r_in))
        object.__setattr__(self, "r_out", float(self.r_out))
        if not (0.0 <= self.r_in <= self.r_out):
            raise InputError("annulus requires 0 <= r_in <= r_out")

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points) -> np.ndarray:
        r = np.linalg.norm(as_points(points, self.dim) - np.asarray(self.center), axis=1)
        return (r >= self.r_in - BOUNDARY_EPS) & (r <= self.r_out + BOUNDARY_EPS)


@dataclass(frozen=True)
class Disk:
    """Closed ball (inside=True) or the closure of its complement."""

    center: Tuple[float, ...]
    radius: float
    inside: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius >= 0.0:
            raise InputError("radius must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points) -> np.ndarray:
        r = np.linalg.norm(as_points(points, self.dim) - np.asarray(self.center), axis=1)
        if self.inside:
            return r <= self.radius + BOUNDARY_EPS
        return r >= self.radius - BOUNDARY_EPS


@dataclass(frozen=True)
class SineWave:
    """Points on or above (above=True) or below y = midline + amplitude*sin(2 pi x/period + phase)."""

    period: float
    amplitude: float
    phase: float
    midline: float
    above: bool = False

    def __post_init__(self):
        if not self.period > 0.0:
            raise InputError("period must be positive")
        if not self.amplitude >= 0.0:
            raise InputError("amplitude must be nonnegative")
        if not 0.0 <= self.phase < 2 * math.pi:
            raise InputError("phase must lie in [0, 2 pi)")

    dim = 2

    def curve(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.midline + self.amplitude * np.sin(2 * math.pi * x / self.period + self.phase)

    def contains(self, points) -> np.ndarray:
        pts = as_points(points, 2)
        gap = pts[:, 1] - self.curve(pts[:, 0])
        return gap >= -BOUNDARY_EPS if self.above else gap <= BOUNDARY_EPS


@dataclass(frozen=True)
class StripeWave:
    """Degenerate sine wave: vertical stripes {x mod period in [x0, x1]} (cyclically)."""

    period: float
    x0: float
    x1: float

    def __post_init__(self):
        if not self.period > 0.0:
            raise InputError("period must be positive")
        if not (0.0 <= self.x0 < self.period and 0.0 <= self.x1 < self.period):
            raise InputError("stripe offsets must lie in [0, period)")

    dim = 2

    def contains(self, points) -> np.ndarray:
        pts = as_points(points, 2)
        width = (self.x1 - self.x0) % self.period
        rel = np.mod(pts[:, 0] - self.x0, self.period)
        # a point just below x0 wraps to ~period; treat it as on the boundary
        near_start = rel >= self.period - BOUNDARY_EPS
        return (rel <= width + BOUNDARY_EPS) | near_start


@dataclass(frozen=True)
class PolyRegion:
    """Polyhedron as an intersection of closed half-spaces, optionally with its vertices (d=2)."""

    halfspaces: Tuple[HalfSpace, ...]
    vertices: Optional[Tuple[Tuple[float, ...], ...]] = None

    @classmethod
    def from_vertices(cls, vertices) -> "PolyRegion":
        """Build both representations from a counterclockwise convex polygon."""
        verts = [tuple(float(c) for c in v) for v in vertices]
        if not verts:
            raise InputError("empty polygon")
        hs = []
        if len(verts) >= 3:
            for a, b in zip(verts, verts[1:] + verts[:1]):
                normal = (-(b[1] - a[1]), b[0] - a[0])
                hs.append(HalfSpace.from_normal(normal, normal[0] * a[0] + normal[1] * a[1], 1))
        elif len(verts) == 2:
            a, b = verts
            normal = (-(b[1] - a[1]), b[0] - a[0])
            off = normal[0] * a[0] + normal[1] * a[1]
            along = (b[0] - a[0], b[1] - a[1])
            hs += [HalfSpace.from_normal(normal, off, 1), HalfSpace.from_normal(normal, off, -1),
                   HalfSpace.from_normal(along, along[0] * a[0] + along[1] * a[1], 1),
                   HalfSpace.from_normal(along, along[0] * b[0] + along[1] * b[1], -1)]
        else:
            (a,) = verts
            hs += [HalfSpace.from_normal((1.0, 0.0), a[0], 1), HalfSpace.from_normal((1.0, 0.0), a[0], -1),
                   HalfSpace.from_normal((0.0, 1.0), a[1], 1), HalfSpace.from_normal((0.0, 1.0), a[1], -1)]
        return cls(tuple(hs), tuple(verts))

    @property
    def dim(self) -> int:
        if self.halfspaces:
            return self.halfspaces[0].dim
        return len(self.vertices[0])

    @property
    def facet_count(self) -> int:
        if self.vertices is not None and len(self.vertices) >= 3:
            return len(self.vertices)
        return len(self.halfspaces)

    @property
    def vertex_count(self) -> Optional[int]:
        return None if self.vertices is None else len(self.vertices)

    def contains(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        out = np.ones(len(pts), dtype=bool)
        for h in self.halfspaces:
            out &= h.contains(pts)
        return out

    def representations_agree(self, samples) -> bool:
        """Check V- and H-representations on sample points (d=2 only)."""
        if self.vertices is None:
            return True
        other = PolyRegion.from_vertices(self.vertices)
        return bool(np.array_equal(self.contains(samples), other.contains(samples)))


Region = (HalfSpace, Slab, Wedge, Annulus, Disk, SineWave, StripeWave, PolyRegion)


def region_contains(region, p) -> bool:
    pts = np.asarray(p, dtype=float).ravel()
    if pts.shape[0] != region.dim:
        raise DimensionError(f"point has dimension {pts.shape[0]}, region {region.dim}")
    return bool(region.contains(pts[None, :])[0])


def convex_hull_2d(points) -> PolyRegion:
    """Counterclockwise hull by monotone chain with exact orientation tests.

    Collinear inputs give a two-vertex segment, a single point one vertex.
    """
    pts = as_points(points, 2) if len(points) else None
    if pts is None or len(pts) == 0:
        raise InputError("convex hull of an empty point set")
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) == 1:
        return PolyRegion.from_vertices(uniq)

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and orient2d(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or (len(hull) > 2 and all(orient2d(hull[0], hull[1], p) == 0 for p in hull)):
        hull = [uniq[0], uniq[-1]]
    return PolyRegion.from_vertices(hull)


def hull_vertices(points) -> np.ndarray:
    return np.asarray(convex_hull_2d(points).vertices, dtype=float)


def points_in_convex_polygon(vertices, points) -> np.ndarray:
    """Closed membership in a counterclockwise convex polygon given by its vertices."""
    return PolyRegion.from_vertices(vertices).contains(points)


def clip_polygon(polygon: Sequence[Sequence[float]], halfspace: HalfSpace):
    """Sutherland-Hodgman clip of a 2D polygon against one closed half-space."""
    out = []
    n = len(polygon)
    if n == 0:
        return out
    s = halfspace.slack(np.asarray(polygon, dtype=float))
    for k in range(n):
        a, b = polygon[k], polygon[(k + 1) % n]
        sa, sb = s[k], s[(k + 1) % n]
        if sa >= 0:
            out.append(tuple(a))
        if (sa >= 0) != (sb >= 0):
            t = sa / (sa - sb)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out

"""
Curved cuts in the plane obtained from a plane halving three lifted measures.

Each solver lifts the clouds to R^3, searches for a halving plane there and
pulls it back. Candidates are certified by counting the original points in
the pulled-back region, never by lifted quantities.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .errors import DimensionError, InputError
from .geometry import Disk, HalfSpace, Hyperplane, SineWave, Slab, StripeWave, Wedge, direction
from .hamsandwich import sphere_search
from .lifts import FoldSurfaceSpec, lift_cylinder, lift_fold, lift_inversion
from .measure import Measure, SolveReport, common_dim, fraction_in
from .quantile import midpoint_hyperplane

# below this the pullback parameters overflow double precision
DEGENERACY = 1e-8


def _planar_triple(measures):
    if len(measures) != 3:
        raise InputError("expected three measures")
    if common_dim(measures) != 2:
        raise DimensionError("lifted solvers take planar measures")


def _halving_certify(measures, pullback):
    def certify(plane: Hyperplane):
        region = pullback(plane)
        if region is None:
            return None
        res = tuple(fraction_in(m, region) - 0.5 for m in measures)
        return res, max(abs(r) for r in res), region
    return certify


def _lift_all(measures, fn):
    return [Measure(fn(m.points), m.weights, m.name) for m in measures]


def circle_from_plane(plane: Hyperplane):
    """Pull back the closed side <n, q> >= e of a plane in the inverted lift."""
    n = np.asarray(plane.normal)
    a, c, e = n[:-1], n[-1], plane.offset
    if abs(e) <= DEGENERACY:
        if np.linalg.norm(a) <= DEGENERACY:
            return None
        return HalfSpace.from_normal(a, -c, 1)
    # a.x + c >= e (|x|^2 + 1)  <=>  |x - a/2e|^2 <= or >= r^2, by the sign of e
    center = a / (2 * e)
    r2 = float(center @ center) - 1.0 + c / e
    if r2 < 0:
        return None
    return Disk(tuple(center), math.sqrt(r2), inside=e > 0)


def circle_solver(m1: Measure, m2: Measure, m3: Measure, seed: int = 0,
                  tol: float = 1e-3, **search) -> Tuple[object, SolveReport]:
    """A closed disk, disk complement or half-plane holding 1/2 +- tol of each measure."""
    measures = [m1, m2, m3]
    _planar_triple(measures)
    lifted = _lift_all(measures, lift_inversion)
    region, report = sphere_search(lifted, seed, tol, _halving_certify(measures, circle_from_plane),
                                   solver="circle", **search)
    return region, report


def sine_from_plane(plane: Hyperplane, period: float):
    """Pull back the side aX + bY + cZ >= e of a plane in the cylinder lift."""
    a, b, c = plane.normal
    e = plane.offset
    amp_num = math.hypot(a, c)
    phi = math.atan2(a, c)
    if abs(b) > DEGENERACY:
        # b y >= e - R sin(theta + phi)
        phase = (phi + math.pi if b > 0 else phi) % (2 * math.pi)
        return SineWave(period, amp_num / abs(b), phase, e / b, above=b > 0)
    if amp_num <= DEGENERACY:
        return None
    # R sin(theta + phi) >= e: an arc of angles, i.e. stripes in x
    if e <= -amp_num:
        return Slab((1.0, 0.0))
    if e >= amp_num:
        return None
    s = e / amp_num
    lo = math.asin(s) - phi
    hi = math.pi - math.asin(s) - phi
    scale = period / (2 * math.pi)
    return StripeWave(period, (lo * scale) % period, (hi * scale) % period)


def sine_solver(m1: Measure, m2: Measure, m3: Measure, period: float, seed: int = 0,
                tol: float = 1e-3, **search) -> Tuple[object, SolveReport]:
    """The region above or below a sine wave of the given period, halving each measure."""
    if not period > 0:
        raise InputError("period must be positive")
    measures = [m1, m2, m3]
    _planar_triple(measures)
    lifted = _lift_all(measures, lambda p: lift_cylinder(p, period))
    region, report = sphere_search(lifted, seed, tol,
                                   _halving_certify(measures, lambda h: sine_from_plane(h, period)),
                                   solver="sine", **search)
    return region, report


def wedge_from_plane(plane: Hyperplane, base: Hyperplane):
    """Pull back the side <n_x, x> + n3 |s(x)| >= e of a plane in the fold lift.

    With s(x) = <x, v> - t, the side is bounded by the lines
    (n_x +- n3 v) . x = e +- n3 t, which meet on the crease. For n3 <= 0 the
    side is the intersection of the two half-planes; for n3 > 0 it is a union
    and the closure of its complement (also a halving wedge) is returned.
    Planes containing a fold sheet give None.
    """
    n = np.asarray(plane.normal)
    nx, n3, e = n[:-1], float(n[-1]), plane.offset
    v = np.asarray(base.normal)
    t = base.offset
    if abs(n3) <= DEGENERACY:
        return Wedge((HalfSpace.from_normal(nx, e, 1),))
    normals = (nx + n3 * v, nx - n3 * v)
    offsets = (e + n3 * t, e - n3 * t)
    if min(np.linalg.norm(w) for w in normals) <= DEGENERACY:
        return None
    side = 1 if n3 < 0 else -1
    return Wedge(tuple(HalfSpace.from_normal(w, o, side) for w, o in zip(normals, offsets)))


def wedge_solver(m1: Measure, m2: Measure, m3: Measure, v=(0.0, 1.0), seed: int = 0,
                 tol: float = 1e-3, **search) -> Tuple[Wedge, SolveReport]:
    """A wedge whose boundary lines meet on the common halving line orthogonal to ``v``."""
    measures = [m1, m2, m3]
    _planar_triple(measures)
    base, coincide = midpoint_hyperplane(measures, direction(v))
    if coincide:
        region = Wedge((HalfSpace(base, 1),))
        res = tuple(fraction_in(m, region) - 0.5 for m in measures)
        return region, SolveReport(res, 0, 0, True, region, solver="wedge", tol=tol, seed=seed,
                                   extra={"base": base})
    spec = FoldSurfaceSpec(base)
    exact = _lift_all(measures, lambda p: lift_fold(p, spec))
    pts = np.vstack([m.points for m in measures])
    diameter = float(np.max(np.ptp(pts, axis=0))) or 1.0
    rng = np.random.default_rng(seed)
    thick = []
    for m in exact:
        q = m.points.copy()
        q[:, -1] += rng.uniform(-1.0, 1.0, len(q)) * diameter * tol / 10
        thick.append(Measure(q, m.weights, m.name))
    region, report = sphere_search(thick, seed, tol,
                                   _halving_certify(measures, lambda h: wedge_from_plane(h, base)),
                                   solver="wedge", polish_measures=exact, **search)
    report.extra["base"] = base
    return region, report

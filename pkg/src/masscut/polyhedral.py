"""
Polyhedral cuts for many nicely separated measures.

n facets: each separating plane slides toward its own cluster until the
prescribed fraction lies on its far side. The other clusters sit strictly
inside every other half-space, so the slides do not interact.

n vertices: the polytope conv{y_i} with y_i on the segment from the anchor
p_i (fraction 0) to the tip q_i (fraction 1). The fraction map fixes every
face of the unit cube, so it reaches any target; it is solved by a damped
fixed-point iteration with a coordinate-bisection fallback.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InputError, NoConvergence, PreconditionError
from .geometry import HalfSpace, Hyperplane, PolyRegion, convex_hull_2d
from .measure import Measure, SolveReport, as_fractions, common_dim, fraction_in
from .quantile import quantile_offset
from .separated import (ConcentrationCertificate, SeparationCertificate, check_concentrated,
                        check_nicely_separated)

log = logging.getLogger(__name__)


def nface_solver(measures: Sequence[Measure], fractions=None,
                 certificate: Optional[SeparationCertificate] = None) -> Tuple[PolyRegion, SolveReport]:
    """Polyhedron with at most n facets holding fraction alpha_i of each of n measures.

    Residual for measure i is at most its largest point weight over its total.
    """
    measures = list(measures)
    common_dim(measures)
    alphas = tuple(as_fractions(fractions, len(measures)))
    cert = certificate if certificate is not None else check_nicely_separated(measures)
    planes = [w for _, w in cert.witnesses]
    if len(planes) != len(measures):
        raise InputError("certificate does not match the measures")

    # half-spaces with the other clusters on the + side
    current = [HalfSpace(h, 1) for h in planes]
    before = np.array([fraction_in(m, PolyRegion(tuple(current))) for m in measures])
    for i, (m, a) in enumerate(zip(measures, alphas)):
        h = planes[i]
        others = PolyRegion(tuple(current[:i] + current[i + 1:])) if len(current) > 1 else None
        inside = others.contains(m.points) if others is not None else np.ones(len(m), dtype=bool)
        if not np.all(inside):
            raise PreconditionError(f"measure {i} is not inside the other half-spaces")
        proj = m.points @ np.asarray(h.normal)
        t = quantile_offset(proj, m.weights, 1.0 - a)
        current[i] = HalfSpace(Hyperplane(h.normal, float(t)), 1)
        after = np.array([fraction_in(mj, PolyRegion(tuple(current))) for mj in measures])
        moved = [j for j in range(len(measures)) if j != i and after[j] != before[j]]
        if moved:
            raise PreconditionError(f"sliding facet {i} changed the fraction of measure {moved[0]}")
        before = after
    region = PolyRegion(tuple(current))
    res = tuple(fraction_in(m, region) - a for m, a in zip(measures, alphas))
    report = SolveReport(res, len(measures), 0, True, region, solver="nfaces",
                         extra={"fractions": alphas})
    return region, report


def vertex_points(cert: ConcentrationCertificate, x) -> np.ndarray:
    """y_i = (1 - x_i) p_i + x_i q_i."""
    x = np.asarray(x, dtype=float)[:, None]
    ps = np.asarray(cert.anchors.ps)
    qs = np.asarray(cert.anchors.qs)
    return (1.0 - x) * ps + x * qs


def polytope(cert: ConcentrationCertificate, x) -> PolyRegion:
    return convex_hull_2d(vertex_points(cert, x))


def vertex_map(cert: ConcentrationCertificate, measures: Sequence[Measure], x) -> np.ndarray:
    """f(x)_i = fraction of measure i inside conv{y_1, ..., y_n}."""
    region = polytope(cert, x)
    return np.array([fraction_in(m, region) for m in measures])


def _fixed_point(f, target, x0, iters):
    x = np.clip(np.asarray(x0, dtype=float), 0.0, 1.0)
    val = f(x)
    err = np.max(np.abs(target - val))
    evals = 1
    eta = 1.0
    for _ in range(iters):
        if err == 0.0:
            break
        cand = np.clip(x + eta * (target - val), 0.0, 1.0)
        cval = f(cand)
        evals += 1
        cerr = np.max(np.abs(target - cval))
        if cerr < err:
            x, val, err = cand, cval, cerr
            eta = min(1.0, eta * 1.5)
        else:
            eta /= 2
            if eta < 1e-6:
                break
    return x, val, err, evals


def _coordinate_bisection(f, target, x0, sweeps, depth=40):
    """Gauss-Seidel sweeps: bisect each coordinate so its own fraction crosses its target."""
    x = np.asarray(x0, dtype=float).copy()
    evals = 0
    best = None
    for _ in range(sweeps):
        for i in range(len(x)):
            lo, hi = 0.0, 1.0
            for _ in range(depth):
                mid = (lo + hi) / 2
                x[i] = mid
                val = f(x)
                evals += 1
                if val[i] < target[i]:
                    lo = mid
                else:
                    hi = mid
            x[i] = (lo + hi) / 2
        val = f(x)
        evals += 1
        err = np.max(np.abs(target - val))
        if best is None or err < best[2]:
            best = (x.copy(), val, err)
        if err == 0.0:
            break
    return best[0], best[1], best[2], evals


def nvertex_solver(measures: Sequence[Measure], fractions=None,
                   certificate: Optional[ConcentrationCertificate] = None, tol: float = 1e-2,
                   seed: int = 0, iters: int = 200, sweeps: int = 20) -> Tuple[PolyRegion, SolveReport]:
    """Polygon with n vertices holding fraction alpha_i of each of n concentrated planar measures."""
    measures = list(measures)
    if common_dim(measures) != 2:
        raise DimensionError("nvertex_solver supports d = 2")
    alphas = np.asarray(tuple(as_fractions(fractions, len(measures))))
    cert = certificate if certificate is not None else check_concentrated(measures)
    if len(cert.anchors.ps) != len(measures):
        raise InputError("certificate does not match the measures")

    def f(x):
        return vertex_map(cert, measures, x)

    rng = np.random.default_rng(seed)
    x0 = np.clip(alphas + 0.01 * rng.uniform(-1, 1, len(alphas)), 0.0, 1.0)
    x, val, err, evals = _fixed_point(f, alphas, x0, iters)
    fallback = False
    if err > tol:
        fallback = True
        xb, vb, eb, e2 = _coordinate_bisection(f, alphas, x, sweeps)
        evals += e2
        if eb < err:
            x, val, err = xb, vb, eb
    region = polytope(cert, x)
    res = tuple(fraction_in(m, region) - a for m, a in zip(measures, alphas))
    worst = max(abs(r) for r in res)
    report = SolveReport(res, evals, int(fallback), worst <= tol, region, solver="nvertices",
                         tol=tol, seed=seed, extra={"fractions": tuple(alphas),
                                                    "cube_point": tuple(map(float, x))})
    if worst > tol:
        raise NoConvergence(f"nvertices: residual {worst:.3g} exceeds tol", report)
    return region, report

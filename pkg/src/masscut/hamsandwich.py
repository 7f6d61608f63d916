"""
Ham sandwich cuts.

Plane: bisection on the angle of the difference between the two halving
offsets, which is continuous and changes sign under a half turn.

Space: the halving offset of the third measure fixes the plane for each
unit normal. The residual map (signed mass imbalance of measures 1 and 2)
is odd, so it vanishes somewhere on the sphere. Root finding runs on the
continuous surrogate ``t_i(u) - t_3(u)`` (differences of halving offsets),
whose zeros are planes halving all three measures; every returned plane is
then re-certified by counting.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import root
from scipy.spatial.transform import Rotation

from .errors import DimensionError, NoConvergence, SheetCollision
from .geometry import HalfSpace, Hyperplane
from .measure import Measure, SolveReport, common_dim, fraction_in, jitter
from .quantile import quantile_offset, quantile_offsets

log = logging.getLogger(__name__)


def icosphere(subdivisions: int) -> np.ndarray:
    """Vertices of a subdivided icosahedron on the unit sphere."""
    phi = (1 + 5 ** 0.5) / 2
    verts = [(-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
             (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
             (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(verts)


def tangent_basis(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    helper = np.eye(len(u))[int(np.argmin(np.abs(u)))]
    e1 = helper - (helper @ u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return e1, e2


def halving_deficit(m: Measure, plane: Hyperplane) -> float:
    """How far the worse closed side of ``plane`` falls short of half of ``m``."""
    lo = fraction_in(m, HalfSpace(plane, 1))
    hi = fraction_in(m, HalfSpace(plane, -1))
    return max(0.0, 0.5 - min(lo, hi))


def _halving_gap_2d(m1: Measure, m2: Measure, u: np.ndarray):
    t1 = quantile_offset(m1.points @ u, m1.weights, 0.5)
    t2 = quantile_offset(m2.points @ u, m2.weights, 0.5)
    return t1 - t2, t1, t2


def _bisect_2d(m1: Measure, m2: Measure) -> Hyperplane:
    u0 = np.array([1.0, 0.0])
    h0, t1, t2 = _halving_gap_2d(m1, m2, u0)
    if h0 == 0.0:
        return Hyperplane((1.0, 0.0), (t1 + t2) / 2)
    lo, hi = 0.0, math.pi
    h_lo = h0
    best = (abs(h0), u0, t1, t2)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        u = np.array([math.cos(mid), math.sin(mid)])
        h, t1, t2 = _halving_gap_2d(m1, m2, u)
        if abs(h) < best[0]:
            best = (abs(h), u, t1, t2)
        if h == 0.0:
            break
        if (h > 0) == (h_lo > 0):
            lo, h_lo = mid, h
        else:
            hi = mid
    _, u, t1, t2 = best
    return Hyperplane(tuple(u), (t1 + t2) / 2)


def ham_sandwich_2d(m1: Measure, m2: Measure, seed: int = 0, jitter_retries: int = 3) -> Hyperplane:
    """A line whose closed sides each hold at least half of each measure, up to one atom."""
    if common_dim([m1, m2]) != 2:
        raise DimensionError("ham_sandwich_2d needs planar measures")
    bound = [m.max_weight_fraction + 1e-12 for m in (m1, m2)]
    a, b = m1, m2
    scale = float(np.ptp(np.vstack([m1.points, m2.points]))) or 1.0
    for attempt in range(jitter_retries + 1):
        line = _bisect_2d(a, b)
        if all(halving_deficit(m, line) <= bd for m, bd in zip((m1, m2), bound)):
            return line
        a = jitter(m1, 1e-9 * scale, seed + attempt)
        b = jitter(m2, 1e-9 * scale, seed + attempt + 7919)
    raise NoConvergence("ham sandwich line not certified after jitter retries")


def offset_gap_map(measures: Sequence[Measure], dirs: np.ndarray) -> np.ndarray:
    """Rows ``t_i(u) - t_last(u)`` for each direction ``u`` (shape (k, len-1))."""
    dirs = np.atleast_2d(dirs)
    ts = [quantile_offsets(dirs @ m.points.T, m.weights, 0.5) for m in measures]
    anchor = ts[-1]
    return np.stack([t - anchor for t in ts[:-1]], axis=1)


def residual_map(measures: Sequence[Measure], u) -> np.ndarray:
    """Signed half-imbalance of the leading measures across the plane anchored by the last.

    rho_i(u) = (mass above - mass below) / (2 * total), open sides. Odd in u.
    """
    u = np.asarray(u, dtype=float)
    anchor = measures[-1]
    t = quantile_offset(anchor.points @ u, anchor.weights, 0.5)
    out = []
    for m in measures[:-1]:
        s = m.points @ u - t
        above = float(np.where(s > 0, m.weights, 0.0).sum())
        below = float(np.where(s < 0, m.weights, 0.0).sum())
        out.append((above - below) / (2 * m.total_mass))
    return np.array(out)


def _plane_report(measures, plane: Hyperplane):
    up = HalfSpace(plane, 1)
    down = HalfSpace(plane, -1)
    res = tuple(fraction_in(m, up) - 0.5 for m in measures)
    worst = max(max(abs(fraction_in(m, up) - 0.5), abs(fraction_in(m, down) - 0.5)) for m in measures)
    return res, worst


def anchored_plane(measures: Sequence[Measure], u) -> Hyperplane:
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    anchor = measures[-1]
    return Hyperplane(tuple(u), quantile_offset(anchor.points @ u, anchor.weights, 0.5))


def _polish(measures, u0: np.ndarray, scale: float):
    e1, e2 = tangent_basis(u0)

    def chart(ab):
        v = u0 + ab[0] * e1 + ab[1] * e2
        return v / np.linalg.norm(v)

    def fun(ab):
        return offset_gap_map(measures, chart(ab)[None, :])[0] / scale

    sol = root(fun, np.zeros(2), method="hybr", options={"xtol": 1e-15, "maxfev": 400})
    return chart(sol.x), int(sol.nfev)


def _default_certify(measures):
    def certify(plane: Hyperplane):
        res, worst = _plane_report(measures, plane)
        return res, worst, HalfSpace(plane, 1)
    return certify


def sphere_search(measures: Sequence[Measure], seed: int, tol: float, certify: Callable,
                  subdivisions: int = 5, restarts: int = 64, solver: str = "hs3",
                  polish_measures: Optional[Sequence[Measure]] = None):
    """Grid scan plus multistart polish for a plane halving three measures in R^3.

    ``certify(plane)`` returns ``(residuals, worst, region)`` or None to reject
    the plane. The first candidate with ``worst <= tol`` wins; ties in the
    fallback are broken by (worst, start index). ``polish_measures``, when
    given, are used for a second polish whenever a candidate fails.
    Returns ``(region, report)``; raises NoConvergence with the best report.
    """
    if common_dim(measures) != 3 or len(measures) != 3:
        raise DimensionError("sphere search needs three measures in R^3")
    if tol <= 0:
        raise ValueError("tol must be positive")
    allpts = np.vstack([m.points for m in measures])
    scale = float(np.max(np.ptp(allpts, axis=0))) or 1.0

    rot = Rotation.random(random_state=seed).as_matrix()
    dirs = icosphere(subdivisions) @ rot.T
    score = np.max(np.abs(offset_gap_map(measures, dirs)), axis=1) / scale
    order = np.argsort(score, kind="stable")

    starts: List[np.ndarray] = []
    for k in order:
        u = dirs[k]
        if all(abs(u @ s) < 0.999 for s in starts):
            starts.append(u)
        if len(starts) >= restarts:
            break

    best = None
    rejected = 0
    iterations = 0
    for r, u0 in enumerate(starts):
        u1, nfev = _polish(measures, u0, scale)
        iterations += nfev
        candidates = [(u1, measures), (u0, measures)]
        if polish_measures is not None:
            candidates.append((None, polish_measures))
        for u, ms in candidates:
            if u is None:
                u, nfev = _polish(ms, u1, scale)
                iterations += nfev
            out = certify(anchored_plane(ms, u))
            if out is None:
                rejected += 1
                continue
            res, worst, region = out
            if best is None or (worst, r) < best[0]:
                best = ((worst, r), region, res)
            if worst <= tol:
                report = SolveReport(tuple(res), iterations, r, True, region,
                                     solver=solver, tol=tol, seed=seed)
                return region, report
    if best is None:
        raise SheetCollision("every candidate plane was rejected", None)
    (worst, _), region, res = best
    report = SolveReport(tuple(res), iterations, len(starts), False, region, solver=solver,
                         tol=tol, seed=seed, extra={"best_worst": worst, "rejected": rejected})
    log.debug("%s: no plane within tol=%g, best %g", solver, tol, worst)
    raise NoConvergence(f"{solver}: no solution within tol={tol}; best residual {worst:.3g}", report)


def ham_sandwich_3d(m1: Measure, m2: Measure, m3: Measure, seed: int = 0, tol: float = 1e-3,
                    subdivisions: int = 5, restarts: int = 64) -> Tuple[Hyperplane, SolveReport]:
    """Plane in R^3 whose closed sides each hold 1/2 +- tol of all three measures.

    The offset is anchored to m3; callers permute arguments to change the anchor.
    """
    measures = [m1, m2, m3]
    if common_dim(measures) != 3:
        raise DimensionError("ham_sandwich_3d needs measures in R^3")
    region, report = sphere_search(measures, seed, tol, _default_certify(measures),
                                   subdivisions, restarts)
    return region.plane, report

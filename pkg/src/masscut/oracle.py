"""
Independent re-verification and brute-force oracles.

Nothing here calls solver code: counts are recomputed from the region's
membership test with compensated sums, and the oracles enumerate candidate
cuts exhaustively on small inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import InputError
from .geometry import BOUNDARY_EPS, HalfSpace, Hyperplane, Slab


@dataclass(frozen=True)
class VerifyReport:
    residuals: Tuple[float, ...]
    tol: float

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _fraction(m, region) -> float:
    w = np.asarray(m.weights)
    inside = np.asarray(region.contains(m.points), dtype=bool)
    return math.fsum(w[inside]) / math.fsum(w)


def verify(region, measures: Sequence, fractions=None, tol: float = 1e-3) -> VerifyReport:
    """Recount every measure inside the closed region and compare with the targets."""
    if fractions is None:
        fractions = [0.5] * len(measures)
    if len(fractions) != len(measures):
        raise InputError("one fraction per measure is required")
    res = tuple(_fraction(m, region) - float(a) for m, a in zip(measures, fractions))
    return VerifyReport(res, tol)


def halving_deficit(m, plane: Hyperplane) -> float:
    """max(0, 1/2 - smaller closed-side fraction)."""
    up = _fraction(m, HalfSpace(plane, 1))
    down = _fraction(m, HalfSpace(plane, -1))
    return max(0.0, 0.5 - min(up, down))


def _closed_side_fractions(pts, normals, offsets):
    """Fractions of unit-weight ``pts`` on each closed side of many lines at once."""
    s = normals @ pts.T - offsets[:, None]
    n = pts.shape[0]
    up = np.sum(s >= -BOUNDARY_EPS, axis=1) / n
    down = np.sum(s <= BOUNDARY_EPS, axis=1) / n
    return up, down


def brute_hs2(m1, m2, cap: int = 60, delta: float = 1e-7) -> Tuple[Hyperplane, Tuple[float, float]]:
    """Best halving line by exhaustive enumeration; residuals are halving deficits.

    Candidates: every line through one point of each cloud, each also turned
    by +-delta about either of its two points, plus horizontal and vertical
    lines through every coordinate and every gap midpoint.
    """
    a = np.asarray(m1.points, dtype=float)
    b = np.asarray(m2.points, dtype=float)
    if len(a) + len(b) > cap:
        raise InputError(f"brute_hs2 is capped at {cap} points")
    normals, offsets = [], []

    def add(n, point):
        norm = math.hypot(n[0], n[1])
        if norm == 0:
            return
        n = (n[0] / norm, n[1] / norm)
        normals.append(n)
        offsets.append(n[0] * point[0] + n[1] * point[1])

    for p in a:
        for q in b:
            t = q - p
            if not np.any(t):
                add((1.0, 0.0), p)
                add((0.0, 1.0), p)
                continue
            base = (-t[1], t[0])
            add(base, p)
            for pivot in (p, q):
                for ang in (delta, -delta):
                    c, s = math.cos(ang), math.sin(ang)
                    add((c * base[0] - s * base[1], s * base[0] + c * base[1]), pivot)
    allp = np.vstack([a, b])
    for axis in (0, 1):
        vals = np.unique(allp[:, axis])
        cuts = np.concatenate([vals, (vals[:-1] + vals[1:]) / 2])
        n = (1.0, 0.0) if axis == 0 else (0.0, 1.0)
        for c in cuts:
            normals.append(n)
            offsets.append(float(c))
    normals = np.asarray(normals)
    offsets = np.asarray(offsets)
    up1, down1 = _closed_side_fractions(a, normals, offsets)
    up2, down2 = _closed_side_fractions(b, normals, offsets)
    d1 = np.maximum(0.0, 0.5 - np.minimum(up1, down1))
    d2 = np.maximum(0.0, 0.5 - np.minimum(up2, down2))
    k = int(np.argmin(np.maximum(d1, d2)))
    return Hyperplane(tuple(normals[k]), float(offsets[k])), (float(d1[k]), float(d2[k]))


def _critical_angles(pts) -> np.ndarray:
    """Directions in [0, pi) orthogonal to some point difference, sorted."""
    diff = pts[:, None, :] - pts[None, :, :]
    iu = np.triu_indices(len(pts), 1)
    dv = diff[iu]
    dv = dv[np.any(dv != 0, axis=1)]
    # normal to the difference vector
    ang = np.mod(np.arctan2(dv[:, 0], -dv[:, 1]), math.pi)
    return np.unique(ang)


def brute_slab_2d(measures: Sequence, fractions=None, cap: int = 40) -> Tuple[Slab, Tuple[float, ...]]:
    """Best slab by exhaustive enumeration of directions and combinatorial bounds.

    Directions: every critical angle (where two projections tie) and the
    midpoint of each arc between consecutive critical angles. Bounds: minus
    infinity, every projected value, every gap midpoint and plus infinity.
    """
    pts_list = [np.asarray(m.points, dtype=float) for m in measures]
    w_list = [np.asarray(m.weights, dtype=float) for m in measures]
    if sum(len(p) for p in pts_list) > cap:
        raise InputError(f"brute_slab_2d is capped at {cap} points")
    if fractions is None:
        fractions = [0.5] * len(measures)
    alphas = np.asarray(fractions, dtype=float)
    allp = np.vstack(pts_list)
    crit = _critical_angles(allp)
    if len(crit) == 0:
        crit = np.array([0.0])
    mids = (crit + np.roll(crit, -1)) / 2
    mids[-1] = (crit[-1] + crit[0] + math.pi) / 2
    angles = np.concatenate([crit, np.mod(mids, math.pi)])

    best = None
    for ang in angles:
        u = np.array([math.cos(ang), math.sin(ang)])
        vals = np.unique(allp @ u)
        cuts = np.concatenate([[-math.inf], vals, (vals[:-1] + vals[1:]) / 2, [math.inf]])
        cuts.sort()
        fr_err = None
        for p, w, a in zip(pts_list, w_list, alphas):
            proj = p @ u
            total = math.fsum(w)
            # mass with proj >= lo, and mass with proj > hi
            ge = np.array([math.fsum(w[proj >= c - BOUNDARY_EPS]) for c in cuts]) / total
            gt = np.array([math.fsum(w[proj > c + BOUNDARY_EPS]) for c in cuts]) / total
            mass = ge[:, None] - gt[None, :]
            err = np.abs(mass - a)
            fr_err = err if fr_err is None else np.maximum(fr_err, err)
        fr_err[np.tril_indices(len(cuts), -1)] = np.inf
        i, j = np.unravel_index(int(np.argmin(fr_err)), fr_err.shape)
        score = float(fr_err[i, j])
        if best is None or score < best[0]:
            best = (score, tuple(u), float(cuts[i]), float(cuts[j]))
    _, u, lo, hi = best
    slab = Slab(u, lo, hi)
    res = tuple(_fraction(m, slab) - float(a) for m, a in zip(measures, alphas))
    return slab, res


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = math.pi * (1 + 5 ** 0.5) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _weighted_median_offset(proj, w) -> float:
    order = np.argsort(proj)
    p, ws = proj[order], w[order]
    half = ws.sum() / 2
    c = np.cumsum(ws)
    lo = p[np.searchsorted(c, half * (1 - 1e-12))]
    c_rev = np.cumsum(ws[::-1])
    hi = p[::-1][np.searchsorted(c_rev, half * (1 - 1e-12))]
    return (lo + hi) / 2


def scan_hs3(m1, m2, m3, n_dirs: int = 10000) -> Tuple[Hyperplane, float]:
    """Dense direction scan: the plane halving m3 whose worst closed-side residual is smallest."""
    best = None
    for u in fibonacci_sphere(n_dirs):
        t = _weighted_median_offset(m3.points @ u, np.asarray(m3.weights))
        plane = Hyperplane(tuple(u / np.linalg.norm(u)), float(t))
        worst = 0.0
        for m in (m1, m2, m3):
            worst = max(worst, abs(_fraction(m, HalfSpace(plane, 1)) - 0.5),
                        abs(_fraction(m, HalfSpace(plane, -1)) - 0.5))
        if best is None or worst < best[1]:
            best = (plane, worst)
    return best


def brute_parallel_certificate(measures: Sequence, v, m_parts: int, tol: float = 1e-9) -> bool:
    """Whether any m-1 cuts at gap midpoints along ``v`` are fair or every-region deficient.

    Dynamic program over cut positions: ``ok[j][g]`` says the first j regions
    can end at gap g with each region deficient. Deficiency uses half of the
    measure's smallest point weight as the margin.
    """
    u = np.asarray(v, dtype=float)
    u = u / np.linalg.norm(u)
    proj = [np.asarray(m.points, dtype=float) @ u for m in measures]
    ws = [np.asarray(m.weights, dtype=float) for m in measures]
    vals = np.unique(np.concatenate(proj))
    gaps = np.concatenate(([-math.inf], (vals[:-1] + vals[1:]) / 2, [math.inf]))
    # mass strictly below each gap; gaps avoid every projection so closed and open agree
    cum = np.array([[math.fsum(w[p < g]) / math.fsum(w) for g in gaps]
                    for p, w in zip(proj, ws)])
    margin = np.array([0.5 * w.min() / math.fsum(w) for w in ws])
    target = 1.0 / m_parts
    n_g = len(gaps)
    for fair in (True, False):
        reach = np.zeros(n_g, dtype=bool)
        reach[0] = True
        for j in range(m_parts):
            nxt = np.zeros(n_g, dtype=bool)
            # interior cuts are strictly increasing; the last region ends at +inf
            ends = [n_g - 1] if j == m_parts - 1 else range(1, n_g - 1)
            for a in np.flatnonzero(reach):
                for b in ends:
                    if b <= a:
                        continue
                    mass = cum[:, b] - cum[:, a]
                    if fair:
                        good = np.all(np.abs(mass - target) <= tol)
                    else:
                        good = np.any(mass < target - margin - 1e-12)
                    if good:
                        nxt[b] = True
            reach = nxt
        if reach[n_g - 1]:
            return True
    return False

"""
Slabs (regions between two parallel hyperplanes) cutting prescribed fractions.

For a direction u each measure is replaced by its interpolated mid-CDF: the
piecewise-linear function through (value, mass strictly below + half the
atom) for every distinct projected value, ramping to 0 and 1 half a mean gap
beyond the extremes. Its difference over [lo, hi] is a continuous stand-in
for the slab mass. When alpha * total is a whole number of atoms, a root of
the stand-in with lo and hi strictly between atoms cuts exactly that mass.

The last measure is pinned: for fixed u, the pairs (lo, hi) on which it has
the right stand-in mass form a path parameterized by tau in [0, 3]. It
slides lo in from far below (tau in [0, 1], a lower half-space), then moves
through genuine slabs at constant speed in pinned mass (tau in [1, 2]), and
finally pushes hi out to infinity (tau in [2, 3], an upper half-space). Every
stand-in solution lies on this path, so the remaining d equations are solved
over (direction, tau): a grid scan followed by Powell-hybrid polish. All
candidates are certified by exact counting.
"""
from __future__ import annotations

import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import root

from .errors import DimensionError, InputError, NoConvergence
from .geometry import Annulus, Slab
from .hamsandwich import icosphere, tangent_basis
from .lifts import lift_paraboloid
from .measure import Measure, SolveReport, as_fractions, common_dim, fraction_in, jitter

log = logging.getLogger(__name__)

TAU_GRID = 121
THETA_GRID = 180
# polish starts kept per grid direction (local minima along the path)
LOCAL_MINIMA = 3
# normals with |last coordinate| below this pull back to planar slabs
DEGENERACY = 1e-8


def mid_cdf(proj: np.ndarray, weights: np.ndarray, fallback: float = 0.5,
            max_ramp: float = math.inf):
    """Knots (x, y) of the interpolated mid-CDF of a weighted 1-D sample.

    The end ramps have length min(half the mean gap, ``max_ramp``), or
    ``fallback`` for a single distinct value.
    """
    vals, inv = np.unique(proj, return_inverse=True)
    atom = np.bincount(inv.ravel(), weights=weights)
    total = atom.sum()
    mid = (np.cumsum(atom) - atom / 2) / total
    n = len(vals)
    delta = (vals[-1] - vals[0]) / (2 * (n - 1)) if n > 1 else 0.0
    if not delta > 0:
        delta = fallback
    delta = min(delta, max_ramp)
    x = np.concatenate(([vals[0] - delta], vals, [vals[-1] + delta]))
    y = np.concatenate(([0.0], mid, [1.0]))
    return x, y


class _Profile:
    """Stand-in CDFs of every measure along one direction, with the pinned path."""

    def __init__(self, measures, u, alphas, pin):
        self.u = u
        projs = [m.points @ u for m in measures]
        lo = min(float(p.min()) for p in projs)
        hi = max(float(p.max()) for p in projs)
        self.data_lo, self.data_hi = lo, hi
        self.A, self.B = lo - 1.0, hi + 1.0
        fallback = 0.5 * max(hi - lo, 1.0)
        self.cdfs = [mid_cdf(p, m.weights, fallback) for p, m in zip(projs, measures)]
        self.alphas = alphas
        self.pin = pin
        xa, ya = self.cdfs[pin]
        self.h0 = float(xa[-1])

    def F(self, i, z):
        x, y = self.cdfs[i]
        return np.interp(z, x, y)

    def path(self, tau):
        tau = np.clip(np.asarray(tau, dtype=float), 0.0, 3.0)
        xa, ya = self.cdfs[self.pin]
        alpha = self.alphas[self.pin]
        # middle segment: pinned mass below lo runs from 0 to 1 - alpha
        mass = np.clip(tau - 1.0, 0.0, 1.0) * (1.0 - alpha)
        lo = np.interp(mass, ya, xa)
        hi = np.interp(mass + alpha, ya, xa)
        lo = np.where(tau < 1.0, self.A + tau * (xa[0] - self.A), lo)
        hi = np.where(tau > 2.0, self.h0 + (tau - 2.0) * (self.B - self.h0), hi)
        return lo, hi

    def gaps(self, tau):
        """Stand-in residuals of the unpinned measures along the path."""
        lo, hi = self.path(tau)
        return np.stack([self.F(i, hi) - self.F(i, lo) - a
                         for i, a in enumerate(self.alphas) if i != self.pin], axis=-1)

    def slab(self, tau) -> Slab:
        lo, hi = (float(v) for v in self.path(tau))
        lo = -math.inf if lo < self.data_lo else lo
        hi = math.inf if hi > self.data_hi else hi
        return Slab(tuple(float(c) for c in self.u), lo, hi)


def _direction_2d(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def _grid_directions(d: int):
    if d == 2:
        thetas = np.arange(THETA_GRID) * math.pi / THETA_GRID
        return [(_direction_2d(t), (t,)) for t in thetas]
    pts = icosphere(3)
    pts = pts[(pts[:, 2] > 1e-12) | ((np.abs(pts[:, 2]) <= 1e-12) & (pts[:, 1] >= 0))]
    pts = np.vstack([np.eye(3), pts])
    return [(u, None) for u in pts]


def _certify(measures, alphas, slab: Slab):
    res = tuple(fraction_in(m, slab) - a for m, a in zip(measures, alphas))
    return res, max(abs(r) for r in res)


def _search(measures, alphas, tol, starts, certify_against):
    d = common_dim(measures)
    pin = len(measures) - 1
    taus = np.linspace(0.0, 3.0, TAU_GRID)

    grid = []
    for u, param in _grid_directions(d):
        prof = _Profile(measures, u, alphas, pin)
        score = np.max(np.abs(prof.gaps(taus)), axis=1)
        padded = np.concatenate(([np.inf], score, [np.inf]))
        minima = np.flatnonzero((score <= padded[:-2]) & (score <= padded[2:]))
        for k in minima[np.argsort(score[minima], kind="stable")][:LOCAL_MINIMA]:
            grid.append((float(score[k]), u, param, float(taus[k])))
    grid.sort(key=lambda g: g[0])  # stable: ties keep grid order

    best = None
    evals = 0
    for r, (_, u0, param, tau0) in enumerate(grid[:starts]):
        if d == 2:
            def unpack(z, theta0=param[0]):
                return _direction_2d(theta0 + z[0]), z[1]
            x0 = np.array([0.0, tau0])
        else:
            e1, e2 = tangent_basis(u0)

            def unpack(z, u0=u0, e1=e1, e2=e2):
                v = u0 + z[0] * e1 + z[1] * e2
                return v / np.linalg.norm(v), z[2]
            x0 = np.array([0.0, 0.0, tau0])

        def fun(z, unpack=unpack):
            u, tau = unpack(z)
            return _Profile(measures, u, alphas, pin).gaps(tau)

        sol = root(fun, x0, method="hybr", options={"xtol": 1e-14, "maxfev": 300})
        evals += int(sol.nfev)
        for z in (sol.x, x0):
            u, tau = unpack(z)
            slab = _Profile(measures, u, alphas, pin).slab(tau)
            res, worst = _certify(certify_against, alphas, slab)
            # prefer half-spaces among equally good slabs
            key = (worst, not slab.is_halfspace, r)
            if best is None or key < best[0]:
                best = (key, slab, res)
            if worst <= tol:
                return best[1], best[2], evals, r, True
    (worst, _, r), slab, res = best
    return slab, res, evals, len(grid[:starts]), worst <= tol


def slab_solver(measures: Sequence[Measure], fractions=None, seed: int = 0, tol: float = 1e-3,
                starts: int = 40, jitter_retries: int = 2) -> Tuple[Slab, SolveReport]:
    """A slab holding fraction alpha_i of measure i, for d+1 measures in R^d (d = 2 or 3).

    An infinite bound means the slab is a half-space.
    """
    measures = list(measures)
    d = common_dim(measures)
    if d not in (2, 3):
        raise DimensionError("slab_solver supports d = 2 or 3")
    if len(measures) != d + 1:
        raise InputError(f"slab_solver needs {d + 1} measures in R^{d}")
    alphas = tuple(as_fractions(fractions, len(measures)))
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = float(np.max(np.ptp(np.vstack([m.points for m in measures]), axis=0))) or 1.0

    total_evals = 0
    attempt_best = None
    work = measures
    for attempt in range(jitter_retries + 1):
        slab, res, evals, restarts, ok = _search(work, alphas, tol, starts, measures)
        total_evals += evals
        worst = max(abs(r) for r in res)
        if attempt_best is None or worst < attempt_best[0]:
            attempt_best = (worst, slab, res, restarts)
        if ok:
            report = SolveReport(res, total_evals, restarts + attempt * starts, True, slab,
                                 solver="slab", tol=tol, seed=seed, extra={"fractions": alphas})
            return slab, report
        work = [jitter(m, 1e-9 * scale, seed * 1000 + 17 * attempt + i)
                for i, m in enumerate(measures)]
    worst, slab, res, restarts = attempt_best
    report = SolveReport(res, total_evals, restarts, False, slab, solver="slab", tol=tol, seed=seed,
                         extra={"fractions": alphas, "best_worst": worst})
    raise NoConvergence(f"slab: no solution within tol={tol}; best residual {worst:.3g}", report)


def annulus_from_slab(slab: Slab, base_dim: int):
    """Pull back a slab in the paraboloid lift to an annulus, or a planar slab when it is vertical."""
    n = np.asarray(slab.direction)
    nx, n3 = n[:-1], float(n[-1])
    if abs(n3) <= DEGENERACY:
        norm = float(np.linalg.norm(nx))
        return Slab(tuple(nx / norm), slab.lo / norm, slab.hi / norm)
    # <n, (x, |x|^2)> = n3 (|x - c|^2 - |c|^2) with c = -nx / (2 n3)
    c = -nx / (2 * n3)
    c2 = float(c @ c)
    lo, hi = (slab.lo, slab.hi) if n3 > 0 else (slab.hi, slab.lo)
    r2_in = lo / n3 + c2
    r2_out = hi / n3 + c2
    r_in = math.sqrt(max(r2_in, 0.0)) if math.isfinite(r2_in) else 0.0
    r_out = math.sqrt(max(r2_out, 0.0)) if math.isfinite(r2_out) else math.inf
    return Annulus(tuple(c), r_in, max(r_in, r_out))


def annulus_solver(measures: Sequence[Measure], fractions=None, seed: int = 0, tol: float = 1e-3,
                   **kwargs) -> Tuple[object, SolveReport]:
    """Region between two concentric circles holding fraction alpha_i of each of four planar measures.

    Returns a planar Slab instead when the lifted slab is vertical (a common
    straight cut exists).
    """
    measures = list(measures)
    if common_dim(measures) != 2 or len(measures) != 4:
        raise DimensionError("annulus_solver needs four planar measures")
    alphas = tuple(as_fractions(fractions, 4))
    lifted = [Measure(lift_paraboloid(m.points), m.weights, m.name) for m in measures]
    slab, up_report = slab_solver(lifted, alphas, seed=seed, tol=tol, **kwargs)
    region = annulus_from_slab(slab, 2)
    res = tuple(fraction_in(m, region) - a for m, a in zip(measures, alphas))
    worst = max(abs(r) for r in res)
    report = SolveReport(res, up_report.iterations, up_report.restarts, worst <= tol, region,
                         solver="annulus", tol=tol, seed=seed,
                         extra={"fractions": alphas, "lifted_slab": slab})
    if worst > tol:
        raise NoConvergence(f"annulus: pulled-back residual {worst:.3g} exceeds tol", report)
    return region, report

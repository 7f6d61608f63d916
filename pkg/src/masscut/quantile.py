"""
Weighted quantile cuts along a direction.

The tie rule: the cut offset t is the midpoint of the leftmost admissible
value (smallest projection whose prefix mass reaches alpha) and the
rightmost one (largest projection whose suffix mass reaches 1 - alpha).
The two coincide at an atom and span a gap otherwise. Prefix and suffix
sums are computed with mirrored operations, so negating the direction
negates the offset exactly when alpha = 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DimensionError, PartitionFailure
from .geometry import Hyperplane, Slab, direction
from .measure import Measure, common_dim, fraction_in

# relative slack when comparing cumulative mass against alpha * total
_MASS_RTOL = 1e-12


def quantile_offset(proj, weights, alpha: float) -> float:
    """Quantile cut offset of a weighted 1-D sample (see module docstring)."""
    proj = np.asarray(proj, dtype=float)
    w = np.asarray(weights, dtype=float)
    order = np.argsort(proj, kind="stable")
    p = proj[order]
    ws = w[order]
    total = float(ws.sum())
    slack = _MASS_RTOL * total
    prefix = np.cumsum(ws)
    suffix = np.cumsum(ws[::-1])
    i = int(np.argmax(prefix >= alpha * total - slack))
    j = int(np.argmax(suffix >= (1.0 - alpha) * total - slack))
    return (p[i] + p[::-1][j]) / 2.0


def quantile_offsets(proj: np.ndarray, weights, alpha: float) -> np.ndarray:
    """Row-wise :func:`quantile_offset` for a (k, n) projection matrix."""
    proj = np.asarray(proj, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = proj.shape[1]
    if np.all(w == w[0]):
        slack = _MASS_RTOL * n
        i = max(int(math.ceil(alpha * n - slack)) - 1, 0)
        j = max(int(math.ceil((1.0 - alpha) * n - slack)) - 1, 0)
        hi_idx = n - 1 - j
        kth = sorted({i, hi_idx})
        part = np.partition(proj, kth, axis=1)
        return (part[:, i] + part[:, hi_idx]) / 2.0
    order = np.argsort(proj, axis=1, kind="stable")
    p = np.take_along_axis(proj, order, axis=1)
    ws = w[order]
    total = ws.sum(axis=1, keepdims=True)
    slack = _MASS_RTOL * total
    prefix = np.cumsum(ws, axis=1)
    suffix = np.cumsum(ws[:, ::-1], axis=1)
    i = np.argmax(prefix >= alpha * total - slack, axis=1)
    j = np.argmax(suffix >= (1.0 - alpha) * total - slack, axis=1)
    rows = np.arange(proj.shape[0])
    return (p[rows, i] + p[:, ::-1][rows, j]) / 2.0


def quantile_hyperplane(m: Measure, v, alpha: float) -> Hyperplane:
    """Hyperplane orthogonal to ``v`` whose closed lower side holds >= alpha of ``m``."""
    u = np.asarray(direction(v))
    if u.shape[0] != m.dim:
        raise DimensionError("direction and measure dimensions differ")
    t = quantile_offset(m.points @ u, m.weights, alpha)
    return Hyperplane(tuple(u), float(t))


def midpoint_hyperplane(measures: Sequence[Measure], v) -> Tuple[Hyperplane, bool]:
    """Plane half-way between the extreme halving planes orthogonal to ``v``.

    The flag is True when all halving planes coincide (within 1e-12).
    """
    d = common_dim(measures)
    u = np.asarray(direction(v))
    if u.shape[0] != d:
        raise DimensionError("direction and measure dimensions differ")
    ts = [quantile_offset(m.points @ u, m.weights, 0.5) for m in measures]
    lo, hi = min(ts), max(ts)
    return Hyperplane(tuple(u), (lo + hi) / 2.0), bool(hi - lo <= 1e-12)


class Outcome(Enum):
    FAIR = "fair"
    EVERY_REGION_DEFICIENT = "every_region_deficient"


@dataclass(frozen=True)
class ParallelPartition:
    direction: Tuple[float, ...]
    cuts: Tuple[float, ...]
    outcome: Outcome
    # for EVERY_REGION_DEFICIENT: index of a deficient measure per region
    witnesses: Tuple[int, ...] = ()

    @property
    def hyperplanes(self) -> List[Hyperplane]:
        return [Hyperplane(self.direction, c) for c in self.cuts]

    def regions(self) -> List[Slab]:
        bounds = (-math.inf,) + self.cuts + (math.inf,)
        return [Slab(self.direction, lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def deficiency_margin(m: Measure) -> float:
    return 0.5 * m.min_weight_fraction


def region_fractions(measures: Sequence[Measure], part: ParallelPartition) -> np.ndarray:
    regions = part.regions()
    return np.array([[fraction_in(m, r) for r in regions] for m in measures])


def _is_fair(fr: np.ndarray, m_parts: int, tol: float) -> bool:
    return bool(np.all(np.abs(fr - 1.0 / m_parts) <= tol))


def _deficient_witnesses(fr: np.ndarray, margins, m_parts: int):
    target = 1.0 / m_parts
    wit = []
    for j in range(fr.shape[1]):
        found = [i for i in range(fr.shape[0]) if fr[i, j] < target - margins[i] - _MASS_RTOL]
        if not found:
            return None
        wit.append(min(found, key=lambda i: fr[i, j] - target + margins[i]))
    return tuple(wit)


def _gap_position(sorted_proj: np.ndarray, rank: int, all_sorted: np.ndarray) -> float:
    """Cut position leaving exactly ``rank`` of the sorted projections below it."""
    n = len(sorted_proj)
    if 0 < rank < n:
        return (sorted_proj[rank - 1] + sorted_proj[rank]) / 2.0
    if rank <= 0:
        hi = sorted_proj[0]
        below = all_sorted[all_sorted < hi]
        return (below[-1] + hi) / 2.0 if len(below) else hi - 1.0
    lo = sorted_proj[-1]
    above = all_sorted[all_sorted > lo]
    return (lo + above[0]) / 2.0 if len(above) else lo + 1.0


def _widening_cuts(measures, u, m_parts, fr0, base_cuts):
    """Discrete version of the widening argument started from measure 1's equipartition."""
    proj = [m.points @ u for m in measures]
    allp = np.sort(np.concatenate(proj))
    p1 = np.sort(proj[0])
    # rank of measure 1 points below each base cut
    ranks = [int(np.searchsorted(p1, c, side="right")) for c in base_cuts]
    target = 1.0 / m_parts
    candidates = []
    for i in range(1, len(measures)):
        for j in range(m_parts):
            if fr0[i, j] < target:
                candidates.append((fr0[i, j] - target, i, j))
    for _, i, j in sorted(candidates):
        new_ranks = list(ranks)
        # cut k separates region k and k+1; left of region j are cuts 0..j-1
        for k in range(j):
            new_ranks[k] = ranks[k] - (k + 1)
        for k in range(j, m_parts - 1):
            new_ranks[k] = ranks[k] + (m_parts - 1 - k)
        if any(r < 0 or r > len(p1) for r in new_ranks):
            continue
        if any(b < a for a, b in zip(new_ranks, new_ranks[1:])):
            continue
        cuts = [_gap_position(p1, r, allp) for r in new_ranks]
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            continue
        yield tuple(float(c) for c in cuts)


def _greedy_cuts(measures, u, m_parts, margins):
    """Furthest-reach sweep: each region extended as far right as deficiency allows.

    A later start can only reach further, so taking the furthest reach that
    still leaves room for the remaining cuts is exact among gap-midpoint cuts.
    """
    proj = [m.points @ u for m in measures]
    vals = np.unique(np.concatenate(proj))
    gaps = np.concatenate(([vals[0] - 1.0], (vals[:-1] + vals[1:]) / 2.0, [vals[-1] + 1.0]))
    # cumulative mass fraction of each measure below each gap position
    cum = np.array([
        [m.mass_where(p < g) / m.total_mass for g in gaps] for m, p in zip(measures, proj)
    ])
    target = 1.0 / m_parts
    marg = np.asarray(margins)

    start = None  # None: unbounded below
    cuts = []
    for j in range(m_parts - 1):
        lo_cum = np.zeros(len(measures)) if start is None else cum[:, start]
        best = None
        first = 1 if start is None else start + 1
        # the outer sentinels would leave an empty region, and the later cuts need room
        last = len(gaps) - 2 - (m_parts - 2 - j)
        for g in range(first, last + 1):
            if np.any(cum[:, g] - lo_cum < target - marg - _MASS_RTOL):
                best = g
            else:
                break
        if best is None:
            return None
        cuts.append(best)
        start = best
    if not np.any(1.0 - cum[:, start] < target - marg - _MASS_RTOL):
        return None
    return tuple(float(gaps[g]) for g in cuts)


def strong_parallel_partition(measures: Sequence[Measure], v, m_parts: int,
                              tol: float = 1e-9) -> ParallelPartition:
    """m-1 parallel cuts orthogonal to ``v``: fair for all measures, or every region deficient.

    Starts from the first measure's equipartition. If some other measure is
    short in a region, that region is widened and the neighbouring cuts are
    pushed outward one gap per step, as in the continuous argument. When the
    discrete widening cannot certify deficiency, a furthest-reach sweep over
    gap midpoints is used instead; it finds a deficient partition whenever
    one exists among gap-midpoint cuts.
    """
    if m_parts < 2:
        raise ValueError("m_parts must be at least 2")
    common_dim(measures)
    u = np.asarray(direction(v))
    first = measures[0]
    base = tuple(float(quantile_offset(first.points @ u, first.weights, k / m_parts))
                 for k in range(1, m_parts))
    if all(b > a for a, b in zip(base, base[1:])):
        part = ParallelPartition(tuple(u), base, Outcome.FAIR)
        fr0 = region_fractions(measures, part)
        if _is_fair(fr0, m_parts, tol):
            return part
    else:
        fr0 = None
    margins = [deficiency_margin(m) for m in measures]
    attempts = []
    if fr0 is not None:
        attempts.extend(_widening_cuts(measures, u, m_parts, fr0, base))
    greedy = _greedy_cuts(measures, u, m_parts, margins)
    if greedy is not None:
        attempts.append(greedy)
    for cuts in attempts:
        part = ParallelPartition(tuple(u), cuts, Outcome.EVERY_REGION_DEFICIENT)
        wit = _deficient_witnesses(region_fractions(measures, part), margins, m_parts)
        if wit is not None:
            return ParallelPartition(tuple(u), cuts, Outcome.EVERY_REGION_DEFICIENT, wit)
    raise PartitionFailure("neither a fair nor an every-region-deficient partition was found; "
                           "jitter the input")


def verify_parallel_partition(measures: Sequence[Measure], part: ParallelPartition,
                              tol: float = 1e-9) -> bool:
    """Re-check a partition's claim by direct counting."""
    m_parts = len(part.cuts) + 1
    if any(b < a for a, b in zip(part.cuts, part.cuts[1:])):
        return False
    fr = region_fractions(measures, part)
    if part.outcome is Outcome.FAIR:
        return _is_fair(fr, m_parts, tol)
    target = 1.0 / m_parts
    for j, i in enumerate(part.witnesses):
        if not fr[i, j] < target - deficiency_margin(measures[i]):
            return False
    return len(part.witnesses) == m_parts

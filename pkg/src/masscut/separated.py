"""
Separation certificates and fixed-fraction half-spaces for well separated measures.

Separating hyperplanes come from margin-maximizing linear programs; every
witness is re-checked point by point. The half-space solver follows the
hypercube degree argument: common tangents give the corners, multilinear
interpolation of their coefficients fills the cube, and the map sending a
cube point to the fractions below its hyperplane fixes every face.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay
from scipy.spatial import QhullError

from .errors import (DimensionError, InputError, NoConvergence, NotConcentrated,
                     NotNicelySeparated, NotSeparated, PreconditionError, VerticalTangent)
from .geometry import (BOUNDARY_EPS, Disk, HalfSpace, Hyperplane, hull_vertices,
                       points_in_convex_polygon)
from .lifts import lift_paraboloid
from .measure import Measure, SolveReport, as_fractions, common_dim, fraction_in
from .slab import mid_cdf

log = logging.getLogger(__name__)

# strict separation margin required of every witness
SEPARATION_MARGIN = 1e-9
# inflation of the hulls before taking common tangents, relative to the diameter
TANGENT_MARGIN = 1e-6


class SeparationKind(Enum):
    WELL_SEPARATED = "well_separated"
    NICELY_SEPARATED = "nicely_separated"
    SPHERES_SEPARATED = "spheres_separated"


@dataclass(frozen=True)
class SeparationCertificate:
    """Witnesses keyed by split (tuple of indices on the + side) or by measure index.

    A Hyperplane witness has its key group strictly on the + side; a Disk
    witness has it strictly inside the region.
    """

    kind: SeparationKind
    witnesses: Tuple[Tuple[object, object], ...]

    def witness(self, key):
        for k, w in self.witnesses:
            if k == key:
                return w
        raise KeyError(key)


def _support(m: Measure) -> np.ndarray:
    """Points that determine the hull (all points when the hull is degenerate)."""
    pts = np.asarray(m.points)
    if len(m) <= m.dim + 1:
        return pts
    if m.dim == 2:
        return hull_vertices(pts)
    try:
        return pts[ConvexHull(pts).vertices]
    except QhullError:
        return pts


def separating_hyperplane(plus: np.ndarray, minus: np.ndarray,
                          through: Optional[np.ndarray] = None,
                          plus_closed: Optional[np.ndarray] = None) -> Optional[Tuple[Hyperplane, float]]:
    """Hyperplane with ``plus`` strictly on the + side and ``minus`` strictly on the - side.

    Maximizes the margin under |w|_inf <= 1. ``through`` forces the plane
    through a point; ``plus_closed`` points need only lie on the closed +
    side. Returns (plane, margin) or None when no positive margin exists.
    """
    dim = plus.shape[1]
    pts = [plus, minus] + ([plus_closed] if plus_closed is not None else [])
    allp = np.vstack(pts + ([through[None, :]] if through is not None else []))
    center = allp.mean(axis=0)
    scale = float(np.max(np.abs(allp - center))) or 1.0

    def norm(x):
        return (x - center) / scale

    # variables: w (dim), b, s; maximize s
    rows, rhs = [], []
    for x in norm(plus):
        rows.append(np.concatenate([-x, [1.0, 1.0]]))
        rhs.append(0.0)
    for x in norm(minus):
        rows.append(np.concatenate([x, [-1.0, 1.0]]))
        rhs.append(0.0)
    if plus_closed is not None:
        for x in norm(plus_closed):
            rows.append(np.concatenate([-x, [1.0, 0.0]]))
            rhs.append(0.0)
    eq_a = eq_b = None
    if through is not None:
        eq_a = [np.concatenate([norm(through), [-1.0, 0.0]])]
        eq_b = [0.0]
    c = np.zeros(dim + 2)
    c[-1] = -1.0
    bounds = [(-1.0, 1.0)] * dim + [(None, None), (None, 1.0)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=eq_a, b_eq=eq_b,
                  bounds=bounds, method="highs")
    if res.status != 0 or res.x[-1] <= 0:
        return None
    w, b = res.x[:dim], res.x[dim]
    wn = float(np.linalg.norm(w))
    if wn == 0.0:
        return None
    # back to original coordinates: w.(x - center)/scale >= b
    plane = Hyperplane.from_normal(w, b * scale + float(w @ center))
    margin = min(
        float(np.min(plane.signed(plus))) if len(plus) else math.inf,
        float(np.min(-plane.signed(minus))) if len(minus) else math.inf,
    )
    if through is not None:
        plane = Hyperplane(plane.normal, float(np.asarray(plane.normal) @ through))
        margin = min(float(np.min(plane.signed(plus))), float(np.min(-plane.signed(minus))))
    if margin < SEPARATION_MARGIN:
        return None
    return plane, margin


def _splits(n: int):
    """Nontrivial bipartitions, each listed once by the side containing index 0."""
    for r in range(1, n):
        for group in itertools.combinations(range(n), r):
            if 0 in group:
                yield group


def check_well_separated(measures: Sequence[Measure]) -> SeparationCertificate:
    """Certificate that every bipartition of the supports is strictly separable."""
    d = common_dim(measures)
    if len(measures) > d + 1:
        raise InputError(f"at most {d + 1} measures can be well separated in R^{d}")
    supports = [_support(m) for m in measures]
    witnesses = []
    for group in _splits(len(measures)):
        plus = np.vstack([supports[i] for i in group])
        minus = np.vstack([supports[i] for i in range(len(measures)) if i not in group])
        found = separating_hyperplane(plus, minus)
        if found is None:
            raise NotSeparated(group)
        plane = found[0]
        # re-verify on every point, not only hull vertices
        for i, m in enumerate(measures):
            s = plane.signed(m.points)
            ok = np.all(s >= SEPARATION_MARGIN) if i in group else np.all(s <= -SEPARATION_MARGIN)
            if not ok:
                raise NotSeparated(group)
        witnesses.append((group, plane))
    return SeparationCertificate(SeparationKind.WELL_SEPARATED, tuple(witnesses))


def check_nicely_separated(measures: Sequence[Measure]) -> SeparationCertificate:
    """Certificate with, per index i, a plane having K_i strictly below and all other supports above."""
    common_dim(measures)
    supports = [_support(m) for m in measures]
    witnesses = []
    if len(measures) == 1:
        # nothing to separate from: any plane beyond the cluster will do
        d = measures[0].dim
        top = float(np.max(measures[0].points[:, 0]))
        normal = tuple(float(c) for c in np.eye(d)[0])
        return SeparationCertificate(SeparationKind.NICELY_SEPARATED,
                                     ((0, Hyperplane(normal, top + 1.0)),))
    for i in range(len(measures)):
        others = np.vstack([supports[j] for j in range(len(measures)) if j != i])
        found = separating_hyperplane(others, supports[i])
        if found is None:
            raise NotNicelySeparated(i)
        witnesses.append((i, found[0]))
    return SeparationCertificate(SeparationKind.NICELY_SEPARATED, tuple(witnesses))


def check_spheres_separated(measures: Sequence[Measure]) -> SeparationCertificate:
    """Every bipartition separated by a sphere or a hyperplane, via the paraboloid lift."""
    lifted = [Measure(lift_paraboloid(m.points), m.weights, m.name) for m in measures]
    cert = check_well_separated(lifted)
    witnesses = []
    for group, plane in cert.witnesses:
        witnesses.append((group, sphere_from_plane(plane)))
    return SeparationCertificate(SeparationKind.SPHERES_SEPARATED, tuple(witnesses))


def sphere_from_plane(plane: Hyperplane):
    """Region of R^d whose lift lies on the + side of ``plane``: a disk, its complement or a half-space."""
    n = np.asarray(plane.normal)
    nx, n3 = n[:-1], float(n[-1])
    if abs(n3) <= 1e-12:
        return HalfSpace.from_normal(nx, plane.offset, 1)
    center = -nx / (2 * n3)
    r2 = plane.offset / n3 + float(center @ center)
    return Disk(tuple(center), math.sqrt(max(r2, 0.0)), inside=n3 < 0)


# ---------------------------------------------------------------------------
# concentration


@dataclass(frozen=True)
class Anchors:
    p: Tuple[float, ...]
    ps: Tuple[Tuple[float, ...], ...]
    qs: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(c) for c in self.p))
        object.__setattr__(self, "ps", tuple(tuple(float(c) for c in v) for v in self.ps))
        object.__setattr__(self, "qs", tuple(tuple(float(c) for c in v) for v in self.qs))
        if len(self.ps) != len(self.qs):
            raise InputError("need one q_i per p_i")


@dataclass(frozen=True)
class ConcentrationCertificate:
    """Planes H_i (others on the + side, K_i strictly on the - side) and anchors."""

    planes: Tuple[Hyperplane, ...]
    anchors: Anchors


CONDITIONS = ("anchor_on_facet", "center_in_core", "tip_on_ray", "cluster_in_cone")


def in_hull(vertices: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Closed convex hull membership (exact predicates in the plane)."""
    vertices = np.asarray(vertices, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if vertices.shape[1] == 2:
        return points_in_convex_polygon(hull_vertices(vertices), points)
    tri = Delaunay(vertices)
    return tri.find_simplex(points, tol=BOUNDARY_EPS) >= 0


def _closed_plus(plane: Hyperplane, pts) -> bool:
    return bool(np.all(plane.signed(pts) >= -BOUNDARY_EPS))


def verify_concentrated(measures: Sequence[Measure], planes: Sequence[Hyperplane],
                        anchors: Anchors) -> Optional[str]:
    """Name of the first violated concentration condition, or None."""
    n = len(measures)
    p = np.asarray(anchors.p)
    ps = np.asarray(anchors.ps)
    qs = np.asarray(anchors.qs)
    if len(ps) != n or len(planes) != n:
        return "anchor_on_facet"
    for i, h in enumerate(planes):
        if not np.all(h.signed(measures[i].points) <= -SEPARATION_MARGIN):
            return "anchor_on_facet"
        if any(not np.all(h.signed(measures[j].points) >= SEPARATION_MARGIN)
               for j in range(n) if j != i):
            return "anchor_on_facet"
    for i in range(n):
        if abs(planes[i].signed(ps[i:i + 1])[0]) > 1e-9:
            return "anchor_on_facet"
        if not all(_closed_plus(planes[j], ps[i:i + 1]) for j in range(n)):
            return "anchor_on_facet"
    core = ps
    if n <= p.shape[0]:
        # a degenerate core: p must be an affine combination with nonnegative weights
        coef, *_ = np.linalg.lstsq(np.vstack([core.T, np.ones(n)]), np.append(p, 1.0), rcond=None)
        if np.any(coef < -1e-9) or np.linalg.norm(core.T @ coef - p) > 1e-9:
            return "center_in_core"
    elif not in_hull(core, p[None, :])[0]:
        return "center_in_core"
    for i in range(n):
        ray = ps[i] - p
        off = qs[i] - p
        t = float(off @ ray) / float(ray @ ray)
        if t < 0 or np.linalg.norm(off - t * ray) > 1e-9 * max(1.0, np.linalg.norm(off)):
            return "tip_on_ray"
        if not all(_closed_plus(planes[j], qs[i:i + 1]) for j in range(n) if j != i):
            return "tip_on_ray"
    for i in range(n):
        cone = np.vstack([qs[i:i + 1], core])
        if not np.all(in_hull(cone, measures[i].points)):
            return "cluster_in_cone"
    return None


def _facet_anchor(planes: Sequence[Hyperplane], i: int) -> Optional[np.ndarray]:
    """A point of H_i inside every other closed half-space, as deep as possible."""
    d = planes[0].dim
    n_i = np.asarray(planes[i].normal)
    # variables x (d), s; maximize s with <n_j, x> - c_j >= s for j != i, <n_i, x> = c_i, |x| bounded
    rows, rhs = [], []
    for j, h in enumerate(planes):
        if j == i:
            continue
        rows.append(np.concatenate([-np.asarray(h.normal), [1.0]]))
        rhs.append(-h.offset)
    if not rows:
        return np.asarray(planes[i].normal) * planes[i].offset
    res = linprog(np.concatenate([np.zeros(d), [-1.0]]), A_ub=np.array(rows), b_ub=np.array(rhs),
                  A_eq=[np.concatenate([n_i, [0.0]])], b_eq=[planes[i].offset],
                  bounds=[(None, None)] * d + [(None, 1.0)], method="highs")
    if res.status != 0 or res.x[-1] < 0:
        return None
    return res.x[:d]


def check_concentrated(measures: Sequence[Measure], anchors: Optional[Anchors] = None,
                       stretch_budget: int = 60) -> ConcentrationCertificate:
    """Certificate of nice separation plus the anchor conditions used by the n-vertex solver.

    With ``anchors`` supplied, each H_i is fitted through p_i with the
    other anchors on its closed + side. Without anchors, p_i is the deepest
    point of H_i inside the other half-spaces, p is their centroid and each
    q_i is pushed out along the ray from p through p_i until its cone
    contains K_i.
    """
    n = len(measures)
    common_dim(measures)
    supports = [_support(m) for m in measures]
    if anchors is not None:
        ps = np.asarray(anchors.ps)
        qs = np.asarray(anchors.qs)
        if len(ps) != n:
            raise InputError("need one anchor pair per measure")
        planes = []
        for i in range(n):
            others = np.vstack([supports[j] for j in range(n) if j != i])
            closed = np.vstack([np.delete(ps, i, axis=0), np.delete(qs, i, axis=0)])
            found = separating_hyperplane(others, supports[i], through=ps[i], plus_closed=closed)
            if found is None:
                raise NotConcentrated("anchor_on_facet")
            planes.append(found[0])
        bad = verify_concentrated(measures, planes, anchors)
        if bad:
            raise NotConcentrated(bad)
        return ConcentrationCertificate(tuple(planes), anchors)

    cert = check_nicely_separated(measures)
    planes = [w for _, w in cert.witnesses]
    ps = []
    for i in range(n):
        a = _facet_anchor(planes, i)
        if a is None:
            raise NotConcentrated("anchor_on_facet")
        ps.append(a)
    ps = np.array(ps)
    p = ps.mean(axis=0)
    qs = []
    for i in range(n):
        ray = ps[i] - p
        cone_ok = False
        s = 1.0
        for _ in range(stretch_budget):
            q = p + s * ray
            cone = np.vstack([q[None, :], ps])
            if np.all(in_hull(cone, measures[i].points)):
                cone_ok = True
                break
            s *= 1.25
        if not cone_ok:
            raise NotConcentrated("cluster_in_cone")
        qs.append(q)
    anchors = Anchors(tuple(p), tuple(map(tuple, ps)), tuple(map(tuple, qs)))
    bad = verify_concentrated(measures, planes, anchors)
    if bad:
        raise NotConcentrated(bad)
    return ConcentrationCertificate(tuple(planes), anchors)


# ---------------------------------------------------------------------------
# common tangents and the half-space solver


@dataclass(frozen=True)
class TangentFrame:
    """Common tangents in graph form x_d = a . x' + b, keyed by the corner v_I.

    ``corners[k]`` is a 0/1 tuple with 1 for the measures lying below
    ``planes[k]``; ``coeffs[k]`` is r(H) = (a, b).
    """

    corners: Tuple[Tuple[int, ...], ...]
    planes: Tuple[Hyperplane, ...]
    coeffs: Tuple[Tuple[float, ...], ...]
    margin: float = 0.0

    def coeff(self, corner) -> np.ndarray:
        return np.asarray(self.coeffs[self.corners.index(tuple(corner))])

    def plane(self, corner) -> Hyperplane:
        return self.planes[self.corners.index(tuple(corner))]


def graph_coeffs(plane: Hyperplane) -> np.ndarray:
    """r(H) = (a, b) for H = {x_d = a . x' + b}."""
    n = np.asarray(plane.normal)
    if abs(n[-1]) < 1e-9:
        raise VerticalTangent("hyperplane is vertical")
    return np.append(-n[:-1] / n[-1], plane.offset / n[-1])


def plane_from_coeffs(r) -> Hyperplane:
    r = np.asarray(r, dtype=float)
    return Hyperplane.from_normal(np.append(-r[:-1], 1.0), r[-1])


def below_halfspace(r) -> HalfSpace:
    """Closed set of points with x_d <= a . x' + b."""
    return HalfSpace(plane_from_coeffs(r), -1)


def _common_tangents_2d(supports, delta, scale):
    a, b = supports
    tol = 1e-12 * scale + 1e-15
    found: Dict[Tuple[int, int], Hyperplane] = {}
    for (s0, s1), (i0, i1) in (((a, b), (0, 1)), ((b, a), (1, 0))):
        for u in s0:
            diffs = s1 - u
            dist = np.linalg.norm(diffs, axis=1)
            for v, dv, D in zip(s1, diffs, dist):
                if D == 0:
                    continue
                t = dv / D
                perp = np.array([-t[1], t[0]])
                cands = []
                # both hulls on the same side, shifted out by delta
                for n in (perp, -perp):
                    cands.append((n, float(n @ u) + delta, "same"))
                # hull s0 below, s1 above, each at distance delta
                cosg = min(1.0, 2 * delta / D)
                sing = math.sqrt(max(0.0, 1 - cosg * cosg))
                for sg in (1.0, -1.0):
                    n = cosg * t + sg * sing * perp
                    cands.append((n, float(n @ u) + delta, "split"))
                for n, c, kind in cands:
                    s_a = s0 @ n - c
                    s_b = s1 @ n - c
                    if kind == "same":
                        ok = s_a.max() <= -delta + tol and s_b.max() <= -delta + tol
                    else:
                        ok = s_a.max() <= -delta + tol and s_b.min() >= delta - tol
                    if not ok:
                        continue
                    plane = Hyperplane.from_normal(n, c)
                    if abs(plane.normal[1]) < 1e-9:
                        raise VerticalTangent("a common tangent is vertical")
                    up = 1 if plane.normal[1] > 0 else -1
                    # s0 lies on the - side of n; below means up * (n.x - c) <= 0
                    below0 = up > 0
                    below1 = below0 if kind == "same" else not below0
                    corner = [0, 0]
                    corner[i0] = int(below0)
                    corner[i1] = int(below1)
                    found.setdefault(tuple(corner), plane)
    return found


def _support_value(pts, a, upper: bool):
    z = pts[:, -1] - pts[:, :-1] @ a
    return z.max() if upper else z.min()


def _common_tangents_nd(supports, delta, scale):
    """Best-effort tangents for d >= 3 by root finding on support functions."""
    from scipy.optimize import root

    d = supports[0].shape[1]
    found = {}
    for corner in itertools.product((0, 1), repeat=d):
        def gaps(a, corner=corner):
            infl = delta * math.sqrt(1 + float(a @ a))
            vals = [(_support_value(s, a, True) + infl) if c else (_support_value(s, a, False) - infl)
                    for s, c in zip(supports, corner)]
            return np.array(vals[:-1]) - vals[-1]
        best = None
        for start in [np.zeros(d - 1)] + [np.eye(d - 1)[k] * sgn for k in range(d - 1) for sgn in (1, -1)]:
            sol = root(gaps, start, method="hybr")
            if best is None or np.max(np.abs(sol.fun)) < np.max(np.abs(best.fun)):
                best = sol
        if np.max(np.abs(best.fun)) > 1e-9 * scale:
            raise PreconditionError(f"no common tangent found for corner {corner}")
        a = best.x
        infl = delta * math.sqrt(1 + float(a @ a))
        s0, c0 = supports[-1], corner[-1]
        b = (_support_value(s0, a, True) + infl) if c0 else (_support_value(s0, a, False) - infl)
        found[corner] = plane_from_coeffs(np.append(a, b))
    return found


def common_tangents(measures: Sequence[Measure], margin: float = 0.0) -> TangentFrame:
    """The 2^d common tangent hyperplanes of d well separated hulls.

    ``margin`` inflates every hull by that distance first, so the tangents
    keep all points strictly off them. Exact vertex enumeration for d = 2;
    d = 3 uses support-function root finding and is best-effort.
    """
    d = common_dim(measures)
    if len(measures) != d:
        raise InputError(f"need exactly {d} measures in R^{d}")
    if d < 2:
        raise DimensionError("common tangents need d >= 2")
    supports = [_support(m) for m in measures]
    allp = np.vstack(supports)
    scale = float(np.max(np.ptp(allp, axis=0))) or 1.0
    if d == 2:
        found = _common_tangents_2d(supports, margin, scale)
    else:
        found = _common_tangents_nd(supports, margin, scale)
    corners = tuple(itertools.product((0, 1), repeat=d))
    missing = [c for c in corners if c not in found]
    if missing:
        raise PreconditionError(f"no common tangent with below-set pattern {missing[0]}")
    planes = tuple(found[c] for c in corners)
    coeffs = tuple(tuple(float(x) for x in graph_coeffs(h)) for h in planes)
    return TangentFrame(corners, planes, coeffs, margin)


def cube_weights(q) -> np.ndarray:
    """lambda_I(q) for the corners in lexicographic order of itertools.product((0, 1), ...)."""
    q = np.asarray(q, dtype=float)
    out = []
    for corner in itertools.product((0, 1), repeat=len(q)):
        c = np.asarray(corner)
        out.append(float(np.prod(np.where(c == 1, q, 1.0 - q))))
    return np.array(out)


def f_tilde(frame: TangentFrame, q) -> np.ndarray:
    """Multilinear extension of the corner coefficients to the cube."""
    return cube_weights(q) @ np.asarray(frame.coeffs)


def g_map(frame: TangentFrame, measures: Sequence[Measure], q) -> np.ndarray:
    """Fractions of each measure on or below the hyperplane r^-1(f_tilde(q)), by counting."""
    region = below_halfspace(f_tilde(frame, q))
    return np.array([fraction_in(m, region) for m in measures])


class _SmoothG:
    """Continuous stand-in for g built from mid-CDFs with ramps shorter than the tangent margin."""

    def __init__(self, frame: TangentFrame, measures):
        self.frame = frame
        self.pts = [np.asarray(m.points) for m in measures]
        self.w = [m.weights for m in measures]
        self.ramp = frame.margin / 2 if frame.margin > 0 else math.inf

    def __call__(self, q):
        r = f_tilde(self.frame, np.clip(q, 0.0, 1.0))
        a, b = r[:-1], r[-1]
        out = []
        for pts, w in zip(self.pts, self.w):
            z = pts[:, -1] - pts[:, :-1] @ a
            x, y = mid_cdf(z, w, fallback=self.ramp if math.isfinite(self.ramp) else 0.5,
                           max_ramp=self.ramp)
            out.append(float(np.interp(b, x, y)))
        return np.array(out)


def _newton(G, q0, iters=60):
    q = np.clip(np.asarray(q0, dtype=float), 0.0, 1.0)
    val = G(q)
    d = len(q)
    evals = 1
    for _ in range(iters):
        if np.max(np.abs(val)) <= 1e-14:
            break
        h = 1e-7
        jac = np.empty((d, d))
        for k in range(d):
            e = np.zeros(d)
            step = h if q[k] + h <= 1.0 else -h
            e[k] = step
            jac[:, k] = (G(q + e) - val) / step
        evals += d
        try:
            delta = np.linalg.solve(jac, -val)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jac, -val, rcond=None)[0]
        lam = 1.0
        improved = False
        while lam >= 1e-6:
            cand = np.clip(q + lam * delta, 0.0, 1.0)
            cval = G(cand)
            evals += 1
            if np.max(np.abs(cval)) < np.max(np.abs(val)):
                q, val, improved = cand, cval, True
                break
            lam /= 2
        if not improved:
            break
    return q, val, evals


def _winding(G, lo, hi, samples=16):
    """Winding number of G around the boundary of the box [lo, hi] (d = 2)."""
    (x0, y0), (x1, y1) = lo, hi
    t = np.linspace(0.0, 1.0, samples, endpoint=False)
    path = np.concatenate([
        np.column_stack([x0 + t * (x1 - x0), np.full(samples, y0)]),
        np.column_stack([np.full(samples, x1), y0 + t * (y1 - y0)]),
        np.column_stack([x1 - t * (x1 - x0), np.full(samples, y1)]),
        np.column_stack([np.full(samples, x0), y1 - t * (y1 - y0)]),
    ])
    vals = np.array([G(p) for p in path])
    ang = np.arctan2(vals[:, 1], vals[:, 0])
    step = np.diff(np.append(ang, ang[0]))
    step = (step + math.pi) % (2 * math.pi) - math.pi
    return int(round(step.sum() / (2 * math.pi))), vals, path


def _box_search(G, d, depth=40):
    """Recursive subdivision of the cube keeping a sub-box that must contain a root."""
    lo, hi = np.zeros(d), np.ones(d)
    evals = 0
    for _ in range(depth):
        mid = (lo + hi) / 2
        children = []
        for corner in itertools.product((0, 1), repeat=d):
            c = np.asarray(corner)
            children.append((np.where(c == 1, mid, lo), np.where(c == 1, hi, mid)))
        chosen = None
        best = None
        for clo, chi in children:
            if d == 2:
                w, vals, path = _winding(G, clo, chi)
                evals += len(path)
                if w != 0:
                    chosen = (clo, chi)
                    break
                k = int(np.argmin(np.max(np.abs(vals), axis=1)))
                score = float(np.max(np.abs(vals[k])))
            else:
                centre = (clo + chi) / 2
                score = float(np.max(np.abs(G(centre))))
                evals += 1
            if best is None or score < best[0]:
                best = (score, (clo, chi))
        lo, hi = chosen if chosen is not None else best[1]
    return (lo + hi) / 2, evals


def _rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _solve_bhj(measures, alphas, seed, start_jitter):
    d = common_dim(measures)
    allp = np.vstack([m.points for m in measures])
    diameter = float(np.max(np.ptp(allp, axis=0))) or 1.0
    frame = common_tangents(measures, margin=TANGENT_MARGIN * diameter)
    G0 = _SmoothG(frame, measures)
    target = np.asarray(alphas)

    def G(q):
        return G0(q) - target

    rng = np.random.default_rng(seed)
    q0 = np.clip(target + start_jitter * rng.uniform(-1, 1, d), 0.0, 1.0)
    q, val, evals = _newton(G, q0)
    used_box = False
    if np.max(np.abs(val)) > 1e-12:
        qb, e2 = _box_search(G, d)
        q, val, e3 = _newton(G, qb)
        evals += e2 + e3
        used_box = True
    r = f_tilde(frame, q)
    return frame, q, r, evals, used_box


def working_rotation(cert: SeparationCertificate, d: int) -> np.ndarray:
    """Rotation making the first separation witness vertical (d = 2), identity otherwise.

    Labelling the common tangents by their below-sets needs a vertical
    direction lying between the two supports; a vertical separating line
    provides one.
    """
    if d != 2:
        return np.eye(d)
    w = np.asarray(cert.witnesses[0][1].normal)
    angle = math.atan2(w[1], w[0])
    # reduce to (-pi/2, pi/2] so that aligned inputs are left alone
    angle = (angle + math.pi / 2) % math.pi - math.pi / 2
    return _rotation(-angle)


def bhj_solver(measures: Sequence[Measure], fractions=None, tol: float = 1e-3, seed: int = 0,
               start_jitter: float = 0.1, rotation_retries: int = 3) -> Tuple[Hyperplane, SolveReport]:
    """A closed half-space holding fraction alpha_i of each of d well separated measures in R^d.

    Works in rotated coordinates where a separating line is vertical and
    returns the region below the solution hyperplane there, mapped back.
    The report's ``extra`` holds the tangent frame and the rotation used.
    """
    measures = list(measures)
    d = common_dim(measures)
    if len(measures) != d:
        raise InputError(f"bhj_solver needs exactly {d} measures in R^{d}")
    alphas = tuple(as_fractions(fractions, d))
    cert = check_well_separated(measures)
    rng = np.random.default_rng(seed)
    rot = working_rotation(cert, d)
    for attempt in range(rotation_retries + 1):
        work = [Measure(m.points @ rot.T, m.weights, m.name) for m in measures]
        try:
            frame, q, r, evals, used_box = _solve_bhj(work, alphas, seed, start_jitter)
            break
        except VerticalTangent:
            if d != 2 or attempt == rotation_retries:
                raise
            angle = float(rng.uniform(-1e-3, 1e-3))
            rot = _rotation(angle) @ rot
            log.debug("bhj: vertical tangent, rotating by %g", angle)
    below = below_halfspace(r)
    n = np.asarray(below.plane.normal) @ rot
    region = HalfSpace(Hyperplane(tuple(n / np.linalg.norm(n)), below.plane.offset), -1)
    res = tuple(fraction_in(m, region) - a for m, a in zip(measures, alphas))
    worst = max(abs(x) for x in res)
    report = SolveReport(res, evals, int(used_box), worst <= tol, region, solver="bhj", tol=tol,
                         seed=seed, extra={"fractions": alphas, "cube_point": tuple(map(float, q)),
                                           "frame": frame, "rotation": rot})
    if worst > tol:
        raise NoConvergence(f"bhj: residual {worst:.3g} exceeds tol", report)
    return region.plane, report

"""Weighted point clouds, target fractions and solve reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InputError
from .geometry import as_points


@dataclass(frozen=True, eq=False)
class Measure:
    """A finite weighted point cloud standing in for a measure on R^d."""

    points: np.ndarray
    weights: np.ndarray
    name: str = "mu"
    total_mass: float = field(init=False)

    def __init__(self, points, weights=None, name: str = "mu"):
        if np.asarray(points, dtype=float).size == 0:
            raise InputError("a measure needs at least one point")
        pts = as_points(points)
        if weights is None:
            w = np.ones(len(pts))
        else:
            w = np.asarray(weights, dtype=float).ravel()
        if w.shape[0] != pts.shape[0]:
            raise InputError("weights and points differ in length")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InputError("weights must be finite and strictly positive")
        pts = pts.copy()
        w = w.copy()
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "total_mass", math.fsum(w))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def unit_weights(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    @property
    def max_weight_fraction(self) -> float:
        return float(self.weights.max()) / self.total_mass

    @property
    def min_weight_fraction(self) -> float:
        return float(self.weights.min()) / self.total_mass

    def mass_where(self, mask) -> float:
        return math.fsum(self.weights[np.asarray(mask, dtype=bool)])

    def transformed(self, fn, name: Optional[str] = None) -> "Measure":
        """Apply a pointwise map ``fn`` (array -> array) keeping weights."""
        return Measure(fn(np.asarray(self.points)), self.weights, name or self.name)

    def scaled_weights(self, c: float) -> "Measure":
        return Measure(self.points, self.weights * c, self.name)


def common_dim(measures: Sequence[Measure]) -> int:
    if not measures:
        raise InputError("no measures given")
    dims = {m.dim for m in measures}
    if len(dims) != 1:
        raise DimensionError(f"measures have mixed dimensions {sorted(dims)}")
    return dims.pop()


def fraction_in(m: Measure, region) -> float:
    """Mass fraction of ``m`` inside the closed region (boundary counts fully)."""
    if region.dim != m.dim:
        raise DimensionError(f"region dimension {region.dim} != measure dimension {m.dim}")
    return m.mass_where(region.contains(m.points)) / m.total_mass


def jitter(m: Measure, scale: float, seed: int) -> Measure:
    """Perturb each coordinate by U[-scale, scale] noise from a seeded generator."""
    if scale < 0:
        raise InputError("jitter scale must be nonnegative")
    if scale == 0:
        return m
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-scale, scale, size=m.points.shape)
    return Measure(m.points + noise, m.weights, m.name)


@dataclass(frozen=True)
class FractionVector:
    values: Tuple[float, ...]

    def __init__(self, values):
        vals = tuple(float(v) for v in values)
        for v in vals:
            if not 0.0 < v < 1.0:
                raise InputError(f"fractions must lie in (0, 1), got {v}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def halves(cls, n: int) -> "FractionVector":
        return cls([0.5] * n)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def check_length(self, n: int) -> "FractionVector":
        if len(self.values) != n:
            raise InputError(f"expected {n} fractions, got {len(self.values)}")
        return self


def as_fractions(fractions, n: int) -> FractionVector:
    if fractions is None:
        return FractionVector.halves(n)
    if not isinstance(fractions, FractionVector):
        fractions = FractionVector(fractions)
    return fractions.check_length(n)


@dataclass
class SolveReport:
    residuals: Tuple[float, ...]
    iterations: int
    restarts: int
    converged: bool
    region: Any
    solver: str = ""
    tol: float = 0.0
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)


def region_residuals(measures: Sequence[Measure], region, fractions) -> Tuple[float, ...]:
    return tuple(fraction_in(m, region) - a for m, a in zip(measures, fractions))

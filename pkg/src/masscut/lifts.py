"""Embeddings of R^d into R^{d+1} that turn curved cuts into hyperplane cuts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError
from .geometry import Hyperplane, as_points


def _single_or_many(fn):
    """Let a lift accept one point (returns a tuple) or an (n, d) array."""

    def wrapper(p, *args, **kwargs):
        arr = np.asarray(p, dtype=float)
        if arr.ndim == 1:
            return tuple(float(c) for c in fn(arr[None, :], *args, **kwargs)[0])
        return fn(as_points(arr), *args, **kwargs)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_single_or_many
def lift_paraboloid(pts: np.ndarray) -> np.ndarray:
    """x -> (x, |x|^2)."""
    return np.hstack([pts, np.sum(pts * pts, axis=1, keepdims=True)])


@_single_or_many
def lift_cylinder(pts: np.ndarray, period: float) -> np.ndarray:
    """(x, y) -> (cos 2 pi x / period, y, sin 2 pi x / period)."""
    if pts.shape[1] != 2:
        raise DimensionError("cylinder lift is planar")
    if not period > 0:
        raise InputError("period must be positive")
    ang = 2 * math.pi * np.mod(pts[:, 0], period) / period
    return np.column_stack([np.cos(ang), pts[:, 1], np.sin(ang)])


@_single_or_many
def lift_inversion(pts: np.ndarray) -> np.ndarray:
    """x -> (x, 1) / |(x, 1)|^2, the unit inversion of the raised copy of R^d."""
    raised = np.hstack([pts, np.ones((len(pts), 1))])
    return raised / np.sum(raised * raised, axis=1, keepdims=True)


@_single_or_many
def invert(pts: np.ndarray) -> np.ndarray:
    """Unit inversion q -> q / |q|^2 (an involution away from the origin)."""
    return pts / np.sum(pts * pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class FoldSurfaceSpec:
    """Fold of R^d along ``base``: the lift is piecewise affine with its crease on ``base``."""

    base: Hyperplane

    @property
    def dim(self) -> int:
        return self.base.dim


def lift_fold(p, spec: FoldSurfaceSpec):
    """x -> (x, |signed distance of x to the base hyperplane|)."""
    arr = np.asarray(p, dtype=float)
    single = arr.ndim == 1
    pts = as_points(arr[None, :] if single else arr)
    if pts.shape[1] != spec.dim:
        raise DimensionError("point and fold dimensions differ")
    out = np.hstack([pts, np.abs(spec.base.signed(pts))[:, None]])
    return tuple(float(c) for c in out[0]) if single else out


def drop_last(pts) -> np.ndarray:
    """Projection back to the base space for the paraboloid and fold lifts."""
    return np.asarray(pts, dtype=float)[..., :-1]

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import moved, rigid, rng
from masscut.errors import DimensionError, InputError
from masscut.geometry import Annulus, Slab
from masscut.measure import Measure, fraction_in
from masscut.oracle import brute_slab_2d, verify
from masscut.slab import annulus_from_slab, annulus_solver, mid_cdf, slab_solver


def grid_columns():
    return Measure([(x, y) for x in range(4) for y in range(4)])


def test_grid_columns_residual_zero():
    g = grid_columns()
    slab, report = slab_solver([g, g, g], [0.5, 0.5, 0.5])
    assert report.residuals == (0.0, 0.0, 0.0)
    assert verify(slab, [g, g, g], tol=1e-9).passed


def test_middle_columns_is_a_valid_answer():
    g = grid_columns()
    middle = Slab((1.0, 0.0), 0.5, 2.5)
    assert verify(middle, [g, g, g], tol=0).passed


def test_triangle_strips():
    r = rng(0)
    ms = [Measure(np.column_stack([r.uniform(a, a + 1, 20), r.uniform(b, b + 3, 20)]))
          for a, b in ((0, 0), (2, 5), (4, 0))]
    slab, report = slab_solver(ms, [0.3, 0.5, 0.7])
    assert report.converged and report.max_residual <= 1e-3
    assert verify(slab, ms, [0.3, 0.5, 0.7], tol=1e-3).passed


def test_common_halving_line_gives_halfspace():
    r = rng(1)
    ms = []
    for _ in range(3):
        p = r.normal(size=(10, 2)) + (1.5, 0)
        ms.append(Measure(np.vstack([p, p * (-1, 1)])))
    slab, report = slab_solver(ms)
    assert report.max_residual == 0


def test_matches_oracle_on_small_instances():
    for seed in range(3):
        r = rng(seed)
        ms = [Measure(r.normal(size=(12, 2)) + r.normal(size=2)) for _ in range(3)]
        fr = [0.5, 0.25, 0.75]
        _, best = brute_slab_2d(ms, fr)
        try:
            slab, report = slab_solver(ms, fr, seed=seed)
            worst = report.max_residual
        except Exception as exc:  # solver may fail only where the oracle also fails
            worst = exc.report.max_residual
            assert max(abs(b) for b in best) > 1e-3
        assert worst <= max(abs(b) for b in best) + 1e-3


def test_slab_in_three_dimensions():
    r = rng(4)
    ms = [Measure(r.normal(size=(200, 3)) + 2 * r.normal(size=3)) for _ in range(4)]
    slab, report = slab_solver(ms, [0.3, 0.4, 0.5, 0.6])
    assert report.max_residual <= 1e-3


def test_bad_inputs():
    g = grid_columns()
    with pytest.raises(InputError):
        slab_solver([g, g])
    with pytest.raises(DimensionError):
        slab_solver([Measure([(0.0,)])] * 2)


def test_mid_cdf_knots():
    x, y = mid_cdf(np.array([0.0, 1.0, 1.0, 3.0]), np.ones(4))
    assert list(x) == [-0.75, 0.0, 1.0, 3.0, 3.75]
    assert list(y) == [0.0, 0.125, 0.5, 0.875, 1.0]


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.integers(1, 30))
def test_mid_cdf_monotone(seed, n):
    r = rng(seed)
    x, y = mid_cdf(np.round(r.normal(size=n), 1), r.uniform(0.1, 2, n))
    assert np.all(np.diff(x) > 0) and np.all(np.diff(y) > 0)
    assert y[0] == 0 and y[-1] == 1


def test_annulus_pullback():
    # lifted slab 1 <= z <= 4 is the annulus 1 <= |x| <= 2
    ann = annulus_from_slab(Slab((0.0, 0.0, 1.0), 1.0, 4.0), 2)
    assert isinstance(ann, Annulus)
    assert ann.center == (0.0, 0.0) and ann.r_in == pytest.approx(1) and ann.r_out == pytest.approx(2)
    flipped = annulus_from_slab(Slab((0.0, 0.0, -1.0), -4.0, -1.0), 2)
    assert flipped.r_in == pytest.approx(1) and flipped.r_out == pytest.approx(2)
    assert isinstance(annulus_from_slab(Slab((1.0, 0.0, 0.0), 0.0, 1.0), 2), Slab)


def test_annulus_mirror_pairs():
    r = rng(5)
    ms = []
    for k in range(4):
        p = np.column_stack([r.uniform(0.5, 1.0, 15) + k, r.normal(size=15)])
        ms.append(Measure(np.vstack([p, p * (-1, 1)])))
    region, report = annulus_solver(ms)
    assert report.max_residual <= 1e-3
    assert verify(region, ms, tol=1e-3).passed


def test_annulus_common_halving_line_is_degenerate():
    ms = []
    for k in range(4):
        p = rng(k).normal(size=(10, 2))
        ms.append(Measure(np.vstack([p, p * (-1, 1)])))
    region, report = annulus_solver(ms)
    assert isinstance(region, Slab) and report.max_residual == 0


def test_annulus_rotates_with_inputs():
    r = rng(6)
    ms = [Measure(r.normal(size=(150, 2)) + 2 * r.normal(size=2)) for _ in range(4)]
    q, t = rigid(3, 2)
    a, ra = annulus_solver(ms, seed=0)
    b, rb = annulus_solver(moved(ms, q, t), seed=0)
    assert ra.max_residual <= 1e-3 and rb.max_residual <= 1e-3

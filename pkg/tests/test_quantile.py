import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscut.geometry import HalfSpace
from masscut.measure import Measure, fraction_in
from masscut.quantile import (Outcome, midpoint_hyperplane, quantile_hyperplane, quantile_offset,
                              quantile_offsets, region_fractions, strong_parallel_partition,
                              verify_parallel_partition)


def on_axis(xs, weights=None):
    return Measure([(x, 0.0) for x in xs], weights)


def test_quantile_examples():
    assert quantile_hyperplane(on_axis([0, 1, 2, 3]), (1, 0), 0.5).offset == 1.5
    assert quantile_hyperplane(on_axis([7]), (1, 0), 0.3).offset == 7
    assert quantile_hyperplane(on_axis([0, 1], [1, 3]), (1, 0), 0.5).offset == 1


def test_midpoint_examples():
    h, same = midpoint_hyperplane([on_axis([0, 1]), on_axis([4, 5])], (1, 0))
    assert h.offset == 2.5 and not same
    h, same = midpoint_hyperplane([on_axis([0, 1, 5])], (1, 0))
    assert h.offset == 1 and same
    h, same = midpoint_hyperplane([on_axis([0, 3]), on_axis([0, 3])], (1, 0))
    assert h.offset == 1.5 and same


weights = st.lists(st.floats(0.01, 10), min_size=1, max_size=30)


@settings(max_examples=80)
@given(weights, st.floats(0.01, 0.99), st.integers(0, 10 ** 6))
def test_quantile_closed_sides(ws, alpha, seed):
    proj = np.random.default_rng(seed).normal(size=len(ws))
    w = np.asarray(ws)
    t = quantile_offset(proj, w, alpha)
    total = w.sum()
    assert w[proj <= t].sum() >= alpha * total * (1 - 1e-9)
    assert w[proj >= t].sum() >= (1 - alpha) * total * (1 - 1e-9)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.floats(-50, 50), st.floats(0.1, 10), st.floats(0.05, 0.95))
def test_quantile_equivariance(seed, shift, c, alpha):
    r = np.random.default_rng(seed)
    m = Measure(r.normal(size=(25, 2)), r.uniform(0.5, 2, 25))
    v = np.array([0.6, 0.8])
    t = quantile_hyperplane(m, v, alpha).offset
    moved = Measure(m.points + shift * v, m.weights)
    assert quantile_hyperplane(moved, v, alpha).offset == pytest.approx(t + shift, abs=1e-9)
    assert quantile_hyperplane(m.scaled_weights(c), v, alpha).offset == pytest.approx(t, abs=1e-12)


def test_batched_offsets_match():
    r = np.random.default_rng(0)
    proj = r.normal(size=(40, 17))
    for w in (np.ones(17), r.uniform(0.1, 2, 17)):
        for alpha in (0.2, 0.5, 0.9):
            expect = [quantile_offset(row, w, alpha) for row in proj]
            assert np.allclose(quantile_offsets(proj, w, alpha), expect, atol=0, rtol=0)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_midpoint_open_sides_bounded(seed):
    r = np.random.default_rng(seed)
    base = r.normal(size=(15, 2))
    ms = [Measure(base), Measure(base[::-1])]
    h, same = midpoint_hyperplane(ms, (0.3, 0.7))
    assert same
    for m in ms:
        s = h.signed(m.points)
        bound = 0.5 + m.max_weight_fraction + 1e-12
        assert np.sum(s > 1e-10) / len(m) <= bound
        assert np.sum(s < -1e-10) / len(m) <= bound


def test_strong_partition_examples():
    part = strong_parallel_partition([on_axis(range(1, 9))], (1, 0), 4)
    assert part.cuts == (2.5, 4.5, 6.5) and part.outcome is Outcome.FAIR
    part = strong_parallel_partition([on_axis([0, 1]), on_axis([10, 11])], (1, 0), 2)
    assert part.outcome is Outcome.EVERY_REGION_DEFICIENT
    assert 1 < part.cuts[0] < 10
    assert verify_parallel_partition([on_axis([0, 1]), on_axis([10, 11])], part)
    same = on_axis(range(9))
    part = strong_parallel_partition([same, same], (1, 0), 3)
    assert part.outcome is Outcome.FAIR and part.cuts == (2.5, 5.5)


def test_strong_partition_regions_cover():
    r = np.random.default_rng(3)
    ms = [Measure(r.normal(size=(40, 2)) + c) for c in ((0, 0), (1, 0))]
    part = strong_parallel_partition(ms, (1, 0), 3)
    fr = region_fractions(ms, part)
    assert np.all(fr.sum(axis=1) >= 1 - 1e-12)
    assert verify_parallel_partition(ms, part)


def test_strong_partition_fails_only_when_no_certificate_exists():
    from masscut.errors import PartitionFailure
    from masscut.oracle import brute_parallel_certificate
    for seed in range(120):
        r = np.random.default_rng(seed)
        k, m_parts = 2 + seed % 2, 2 + seed % 3
        ms = [Measure(r.normal(size=(int(r.integers(20, 60)), 2)) + 1.5 * r.normal(size=2))
              for _ in range(k)]
        v = r.normal(size=2)
        try:
            part = strong_parallel_partition(ms, v, m_parts)
        except PartitionFailure:
            assert not brute_parallel_certificate(ms, v, m_parts)
        else:
            assert verify_parallel_partition(ms, part)
            assert brute_parallel_certificate(ms, v, m_parts)


def test_two_point_clouds_have_no_four_part_certificate():
    # one gap between the two projections leaves no room for three distinct cuts
    ms = [on_axis([0.0]), on_axis([1.0])]
    from masscut.oracle import brute_parallel_certificate
    assert not brute_parallel_certificate(ms, (1, 0), 4)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masscut.errors import InputError
from masscut.geometry import (Annulus, Disk, HalfSpace, Hyperplane, PolyRegion, SineWave, Slab,
                              StripeWave, Wedge, clip_polygon, convex_hull_2d, orient2d,
                              region_contains, signed_offset)

coord = st.floats(-100, 100, allow_nan=False)
point2 = st.tuples(coord, coord)


@pytest.mark.parametrize("p, h, expected", [
    ((0, 0), Hyperplane((1.0, 0.0), 0.0), 0.0),
    ((2, 0), Hyperplane((1.0, 0.0), 0.5), 1.5),
    ((1, 1), Hyperplane((0.0, 1.0), 3.0), -2.0),
])
def test_signed_offset(p, h, expected):
    assert signed_offset(p, h) == expected


def test_hyperplane_needs_unit_normal():
    with pytest.raises(InputError):
        Hyperplane((1.0, 1.0), 0.0)
    h = Hyperplane.from_normal((3, 4), 10)
    assert h.normal == pytest.approx((0.6, 0.8)) and h.offset == pytest.approx(2.0)


@given(st.floats(-math.pi, math.pi), st.floats(-10, 10))
def test_canonical_identifies_flips(theta, t):
    h = Hyperplane((math.cos(theta), math.sin(theta)), t)
    assert h.canonical() == h.flip().canonical()


def test_hull_drops_interior_point():
    hull = convex_hull_2d([(0, 0), (1, 0), (0, 1), (0.2, 0.2)])
    assert set(hull.vertices) == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}


def test_hull_singleton_and_segment():
    assert convex_hull_2d([(0, 0)]).vertices == ((0.0, 0.0),)
    seg = convex_hull_2d([(0, 0), (1, 1), (2, 2)])
    assert seg.vertices == ((0.0, 0.0), (2.0, 2.0))
    assert seg.contains([(1, 1)])[0] and not seg.contains([(1, 1.1)])[0]


@settings(max_examples=60)
@given(st.lists(point2, min_size=3, max_size=40))
def test_hull_contains_every_input(pts):
    hull = convex_hull_2d(pts)
    scale = 1 + max(abs(c) for p in pts for c in p)
    for h in hull.halfspaces:
        assert np.all(h.slack(pts) >= -1e-9 * scale)


def test_orient2d_exact_near_degenerate():
    # nearly collinear points where naive evaluation loses the sign
    a, b = (0.5, 0.5), (12.0, 12.0)
    c = (24.0, 24.0 + 2 ** -48)
    assert orient2d(a, b, c) > 0
    assert orient2d(a, b, (24.0, 24.0)) == 0


def test_region_contains_examples():
    assert region_contains(Slab((1.0, 0.0), 0.0, 1.0), (1, 5))
    assert not region_contains(Annulus((0.0, 0.0), 1.0, 2.0), (0, 0))
    wedge = Wedge((HalfSpace(Hyperplane((0.0, 1.0), 0.0), 1), HalfSpace(Hyperplane((1.0, 0.0), 0.0), 1)))
    assert not region_contains(wedge, (-1, 1))
    assert np.allclose(wedge.apex(), (0, 0))


def test_infinite_slab_is_everything():
    s = Slab((0.0, 1.0))
    assert s.is_halfspace
    assert np.all(s.contains(np.random.default_rng(0).normal(size=(50, 2)) * 1e6))


def test_disk_and_complement_share_boundary():
    inside, outside = Disk((0.0, 0.0), 1.0), Disk((0.0, 0.0), 1.0, inside=False)
    pts = [(1.0, 0.0), (0.5, 0.0), (2.0, 0.0)]
    assert list(inside.contains(pts)) == [True, True, False]
    assert list(outside.contains(pts)) == [True, False, True]


def test_sine_wave_and_stripes():
    wave = SineWave(2 * math.pi, 1.0, 0.0, 0.0, above=True)
    assert list(wave.contains([(math.pi / 2, 1.0), (math.pi / 2, 0.5), (0.0, 0.0)])) == [True, False, True]
    stripes = StripeWave(1.0, 0.75, 0.25)  # wraps around
    assert list(stripes.contains([(0.1, 0), (0.5, 0), (3.8, 0)])) == [True, False, True]


def test_polyregion_representations_agree():
    square = PolyRegion.from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])
    samples = np.random.default_rng(1).uniform(-0.5, 1.5, size=(200, 2))
    assert square.representations_agree(samples)
    assert square.facet_count == 4 and square.vertex_count == 4


def test_clip_polygon():
    square = [(0, 0), (2, 0), (2, 2), (0, 2)]
    half = clip_polygon(square, HalfSpace(Hyperplane((1.0, 0.0), 1.0), -1))
    assert sorted(half) == sorted([(0, 0), (1.0, 0.0), (1.0, 2.0), (0, 2)])


@settings(max_examples=40)
@given(point2, st.floats(-math.pi, math.pi), point2)
def test_membership_is_rigid_invariant(p, theta, shift):
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    t = np.asarray(shift)

    def move(x):
        return tuple(rot @ np.asarray(x, dtype=float) + t)

    ann = Annulus((1.0, 2.0), 3.0, 40.0)
    moved = Annulus(move(ann.center), 3.0, 40.0)
    h = Hyperplane((0.6, 0.8), 5.0)
    n = rot @ np.asarray(h.normal)
    hm = HalfSpace(Hyperplane(tuple(n), h.offset + float(n @ t)), 1)
    r = np.linalg.norm(np.asarray(p) - ann.center)
    if min(abs(r - 3), abs(r - 40)) > 1e-6:
        assert region_contains(ann, p) == region_contains(moved, move(p))
    if abs(signed_offset(p, h)) > 1e-6:
        assert region_contains(HalfSpace(h, 1), p) == region_contains(hm, move(p))

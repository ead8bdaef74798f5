import math

import numpy as np
import pytest

import oracles
from contactlab import (
    Block,
    ContactState,
    OverlapError,
    classify_contact,
    min_separation,
    polygon_area,
)

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def square(x0, y0, side=1.0, block_id=0):
    return Block(block_id, [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)])


class TestBlock:
    def test_vertices_canonicalized_ccw_from_lexicographic_min(self):
        # clockwise input starting mid-list
        b = Block(0, [(1.0, 1.0), (1.0, 0.0), (0.0, 0.0), (0.0, 1.0)])
        np.testing.assert_array_equal(
            b.vertices, [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )

    def test_rejects_nonconvex(self):
        with pytest.raises(ValueError):
            Block(0, [(0.0, 0.0), (4.0, 0.0), (1.0, 1.0), (0.0, 4.0)])

    def test_rejects_collinear_vertex(self):
        with pytest.raises(ValueError):
            Block(0, [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)])

    def test_rejects_short_vertex_list(self):
        with pytest.raises(ValueError):
            Block(0, [(0.0, 0.0), (1.0, 0.0)])

    def test_vertices_read_only(self):
        b = square(0.0, 0.0)
        with pytest.raises(ValueError):
            b.vertices[0, 0] = 5.0

    def test_translated(self):
        b = square(0.0, 0.0).translated((2.0, -1.0))
        np.testing.assert_allclose(b.bounds(), (2.0, -1.0, 3.0, 0.0))

    def test_roundtrip_dict(self):
        b = Block(7, [(0.25, 0.5), (2.0, 0.0), (2.5, 2.0), (0.5, 1.75)])
        c = Block.from_dict(b.to_dict())
        assert b == c
        assert c.id == 7

    def test_centroid_of_square(self):
        np.testing.assert_allclose(square(2.0, 3.0).centroid(), [2.5, 3.5])


class TestPolygonArea:
    def test_unit_square(self):
        assert polygon_area(Block(0, UNIT_SQUARE)) == 1.0

    def test_orientation_independent(self):
        assert polygon_area(Block(0, UNIT_SQUARE[::-1])) == 1.0

    def test_rectangle(self):
        assert polygon_area(Block(0, [(0, 0), (4, 0), (4, 3), (0, 3)])) == 12.0

    def test_random_quads_match_triangle_split(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            pts = oracles.random_convex_quad(rng, (0.0, 0.0), 2.0)
            b = Block(0, pts)
            v = b.vertices
            # fan split from v0
            tri = lambda p, q, r: 0.5 * abs(
                (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
            )
            expected = tri(v[0], v[1], v[2]) + tri(v[0], v[2], v[3])
            np.testing.assert_allclose(polygon_area(b), expected, rtol=1e-12)


class TestMinSeparation:
    def test_shared_edge_touches(self):
        assert min_separation(square(0.0, 0.0), square(1.0, 0.0)) == 0.0

    def test_axis_aligned_gap(self):
        assert min_separation(square(0.0, 0.0), square(2.0, 0.0)) == 1.0

    def test_diagonal_gap(self):
        d = min_separation(square(0.0, 0.0), square(2.0, 2.0))
        np.testing.assert_allclose(d, math.sqrt(2.0), rtol=1e-15)

    def test_overlapping_is_zero(self):
        assert min_separation(square(0.0, 0.0), square(0.5, 0.5)) == 0.0

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            a = oracles.random_convex_quad(rng, (0.0, 0.0), 1.5)
            b = oracles.random_convex_quad(rng, rng.uniform(-5, 5, size=2), 1.5)
            got = min_separation(Block(0, a), Block(1, b))
            want = oracles.separation([tuple(p) for p in a], [tuple(p) for p in b])
            np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-12)


class TestClassifyContact:
    def test_far_apart(self):
        assert classify_contact(square(0.0, 0.0), square(10.0, 0.0)) == ContactState.NONE

    def test_shared_edge(self):
        got = classify_contact(square(0.0, 0.0), square(1.0, 0.0))
        assert got == ContactState.EDGE_EDGE

    def test_corner_touch(self):
        got = classify_contact(square(0.0, 0.0), square(1.0, 1.0))
        assert got == ContactState.VERTEX_VERTEX

    def test_apex_on_edge_interior(self):
        tri = Block(1, [(0.5, 1.0), (0.9, 1.8), (0.1, 1.8)])
        got = classify_contact(square(0.0, 0.0), tri)
        assert got == ContactState.VERTEX_EDGE

    def test_near_touch_within_tol(self):
        # gap of tol/2 still counts as contact
        got = classify_contact(square(0.0, 0.0), square(1.0 + 5e-7, 0.0))
        assert got == ContactState.EDGE_EDGE

    def test_gap_above_tol_is_none(self):
        got = classify_contact(square(0.0, 0.0), square(1.0 + 1e-5, 0.0))
        assert got == ContactState.NONE

    def test_deep_overlap_raises(self):
        with pytest.raises(OverlapError):
            classify_contact(square(0.0, 0.0), square(0.5, 0.0))

    def test_shallow_overlap_still_classifies(self):
        got = classify_contact(square(0.0, 0.0), square(1.0 - 1e-8, 0.0))
        assert got == ContactState.EDGE_EDGE

    def test_tol_must_be_positive(self):
        with pytest.raises(ValueError):
            classify_contact(square(0.0, 0.0), square(3.0, 0.0), tol=0.0)

    def test_partial_edge_overlap(self):
        # offset along y so only part of the faces coincide
        got = classify_contact(square(0.0, 0.0), square(1.0, 0.5))
        assert got == ContactState.EDGE_EDGE

    def test_corner_on_corner_of_rotated_square(self):
        c = math.cos(math.pi / 4)
        diamond = Block(1, [(2.0, 2.0), (2.0 + c, 2.0 - c), (2.0 + 2 * c, 2.0), (2.0 + c, 2.0 + c)])
        sq = square(0.0, 0.0, 2.0)
        assert classify_contact(sq, diamond) == ContactState.VERTEX_VERTEX


class TestContactProperties:
    def test_symmetry_and_oracle_agreement(self):
        rng = np.random.default_rng(22)
        seen = set()
        for a, b, expected in oracles.contact_pair_suite(rng, 20, 15, 8):
            ba = Block(0, a)
            bb = Block(1, b)
            got = classify_contact(ba, bb)
            assert got == expected
            assert got == classify_contact(bb, ba)
            assert got == oracles.brute_force_classify(a, b)
            seen.add(int(got))
        assert seen == {0, 1, 2, 3}

    def test_consistency_none_iff_separated(self):
        rng = np.random.default_rng(23)
        for a, b, _ in oracles.contact_pair_suite(rng, 15, 10, 5):
            ba = Block(0, a)
            bb = Block(1, b)
            none = classify_contact(ba, bb) == ContactState.NONE
            assert none == (min_separation(ba, bb) > 1e-6)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(24)
        for a, b, expected in oracles.contact_pair_suite(rng, 10, 10, 6):
            code = classify_contact(Block(0, a), Block(1, b))
            assert code == expected
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rot = np.array(
                [[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]]
            )
            shift = rng.uniform(-10, 10, size=2)
            moved = classify_contact(
                Block(0, a @ rot.T + shift), Block(1, b @ rot.T + shift)
            )
            assert moved == code

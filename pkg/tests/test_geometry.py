# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import math
from unittest import TestCase

import numpy as np
from hypothesis import given, settings, strategies as st

from metric_currents.exceptions import UnboundedPolytope
from metric_currents.geometry import (
    AffineMap, Ellipsoid, GaugeBody, HalfSpace, Simplex, SymmetricPolytope, clip_simplex_halfspace,
    point, polytope_volume, simplex_volume, snap_key, unit_ball_volume,
)

from tests.utils import rng, triangle

coordinates = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


class PointTestCase(TestCase):
    def test_flattens(self):
        self.assertEqual(point([[1, 2]]).tolist(), [1.0, 2.0])

    def test_rejects_nan(self):
        with self.assertRaises(ValueError):
            point([0.0, float('nan')])

    def test_snap_key_merges_close_points(self):
        self.assertEqual(snap_key([0.1, 0.2]), snap_key([0.1 + 1e-12, 0.2 - 1e-12]))
        self.assertNotEqual(snap_key([0.1, 0.2]), snap_key([0.1 + 1e-6, 0.2]))

    def test_unit_ball_volume(self):
        self.assertAlmostEqual(unit_ball_volume(1), 2.0)
        self.assertAlmostEqual(unit_ball_volume(2), math.pi)
        self.assertAlmostEqual(unit_ball_volume(3), 4.0 * math.pi / 3.0)


class AffineMapTestCase(TestCase):
    def test_apply(self):
        f = AffineMap([[2, 0], [0, 3]], [1, -1])
        self.assertEqual(f([[1, 1]]).tolist(), [[3.0, 2.0]])

    def test_compose(self):
        f = AffineMap([[0, 1], [1, 0]], [1, 0])
        g = AffineMap([[2, 0], [0, 2]], [0, 5])
        x = np.array([[0.5, -1.5]])
        np.testing.assert_allclose(f.compose(g)(x), f(g(x)))

    def test_functional(self):
        f = AffineMap.functional([1, -1], 2.0)
        self.assertEqual(f.out_dim, 1)
        self.assertAlmostEqual(float(f([[3, 1]])[0, 0]), 4.0)

    def test_offset_mismatch(self):
        with self.assertRaises(ValueError):
            AffineMap(np.eye(2), [1, 2, 3])

    def test_wrong_dimension(self):
        with self.assertRaises(ValueError):
            AffineMap.identity(2)([[1, 2, 3]])

    def test_lipschitz(self):
        self.assertAlmostEqual(AffineMap([[3, 0], [0, -4]]).lipschitz(), 4.0)


class SimplexTestCase(TestCase):
    def test_volume(self):
        self.assertAlmostEqual(triangle().volume, 0.5)
        self.assertAlmostEqual(Simplex([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]).volume, 1.0 / 6)
        self.assertAlmostEqual(Simplex([[1, 1], [4, 5]]).volume, 5.0)

    def test_vertex_volume(self):
        self.assertEqual(Simplex([[2, 3]]).volume, 1.0)

    def test_degenerate(self):
        s = Simplex([[0, 0], [1, 1], [2, 2]])
        self.assertTrue(s.is_degenerate)
        self.assertEqual(simplex_volume(s, with_flag=True), (0.0, True))

    def test_repeated_vertex_is_degenerate(self):
        self.assertTrue(Simplex([[1, 1], [1, 1]]).is_degenerate)

    def test_too_many_vertices(self):
        with self.assertRaises(ValueError):
            Simplex([[0], [1], [2]])

    def test_bad_orientation(self):
        with self.assertRaises(ValueError):
            Simplex([[0, 0], [1, 0]], orientation=0)

    def test_faces(self):
        faces = triangle().faces()
        self.assertEqual([f.orientation for f in faces], [1, -1, 1])
        self.assertEqual(faces[1].vertices.tolist(), [[0.0, 0.0], [0.0, 1.0]])

    def test_reversed(self):
        s = triangle()
        self.assertEqual(s.reversed().orientation, -1)
        self.assertEqual(s.reversed().vertices.tolist(), s.vertices.tolist())

    def test_map(self):
        image = triangle().map(AffineMap([[2, 0], [0, 2]]))
        self.assertAlmostEqual(image.volume, 2.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(coordinates, coordinates), min_size=3, max_size=3))
    def test_volume_matches_shoelace(self, points):
        s = Simplex(points)
        (x0, y0), (x1, y1), (x2, y2) = points
        shoelace = 0.5 * abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
        self.assertAlmostEqual(s.volume, 0.0 if s.is_degenerate else shoelace, delta=1e-4)


class ClipTestCase(TestCase):
    def test_inside(self):
        s = triangle()
        self.assertEqual(clip_simplex_halfspace(s, HalfSpace([1, 0], 5.0)), [s])

    def test_outside(self):
        self.assertEqual(clip_simplex_halfspace(triangle(), HalfSpace([1, 0], -1.0)), [])

    def test_half(self):
        pieces = clip_simplex_halfspace(triangle(), ([1, 0], 0.5))
        self.assertAlmostEqual(sum(p.volume for p in pieces), 0.5 - 0.125)
        for piece in pieces:
            self.assertTrue(np.all(piece.vertices[:, 0] <= 0.5 + 1e-12))

    def test_pieces_keep_orientation(self):
        s = triangle(orientation=-1)
        for piece in clip_simplex_halfspace(s, ([0, 1], 0.25)):
            self.assertEqual(piece.orientation, -1)

    def test_complement_partitions(self):
        s = Simplex([[0, 0], [2, 0], [1, 3]])
        h = HalfSpace([1, 1], 1.5)
        total = sum(p.volume for p in clip_simplex_halfspace(s, h))
        total += sum(p.volume for p in clip_simplex_halfspace(s, h.complement()))
        self.assertAlmostEqual(total, s.volume)

    def test_segment(self):
        pieces = clip_simplex_halfspace(Simplex([[0, 0], [4, 0]]), ([1, 0], 1.0))
        self.assertEqual(len(pieces), 1)
        self.assertAlmostEqual(pieces[0].volume, 1.0)


class BodyTestCase(TestCase):
    def test_square_polytope(self):
        square = SymmetricPolytope(np.eye(2))
        self.assertAlmostEqual(square.volume(), 4.0)
        self.assertEqual(len(square.vertices()), 4)
        self.assertAlmostEqual(float(square.gauge([0.5, -2.0])), 2.0)

    def test_facets_deduplicated(self):
        self.assertEqual(len(SymmetricPolytope([[1, 0], [-1, 0], [0, 1]]).facets), 2)

    def test_cube_volume(self):
        self.assertAlmostEqual(SymmetricPolytope(np.eye(3)).volume(), 8.0)

    def test_hexagon_volume(self):
        hexagon = SymmetricPolytope([[1, 0], [0, 1], [1, 1]])
        volume, error = polytope_volume(hexagon, with_error=True)
        self.assertAlmostEqual(volume, 3.0)
        self.assertEqual(error, 0.0)

    def test_unbounded(self):
        with self.assertRaises(UnboundedPolytope):
            SymmetricPolytope([[1, 0]]).volume()

    def test_monte_carlo_volume(self):
        volume, error = SymmetricPolytope(np.eye(4)).volume(rng=rng(), with_error=True)
        self.assertAlmostEqual(volume, 16.0, places=3)
        self.assertLess(error, 1e-3)

    def test_ellipsoid(self):
        e = Ellipsoid(np.diag([1.0, 4.0]))
        self.assertAlmostEqual(e.volume(), math.pi / 2.0)
        np.testing.assert_allclose(sorted(e.semi_axes()), [0.5, 1.0])
        self.assertAlmostEqual(e.polar().volume(), 2.0 * math.pi)

    def test_ellipsoid_not_definite(self):
        with self.assertRaises(ValueError):
            Ellipsoid(np.diag([1.0, 0.0]))

    def test_gauge_body_disk(self):
        self.assertAlmostEqual(GaugeBody([np.eye(2)]).volume(), math.pi, places=8)

    def test_gauge_body_ball(self):
        self.assertAlmostEqual(GaugeBody([np.eye(3)]).volume(), 4.0 * math.pi / 3.0, places=6)

    def test_gauge_body_cylinder_intersection(self):
        # Steinmetz solid of two unit cylinders.
        blocks = [np.array([[1, 0, 0], [0, 1, 0]]), np.array([[1, 0, 0], [0, 0, 1]])]
        self.assertAlmostEqual(GaugeBody(blocks).volume(), 16.0 / 3.0, places=3)

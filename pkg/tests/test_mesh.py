# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import math
from unittest import TestCase

import numpy as np

from metric_currents.current import mass
from metric_currents.exceptions import NotLipschitz
from metric_currents.mesh import (
    ConvexBody, MeshMetricSpace, check_lipschitz, dedupe_vertices, grid_mesh, mcshane_extend,
    orient_counterclockwise, triangle_edges,
)
from metric_currents.seminorm import AmbientNorm


def signed_areas(points, triangles):
    a, b, c = points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]]
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def unit_grid_space(n=2, ambient=None):
    points, triangles = grid_mesh(n)
    return MeshMetricSpace.from_triangles(points, triangles, ambient=ambient)


class TriangleHelpersTestCase(TestCase):
    def test_triangle_edges(self):
        edges = triangle_edges([[0, 1, 2], [0, 2, 3]])
        self.assertEqual(edges.tolist(), [[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]])

    def test_dedupe(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1e-12, 0.0]])
        kept, triangles = dedupe_vertices(points, [[0, 1, 2], [3, 1, 2], [0, 3, 2]])
        self.assertEqual(len(kept), 3)
        self.assertEqual(triangles.tolist(), [[0, 1, 2], [0, 1, 2]])

    def test_orient(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(orient_counterclockwise(points, [[0, 2, 1]]).tolist(), [[0, 1, 2]])

    def test_grid_mesh(self):
        points, triangles = grid_mesh(3)
        self.assertEqual((len(points), len(triangles)), (16, 18))
        self.assertTrue(np.all(signed_areas(points, triangles) > 0))


class MeshMetricSpaceTestCase(TestCase):
    def test_grid_distances(self):
        space = unit_grid_space()
        self.assertAlmostEqual(space.distance(0, 8), math.sqrt(2.0))
        self.assertAlmostEqual(space.distance(0, 2), 1.0)
        self.assertEqual(space.distances([0]).shape, (1, 9))

    def test_all_pairs_cached(self):
        space = unit_grid_space()
        d = space.distances()
        self.assertIs(space.distances(), d)
        self.assertAlmostEqual(space.distance(2, 6), d[2, 6])

    def test_metric_axioms(self):
        report = unit_grid_space(3).check_metric()
        self.assertEqual(report, {'symmetric': True, 'zero_diagonal': True, 'triangle_inequality': True})

    def test_max_norm_lengths(self):
        space = unit_grid_space(1, ambient=AmbientNorm.max_norm(2))
        self.assertAlmostEqual(space.distance(0, 3), 1.0)

    def test_extra_edges(self):
        points, triangles = grid_mesh(1)
        space = MeshMetricSpace.from_triangles(points, triangles, extra_edges=[(0, 3, 0.1)])
        self.assertAlmostEqual(space.distance(0, 3), 0.1)
        self.assertEqual(len(space.edges), 6)
        self.assertAlmostEqual(space.distance(1, 2), 2.0)

    def test_positive_lengths(self):
        with self.assertRaises(ValueError):
            MeshMetricSpace([[0.0, 0.0], [1.0, 0.0]], [[0, 1]], lengths=[0.0])

    def test_nearest_vertex(self):
        self.assertEqual(unit_grid_space().nearest_vertex((0.9, 0.1)), 2)

    def test_currents(self):
        space = unit_grid_space()
        self.assertAlmostEqual(space.area(), 1.0)
        self.assertAlmostEqual(mass(space.current()).total, 1.0)
        self.assertAlmostEqual(mass(space.boundary_current()).total, 4.0)

    def test_boundary_vertices(self):
        self.assertEqual(unit_grid_space().boundary_vertices().tolist(), [0, 1, 2, 3, 5, 6, 7, 8])


class LipschitzTestCase(TestCase):
    def test_mcshane(self):
        values = mcshane_extend([0.0, 1.0], 1.0, [[0.0, 1.0], [1.0, 0.0]], [[0.5, 0.5], [2.0, 1.0]])
        np.testing.assert_allclose(values, [0.5, 2.0])

    def test_extension_agrees_on_the_set(self):
        space = unit_grid_space()
        d = space.distances()
        anchors = [0, 4, 8]
        values = np.array([0.0, 0.5, 1.0]) * math.sqrt(2.0)
        extended = mcshane_extend(values, 1.0, d[np.ix_(anchors, anchors)], d[:, anchors])
        np.testing.assert_allclose(extended[anchors], values)
        check_lipschitz(extended, 1.0, d)

    def test_not_lipschitz(self):
        with self.assertRaises(NotLipschitz) as cm:
            check_lipschitz([0.0, 3.0], 1.0, [[0.0, 1.0], [1.0, 0.0]])
        self.assertEqual(cm.exception.context['pair'], (0, 1))

    def test_extension_rejects(self):
        with self.assertRaises(NotLipschitz):
            mcshane_extend([0.0, 3.0], 1.0, [[0.0, 1.0], [1.0, 0.0]], [[0.5, 0.5]])


class ConvexBodyTestCase(TestCase):
    def test_square(self):
        body = ConvexBody.square(2.0)
        self.assertAlmostEqual(body.volume, 4.0)
        np.testing.assert_allclose(body.centroid, [1.0, 1.0])
        np.testing.assert_allclose(body.gauge([[1.0, 1.0], [2.0, 2.0], [2.0, 1.0]]), [0.0, 1.0, 1.0], atol=1e-12)
        self.assertEqual(body.contains([[0.5, 0.5], [3.0, 1.0]]).tolist(), [True, False])

    def test_hexagon(self):
        self.assertAlmostEqual(ConvexBody.hexagon().volume, 1.5 * math.sqrt(3.0))

    def test_interior_vertex(self):
        with self.assertRaises(ValueError):
            ConvexBody([(0, 0), (2, 0), (1, 0.2), (1, 2)])

    def test_planar_boundary(self):
        self.assertAlmostEqual(mass(ConvexBody.square().boundary_mesh()).total, 4.0)

    def test_tetrahedron(self):
        body = ConvexBody([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
        self.assertEqual(body.dim, 3)
        self.assertAlmostEqual(mass(body.triangulation()).total, 1.0 / 6.0)
        self.assertAlmostEqual(mass(body.boundary_mesh()).total, 1.5 + math.sqrt(3.0) / 2.0)

    def test_refined_mesh(self):
        points, triangles = ConvexBody.square().refined_mesh(2)
        self.assertEqual((len(points), len(triangles)), (13, 16))
        areas = signed_areas(points, triangles)
        self.assertTrue(np.all(areas > 0))
        self.assertAlmostEqual(0.5 * areas.sum(), 1.0)

    def test_refined_mesh_planar_only(self):
        with self.assertRaises(ValueError):
            ConvexBody([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]).refined_mesh(2)

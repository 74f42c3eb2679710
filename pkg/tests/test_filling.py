# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import math
from unittest import TestCase

import numpy as np

from metric_currents.exceptions import BoundaryConditionError
from metric_currents.filling import (
    SphereDiscretization, candidate_corpus, candidate_from_mesh, det_nonincrease_check, ell_infty_filling_bound,
    football_flat_distance, graph_candidate, make_flat_football, make_linfty_square,
    make_subspace_metric_witness, orthogonal_projection, phi_embedding, winding_number,
)
from metric_currents.mesh import ConvexBody, grid_mesh

from tests.utils import rng

CORPUS = dict((c.name, c) for c in candidate_corpus(n=4))


def flat(points):
    return np.zeros(len(points))


class SphereDiscretizationTestCase(TestCase):
    def test_weights(self):
        D = SphereDiscretization(2, 8)
        self.assertAlmostEqual(D.weights.sum(), 2.0)
        self.assertEqual(D.max_norm().dim, 8)

    def test_directions_are_unit(self):
        for n, m in ((2, 5), (3, 20), (4, 12)):
            D = SphereDiscretization(n, m, rng())
            np.testing.assert_allclose(np.linalg.norm(D.directions, axis=1), np.ones(m))

    def test_too_few_directions(self):
        with self.assertRaises(ValueError):
            SphereDiscretization(3, 2)

    def test_planar_embedding_is_isometric(self):
        D = SphereDiscretization(2, 8)
        x = np.array([[0.3, -1.2], [2.0, 0.5]])
        np.testing.assert_allclose(D.weighted_norm()(phi_embedding(x, D)), np.linalg.norm(x, axis=1))

    def test_projection_recovers_points(self):
        D = SphereDiscretization(3, 20)
        x = np.array([[0.3, -1.2, 0.7]])
        projected, preimage = orthogonal_projection(phi_embedding(x, D), D)
        np.testing.assert_allclose(preimage, x)
        np.testing.assert_allclose(projected, phi_embedding(x, D))

    def test_embedding_dimension(self):
        with self.assertRaises(ValueError):
            phi_embedding([1.0, 2.0, 3.0], SphereDiscretization(2, 4))


class DeterminantCheckTestCase(TestCase):
    def test_determinant_never_grows(self):
        report = det_nonincrease_check(50, 2, 8, rng=rng(), jacobian_trials=2)
        self.assertEqual(report['violations'], 0)
        self.assertLessEqual(report['max_det'], 1.0 + 1e-9)
        self.assertEqual((report['trials'], report['jacobian_trials']), (50, 2))


class CandidateTestCase(TestCase):
    def test_corpus(self):
        self.assertEqual(sorted(CORPUS), [
            'hexagon', 'hexagon-bump', 'hexagon-pyramid', 'square', 'square-bump', 'square-pyramid',
            'square-ridge-tent'])
        self.assertTrue(CORPUS['square'].is_flat)
        self.assertFalse(CORPUS['square-pyramid'].is_flat)

    def test_boundary_map(self):
        candidate = CORPUS['square']
        self.assertEqual(len(candidate.boundary_map), 16)
        self.assertEqual(candidate.space.triangles.shape, (32, 3))

    def test_boundary_off_the_body(self):
        points, triangles = grid_mesh(1, upper=(0.5, 0.5))
        with self.assertRaises(BoundaryConditionError):
            candidate_from_mesh('small', ConvexBody.square(), points, triangles)


class FillingBoundTestCase(TestCase):
    def test_identity_filling(self):
        report = ell_infty_filling_bound(ConvexBody.square(), CORPUS['square'], rng=rng())
        self.assertAlmostEqual(report['gap'], 0.0)
        self.assertAlmostEqual(report['image_mass'], 1.0)
        self.assertTrue(report['boundary_matches'])
        self.assertTrue(report['density_matches'])

    def test_curved_fillings_are_larger(self):
        for name, body in (('square-pyramid', ConvexBody.square()), ('hexagon-bump', ConvexBody.hexagon())):
            report = ell_infty_filling_bound(body, CORPUS[name], rng=rng())
            self.assertGreater(report['gap'], 0.0, name)
            self.assertTrue(report['boundary_matches'], name)

    def test_hexagon_volume(self):
        report = ell_infty_filling_bound(ConvexBody.hexagon(), CORPUS['hexagon'], rng=rng())
        self.assertAlmostEqual(report['volume'], 1.5 * math.sqrt(3.0))
        self.assertAlmostEqual(report['gap'], 0.0)

    def test_shortcut_rejected(self):
        X = graph_candidate('square', ConvexBody.square(), flat, n=1, extra_edges=[(0, 3, 0.1)])
        with self.assertRaises(BoundaryConditionError) as cm:
            ell_infty_filling_bound(ConvexBody.square(), X)
        self.assertEqual(cm.exception.pair, (0, 3))


class FootballTestCase(TestCase):
    def setUp(self):
        self.football = make_flat_football(0.1, 1.0, 0.25)

    def test_area(self):
        football = self.football
        self.assertAlmostEqual(football.exact_area, math.pi + 0.1)
        self.assertLess(football.area, football.exact_area)
        self.assertGreater(football.area, 0.9 * football.exact_area)

    def test_collapse(self):
        np.testing.assert_allclose(self.football.collapse([[0.2, 0.5], [0.7, -0.02], [0.0, -0.3]]),
                                   [[0.2, 0.45], [0.7, 0.0], [0.0, -0.25]])
        self.assertAlmostEqual(self.football.edge_lipschitz(), 1.0)

    def test_winding(self):
        self.assertEqual(winding_number(self.football.boundary), 0)
        self.assertEqual(winding_number(self.football.boundary, center=(0.0, 0.5)), 1)
        self.assertEqual(winding_number(self.football.collapsed_boundary(), center=(0.0, 0.5)), 1)

    def test_report(self):
        report = self.football.report(t=0.01)
        self.assertTrue(report['collapsed_boundary_closed'])
        self.assertGreater(report['across_slit_distance'], 1.0)
        self.assertAlmostEqual(report['flat_disk_distance'], 0.02)
        self.assertAlmostEqual(report['slit_limit_distance'], 2.0 * math.sqrt(0.25 + 1e-4))

    def test_parameters(self):
        with self.assertRaises(ValueError):
            make_flat_football(0.1, 2.5, 0.25)
        with self.assertRaises(ValueError):
            make_flat_football(0.0, 1.0, 0.25)

    def test_flat_distance(self):
        report = football_flat_distance(0.1, 1.0, 0.5)
        self.assertGreater(report['flat_distance'], 0.0)
        # Prisms over the four vertical edges are collinear and dropped; each
        # leaves a residual 1-chain of length 2 eps.
        self.assertLessEqual(report['flat_distance'], report['homotopy_mass'] + 8 * 0.1 + 1e-9)
        self.assertIn('certified', report)


class WitnessTestCase(TestCase):
    def test_linfty_square(self):
        report = make_linfty_square()
        np.testing.assert_allclose(report['masses'], [1.0, 1.0])
        np.testing.assert_allclose(report['boundary_lengths'], [4.0, 4.0])
        np.testing.assert_allclose(report['distances'], [math.sqrt(2.0), 1.0])
        np.testing.assert_allclose(report['busemann_masses'], [1.0, math.pi / 4.0])
        self.assertFalse(report['isometry'])

    def test_subspace_metric(self):
        report = make_subspace_metric_witness(64)
        self.assertAlmostEqual(report['length'], math.pi)
        self.assertAlmostEqual(report['boundary_mass'], 2.0)
        self.assertGreater(report['subspace_distance'], 2.0)
        self.assertLess(report['subspace_distance'], 2.01)
        self.assertFalse(report['isometry'])

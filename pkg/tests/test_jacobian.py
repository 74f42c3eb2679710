# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import math
from unittest import TestCase, mock

import numpy as np

from metric_currents import config
from metric_currents.acceptance import john_grid_oracle
from metric_currents.exceptions import Unsupported
from metric_currents.geometry import Ellipsoid, SymmetricPolytope
from metric_currents.jacobian import (
    JacobianKind, jac_busemann, jac_inscribed_riemannian, jac_mass_star, jacobian, john_ellipsoid,
)
from metric_currents.seminorm import AmbientNorm, Seminorm, euclidean_seminorm

from tests.utils import identity_seminorm, rng

KINDS = (JacobianKind.BUSEMANN, JacobianKind.MASS_STAR, JacobianKind.INSCRIBED_RIEMANNIAN)


class JacobianKindTestCase(TestCase):
    def test_parse(self):
        self.assertEqual(JacobianKind.parse('m*'), JacobianKind.MASS_STAR)
        self.assertEqual(JacobianKind.parse('IR'), JacobianKind.INSCRIBED_RIEMANNIAN)
        self.assertEqual(JacobianKind.parse('busemann'), JacobianKind.BUSEMANN)
        self.assertEqual(JacobianKind.parse(JacobianKind.AMBROSIO_KIRCHHEIM), JacobianKind.AMBROSIO_KIRCHHEIM)

    def test_parse_unknown(self):
        with self.assertRaises(ValueError):
            JacobianKind.parse('holmes-thompson')


class SpecialValuesTestCase(TestCase):
    def test_normalization(self):
        for k in (1, 2, 3):
            for kind in KINDS:
                self.assertAlmostEqual(jacobian(euclidean_seminorm(k), kind), 1.0, places=9)

    def test_max_norm(self):
        sigma = identity_seminorm('max', 2)
        self.assertAlmostEqual(jac_busemann(sigma), math.pi / 4.0)
        self.assertAlmostEqual(jac_mass_star(sigma), 1.0)
        self.assertAlmostEqual(jac_inscribed_riemannian(sigma), 1.0, places=8)

    def test_max_norm_cube(self):
        self.assertAlmostEqual(jac_mass_star(identity_seminorm('max', 3)), 1.0)

    def test_sum_norm(self):
        sigma = identity_seminorm('sum', 2)
        self.assertAlmostEqual(jac_busemann(sigma), math.pi / 2.0)
        self.assertAlmostEqual(jac_mass_star(sigma), 2.0)
        self.assertAlmostEqual(jac_inscribed_riemannian(sigma), 2.0, places=8)

    def test_one_dimensional(self):
        sigma = Seminorm([[3.0], [-4.0]], AmbientNorm.max_norm(2))
        for kind in KINDS:
            self.assertAlmostEqual(jacobian(sigma, kind), 4.0)

    def test_zero_dimensional(self):
        sigma = Seminorm(np.zeros((2, 0)), AmbientNorm.euclidean(2))
        self.assertEqual(jac_busemann(sigma), 1.0)

    def test_degenerate(self):
        sigma = Seminorm([[1.0, 1.0], [2.0, 2.0]], AmbientNorm.max_norm(2))
        for kind in KINDS:
            self.assertEqual(jacobian(sigma, kind), 0.0)

    def test_ambrosio_kirchheim_is_mass_star(self):
        sigma = identity_seminorm('sum', 2)
        self.assertEqual(jacobian(sigma, 'ak'), jac_mass_star(sigma))


class AxiomsTestCase(TestCase):
    def test_transformation_law(self):
        g = rng(1)
        for kind in KINDS:
            sigma = Seminorm(g.standard_normal((3, 2)), AmbientNorm.max_norm(3))
            linear = np.array([[2.0, 1.0], [0.5, -1.0]])
            expected = abs(np.linalg.det(linear)) * jacobian(sigma, kind)
            self.assertAlmostEqual(jacobian(sigma.compose(linear), kind), expected, places=7)

    def test_monotone(self):
        g = rng(2)
        matrix = g.standard_normal((3, 2))
        for kind in KINDS:
            smaller = jacobian(Seminorm(matrix, AmbientNorm.max_norm(3)), kind)
            larger = jacobian(Seminorm(matrix, AmbientNorm.euclidean(3)), kind)
            self.assertLessEqual(smaller, larger + 1e-9)

    def test_quadratic_closed_form(self):
        sigma = Seminorm(np.eye(2), AmbientNorm.quadratic(np.diag([4.0, 9.0])))
        for kind in KINDS:
            self.assertAlmostEqual(jacobian(sigma, kind), 6.0, places=8)


class MassStarAscentTestCase(TestCase):
    def gauge_seminorm(self):
        ambient = AmbientNorm.product([AmbientNorm.max_norm(2), AmbientNorm.euclidean(1)])
        return Seminorm(np.eye(3)[:, :2] + np.eye(3)[:, 1:], ambient)

    def test_ascent_bounded_by_inscribed(self):
        sigma = self.gauge_seminorm()
        value = jac_mass_star(sigma, rng=rng())
        self.assertGreater(value, 0.0)
        self.assertLessEqual(value, jac_inscribed_riemannian(sigma) + 1e-8)

    def test_polytope_ascent_beyond_subset_cap(self):
        for k in (2, 3):
            sigma = identity_seminorm('sum', k)
            exact = jac_mass_star(sigma)
            with mock.patch.object(config, 'MASS_STAR_MAX_SUBSETS', 0):
                self.assertAlmostEqual(jac_mass_star(sigma, rng=rng()), exact)
        self.assertAlmostEqual(exact, 4.0)

    def test_ascent_deterministic(self):
        sigma = self.gauge_seminorm()
        self.assertEqual(jac_mass_star(sigma, rng=rng(5)), jac_mass_star(sigma, rng=rng(5)))

    def test_unsupported_dimension(self):
        ambient = AmbientNorm.product([AmbientNorm.max_norm(2), AmbientNorm.euclidean(2)])
        with self.assertRaises(Unsupported):
            jac_mass_star(Seminorm(np.eye(4), ambient))


class JohnEllipsoidTestCase(TestCase):
    def test_square(self):
        ellipsoid = john_ellipsoid(SymmetricPolytope(np.eye(2)))
        np.testing.assert_allclose(ellipsoid.shape, np.eye(2), atol=1e-8)

    def test_ellipsoid_is_fixed(self):
        e = Ellipsoid(np.diag([1.0, 2.0]))
        self.assertIs(john_ellipsoid(e), e)

    def test_contained(self):
        body = SymmetricPolytope([[1.0, 0.2], [-0.3, 1.0], [0.7, 0.7]])
        ellipsoid = john_ellipsoid(body)
        angles = np.linspace(0.0, 2.0 * np.pi, 200)
        circle = np.column_stack([np.cos(angles), np.sin(angles)])
        boundary = circle / ellipsoid.gauge(circle)[:, None]
        self.assertTrue(np.all(body.gauge(boundary) <= 1.0 + 1e-8))

    def test_grid_oracle(self):
        facets = rng(4).standard_normal((3, 2))
        volume = john_ellipsoid(SymmetricPolytope(facets)).volume()
        self.assertAlmostEqual(volume, john_grid_oracle(facets), delta=1e-4)

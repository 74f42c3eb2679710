# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import math
from unittest import TestCase

import numpy as np

from metric_currents.current import PolyhedralCurrent, boundary, evaluate, mass, square_current
from metric_currents.exceptions import DegenerateLevel
from metric_currents.geometry import AffineMap, Simplex
from metric_currents.seminorm import AmbientNorm
from metric_currents.slicing import (
    Projection, breakpoints, slice, slice_by_function, slice_characteristic_consistency, slice_family,
    slice_mass_profile, slice_order_check, verify_mass_fubini, verify_slice_isometry,
    verify_slice_pushforward_commute, verify_universal_property,
)

from tests.utils import assert_currents_equal, rng, unit_square


def rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return AffineMap([[c, -s], [s, c]], [0.2, -0.1])


def unit_cube():
    """
    Positively oriented unit cube in R^3 split into six tetrahedra.
    """
    corners = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
    cells = []
    for path in ([1, 2], [1, 5], [3, 2], [3, 7], [4, 5], [4, 7]):
        vertices = corners[[0] + path + [6]]
        sign = 1 if np.linalg.det(vertices[1:] - vertices[0]) > 0 else -1
        cells.append((Simplex(vertices, sign), 1))
    return PolyhedralCurrent(AmbientNorm.euclidean(3), 3, cells)


class ProjectionTestCase(TestCase):
    def test_axis(self):
        rho = Projection.axis(1, 3)
        self.assertEqual(rho([[1.0, 2.0, 3.0]]).tolist(), [[2.0]])

    def test_direction_normalized(self):
        self.assertAlmostEqual(float(np.linalg.norm(Projection.direction([3.0, 4.0]).matrix)), 1.0)

    def test_rows_must_be_orthonormal(self):
        with self.assertRaises(ValueError):
            Projection([[1.0, 1.0]])


class SliceTestCase(TestCase):
    def test_square_vertical_slice(self):
        sliced = slice(unit_square(), 0, 0.5)
        self.assertEqual(sliced.k, 1)
        self.assertAlmostEqual(mass(sliced).total, 1.0)
        one = AffineMap.functional([0.0, 0.0], 1.0)
        self.assertAlmostEqual(evaluate(sliced, one, [AffineMap.functional([0.0, 1.0])]), 1.0)

    def test_boundary_anticommutes(self):
        T = unit_square()
        assert_currents_equal(self, boundary(slice(T, 0, 0.3)), -slice(boundary(T), 0, 0.3))

    def test_outside_support(self):
        self.assertTrue(slice(unit_square(), 0, 2.0).is_zero)

    def test_degenerate_level(self):
        with self.assertRaises(DegenerateLevel) as cm:
            slice(unit_square(), 0, 1.0)
        self.assertEqual(cm.exception.context['level'], 1.0)

    def test_codimension_two(self):
        point = slice(unit_square(), np.eye(2), [0.3, 0.6])
        self.assertEqual(point.k, 0)
        self.assertEqual([abs(m) for _, m in point], [1])

    def test_order_of_rows(self):
        T = unit_cube()
        self.assertAlmostEqual(slice_order_check(T, np.eye(3)[:2], [0.3, 0.6])['difference'], 0.0)
        swapped = slice(T, np.eye(3)[[1, 0]], [0.6, 0.3])
        assert_currents_equal(self, swapped, -slice(T, np.eye(3)[:2], [0.3, 0.6]))

    def test_cube_slice_is_square(self):
        self.assertAlmostEqual(mass(slice(unit_cube(), 2, 0.4)).total, 1.0)

    def test_level_count(self):
        with self.assertRaises(ValueError):
            slice(unit_square(), np.eye(2), [0.5])

    def test_codimension_too_large(self):
        with self.assertRaises(ValueError):
            slice(boundary(unit_square()), np.eye(2), [0.3, 0.6])

    def test_by_function(self):
        sliced = slice_by_function(unit_square(), lambda p: p[:, 0] + p[:, 1], 0.5)
        self.assertEqual(sliced.k, 1)
        self.assertAlmostEqual(mass(sliced).total, math.sqrt(2.0) / 2.0)
        self.assertTrue(slice_by_function(unit_square(), lambda p: p[:, 0] + p[:, 1], 3.0).is_zero)

    def test_zero_current(self):
        with self.assertRaises(ValueError):
            slice(PolyhedralCurrent(AmbientNorm.euclidean(2), 0), 0, 0.5)


class FamilyTestCase(TestCase):
    def test_breakpoints(self):
        np.testing.assert_allclose(breakpoints(square_current(2.0), 1), [0.0, 2.0])

    def test_default_levels(self):
        family = slice_family(square_current(2.0), 0)
        level, = family.levels()
        self.assertAlmostEqual(level, 1.0)
        self.assertAlmostEqual(mass(family[level]).total, 2.0)

    def test_profile(self):
        profile = slice_mass_profile(square_current(2.0), 0)
        self.assertAlmostEqual(sum(w for _, w, _ in profile), 2.0)
        for level, weight, value in profile:
            self.assertAlmostEqual(value, 2.0)


class VerificationTestCase(TestCase):
    def test_fubini_euclidean(self):
        report = verify_mass_fubini(unit_square(), 0)
        self.assertAlmostEqual(report['integral'], 1.0)
        self.assertLess(report['gap'], 1e-9)
        self.assertTrue(report['inequality_holds'])

    def test_fubini_max_norm(self):
        T = PolyhedralCurrent(AmbientNorm.max_norm(2), 2, [(Simplex([[0, 0], [2, 0.5], [0.3, 1.7]]), 2)])
        report = verify_mass_fubini(T, 1)
        self.assertLess(report['gap'], 1e-9)
        self.assertTrue(report['inequality_holds'])

    def test_fubini_needs_line(self):
        with self.assertRaises(ValueError):
            verify_mass_fubini(unit_square(), np.eye(2))

    def test_pushforward_commutes(self):
        T = unit_square() + 2 * square_current(0.5, origin=(0.25, 0.1))
        report = verify_slice_pushforward_commute(T, rotation(0.4), 0, levels=5, rng=rng())
        self.assertEqual(report['levels'], 5)
        self.assertLess(report['max_difference'], 1e-9)

    def test_characteristic_consistency(self):
        report = slice_characteristic_consistency(unit_square(), 1, levels=5, rng=rng())
        self.assertEqual(report['levels'], 5)
        self.assertTrue(report['supported'])
        self.assertLess(report['max_difference'], 1e-9)
        self.assertEqual(report['symmetric_difference'], 0.0)

    def test_characteristic_consistency_cancelling_pair(self):
        t = Simplex([[2, 0], [3, 0], [2, 1]])
        T = PolyhedralCurrent(unit_square().ambient, 2, unit_square().cells + [(t, 1), (t, -1)], canonical=False)
        self.assertEqual(len(T), 4)
        report = slice_characteristic_consistency(T, 0, levels=8, rng=rng())
        self.assertEqual(report['levels'], 8)
        self.assertTrue(report['supported'])
        self.assertLess(report['max_difference'], 1e-9)
        self.assertEqual(report['symmetric_difference'], 0.0)

    def test_characteristic_consistency_codimension_two(self):
        report = slice_characteristic_consistency(unit_square(), np.eye(2), levels=5, rng=rng())
        self.assertEqual(report['levels'], 5)
        self.assertTrue(report['supported'])
        self.assertLess(report['max_difference'], 1e-9)
        report = slice_characteristic_consistency(unit_cube(), np.eye(3)[:2], levels=3, rng=rng())
        self.assertEqual(report['levels'], 3)
        self.assertLess(report['max_difference'], 1e-9)
        self.assertEqual(report['symmetric_difference'], 0.0)

    def test_characteristic_consistency_sections(self):
        report = slice_characteristic_consistency(unit_cube(), 2, levels=3, rng=rng())
        self.assertTrue(report['supported'])
        self.assertLess(report['max_difference'], 1e-9)

    def test_universal_property(self):
        h = AffineMap.functional([0.5, -1.0], 0.25)
        report = verify_universal_property(unit_square(), 0, [0.2, 0.5, 0.8], [0.0, 1.0, 0.0], h,
                                           [AffineMap.functional([0.0, 1.0])])
        self.assertLess(report['difference'], 1e-9)

    def test_isometry(self):
        report = verify_slice_isometry(unit_square(), rotation(1.1), 0, levels=5, rng=rng())
        self.assertLess(report['max_mass_difference'], 1e-9)
        self.assertLess(report['max_distance_difference'], 1e-9)

# -*- coding: utf-8 -*-
from __future__ import unicode_literals

from unittest import TestCase

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from metric_currents.exceptions import ConvergenceError
from metric_currents.linprog import simplex

from tests.utils import rng


def slack_program(g, m, n):
    """
    Random program A x = b, x >= 0 with the slack columns as a feasible basis.
    """
    B = g.uniform(-1.0, 1.0, size=(m, n))
    A = np.hstack([np.eye(m), B])
    b = g.uniform(0.0, 2.0, size=m)
    c = np.concatenate([g.uniform(0.0, 1.0, size=m), g.uniform(-1.0, 1.0, size=n)])
    # Bound the feasible region so the optimum exists.
    A = np.vstack([A, np.ones(m + n)])
    A = np.hstack([A, np.eye(m + 1)[:, -1:]])
    b = np.append(b, 10.0)
    c = np.append(c, 0.0)
    return c, A, b, list(range(m)) + [m + n]


class SimplexTestCase(TestCase):
    def test_matches_highs(self):
        g = rng(7)
        for _ in range(20):
            c, A, b, basis = slack_program(g, 4, 6)
            result = simplex(c, A, b, basis)
            expected = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method='highs')
            self.assertAlmostEqual(result.value, expected.fun, places=8)
            np.testing.assert_allclose(A.dot(result.x), b, atol=1e-9)
            self.assertTrue(np.all(result.x >= 0.0))

    def test_sparse_input(self):
        c, A, b, basis = slack_program(rng(8), 3, 5)
        dense = simplex(c, A, b, basis)
        self.assertAlmostEqual(simplex(c, sparse.csr_matrix(A), b, basis).value, dense.value)

    def test_already_optimal(self):
        result = simplex([1.0, 1.0], [[1.0, 1.0]], [2.0], [0])
        self.assertEqual(result.iterations, 0)
        self.assertEqual(result.x.tolist(), [2.0, 0.0])

    def test_one_pivot(self):
        result = simplex([2.0, 1.0], [[1.0, 1.0]], [3.0], [0])
        self.assertEqual(result.iterations, 1)
        self.assertAlmostEqual(result.value, 3.0)
        self.assertEqual(result.basis, [1])

    def test_infeasible_start(self):
        with self.assertRaises(ValueError):
            simplex([1.0], [[1.0]], [-1.0], [0])

    def test_unbounded(self):
        with self.assertRaises(ConvergenceError):
            simplex([0.0, -1.0], [[1.0, -1.0]], [1.0], [0])

    def test_pivot_cap(self):
        c, A, b, basis = slack_program(rng(9), 4, 6)
        if simplex(c, A, b, basis).iterations == 0:
            self.skipTest("Starting basis already optimal")
        with self.assertRaises(ConvergenceError) as cm:
            simplex(c, A, b, basis, max_iterations=1)
        self.assertEqual(len(cm.exception.best), A.shape[1])

    def test_degenerate_program(self):
        # Zero right hand side: every pivot is degenerate.
        c = np.array([0.0, 0.0, 1.0, -1.0])
        A = np.array([[1.0, 0.0, 1.0, -1.0], [0.0, 1.0, -1.0, 1.0]])
        result = simplex(c, A, np.zeros(2), [0, 1])
        self.assertAlmostEqual(result.value, 0.0)

"""
Dense revised simplex method for standard form programs

    minimize c . x  subject to  A x = b, x >= 0

started from a known feasible basis. Pricing is Dantzig's rule until a
streak of degenerate pivots, then Bland's rule for the rest of the solve.
"""
import logging

import numpy as np
from scipy import sparse

from metric_currents import config
from metric_currents.exceptions import ConvergenceError

logger = logging.getLogger(__name__)

OPTIMAL = 'optimal'

# Basis inverse is refactorized from scratch this often.
REFACTOR_EVERY = 100


class LPResult(object):
    def __init__(self, x, value, basis, iterations, status=OPTIMAL):
        self.x = x
        self.value = value
        self.basis = basis
        self.iterations = iterations
        self.status = status

    def __repr__(self):
        return 'LPResult(value=%r, iterations=%d)' % (self.value, self.iterations)


def _column(A, j):
    return np.asarray(A[:, j].toarray()).ravel() if sparse.issparse(A) else A[:, j]


def _refactor(A, basis):
    columns = A[:, basis]
    columns = columns.toarray() if sparse.issparse(columns) else columns
    return np.linalg.inv(columns)


def simplex(c, A, b, basis, tol=None, max_iterations=None):
    """
    Solve a standard form program from a feasible starting basis.

    Args:
        c (numpy.ndarray): Costs, length n.
        A (numpy.ndarray or scipy.sparse matrix): m x n constraint matrix.
        b (numpy.ndarray): Right hand side, length m.
        basis (list): m column indices with A[:, basis] invertible and
            A[:, basis]^-1 b >= 0.
        tol (float, optional): Pricing and ratio test tolerance.
        max_iterations (int, optional): Pivot cap.

    Returns:
        (LPResult)

    Raises:
        ConvergenceError: at the pivot cap or on an unbounded direction.
    """
    tol = config.LP_TOLERANCE if tol is None else tol
    max_iterations = max_iterations or config.LP_MAX_ITERATIONS
    A = sparse.csc_matrix(A) if sparse.issparse(A) else np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    basis = list(basis)
    binv = _refactor(A, basis)
    x_basis = binv.dot(b)
    if np.any(x_basis < -tol):
        raise ValueError("Starting basis is not feasible")
    bland = False
    streak = 0
    iterations = 0
    while True:
        duals = c[basis].dot(binv)
        reduced = c - A.T.dot(duals)
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if not len(candidates):
            break
        entering = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])
        direction = binv.dot(_column(A, entering))
        rows = np.flatnonzero(direction > tol)
        if not len(rows):
            raise ConvergenceError("Linear program is unbounded", best=None, gap=float('inf'))
        ratios = x_basis[rows] / direction[rows]
        theta = ratios.min()
        ties = rows[ratios <= theta + tol]
        leaving = int(min(ties, key=lambda r: basis[r]))
        theta = max(x_basis[leaving] / direction[leaving], 0.0)

        if theta <= tol:
            streak += 1
            if not bland and streak >= config.LP_DEGENERATE_STREAK:
                logger.debug("Switching to Bland's rule after %d degenerate pivots", streak)
                bland = True
        else:
            streak = 0

        x_basis = x_basis - theta * direction
        x_basis[leaving] = theta
        basis[leaving] = entering
        pivot = binv[leaving] / direction[leaving]
        binv = binv - np.outer(direction, pivot)
        binv[leaving] = pivot

        iterations += 1
        if iterations % REFACTOR_EVERY == 0:
            binv = _refactor(A, basis)
            x_basis = binv.dot(b)
        if iterations >= max_iterations:
            x = np.zeros(n)
            x[basis] = x_basis
            raise ConvergenceError("Simplex method stopped after %d pivots" % iterations,
                                   best=x, gap=float(-reduced.min() * np.sum(x_basis)))

    x = np.zeros(n)
    x[basis] = np.maximum(x_basis, 0.0)
    logger.debug("Simplex method: %d pivots, value %.12g", iterations, c.dot(x))
    return LPResult(x, float(c.dot(x)), basis, iterations)

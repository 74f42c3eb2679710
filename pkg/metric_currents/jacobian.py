"""
Jacobians of seminorms: Busemann, mass* and inscribed Riemannian.

All three are normalized (1 on the Euclidean norm), monotone and satisfy
Jac(sigma o T) = |det T| Jac(sigma). A degenerate seminorm has Jacobian 0.
"""
import enum
import itertools
import logging
import math

import numpy as np

from metric_currents import config
from metric_currents.exceptions import ConvergenceError, Unsupported
from metric_currents.geometry import Ellipsoid, unit_ball_volume
from metric_currents.seminorm import unit_ball

logger = logging.getLogger(__name__)


class JacobianKind(enum.Enum):
    BUSEMANN = 'b'
    MASS_STAR = 'mstar'
    INSCRIBED_RIEMANNIAN = 'ir'
    # Ambrosio-Kirchheim mass of a rectifiable current is its mass* Finsler mass.
    AMBROSIO_KIRCHHEIM = 'ak'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {
            'b': cls.BUSEMANN, 'busemann': cls.BUSEMANN,
            'mstar': cls.MASS_STAR, 'mass_star': cls.MASS_STAR, 'm*': cls.MASS_STAR,
            'ir': cls.INSCRIBED_RIEMANNIAN, 'inscribed_riemannian': cls.INSCRIBED_RIEMANNIAN,
            'ak': cls.AMBROSIO_KIRCHHEIM, 'ambrosio_kirchheim': cls.AMBROSIO_KIRCHHEIM,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError("Unknown Jacobian kind %r" % (value,))


def _trivial_jacobian(sigma):
    """
    Jacobian value shared by all kinds, or None when a computation is needed.
    """
    k = sigma.domain_dim
    if k == 0:
        return 1.0
    if sigma.is_degenerate:
        return 0.0
    if k == 1:
        return float(sigma(np.ones(1)))
    return None


def jac_busemann(sigma, rng=None):
    """
    omega_k / vol(B_sigma)
    """
    value = _trivial_jacobian(sigma)
    if value is not None:
        return value
    ball = unit_ball(sigma)
    return unit_ball_volume(sigma.domain_dim) / ball.volume(rng=rng)


def _best_atom(blocks, c):
    """
    Point xi of the dual ball maximizing c . xi, and the maximum.
    """
    best, best_value = None, -1.0
    for block in blocks:
        image = block.dot(c)
        value = float(np.linalg.norm(image))
        if value > best_value:
            best_value = value
            best = block.T.dot(image / value) if value > 0 else np.zeros_like(c)
    return best, best_value


def _best_vertex(rows, c):
    """
    Vertex +-rows[i] of a polytopal dual ball maximizing c . xi.
    """
    values = rows.dot(c)
    i = int(np.argmax(np.abs(values)))
    sign = 1.0 if values[i] >= 0.0 else -1.0
    return sign * rows[i], abs(float(values[i]))


def _cofactors(rows, j):
    k = rows.shape[0]
    cofactor = np.empty(k)
    for col in range(k):
        trial = rows.copy()
        trial[j] = 0.0
        trial[j, col] = 1.0
        cofactor[col] = np.linalg.det(trial)
    return cofactor


def _mass_star_ascent(blocks, k, rng, restarts, best_atom=_best_atom):
    best = 0.0
    for _ in range(restarts):
        rows = np.array([best_atom(blocks, rng.standard_normal(k))[0] for _ in range(k)])
        value = abs(np.linalg.det(rows))
        for _ in range(500):
            previous = value
            for j in range(k):
                atom, _ = best_atom(blocks, _cofactors(rows, j))
                rows[j] = atom
            value = abs(np.linalg.det(rows))
            if value - previous <= 1e-15 * max(1.0, value):
                break
        best = max(best, value)
    return best


def jac_mass_star(sigma, rng=None, restarts=None):
    """
    max |det(xi_1, ..., xi_k)| over the dual unit ball, which equals
    2^k over the least volume of a parallelepiped containing B_sigma.

    Exact over vertex subsets for polytopal duals with at most
    MASS_STAR_MAX_SUBSETS subsets, closed form for Euclidean blocks,
    multi-start coordinate ascent otherwise.

    Raises:
        Unsupported: for k > 3 with a non-polytopal dual.
    """
    value = _trivial_jacobian(sigma)
    if value is not None:
        return value
    k = sigma.domain_dim
    blocks = sigma.blocks()
    if all(b.shape[0] == 1 for b in blocks):
        rows = np.vstack(blocks)
        if math.comb(len(rows), k) <= config.MASS_STAR_MAX_SUBSETS:
            subsets = np.array(list(itertools.combinations(range(len(rows)), k)))
            return float(np.max(np.abs(np.linalg.det(rows[subsets]))))
        logger.debug("mass* over %d facet rows by coordinate ascent", len(rows))
        rng = np.random.default_rng(0) if rng is None else rng
        return _mass_star_ascent(rows, k, rng, restarts or config.MASS_STAR_RESTARTS, _best_vertex)
    if len(blocks) == 1:
        return math.sqrt(np.linalg.det(blocks[0].T.dot(blocks[0])))
    if k > 3:
        raise Unsupported("mass* Jacobian of a non-polytopal %d-dimensional norm" % k)
    rng = np.random.default_rng(0) if rng is None else rng
    return _mass_star_ascent(blocks, k, rng, restarts or config.MASS_STAR_RESTARTS)


def _symmetric_basis(k):
    basis = []
    for i in range(k):
        for j in range(i, k):
            e = np.zeros((k, k))
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
    return np.array(basis)


def _grouped_blocks(blocks):
    groups = {}
    for block in blocks:
        groups.setdefault(block.shape[0], []).append(block)
    return [np.array(g) for g in groups.values()]


def _feasible(p, groups):
    try:
        np.linalg.cholesky(p)
        for h in groups:
            slack = np.eye(h.shape[1]) - np.einsum('bri,ij,bsj->brs', h, p, h)
            np.linalg.cholesky(slack)
    except np.linalg.LinAlgError:
        return False
    return True


def _newton_system(p, t, groups, basis):
    pinv = np.linalg.inv(p)
    pe = np.einsum('ij,ejk->eik', pinv, basis)
    grad = -t * np.einsum('eii->e', pe)
    hess = t * np.einsum('eij,fji->ef', pe, pe)
    for h in groups:
        slack = np.eye(h.shape[1]) - np.einsum('bri,ij,bsj->brs', h, p, h)
        g = np.einsum('bri,brs,bsj->bij', h, np.linalg.inv(slack), h)
        ge = np.einsum('bij,ejk->beik', g, basis)
        grad += np.einsum('beii->e', ge)
        hess += np.einsum('beij,bfji->ef', ge, ge)
    return grad, hess


def _john_barrier(blocks, k, tol, max_iterations):
    """
    maximize log det P subject to H_i P H_i^T <= I, by a log barrier path
    following method with damped Newton centering steps.

    The ellipsoid {x : x^T P^-1 x <= 1} lies in the body exactly when every
    constraint holds.
    """
    groups = _grouped_blocks(blocks)
    basis = _symmetric_basis(k)
    barrier = sum(h.shape[0] * h.shape[1] for h in groups)
    scale = max(float(np.linalg.norm(b, 2)) ** 2 for b in blocks)
    p = np.eye(k) * (0.5 / scale)
    t = 1.0
    steps = 0
    while True:
        while True:
            grad, hess = _newton_system(p, t, groups, basis)
            dp = -np.linalg.solve(hess, grad)
            decrement = float(-grad.dot(dp))
            if decrement <= 1e-10:
                break
            step = 1.0 if decrement < 0.0625 else 1.0 / (1.0 + math.sqrt(decrement))
            direction = np.einsum('e,eij->ij', dp, basis)
            while not _feasible(p + step * direction, groups):
                step *= 0.5
                if step < 1e-30:
                    break
            p = p + step * direction
            steps += 1
            if steps > max_iterations:
                raise ConvergenceError(
                    "John ellipsoid barrier method did not converge in %d steps" % max_iterations,
                    best=Ellipsoid(np.linalg.inv(p)), gap=barrier / t)
        if barrier / t < tol:
            break
        t *= 10.0
    logger.debug("John ellipsoid: %d Newton steps, gap %.3g", steps, barrier / t)
    return p


def john_ellipsoid(body, tol=None, max_iterations=None):
    """
    Maximal volume centered ellipsoid contained in a symmetric convex body.

    Args:
        body (SymmetricPolytope, Ellipsoid or GaugeBody): Bounded body.
        tol (float, optional): Duality gap in log det at which to stop.
        max_iterations (int, optional): Newton step cap.

    Returns:
        (Ellipsoid) The John ellipsoid; an Ellipsoid input is returned as is.

    Raises:
        ConvergenceError: with the best iterate and the gap estimate.
    """
    if isinstance(body, Ellipsoid):
        return body
    tol = config.JOHN_TOLERANCE if tol is None else tol
    max_iterations = max_iterations or config.JOHN_MAX_ITERATIONS
    p = _john_barrier(body.blocks(), body.dim, tol, max_iterations)
    return Ellipsoid(np.linalg.inv(p))


def jac_inscribed_riemannian(sigma, tol=None):
    """
    omega_k / vol(J(B_sigma)) = sqrt(det M) for the John ellipsoid {v^T M v <= 1}.
    """
    value = _trivial_jacobian(sigma)
    if value is not None:
        return value
    ellipsoid = john_ellipsoid(unit_ball(sigma), tol=tol)
    return math.sqrt(np.linalg.det(ellipsoid.shape))


def jacobian(sigma, kind, rng=None):
    """
    Dispatch on JacobianKind; Ambrosio-Kirchheim is evaluated as mass*.
    """
    kind = JacobianKind.parse(kind)
    if kind == JacobianKind.BUSEMANN:
        return jac_busemann(sigma, rng=rng)
    if kind == JacobianKind.INSCRIBED_RIEMANNIAN:
        return jac_inscribed_riemannian(sigma)
    return jac_mass_star(sigma, rng=rng)

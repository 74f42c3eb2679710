"""
Seminorms sigma = N(A .) on R^k, given by a matrix A: R^k -> R^N and an
ambient norm N on R^N.

Every ambient norm is written as a maximum of Euclidean norms of linear
maps, N(x) = max_i |G_i x|. These blocks are what the unit ball and the
Jacobians are computed from.
"""
import itertools
import logging

import numpy as np
from scipy.linalg import block_diag

from metric_currents.exceptions import UnboundedBall, Unsupported
from metric_currents.geometry import AffineMap, Ellipsoid, GaugeBody, SymmetricPolytope

logger = logging.getLogger(__name__)

EUCLIDEAN = 'euclidean'
MAX = 'max'
SUM = 'sum'
QUADRATIC = 'quadratic'
PRODUCT = 'product'

ALIASES = {
    'euclidean': EUCLIDEAN,
    'l2': EUCLIDEAN,
    'max': MAX,
    'linf': MAX,
    'sum': SUM,
    'l1': SUM,
    'quadratic': QUADRATIC,
    'product': PRODUCT,
}

# Sign vectors of the sum norm grow like 2^(N-1).
MAX_SUM_NORM_DIM = 12


class AmbientNorm(object):
    """
    A norm on R^N: Euclidean, maximum, sum, quadratic sqrt(x^T Q x), or the
    l2-product sqrt(N_1(x_1)^2 + ... + N_p(x_p)^2) of other ambient norms.
    """
    def __init__(self, kind, dim, q=None, parts=None):
        if kind not in (EUCLIDEAN, MAX, SUM, QUADRATIC, PRODUCT):
            raise ValueError("Unknown norm %r" % kind)
        self.kind = kind
        self.dim = int(dim)
        self.q = None
        self.parts = ()
        if kind == QUADRATIC:
            q = np.atleast_2d(np.asarray(q, dtype=float))
            if q.shape != (self.dim, self.dim) or not np.allclose(q, q.T, atol=1e-12):
                raise ValueError("Quadratic norm needs a symmetric %dx%d matrix" % (dim, dim))
            q = 0.5 * (q + q.T)
            eigenvalues = np.linalg.eigvalsh(q)
            if eigenvalues.min() < -1e-12 * max(1.0, abs(eigenvalues).max()):
                raise ValueError("Quadratic norm matrix must be positive semidefinite")
            self.q = q
        if kind == PRODUCT:
            self.parts = tuple(parts)
            if sum(p.dim for p in self.parts) != self.dim:
                raise ValueError("Product parts do not add up to dimension %d" % self.dim)
        self._blocks = None

    @classmethod
    def euclidean(cls, n):
        return cls(EUCLIDEAN, n)

    @classmethod
    def max_norm(cls, n):
        return cls(MAX, n)

    @classmethod
    def sum_norm(cls, n):
        return cls(SUM, n)

    @classmethod
    def quadratic(cls, q):
        q = np.atleast_2d(q)
        return cls(QUADRATIC, q.shape[0], q=q)

    @classmethod
    def product(cls, parts):
        parts = tuple(parts)
        return cls(PRODUCT, sum(p.dim for p in parts), parts=parts)

    @classmethod
    def parse(cls, tag, dim, params=None):
        """
        Build a norm from a command line or JSON tag such as 'linf' or 'l2'.
        """
        params = params or {}
        try:
            kind = ALIASES[tag]
        except KeyError:
            raise ValueError("Unknown norm tag %r" % tag)
        if kind == QUADRATIC:
            return cls.quadratic(params['q'])
        if kind == PRODUCT:
            return cls.product([cls.from_dict(p) for p in params['parts']])
        return cls(kind, dim)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        pieces = []
        start = 0
        for part in self.parts:
            pieces.append(x[..., start:start + part.dim])
            start += part.dim
        return pieces

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError("Expected vectors in R^%d, got shape %r" % (self.dim, x.shape))
        if self.dim == 0:
            return np.zeros(x.shape[:-1])
        if self.kind == EUCLIDEAN:
            return np.linalg.norm(x, axis=-1)
        if self.kind == MAX:
            return np.max(np.abs(x), axis=-1)
        if self.kind == SUM:
            return np.sum(np.abs(x), axis=-1)
        if self.kind == QUADRATIC:
            return np.sqrt(np.maximum(np.einsum('...i,ij,...j->...', x, self.q, x), 0.0))
        values = [part(piece) for part, piece in zip(self.parts, self.split(x))]
        return np.sqrt(np.sum(np.square(values), axis=0))

    def dual(self, y):
        """
        Dual norm sup{y . x : N(x) <= 1}, the Lipschitz constant of x -> y . x.
        """
        y = np.asarray(y, dtype=float)
        if self.kind == EUCLIDEAN:
            return np.linalg.norm(y, axis=-1)
        if self.kind == MAX:
            return np.sum(np.abs(y), axis=-1)
        if self.kind == SUM:
            return np.max(np.abs(y), axis=-1)
        if self.kind == QUADRATIC:
            qinv = np.linalg.pinv(self.q)
            return np.sqrt(np.maximum(np.einsum('...i,ij,...j->...', y, qinv, y), 0.0))
        values = [part.dual(piece) for part, piece in zip(self.parts, self.split(y))]
        return np.sqrt(np.sum(np.square(values), axis=0))

    def blocks(self):
        """
        Matrices G_i with N(x) = max_i |G_i x|.
        """
        if self._blocks is None:
            self._blocks = self._make_blocks()
        return self._blocks

    def _make_blocks(self):
        n = self.dim
        if self.kind == EUCLIDEAN:
            return [np.eye(n)]
        if self.kind == MAX:
            return [row[None, :] for row in np.eye(n)]
        if self.kind == SUM:
            if n > MAX_SUM_NORM_DIM:
                raise Unsupported("Sum norm blocks in dimension %d" % n)
            signs = [(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=n - 1)]
            return [np.array(s)[None, :] for s in signs]
        if self.kind == QUADRATIC:
            w, v = np.linalg.eigh(self.q)
            keep = w > 1e-15 * max(1.0, w.max())
            return [np.sqrt(w[keep])[:, None] * v[:, keep].T]
        return [block_diag(*combo) for combo in itertools.product(*[p.blocks() for p in self.parts])]

    def to_dict(self):
        data = {'tag': self.kind, 'dim': self.dim, 'params': {}}
        if self.kind == QUADRATIC:
            data['params'] = {'q': self.q.tolist()}
        if self.kind == PRODUCT:
            data['params'] = {'parts': [p.to_dict() for p in self.parts]}
        return data

    @classmethod
    def from_dict(cls, data):
        return cls.parse(data['tag'], data['dim'], data.get('params'))

    def _key(self):
        q = None if self.q is None else tuple(self.q.ravel().tolist())
        return (self.kind, self.dim, q, tuple(p._key() for p in self.parts))

    def __eq__(self, other):
        return isinstance(other, AmbientNorm) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return 'AmbientNorm(%r, %d)' % (self.kind, self.dim)


class Seminorm(object):
    """
    sigma(v) = ambient(A v) for v in R^k.
    """
    def __init__(self, matrix, ambient):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("Seminorm matrix must be two dimensional")
        if matrix.shape[0] != ambient.dim:
            raise ValueError("Matrix with %d rows cannot map into R^%d" % (matrix.shape[0], ambient.dim))
        self.matrix = matrix
        self.ambient = ambient

    @property
    def domain_dim(self):
        return self.matrix.shape[1]

    def __call__(self, v):
        return evaluate(self, v)

    def blocks(self):
        """
        Blocks H_i = G_i A with sigma(v) = max_i |H_i v|, zero blocks dropped.
        """
        blocks = [g.dot(self.matrix) for g in self.ambient.blocks()]
        return [b for b in blocks if np.any(b != 0.0)]

    def rank(self):
        if self.domain_dim == 0:
            return 0
        blocks = self.blocks()
        if not blocks:
            return 0
        return int(np.linalg.matrix_rank(np.vstack(blocks)))

    @property
    def is_degenerate(self):
        return self.rank() < self.domain_dim

    def compose(self, linear):
        """
        sigma o T for a linear map T: R^j -> R^k.
        """
        return Seminorm(self.matrix.dot(np.asarray(linear, dtype=float)), self.ambient)

    def scaled(self, factor):
        return Seminorm(float(factor) * self.matrix, self.ambient)

    def __repr__(self):
        return 'Seminorm(%r, %r)' % (self.matrix.tolist(), self.ambient)


def evaluate(sigma, v):
    """
    Args:
        sigma (Seminorm): Seminorm on R^k.
        v (array): Vector(s) in R^k, last axis.

    Returns:
        (float or numpy.ndarray) ambient(A v).
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != sigma.domain_dim:
        raise ValueError("Expected vectors in R^%d, got shape %r" % (sigma.domain_dim, v.shape))
    value = sigma.ambient(v.dot(sigma.matrix.T))
    return float(value) if np.ndim(value) == 0 else value


def unit_ball(sigma):
    """
    Unit ball of a norm: a SymmetricPolytope when every block is a single
    functional, an Ellipsoid for a single Euclidean block, a GaugeBody otherwise.

    Raises:
        UnboundedBall: if sigma has a nontrivial kernel.
    """
    if sigma.is_degenerate:
        raise UnboundedBall("Seminorm has a kernel; its unit ball is unbounded",
                            rank=sigma.rank(), dim=sigma.domain_dim)
    blocks = sigma.blocks()
    if all(b.shape[0] == 1 for b in blocks):
        return SymmetricPolytope(np.vstack(blocks))
    if len(blocks) == 1:
        return Ellipsoid(blocks[0].T.dot(blocks[0]))
    return GaugeBody(blocks)


def metric_differential(f, ambient):
    """
    Metric differential of an affine map, constant over its domain.

    Args:
        f (AffineMap or array): Affine map R^k -> R^N, or its linear part.
        ambient (AmbientNorm): Norm on the target.

    Returns:
        (Seminorm) v -> ambient(f'(v)).
    """
    matrix = f.matrix if isinstance(f, AffineMap) else np.atleast_2d(np.asarray(f, dtype=float))
    return Seminorm(matrix, ambient)


def product_seminorm(first, second):
    """
    (v, w) -> sqrt(first(v)^2 + second(w)^2)
    """
    ambient = AmbientNorm.product([first.ambient, second.ambient])
    return Seminorm(block_diag(first.matrix, second.matrix), ambient)


def euclidean_seminorm(k):
    return Seminorm(np.eye(k), AmbientNorm.euclidean(k))

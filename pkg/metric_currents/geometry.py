"""
Low dimensional affine geometry: points, affine maps, oriented simplices,
half-space clipping and the symmetric convex bodies arising as unit balls.
"""
import logging
import math

import numpy as np
from scipy import integrate
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay, HalfspaceIntersection, QhullError

from metric_currents import config
from metric_currents.exceptions import UnboundedPolytope

logger = logging.getLogger(__name__)


def point(coords):
    """
    Returns:
        (numpy.ndarray) Coordinates as a flat float array.

    Raises:
        ValueError: if a coordinate is not finite.
    """
    arr = np.asarray(coords, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Point coordinates must be finite, got %r" % (arr.tolist(),))
    return arr


def snap_key(coords, tol=None):
    """
    Hashable key identifying points closer than the snapping tolerance.
    """
    tol = config.SNAP_TOLERANCE if tol is None else tol
    return tuple(int(round(c / tol)) for c in coords)


def unit_ball_volume(k):
    """
    Volume of the Euclidean unit ball in R^k.
    """
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def lambda_vertices(k):
    """
    Vertices of the standard parameter simplex in R^k: the origin, then e_1, ..., e_k.
    """
    return np.vstack([np.zeros((1, k)), np.eye(k)])


class AffineMap(object):
    """
    x -> matrix . x + offset
    """
    def __init__(self, matrix, offset=None):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if offset is None:
            offset = np.zeros(matrix.shape[0])
        offset = np.asarray(offset, dtype=float).reshape(-1)
        if offset.shape[0] != matrix.shape[0]:
            raise ValueError("Offset of length %d does not match a %dx%d matrix" % (
                offset.shape[0], matrix.shape[0], matrix.shape[1]))
        self.matrix = matrix
        self.offset = offset

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def functional(cls, gradient, offset=0.0):
        """
        Real valued affine function x -> gradient . x + offset.
        """
        gradient = np.asarray(gradient, dtype=float).reshape(1, -1)
        return cls(gradient, [offset])

    @property
    def in_dim(self):
        return self.matrix.shape[1]

    @property
    def out_dim(self):
        return self.matrix.shape[0]

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.in_dim:
            raise ValueError("Expected points in R^%d" % self.in_dim)
        return points.dot(self.matrix.T) + self.offset

    def compose(self, other):
        """
        Returns:
            (AffineMap) self o other.
        """
        return AffineMap(self.matrix.dot(other.matrix), self.matrix.dot(other.offset) + self.offset)

    def lipschitz(self):
        """
        Euclidean operator norm of the linear part.
        """
        return float(np.linalg.norm(self.matrix, 2))

    def __repr__(self):
        return 'AffineMap(%r, %r)' % (self.matrix.tolist(), self.offset.tolist())


class Simplex(object):
    """
    Oriented affine k-simplex in R^N.

    `orientation` is +1 when the simplex carries the orientation of its
    vertex order and -1 otherwise.
    """
    def __init__(self, vertices, orientation=1):
        vertices = np.array(vertices, dtype=float, ndmin=2)
        if not np.all(np.isfinite(vertices)):
            raise ValueError("Simplex vertices must be finite")
        if vertices.shape[0] - 1 > vertices.shape[1]:
            raise ValueError("A %d-simplex does not fit in R^%d" % (
                vertices.shape[0] - 1, vertices.shape[1]))
        if orientation not in (1, -1):
            raise ValueError("Orientation must be +1 or -1, got %r" % (orientation,))
        vertices.setflags(write=False)
        self.vertices = vertices
        self.orientation = orientation

    @property
    def dimension(self):
        return self.vertices.shape[0] - 1

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    @property
    def edges(self):
        """
        (k x N) edge vectors v_i - v_0.
        """
        return self.vertices[1:] - self.vertices[0]

    @property
    def gram(self):
        edges = self.edges
        return edges.dot(edges.T)

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    @property
    def is_degenerate(self):
        k = self.dimension
        if k == 0:
            return False
        diffs = self.vertices[:, None, :] - self.vertices[None, :, :]
        scale = float(np.max(np.sum(diffs ** 2, axis=-1)))
        if scale == 0.0:
            return True
        return np.linalg.det(self.gram) < config.DEGENERACY_TOLERANCE * scale ** k

    @property
    def volume(self):
        return simplex_volume(self)

    def reversed(self):
        return Simplex(self.vertices, -self.orientation)

    def faces(self):
        """
        Oriented facets whose sum is the boundary of the simplex.
        """
        k = self.dimension
        if k == 0:
            return []
        return [Simplex(np.delete(self.vertices, i, axis=0), self.orientation * (-1) ** i)
                for i in range(k + 1)]

    def map(self, func):
        return Simplex(func(self.vertices), self.orientation)

    def __repr__(self):
        return 'Simplex(%r, %d)' % (self.vertices.tolist(), self.orientation)


def simplex_volume(s, with_flag=False):
    """
    k-dimensional Hausdorff measure sqrt(det G) / k! of a simplex.

    Args:
        s (Simplex): The simplex.
        with_flag (bool): Also return the degeneracy flag.

    Returns:
        (float) or (float, bool) Volume, zero for degenerate simplices.
    """
    k = s.dimension
    if k == 0:
        return (1.0, False) if with_flag else 1.0
    degenerate = s.is_degenerate
    if degenerate:
        volume = 0.0
    else:
        volume = math.sqrt(max(np.linalg.det(s.gram), 0.0)) / math.factorial(k)
    return (volume, degenerate) if with_flag else volume


class HalfSpace(object):
    """
    {x : normal . x <= offset}
    """
    def __init__(self, normal, offset=0.0):
        self.normal = point(normal)
        self.offset = float(offset)

    def value(self, points):
        return np.asarray(points, dtype=float).dot(self.normal) - self.offset

    def contains(self, points, tol=0.0):
        return self.value(points) <= tol

    def complement(self):
        return HalfSpace(-self.normal, -self.offset)

    def __repr__(self):
        return 'HalfSpace(%r, %r)' % (self.normal.tolist(), self.offset)


def _dedupe_rows(points, tol=1e-14):
    keys = set()
    kept = []
    for row in points:
        key = tuple(np.round(row / tol).astype(np.int64))
        if key not in keys:
            keys.add(key)
            kept.append(row)
    return np.array(kept)


def level_crossings(values):
    """
    Points of the standard parameter simplex where an affine function with the
    given vertex values changes sign strictly along an edge.

    Returns:
        (numpy.ndarray) Crossing points in parameter coordinates.
    """
    values = np.asarray(values, dtype=float)
    k = len(values) - 1
    lam = lambda_vertices(k)
    crossings = []
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            gi, gj = values[i], values[j]
            if (gi < 0.0 < gj) or (gj < 0.0 < gi):
                t = gi / (gi - gj)
                crossings.append(lam[i] + t * (lam[j] - lam[i]))
    return np.array(crossings).reshape(-1, k)


def triangulate_parameter_polytope(s, points):
    """
    Triangulate a convex polytope given by points in the parameter space of `s`
    and carry the pieces into R^N.

    Each piece keeps the orientation it inherits from `s`.
    """
    k = s.dimension
    points = _dedupe_rows(np.asarray(points, dtype=float).reshape(-1, k))
    if len(points) < k + 1:
        return []
    if k == 1:
        lo, hi = points[:, 0].min(), points[:, 0].max()
        if hi - lo <= 1e-15:
            return []
        pieces = np.array([[[lo], [hi]]])
    else:
        try:
            pieces = points[Delaunay(points).simplices]
        except QhullError:
            return []
    result = []
    origin, edges = s.vertices[0], s.edges
    for piece in pieces:
        det = np.linalg.det(piece[1:] - piece[0])
        if abs(det) <= 1e-14:
            continue
        orientation = s.orientation if det > 0 else -s.orientation
        result.append(Simplex(origin + piece.dot(edges), orientation))
    return result


def clip_simplex_values(s, values):
    """
    Pieces of `s` where the affine function with vertex values `values` is <= 0.
    """
    values = np.asarray(values, dtype=float)
    if np.all(values <= 0.0):
        return [s]
    if np.all(values >= 0.0):
        return []
    k = s.dimension
    lam = lambda_vertices(k)
    inside = lam[values <= 0.0]
    points = np.vstack([inside, level_crossings(values)])
    return triangulate_parameter_polytope(s, points)


def clip_simplex_halfspace(s, h):
    """
    Triangulation of s intersected with the half-space h.

    Args:
        s (Simplex): Simplex to clip.
        h (HalfSpace or tuple): Half-space, or a (functional, threshold) pair
            meaning {x : functional . x <= threshold}.

    Returns:
        (list) Simplices with inherited orientation; empty if the
        intersection is empty, [s] if s lies inside.
    """
    if not isinstance(h, HalfSpace):
        h = HalfSpace(*h)
    return clip_simplex_values(s, h.value(s.vertices))


def _box_half_widths(rows):
    """
    Half widths of the bounding box of {x : |rows . x| <= 1}.
    """
    k = rows.shape[1]
    a_ub = np.vstack([rows, -rows])
    b_ub = np.ones(a_ub.shape[0])
    widths = np.empty(k)
    for i in range(k):
        c = np.zeros(k)
        c[i] = -1.0
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * k, method='highs')
        if res.status != 0:
            raise UnboundedPolytope("Body is unbounded along axis %d" % i)
        widths[i] = -res.fun
    return widths


def monte_carlo_volume(gauge, rows, rng=None, samples=None):
    """
    Hit-or-miss volume estimate of {x : gauge(x) <= 1}.

    Args:
        gauge (callable): Vectorized gauge function.
        rows (numpy.ndarray): Functionals whose slab intersection contains the body.
        rng (numpy.random.Generator, optional): Source of samples.
        samples (int, optional): Sample count.

    Returns:
        (tuple) (volume, standard error).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    samples = samples or config.MONTE_CARLO_SAMPLES
    widths = _box_half_widths(rows)
    box = float(np.prod(2.0 * widths))
    hits = 0
    done = 0
    while done < samples:
        n = min(100000, samples - done)
        x = rng.uniform(-1.0, 1.0, size=(n, len(widths))) * widths
        hits += int(np.count_nonzero(gauge(x) <= 1.0))
        done += n
    frac = hits / float(samples)
    return box * frac, box * math.sqrt(frac * (1.0 - frac) / samples)


class SymmetricPolytope(object):
    """
    {v : |xi_j . v| <= 1 for all facet functionals xi_j}
    """
    def __init__(self, facets):
        facets = np.atleast_2d(np.asarray(facets, dtype=float))
        rows = []
        keys = set()
        for row in facets:
            nonzero = np.flatnonzero(np.abs(row) > 0)
            if not len(nonzero):
                continue
            if row[nonzero[0]] < 0:
                row = -row
            key = snap_key(row, 1e-12)
            if key not in keys:
                keys.add(key)
                rows.append(row)
        self.facets = np.array(rows).reshape(-1, facets.shape[1])
        self.dim = facets.shape[1]

    @property
    def is_bounded(self):
        return self.dim == 0 or (len(self.facets) > 0 and np.linalg.matrix_rank(self.facets) == self.dim)

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        if not len(self.facets):
            return np.zeros(v.shape[:-1])
        return np.max(np.abs(v.dot(self.facets.T)), axis=-1)

    def contains(self, v, tol=1e-12):
        return self.gauge(v) <= 1.0 + tol

    def blocks(self):
        return [row[None, :] for row in self.facets]

    def scaled(self, factor):
        """
        Dilation of the body by `factor`.
        """
        return SymmetricPolytope(self.facets / float(factor))

    def vertices(self):
        if not self.is_bounded:
            raise UnboundedPolytope("Facet functionals do not span R^%d" % self.dim)
        if self.dim == 1:
            r = 1.0 / np.max(np.abs(self.facets))
            return np.array([[r], [-r]])
        return _dedupe_rows(_halfspace_intersection(self.facets).intersections, 1e-12)

    def volume(self, rng=None, with_error=False):
        return polytope_volume(self, rng=rng, with_error=with_error)

    def __repr__(self):
        return 'SymmetricPolytope(%r)' % self.facets.tolist()


def _halfspace_intersection(facets):
    ones = np.ones((len(facets), 1))
    halfspaces = np.vstack([np.hstack([facets, -ones]), np.hstack([-facets, -ones])])
    return HalfspaceIntersection(halfspaces, np.zeros(facets.shape[1]))


def polytope_volume(P, rng=None, samples=None, with_error=False):
    """
    Volume of a symmetric polytope.

    Exact for dimension <= 3 (vertex enumeration and hull triangulation),
    hit-or-miss Monte Carlo above.

    Args:
        P (SymmetricPolytope): Body.
        rng (numpy.random.Generator, optional): Generator for the Monte Carlo path.
        samples (int, optional): Monte Carlo sample count.
        with_error (bool): Also return the standard error (0 on the exact path).

    Returns:
        (float) or (float, float)

    Raises:
        UnboundedPolytope: if the functionals do not span.
    """
    if not P.is_bounded:
        raise UnboundedPolytope("Facet functionals do not span R^%d" % P.dim)
    k = P.dim
    error = 0.0
    if k == 0:
        volume = 1.0
    elif k == 1:
        volume = 2.0 / float(np.max(np.abs(P.facets)))
    elif k <= 3:
        volume = float(ConvexHull(_halfspace_intersection(P.facets).intersections).volume)
    else:
        volume, error = monte_carlo_volume(P.gauge, P.facets, rng=rng, samples=samples)
        logger.debug("Monte Carlo volume %g +- %g in dimension %d", volume, error, k)
    return (volume, error) if with_error else volume


class Ellipsoid(object):
    """
    Centered ellipsoid {v : v^T M v <= 1}.
    """
    def __init__(self, shape):
        shape = np.atleast_2d(np.asarray(shape, dtype=float))
        if shape.shape[0] != shape.shape[1]:
            raise ValueError("Ellipsoid shape must be square")
        if not np.allclose(shape, shape.T, rtol=1e-10, atol=1e-12):
            raise ValueError("Ellipsoid shape must be symmetric")
        shape = 0.5 * (shape + shape.T)
        try:
            self._cholesky = np.linalg.cholesky(shape)
        except np.linalg.LinAlgError:
            raise ValueError("Ellipsoid shape must be positive definite")
        self.shape = shape
        self.dim = shape.shape[0]

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        return np.sqrt(np.maximum(np.einsum('...i,ij,...j->...', v, self.shape, v), 0.0))

    def contains(self, v, tol=1e-12):
        return self.gauge(v) <= 1.0 + tol

    def blocks(self):
        return [self._cholesky.T]

    def semi_axes(self):
        return 1.0 / np.sqrt(np.linalg.eigvalsh(self.shape))

    def polar(self):
        return Ellipsoid(np.linalg.inv(self.shape))

    def volume(self, rng=None, with_error=False):
        volume = unit_ball_volume(self.dim) / math.sqrt(np.linalg.det(self.shape))
        return (volume, 0.0) if with_error else volume

    def __repr__(self):
        return 'Ellipsoid(%r)' % self.shape.tolist()


class GaugeBody(object):
    """
    {v : |H_i v| <= 1 for every block H_i}, an intersection of elliptic cylinders.
    """
    def __init__(self, blocks):
        self._blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
        self.dim = self._blocks[0].shape[1]

    def blocks(self):
        return list(self._blocks)

    def gauge(self, v):
        v = np.asarray(v, dtype=float)
        values = [np.linalg.norm(v.dot(b.T), axis=-1) for b in self._blocks]
        return np.max(values, axis=0)

    def contains(self, v, tol=1e-12):
        return self.gauge(v) <= 1.0 + tol

    def volume(self, rng=None, samples=None, with_error=False):
        """
        Radial quadrature vol = (1/k) integral over the sphere of gauge^-k for
        k <= 3, Monte Carlo above.
        """
        k = self.dim
        error = 0.0
        if k == 1:
            volume = 2.0 / float(self.gauge(np.ones(1)))
        elif k == 2:
            def radial(theta):
                return self.gauge(np.array([math.cos(theta), math.sin(theta)])) ** -2
            half, error = integrate.quad(radial, 0.0, math.pi, limit=400, epsabs=1e-13, epsrel=1e-12)
            volume = half
        elif k == 3:
            def radial(theta, phi):
                u = np.array([math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta),
                              math.cos(phi)])
                return self.gauge(u) ** -3 * math.sin(phi)
            half, error = integrate.dblquad(radial, 0.0, math.pi,
                                            lambda phi: 0.0, lambda phi: math.pi,
                                            epsabs=1e-12, epsrel=1e-10)
            volume = 2.0 * half / 3.0
        else:
            rows = np.vstack(self._blocks)
            volume, error = monte_carlo_volume(self.gauge, rows, rng=rng, samples=samples)
        return (volume, error) if with_error else volume

    def __repr__(self):
        return 'GaugeBody(%r)' % [b.tolist() for b in self._blocks]

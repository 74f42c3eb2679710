"""
Slicing of polyhedral currents by affine projections.

Orientation convention: the slice of an oriented cell by a level set of an
affine function g is oriented so that (grad g, slice orientation) is the
orientation of the cell. With this choice the boundary of a slice is minus
the slice of the boundary.
"""
import itertools
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import null_space
from scipy.spatial import ConvexHull, Delaunay, QhullError

from metric_currents import config
from metric_currents.current import PolyhedralCurrent, characteristic_set, evaluate, mass, push_forward, restrict
from metric_currents.exceptions import DegenerateLevel
from metric_currents.geometry import AffineMap, HalfSpace, Simplex, level_crossings, simplex_volume, snap_key
from metric_currents.jacobian import JacobianKind, jacobian
from metric_currents.seminorm import Seminorm

logger = logging.getLogger(__name__)


class Projection(object):
    """
    Orthogonal projection onto an m-plane of R^N, identified with R^m.
    """
    def __init__(self, matrix):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        gram = matrix.dot(matrix.T)
        if not np.allclose(gram, np.eye(matrix.shape[0]), atol=1e-12):
            raise ValueError("Projection rows must be orthonormal")
        self.matrix = matrix

    @classmethod
    def axis(cls, i, n):
        row = np.zeros(n)
        row[i] = 1.0
        return cls(row)

    @classmethod
    def direction(cls, vector):
        vector = np.asarray(vector, dtype=float)
        return cls(vector / np.linalg.norm(vector))

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def ambient_dim(self):
        return self.matrix.shape[1]

    def __call__(self, points):
        return np.asarray(points, dtype=float).dot(self.matrix.T)

    def row(self, i):
        return Projection(self.matrix[i])

    def functional(self, i=0):
        return AffineMap.functional(self.matrix[i])

    def __repr__(self):
        return 'Projection(%r)' % (self.matrix.tolist(),)


class SliceFamily(object):
    """
    Slices of a current at a finite set of levels, with the breakpoints
    (vertex images) separating the intervals of regular levels.
    """
    def __init__(self, breakpoints, slices):
        self.breakpoints = breakpoints
        self.slices = slices

    def levels(self):
        return sorted(self.slices)

    def __getitem__(self, level):
        return self.slices[level]

    def __repr__(self):
        return 'SliceFamily(levels=%d)' % len(self.slices)


def _as_projection(rho, n):
    if isinstance(rho, Projection):
        return rho
    if isinstance(rho, int):
        return Projection.axis(rho, n)
    return Projection(rho)


def _cut_cell(s, values):
    """
    Oriented (k-1)-simplices triangulating the zero set of the affine function
    with vertex values `values` inside s.
    """
    k = s.dimension
    if np.all(values > 0.0) or np.all(values < 0.0):
        return []
    normal = values[1:] - values[0]
    points = level_crossings(values)
    if len(points) == 0:
        return []
    if k == 1:
        pieces = [points[:1]]
    else:
        basis = null_space(normal[None, :])
        coords = (points - points[0]).dot(basis)
        if k == 2:
            order = np.argsort(coords[:, 0])
            lo, hi = order[0], order[-1]
            if coords[hi, 0] - coords[lo, 0] <= 1e-15:
                return []
            pieces = [points[[lo, hi]]]
        else:
            try:
                pieces = [points[simplex] for simplex in Delaunay(coords).simplices]
            except QhullError:
                return []
    result = []
    origin, edges = s.vertices[0], s.edges
    for piece in pieces:
        det = np.linalg.det(np.vstack([normal[None, :], piece[1:] - piece[0]]))
        if abs(det) <= 1e-15 * max(1.0, float(np.max(np.abs(normal)))):
            continue
        orientation = s.orientation if det > 0 else -s.orientation
        result.append(Simplex(origin + piece.dot(edges), orientation))
    return result


def _check_level(values, level):
    scale = max(1.0, float(np.max(np.abs(values))) if len(values) else 1.0)
    hits = np.flatnonzero(np.abs(values - level) <= config.LEVEL_TOLERANCE * scale)
    if len(hits):
        raise DegenerateLevel("Level %r hits a vertex image; perturb it" % level, level=level)


def slice_by_function(T, func, level):
    """
    Slice of T by the level set {func = level}, func affine on every cell.

    Args:
        T (PolyhedralCurrent): k-current with k >= 1.
        func (callable): Maps an (n, N) array of points to n values.
        level (float): Regular level.

    Raises:
        DegenerateLevel: if a vertex of T is mapped onto the level.
    """
    if T.k < 1:
        raise ValueError("Cannot slice a 0-current")
    level = float(level)
    if T.is_zero:
        return PolyhedralCurrent(T.ambient, T.k - 1)
    vertex_values = np.asarray(func(np.vstack([s.vertices for s, _ in T])), dtype=float).reshape(-1)
    _check_level(vertex_values, level)
    cells = []
    for (s, multiplicity), values in zip(T, np.split(vertex_values, len(T))):
        cells.extend((piece, multiplicity) for piece in _cut_cell(s, values - level))
    return PolyhedralCurrent(T.ambient, T.k - 1, cells)


def slice(T, rho, p):
    """
    <T, rho, p>, the slice of T by the fibre rho^-1(p).

    Codimension m > 1 is sliced one row of rho at a time, first row first.
    Permuting the rows changes the result by the sign of the permutation.

    Args:
        T (PolyhedralCurrent): k-current.
        rho (Projection, int or array): Projection onto R^m, an axis index,
            or a matrix with orthonormal rows.
        p (float or sequence): Level in R^m.

    Returns:
        (PolyhedralCurrent) (k-m)-current.
    """
    rho = _as_projection(rho, T.ambient.dim)
    levels = np.atleast_1d(np.asarray(p, dtype=float))
    if len(levels) != rho.m:
        raise ValueError("Level has %d coordinates for a projection onto R^%d" % (len(levels), rho.m))
    if rho.m > T.k:
        raise ValueError("Cannot slice a %d-current in codimension %d" % (T.k, rho.m))
    result = T
    for row, level in zip(rho.matrix, levels):
        result = slice_by_function(result, lambda x, row=row: x.dot(row), level)
    return result


def breakpoints(T, rho):
    """
    Sorted distinct vertex images of T under a projection onto a line.
    """
    rho = _as_projection(rho, T.ambient.dim)
    if T.is_zero:
        return np.zeros(0)
    values = rho(T.vertices())[:, 0]
    return np.unique(np.round(values / config.SNAP_TOLERANCE) * config.SNAP_TOLERANCE)


def slice_family(T, rho, levels=None):
    """
    Slices at the given levels, by default the midpoints between breakpoints.
    """
    rho = _as_projection(rho, T.ambient.dim)
    points = breakpoints(T, rho)
    if levels is None:
        levels = 0.5 * (points[1:] + points[:-1])
    slices = dict(zip([float(p) for p in levels],
                      config.parallel_map(lambda p: slice(T, rho, p), levels)))
    return SliceFamily(points, slices)


def _gauss_levels(points, order):
    nodes, weights = leggauss(order)
    levels, level_weights = [], []
    for a, b in zip(points[:-1], points[1:]):
        if b - a <= config.SNAP_TOLERANCE:
            continue
        levels.extend(0.5 * (b - a) * nodes + 0.5 * (a + b))
        level_weights.extend(0.5 * (b - a) * weights)
    return np.array(levels), np.array(level_weights)


def slice_mass_profile(T, rho, kind=JacobianKind.MASS_STAR, order=None):
    """
    Slice masses at Gauss-Legendre levels between consecutive breakpoints.

    Returns:
        (list) (level, quadrature weight, slice mass) triples.
    """
    rho = _as_projection(rho, T.ambient.dim)
    order = order or max(1, T.k)
    levels, weights = _gauss_levels(breakpoints(T, rho), order)
    masses = config.parallel_map(lambda p: mass(slice(T, rho, p), kind).total, levels)
    return list(zip(levels.tolist(), weights.tolist(), masses))


def restricted_slice_mass(T, rho, kind=JacobianKind.MASS_STAR):
    """
    M(T restricted to d rho) in closed form: per cell, |multiplicity| times
    the Jacobian of the chart on the fibre directions times |grad rho| / k!.
    """
    rho = _as_projection(rho, T.ambient.dim)
    row = rho.matrix[0]
    k = T.k
    total = []
    for s, multiplicity in T:
        edges = s.edges
        normal = edges.dot(row)
        length = float(np.linalg.norm(normal))
        if length == 0.0:
            continue
        if k == 1:
            fibre = 1.0
        else:
            basis = null_space(normal[None, :])
            fibre = jacobian(Seminorm(edges.T.dot(basis), T.ambient), kind)
        total.append(abs(multiplicity) * fibre * length / math.factorial(k))
    return math.fsum(total)


def verify_mass_fubini(T, rho, kind=JacobianKind.MASS_STAR):
    """
    Compare the integral of the slice masses with M(T restricted to d rho),
    and check the slicing inequality against Lip(rho) M(T).

    Returns:
        (dict) integral, restricted mass, gap, mass, Lipschitz constant and
        whether the slicing inequality holds.
    """
    rho = _as_projection(rho, T.ambient.dim)
    if rho.m != 1:
        raise ValueError("Fubini verification needs a projection onto a line")
    profile = slice_mass_profile(T, rho, kind)
    integral = math.fsum(w * m for _, w, m in profile)
    restricted = restricted_slice_mass(T, rho, kind)
    total = mass(T, kind).total
    lipschitz = float(T.ambient.dual(rho.matrix[0]))
    report = {
        'integral': integral,
        'restricted_mass': restricted,
        'gap': abs(integral - restricted),
        'mass': total,
        'lipschitz': lipschitz,
        'inequality_holds': integral <= lipschitz ** rho.m * total + 1e-9,
    }
    logger.debug("Fubini check: %r", report)
    return report


def _regular_levels(values, count, rng):
    lo, hi = float(np.min(values)), float(np.max(values))
    levels = []
    attempts = 0
    while len(levels) < count and attempts < 100 * count:
        attempts += 1
        p = rng.uniform(lo, hi)
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.all(np.abs(values - p) > 1e-6 * scale):
            levels.append(p)
    return levels


def verify_slice_pushforward_commute(T, f, rho, levels=100, rng=None, ambient=None, kind=JacobianKind.MASS_STAR):
    """
    Compare f_#<T, rho o f, p> with <f_#T, rho, p> at random regular levels.

    Returns:
        (dict) The number of levels and the largest mass of the difference.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    image = push_forward(f, T, ambient=ambient)
    rho = _as_projection(rho, image.ambient.dim)
    row = rho.matrix[0]
    composed = lambda x: np.asarray(f(x), dtype=float).dot(row)
    if T.is_zero:
        return {'levels': 0, 'max_difference': 0.0}
    values = composed(np.vstack([s.vertices for s, _ in T]))
    worst = 0.0
    checked = _regular_levels(values, levels, rng)
    for p in checked:
        left = push_forward(f, slice_by_function(T, composed, p), ambient=image.ambient)
        right = slice(image, rho, p)
        worst = max(worst, mass(left - right, kind).total)
    return {'levels': len(checked), 'max_difference': worst}


def _fibre_section(s, rho, p):
    # Vertices of s meeting rho^-1(p) are the basic feasible solutions of
    # rho(V^T lambda) = p, sum(lambda) = 1, lambda >= 0.
    system = np.vstack([rho.matrix.dot(s.vertices.T), np.ones(s.dimension + 1)])
    rhs = np.append(p, 1.0)
    points = {}
    for support in itertools.combinations(range(s.dimension + 1), rho.m + 1):
        block = system[:, support]
        if np.linalg.matrix_rank(block) <= rho.m:
            continue
        weights = np.linalg.solve(block, rhs)
        if np.min(weights) < -1e-12:
            continue
        point = weights.dot(s.vertices[list(support)])
        points.setdefault(snap_key(point), point)
    return np.array(list(points.values())).reshape(-1, s.ambient_dim)


def _section_measure(points, d):
    if not len(points):
        return 0.0
    if d == 0:
        return 1.0
    if len(points) <= d:
        return 0.0
    centred = points - points.mean(axis=0)
    _, singular, basis = np.linalg.svd(centred, full_matrices=False)
    if singular[d - 1] <= 1e-9 * max(1.0, singular[0]):
        return 0.0
    coords = centred.dot(basis[:d].T)
    if d == 1:
        return float(np.ptp(coords[:, 0]))
    try:
        return float(ConvexHull(coords).volume)
    except QhullError:
        return 0.0


def _sample_hull(points, count, rng):
    if len(points) == 1:
        return points
    return rng.dirichlet(np.ones(len(points)), size=count).dot(points)


def _in_simplex(vertices, x, tol=1e-7):
    system = np.vstack([vertices.T, np.ones(len(vertices))])
    target = np.append(x, 1.0)
    weights = np.linalg.lstsq(system, target, rcond=None)[0]
    residual = np.linalg.norm(system.dot(weights) - target)
    return residual <= tol * max(1.0, np.linalg.norm(target)) and np.min(weights) >= -tol


def _covered(x, cells):
    return any(_in_simplex(vertices, x) for vertices in cells)


def _regular_level_vectors(T, rho, count, rng):
    images = T.vertices().dot(rho.matrix.T)
    found = []
    attempts = 0
    while len(found) < count and attempts < 100 * count:
        attempts += 1
        coords = [_regular_levels(images[:, i], 1, rng) for i in range(rho.m)]
        if not all(coords):
            break
        p = np.array([c[0] for c in coords])
        try:
            found.append((p, slice(T, rho, p)))
        except DegenerateLevel:
            logger.debug("Level %r meets a slice vertex, drawing again", p)
    return found


def slice_characteristic_consistency(T, rho, levels=20, rng=None, samples=16):
    """
    Compare the slice at random regular levels with the section of the
    characteristic set of T by the fibre, as sets.

    The sections are cut independently of the slicing code, by enumerating
    the basic solutions of the barycentric system of each cell. Works in
    any codimension m <= k.

    Args:
        samples (int): Points drawn from each slice cell and each section.

    Returns:
        (dict) Levels checked, largest measure difference, largest sampled
        fraction of the symmetric difference and whether every slice cell
        lies on its fibre.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    rho = _as_projection(rho, T.ambient.dim)
    if rho.m > T.k:
        raise ValueError("Cannot slice a %d-current in codimension %d" % (T.k, rho.m))
    report = {'levels': 0, 'max_difference': 0.0, 'symmetric_difference': 0.0, 'supported': True}
    if T.is_zero:
        return report
    support = characteristic_set(T)
    d = T.k - rho.m
    found = _regular_level_vectors(T, rho, levels, rng)
    for p, sliced in found:
        sections = [points for points in (_fibre_section(s, rho, p) for s in support) if len(points)]
        pieces = [c.vertices for c, _ in sliced]
        measure = math.fsum(_section_measure(points, d) for points in sections)
        sliced_measure = math.fsum(simplex_volume(c) for c, _ in sliced)
        report['max_difference'] = max(report['max_difference'], abs(measure - sliced_measure))
        outside, drawn = 0, 0
        for vertices in pieces:
            if np.max(np.abs(vertices.dot(rho.matrix.T) - p)) > 1e-9:
                report['supported'] = False
            for x in _sample_hull(vertices, samples, rng):
                drawn += 1
                if not _covered(x, [s.vertices for s in support]):
                    report['supported'] = False
                    outside += 1
        for points in sections:
            if _section_measure(points, d) == 0.0:
                continue
            for x in _sample_hull(points, samples, rng):
                drawn += 1
                if not _covered(x, pieces):
                    outside += 1
        if drawn:
            report['symmetric_difference'] = max(report['symmetric_difference'], float(outside) / drawn)
    report['levels'] = len(found)
    logger.debug("Slice consistency: %r", report)
    return report


def _piecewise_linear(psi_points, psi_values, p):
    return np.interp(p, psi_points, psi_values, left=0.0, right=0.0)


def verify_universal_property(T, rho, psi_points, psi_values, h, pis):
    """
    Integral over p of <T, rho, p>(h, pis) psi(p) against T(h psi(rho), rho, pis),
    both computed exactly for affine h, pis and piecewise linear psi.

    Args:
        psi_points (sequence): Increasing breakpoints of psi.
        psi_values (sequence): Values of psi, zero at both ends.

    Returns:
        (dict) Both sides and their difference.
    """
    rho = _as_projection(rho, T.ambient.dim)
    row = rho.matrix[0]
    psi_points = np.asarray(psi_points, dtype=float)
    psi_values = np.asarray(psi_values, dtype=float)
    rho_form = AffineMap.functional(row)

    points = np.union1d(breakpoints(T, rho), psi_points)
    points = points[(points >= psi_points[0]) & (points <= psi_points[-1])]
    levels, weights = _gauss_levels(points, T.k + 2)
    left = math.fsum(
        w * evaluate(slice(T, rho, p), h, pis) * _piecewise_linear(psi_points, psi_values, p)
        for p, w in zip(levels, weights))

    right = []
    for a, b, va, vb in zip(psi_points[:-1], psi_points[1:], psi_values[:-1], psi_values[1:]):
        if b - a <= config.SNAP_TOLERANCE:
            continue
        slope = (vb - va) / (b - a)
        weight = AffineMap.functional(slope * row, va - slope * a)
        slab = restrict(T, [HalfSpace(row, b), HalfSpace(-row, -a)])
        right.append(evaluate(slab, h, [rho_form] + list(pis), weight=weight))
    right = math.fsum(right)
    return {'lhs': left, 'rhs': right, 'difference': abs(left - right)}


def verify_slice_isometry(T, f, rho, levels=20, rng=None, ambient=None):
    """
    For a map f that should be an isometry, check on random slices by rho o f
    that f preserves the slice masses and the distances between slice vertices.

    Returns:
        (dict) Largest mass and distance discrepancies.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    image_ambient = push_forward(f, T, ambient=ambient).ambient
    rho = _as_projection(rho, image_ambient.dim)
    row = rho.matrix[0]
    composed = lambda x: np.asarray(f(x), dtype=float).dot(row)
    values = composed(T.vertices())
    mass_gap, distance_gap = 0.0, 0.0
    checked = _regular_levels(values, levels, rng)
    for p in checked:
        sliced = slice_by_function(T, composed, p)
        if sliced.is_zero:
            continue
        image = push_forward(f, sliced, ambient=image_ambient)
        mass_gap = max(mass_gap, abs(mass(sliced).total - mass(image).total))
        vertices = sliced.vertices()
        mapped = np.asarray(f(vertices), dtype=float)
        source = T.ambient(vertices[:, None, :] - vertices[None, :, :])
        target = image_ambient(mapped[:, None, :] - mapped[None, :, :])
        distance_gap = max(distance_gap, float(np.max(np.abs(source - target))))
    return {'levels': len(checked), 'max_mass_difference': mass_gap, 'max_distance_difference': distance_gap}


def slice_order_check(T, rho, p):
    """
    Compare iterated slicing in the given row order with the reversed order,
    after the sign of the reversing permutation.

    Returns:
        (dict) Mass of the discrepancy.
    """
    rho = _as_projection(rho, T.ambient.dim)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    m = rho.m
    forward = slice(T, rho, p)
    backward = slice(T, Projection(rho.matrix[::-1]), p[::-1])
    sign = (-1) ** (m * (m - 1) // 2)
    return {'difference': mass(forward - sign * backward).total}


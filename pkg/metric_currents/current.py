"""
Polyhedral integral currents: finite sums of oriented affine simplices with
integer multiplicities in a normed space R^N.
"""
import logging
import math

import numpy as np

from metric_currents import config
from metric_currents.exceptions import RefinementRequired
from metric_currents.geometry import (
    AffineMap, HalfSpace, Simplex, clip_simplex_halfspace, clip_simplex_values, point, snap_key,
    simplex_volume,
)
from metric_currents.jacobian import JacobianKind, jacobian
from metric_currents.seminorm import EUCLIDEAN, MAX, SUM, AmbientNorm, Seminorm

logger = logging.getLogger(__name__)

# The ambient of a current is a normed R^N; the norm already carries its dimension.
NormedAmbient = AmbientNorm


def permutation_parity(order):
    sign = 1
    order = list(order)
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


def _canonicalize(cells):
    merged = {}
    dropped = 0
    for s, multiplicity in cells:
        if multiplicity == 0:
            continue
        if s.is_degenerate:
            dropped += 1
            continue
        keys = [snap_key(v) for v in s.vertices]
        if len(set(keys)) < len(keys):
            dropped += 1
            continue
        order = sorted(range(len(keys)), key=lambda i: keys[i])
        key = tuple(keys[i] for i in order)
        signed = s.orientation * permutation_parity(order) * multiplicity
        entry = merged.get(key)
        if entry is None:
            merged[key] = [s.vertices[order], signed]
        else:
            entry[1] += signed
    if dropped:
        logger.debug("Dropped %d degenerate cells", dropped)
    return [(Simplex(vertices, 1), m) for key, (vertices, m) in sorted(merged.items()) if m != 0]


class PolyhedralCurrent(object):
    """
    T = sum of multiplicity_i [[simplex_i]], kept in canonical form: vertices
    sorted lexicographically, orientation folded into the sign of the
    multiplicity, coinciding cells merged and zero cells dropped.
    """
    def __init__(self, ambient, k, cells=(), canonical=True):
        self.ambient = ambient
        self.k = int(k)
        checked = []
        for s, multiplicity in cells:
            if s.dimension != self.k or s.ambient_dim != ambient.dim:
                raise ValueError("Expected a %d-simplex in R^%d, got %r" % (self.k, ambient.dim, s))
            if int(multiplicity) != multiplicity:
                raise ValueError("Multiplicities must be integers, got %r" % (multiplicity,))
            checked.append((s, int(multiplicity)))
        self._cells = _canonicalize(checked) if canonical else checked

    @property
    def cells(self):
        return list(self._cells)

    def __len__(self):
        return len(self._cells)

    def __iter__(self):
        return iter(self._cells)

    @property
    def is_zero(self):
        return not self._cells

    def vertices(self):
        if not self._cells:
            return np.zeros((0, self.ambient.dim))
        points = np.vstack([s.vertices for s, _ in self._cells])
        seen = {}
        for p in points:
            seen.setdefault(snap_key(p), p)
        return np.array([seen[key] for key in sorted(seen)])

    def items(self):
        """
        Canonical (vertex keys, multiplicity) pairs, used for exact comparisons.
        """
        return [(tuple(snap_key(v) for v in s.vertices), m) for s, m in self._cells]

    def _check_compatible(self, other):
        if other.k != self.k or other.ambient != self.ambient:
            raise ValueError("Currents of different dimension or ambient cannot be added")

    def __add__(self, other):
        self._check_compatible(other)
        return PolyhedralCurrent(self.ambient, self.k, self._cells + other._cells)

    def __neg__(self):
        return PolyhedralCurrent(self.ambient, self.k, [(s, -m) for s, m in self._cells],
                                 canonical=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, factor):
        return PolyhedralCurrent(self.ambient, self.k, [(s, factor * m) for s, m in self._cells])

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, PolyhedralCurrent) and self.k == other.k
                and self.ambient == other.ambient and self.items() == other.items())

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.k, tuple(self.items())))

    def boundary(self):
        return boundary(self)

    def push_forward(self, f, ambient=None):
        return push_forward(f, self, ambient=ambient)

    def restrict(self, region):
        return restrict(self, region)

    def mass(self, kind=JacobianKind.MASS_STAR):
        return mass(self, kind)

    def __repr__(self):
        return 'PolyhedralCurrent(k=%d, N=%d, cells=%d)' % (self.k, self.ambient.dim, len(self._cells))


class MassMeasureReport(object):
    """
    Total mass with its per-cell breakdown.
    """
    def __init__(self, total, per_cell, kind):
        self.total = total
        self.per_cell = per_cell
        self.kind = kind

    def as_dict(self):
        return {'total': self.total, 'per_cell': list(self.per_cell), 'kind': self.kind.value}

    def __repr__(self):
        return 'MassMeasureReport(total=%r, kind=%s)' % (self.total, self.kind.value)


def boundary(T):
    """
    Sum of oriented facets with integer cancellation.
    """
    if T.k < 1:
        raise ValueError("The boundary of a 0-current is not defined")
    cells = []
    for s, multiplicity in T:
        for face in s.faces():
            cells.append((face, multiplicity))
    return PolyhedralCurrent(T.ambient, T.k - 1, cells)


def _target_ambient(T, out_dim, ambient):
    if ambient is not None:
        return ambient
    if out_dim == T.ambient.dim:
        return T.ambient
    if T.ambient.kind in (EUCLIDEAN, MAX, SUM):
        return AmbientNorm(T.ambient.kind, out_dim)
    raise ValueError("Push-forward into R^%d needs an explicit ambient norm" % out_dim)


def _check_affine_per_cell(f, T, images):
    """
    Compare f at centroids and edge midpoints with the interpolated images.
    """
    points, expected = [], []
    for (s, _), image in zip(T, images):
        points.append(s.centroid)
        expected.append(image.mean(axis=0))
        for i in range(s.dimension + 1):
            for j in range(i + 1, s.dimension + 1):
                points.append(0.5 * (s.vertices[i] + s.vertices[j]))
                expected.append(0.5 * (image[i] + image[j]))
    if not points:
        return
    actual = np.asarray(f(np.array(points)), dtype=float)
    expected = np.array(expected)
    scale = 1.0 + np.max(np.abs(expected))
    bad = np.flatnonzero(np.max(np.abs(actual - expected), axis=-1) > 1e-9 * scale)
    if len(bad):
        raise RefinementRequired("Map is not affine on a cell; refine the current first",
                                 point=points[bad[0]].tolist())


def push_forward(f, T, ambient=None, check=True):
    """
    Image current f_#T with the same multiplicities; degenerate images are dropped.

    Args:
        f (AffineMap or callable): Map on (n, N) arrays of points, affine on
            every cell of T.
        T (PolyhedralCurrent): Current to transport.
        ambient (AmbientNorm, optional): Target norm. Defaults to the norm
            of T (or the same kind of norm in the target dimension).
        check (bool): Verify that f is affine on each cell.

    Raises:
        RefinementRequired: if f is not affine on some cell.
    """
    if T.is_zero:
        out_dim = f.out_dim if isinstance(f, AffineMap) else T.ambient.dim
        return PolyhedralCurrent(_target_ambient(T, out_dim, ambient), T.k)
    vertices = np.vstack([s.vertices for s, _ in T])
    mapped = np.atleast_2d(np.asarray(f(vertices), dtype=float))
    if mapped.shape[0] != vertices.shape[0]:
        mapped = mapped.T
    images = np.split(mapped, len(T))
    if check and not isinstance(f, AffineMap):
        _check_affine_per_cell(f, T, images)
    target = _target_ambient(T, mapped.shape[1], ambient)
    cells = [(Simplex(image, s.orientation), m) for (s, m), image in zip(T, images)]
    return PolyhedralCurrent(target, T.k, cells)


def _as_region(region):
    if isinstance(region, HalfSpace):
        region = [region]
    region = list(region)
    if len(region) > config.MAX_REGION_HALFSPACES:
        raise ValueError("Regions are limited to %d half-spaces" % config.MAX_REGION_HALFSPACES)
    return region


def box_region(lower, upper):
    """
    Half-spaces describing the box [lower, upper].
    """
    lower, upper = point(lower), point(upper)
    region = []
    for i in range(len(lower)):
        e = np.zeros(len(lower))
        e[i] = 1.0
        region.append(HalfSpace(e, upper[i]))
        region.append(HalfSpace(-e, -lower[i]))
    return region


def restrict(T, region):
    """
    T restricted to an intersection of at most 32 half-spaces.
    """
    region = _as_region(region)
    cells = []
    for s, multiplicity in T:
        pieces = [s]
        for h in region:
            pieces = [q for piece in pieces for q in clip_simplex_halfspace(piece, h)]
        cells.extend((piece, multiplicity) for piece in pieces)
    return PolyhedralCurrent(T.ambient, T.k, cells)


def cell_mass(s, ambient, kind, rng=None):
    """
    Mass of [[s]] with multiplicity one: Jac(md of its chart) / k!.
    """
    k = s.dimension
    if ambient.kind == EUCLIDEAN:
        # Every Jacobian of a Euclidean seminorm is sqrt(det G).
        return simplex_volume(s)
    sigma = Seminorm(s.edges.T, ambient)
    return jacobian(sigma, kind, rng=rng) / math.factorial(k)


def cell_generators(rng, n):
    """
    n independent generators spawned from one seed drawn from `rng`.
    """
    seed = np.random.SeedSequence(int(rng.integers(2 ** 63)))
    return [np.random.default_rng(child) for child in seed.spawn(n)]


def mass(T, kind=JacobianKind.MASS_STAR, rng=None):
    """
    Finsler mass: per cell |multiplicity| Jac_kind(md chart) vol(parameter simplex).

    A given generator is split into one child generator per cell, so the
    result does not depend on how cells are scheduled over threads.

    Returns:
        (MassMeasureReport)
    """
    kind = JacobianKind.parse(kind)
    cells = T.cells
    rngs = [None] * len(cells) if rng is None else cell_generators(rng, len(cells))
    per_cell = config.parallel_map(
        lambda i: abs(cells[i][1]) * cell_mass(cells[i][0], T.ambient, kind, rngs[i]), range(len(cells)))
    return MassMeasureReport(math.fsum(per_cell), per_cell, kind)


def characteristic_set(T):
    """
    Cells of T carrying nonzero multiplicity after cancellation.
    """
    return [s for s, _ in _canonicalize(T.cells)]


def curve_current(polyline, closed=False, ambient=None):
    """
    1-current of an oriented polyline; repeated consecutive points are dropped.
    """
    points = []
    for p in polyline:
        p = point(p)
        if not points or snap_key(p) != snap_key(points[-1]):
            points.append(p)
    if closed and len(points) > 1 and snap_key(points[0]) == snap_key(points[-1]):
        points.pop()
    if len(points) < 2:
        raise ValueError("A curve needs at least two distinct points")
    ambient = ambient or AmbientNorm.euclidean(len(points[0]))
    segments = list(zip(points[:-1], points[1:]))
    if closed:
        segments.append((points[-1], points[0]))
    return PolyhedralCurrent(ambient, 1, [(Simplex([a, b]), 1) for a, b in segments])


def polygon_current(points, ambient=None):
    """
    2-current of a convex polygon given counterclockwise, fanned from its first vertex.
    """
    points = [point(p) for p in points]
    ambient = ambient or AmbientNorm.euclidean(len(points[0]))
    cells = [(Simplex([points[0], points[i], points[i + 1]]), 1) for i in range(1, len(points) - 1)]
    return PolyhedralCurrent(ambient, 2, cells)


def square_current(side=1.0, origin=(0.0, 0.0), ambient=None):
    x, y = origin
    return polygon_current([(x, y), (x + side, y), (x + side, y + side), (x, y + side)], ambient)


def _affine_values(func, points):
    if isinstance(func, AffineMap):
        return func(points)[..., 0]
    return np.asarray(func(points), dtype=float)


def evaluate(T, h, pis=(), weight=None):
    """
    T(h, pi_1, ..., pi_k) for affine h and pi_j, exactly.

    Args:
        T (PolyhedralCurrent): k-current.
        h (AffineMap): Real valued affine function.
        pis (list): k real valued affine functions.
        weight (AffineMap, optional): Second affine factor multiplying h.

    Returns:
        (float)
    """
    pis = list(pis)
    if len(pis) != T.k:
        raise ValueError("A %d-current needs %d functions, got %d" % (T.k, T.k, len(pis)))
    gradients = np.array([p.matrix[0] for p in pis]).reshape(T.k, T.ambient.dim)
    total = []
    denominator = float(math.factorial(T.k))
    for s, multiplicity in T:
        hv = _affine_values(h, s.vertices)
        det = np.linalg.det(gradients.dot(s.edges.T)) if T.k else 1.0
        if weight is None:
            integral = hv.mean() / denominator
        else:
            wv = _affine_values(weight, s.vertices)
            integral = (hv.dot(wv) + hv.sum() * wv.sum()) / ((T.k + 1) * (T.k + 2) * denominator)
        total.append(s.orientation * multiplicity * det * integral)
    return math.fsum(total)


def density(T, points, tol=1e-12):
    """
    Integer density of a top dimensional current at the given points.
    """
    if T.k != T.ambient.dim:
        raise ValueError("Density is defined for top dimensional currents")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    result = np.zeros(len(points), dtype=int)
    for s, multiplicity in T:
        edges = s.edges
        lam = np.linalg.solve(edges.T, (points - s.vertices[0]).T).T
        inside = np.all(lam >= -tol, axis=1) & (lam.sum(axis=1) <= 1.0 + tol)
        sign = 1 if np.linalg.det(edges) > 0 else -1
        result += inside * (sign * s.orientation * multiplicity)
    return result


def region_mass(T, region, kind=JacobianKind.MASS_STAR):
    """
    ||T||(A) for A an intersection of half-spaces.
    """
    return mass(restrict(T, region), kind).total


def preimage_mass(T, f, region, kind=JacobianKind.MASS_STAR):
    """
    ||T||(f^-1(A)) for f affine on each cell and A an intersection of half-spaces.
    """
    region = _as_region(region)
    cells = []
    for s, multiplicity in T:
        pieces = [s]
        for h in region:
            clipped = []
            for piece in pieces:
                values = h.value(np.asarray(f(piece.vertices), dtype=float))
                clipped.extend(clip_simplex_values(piece, values))
            pieces = clipped
        cells.extend((piece, multiplicity) for piece in pieces)
    return mass(PolyhedralCurrent(T.ambient, T.k, cells), kind).total


def _random_box(rng, lower, upper):
    a = rng.uniform(lower, upper)
    b = rng.uniform(lower, upper)
    return box_region(np.minimum(a, b), np.maximum(a, b))


def mass_preservation_check(T, f, regions=100, rng=None, kind=JacobianKind.MASS_STAR, ambient=None):
    """
    For a 1-Lipschitz f with M(T) <= M(f_#T), compare ||f_#T||(A) with
    ||T||(f^-1(A)) on random boxes A.

    Returns:
        (dict) Masses, the mass preservation flag and the largest discrepancy.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    image = push_forward(f, T, ambient=ambient)
    source_mass = mass(T, kind).total
    image_mass = mass(image, kind).total
    vertices = image.vertices()
    lower, upper = vertices.min(axis=0), vertices.max(axis=0)
    worst = 0.0
    for _ in range(regions):
        box = _random_box(rng, lower, upper)
        difference = abs(region_mass(image, box, kind) - preimage_mass(T, f, box, kind))
        worst = max(worst, difference)
    return {
        'mass': source_mass,
        'image_mass': image_mass,
        'mass_preserved': source_mass <= image_mass + 1e-9,
        'max_difference': worst,
        'regions': regions,
    }


def multiplicity_one_check(T, f, samples=100, rng=None, tol=1e-12):
    """
    Count how many cells of T cover sampled points of the image f_#T.

    The image must be top dimensional in its ambient. A rigid map covers
    almost every image point exactly once.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    images = []
    for s, _ in T:
        image = np.asarray(f(s.vertices), dtype=float)
        if not Simplex(image).is_degenerate:
            images.append(image)
    if not images:
        return {'counts': [], 'all_one': False}
    counts = []
    for _ in range(samples):
        target = images[rng.integers(len(images))]
        weights = rng.dirichlet(np.ones(len(target)))
        y = weights.dot(target)
        count = 0
        for image in images:
            edges = image[1:] - image[0]
            lam = np.linalg.solve(edges.T, y - image[0])
            if np.all(lam >= -tol) and lam.sum() <= 1.0 + tol:
                count += 1
        counts.append(count)
    return {'counts': counts, 'all_one': all(c == 1 for c in counts)}

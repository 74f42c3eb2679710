"""
Simplicial flat norm

    F(t) = min  sum w_k |u| + sum w_(k+1) |v|   subject to   t = u + d v

as a linear program over a finite oriented simplicial complex, and the
convergence experiments built on it.

Flat distances computed here live in one shared ambient and are upper
bounds for the intrinsic flat distance, never the distance itself.
"""
import itertools
import logging
import math

import numpy as np
from scipy import sparse
from scipy.optimize import linprog as scipy_linprog
from scipy.spatial import Delaunay
from shapely.geometry import LineString, Polygon
from shapely.strtree import STRtree

from metric_currents import config
from metric_currents.current import PolyhedralCurrent, cell_mass, curve_current, evaluate, permutation_parity
from metric_currents.exceptions import DegenerateSimplexError, RefinementError, SizeLimitExceeded
from metric_currents.geometry import AffineMap, Simplex, snap_key
from metric_currents.jacobian import JacobianKind
from metric_currents.linprog import simplex
from metric_currents.seminorm import AmbientNorm

logger = logging.getLogger(__name__)

UPPER_BOUND_NOTE = ("Extrinsic flat distance in a shared ambient: an upper bound for the "
                    "intrinsic flat distance, which is not computed.")


class ChainVector(object):
    """
    Coefficients of a k-chain, one per k-cell of a complex.
    """
    def __init__(self, k, coefficients):
        self.k = int(k)
        self.coefficients = np.asarray(coefficients, dtype=float)

    def __len__(self):
        return len(self.coefficients)

    def _check(self, other):
        if other.k != self.k or len(other) != len(self):
            raise ValueError("Chains of different dimension or length")

    def __add__(self, other):
        self._check(other)
        return ChainVector(self.k, self.coefficients + other.coefficients)

    def __sub__(self, other):
        self._check(other)
        return ChainVector(self.k, self.coefficients - other.coefficients)

    def __neg__(self):
        return ChainVector(self.k, -self.coefficients)

    def __mul__(self, factor):
        return ChainVector(self.k, factor * self.coefficients)

    __rmul__ = __mul__

    @property
    def is_zero(self):
        return not np.any(self.coefficients)

    @property
    def is_integral(self):
        return bool(np.all(np.abs(self.coefficients - np.round(self.coefficients)) <= 1e-9))

    def mass(self, K, kind=JacobianKind.MASS_STAR):
        return math.fsum(np.abs(self.coefficients) * K.weights(self.k, kind))

    def __repr__(self):
        return 'ChainVector(k=%d, nonzero=%d)' % (self.k, int(np.count_nonzero(self.coefficients)))


class SimplicialComplex(object):
    """
    Finite simplicial complex in a normed R^N. Cells are sorted vertex index
    tuples oriented by their vertex order; every face of a cell is a cell.
    """
    def __init__(self, ambient):
        self.ambient = ambient
        self.vertices = []
        self.vertex_index = {}
        self.cells = {}
        self.cell_index = {}
        self._weights = {}
        self._boundaries = {}

    def add_vertex(self, coords):
        key = snap_key(coords)
        index = self.vertex_index.get(key)
        if index is None:
            index = len(self.vertices)
            self.vertex_index[key] = index
            self.vertices.append(np.asarray(coords, dtype=float))
        return index

    def add_cell(self, indices):
        """
        Add a cell with all its faces.

        Returns:
            (tuple) The sorted index tuple of the cell.
        """
        cell = tuple(sorted(indices))
        if len(set(cell)) != len(cell):
            raise ValueError("Cell %r repeats a vertex" % (cell,))
        k = len(cell) - 1
        if cell in self.cell_index.get(k, {}):
            return cell
        self.cells.setdefault(k, []).append(cell)
        self.cell_index.setdefault(k, {})[cell] = len(self.cells[k]) - 1
        self._weights.clear()
        self._boundaries.clear()
        if k > 0:
            for i in range(k + 1):
                self.add_cell(cell[:i] + cell[i + 1:])
        return cell

    def add_simplex(self, s):
        if s.is_degenerate:
            raise DegenerateSimplexError("Cannot add the degenerate cell %r" % (s.vertices.tolist(),),
                                         vertices=s.vertices)
        return self.add_cell([self.add_vertex(v) for v in s.vertices])

    def count(self, k):
        return len(self.cells.get(k, ()))

    @property
    def dimension(self):
        return max(self.cells) if self.cells else -1

    def simplex(self, k, i):
        return Simplex(np.array([self.vertices[j] for j in self.cells[k][i]]))

    def boundary_matrix(self, k):
        """
        Signed incidence matrix of d_k from k-chains to (k-1)-chains.
        """
        if k not in self._boundaries:
            rows, cols, data = [], [], []
            faces = self.cell_index.get(k - 1, {})
            for j, cell in enumerate(self.cells.get(k, ())):
                for i in range(len(cell)):
                    rows.append(faces[cell[:i] + cell[i + 1:]])
                    cols.append(j)
                    data.append((-1) ** i)
            self._boundaries[k] = sparse.csr_matrix(
                (data, (rows, cols)), shape=(self.count(k - 1), self.count(k)), dtype=np.int64)
        return self._boundaries[k]

    def weights(self, k, kind=JacobianKind.MASS_STAR):
        kind = JacobianKind.parse(kind)
        if (k, kind) not in self._weights:
            self._weights[(k, kind)] = np.array(config.parallel_map(
                lambda i: cell_mass(self.simplex(k, i), self.ambient, kind), range(self.count(k))))
        return self._weights[(k, kind)]

    def chain(self, T):
        """
        Integer coefficients of a current whose cells all belong to the complex.

        Raises:
            RefinementError: if a cell of T is not a cell of the complex.
        """
        coefficients = np.zeros(self.count(T.k))
        for s, multiplicity in T:
            indices = []
            for v in s.vertices:
                index = self.vertex_index.get(snap_key(v))
                if index is None:
                    raise RefinementError("Vertex %r is not in the complex" % (v.tolist(),), pair=[v, None])
                indices.append(index)
            order = sorted(range(len(indices)), key=lambda i: indices[i])
            cell = tuple(indices[i] for i in order)
            position = self.cell_index.get(T.k, {}).get(cell)
            if position is None:
                raise RefinementError("Cell %r is not in the complex" % (cell,), pair=[cell, None])
            coefficients[position] += s.orientation * permutation_parity(order) * multiplicity
        return ChainVector(T.k, coefficients)

    def current(self, chain):
        """
        Polyhedral current of an integral chain.
        """
        cells = []
        for i in np.flatnonzero(chain.coefficients):
            multiplicity = int(round(chain.coefficients[i]))
            if multiplicity:
                cells.append((self.simplex(chain.k, i), multiplicity))
        return PolyhedralCurrent(self.ambient, chain.k, cells)

    def boundary(self, chain):
        return ChainVector(chain.k - 1, self.boundary_matrix(chain.k).dot(chain.coefficients))

    def as_dict(self):
        return {
            'ambient': self.ambient.to_dict(),
            'vertices': [v.tolist() for v in self.vertices],
            'cells': dict((str(k), [list(c) for c in cells]) for k, cells in sorted(self.cells.items())),
        }

    def __repr__(self):
        return 'SimplicialComplex(%s)' % ', '.join('%d-cells=%d' % (k, len(c)) for k, c in sorted(self.cells.items()))


def _shape(s):
    if s.dimension == 2:
        return Polygon(s.vertices)
    return LineString(s.vertices)


def check_overlaps(cells, tol=None):
    """
    Find planar cells that overlap without sharing a common face.

    Raises:
        RefinementError: with the offending pair.
    """
    tol = config.MESH_TOLERANCE if tol is None else tol
    shapes = [_shape(s) for s in cells]
    tree = STRtree(shapes)
    keys = [set(snap_key(v) for v in s.vertices) for s in cells]
    for i, shape in enumerate(shapes):
        for j in tree.query(shape):
            j = int(j)
            if j <= i or cells[i].dimension != cells[j].dimension:
                continue
            if keys[i] == keys[j]:
                continue
            overlap = shape.intersection(shapes[j])
            if cells[i].dimension == 2:
                bad = overlap.area > tol
            else:
                shared = keys[i] & keys[j]
                bad = overlap.length > tol or (
                    not overlap.is_empty and overlap.geom_type == 'Point'
                    and snap_key((overlap.x, overlap.y)) not in shared)
            if bad:
                raise RefinementError("Cells overlap without a common refinement",
                                      pair=[cells[i].vertices, cells[j].vertices])


def build_complex(currents, augment=None, apex=None, overlap_check=True):
    """
    Common complex containing every input current as an integer chain.

    Args:
        currents (list): PolyhedralCurrent inputs sharing one ambient.
        augment (str, optional): 'cone' adds the join of every top cell with
            `apex` (default: centroid of all vertices); 'delaunay' adds the
            Delaunay triangulation of all vertices (planar inputs only).
        apex (array, optional): Cone point for 'cone'.
        overlap_check (bool): Reject planar inputs whose cells cross.

    Returns:
        (tuple) (SimplicialComplex, list of ChainVector).

    Raises:
        RefinementError: on crossing planar cells.
    """
    currents = list(currents)
    if not currents:
        raise ValueError("build_complex needs at least one current")
    ambient = currents[0].ambient
    for T in currents[1:]:
        if T.ambient != ambient:
            raise ValueError("Currents live in different ambients")
    K = SimplicialComplex(ambient)
    cells = []
    for T in currents:
        for s, _ in T:
            K.add_simplex(s)
            cells.append(s)
    if overlap_check and ambient.dim == 2:
        unique = dict((tuple(sorted(snap_key(v) for v in s.vertices)), s) for s in cells if s.dimension >= 1)
        check_overlaps(list(unique.values()))
    if augment == 'cone':
        points = np.array(K.vertices)
        apex = points.mean(axis=0) if apex is None else np.asarray(apex, dtype=float)
        top = K.dimension
        for i in range(K.count(top)):
            s = K.simplex(top, i)
            joined = Simplex(np.vstack([apex[None, :], s.vertices]))
            if not joined.is_degenerate:
                K.add_simplex(joined)
    elif augment == 'delaunay':
        if ambient.dim != 2:
            raise ValueError("Delaunay augmentation needs planar inputs")
        points = np.array(K.vertices)
        for triangle in Delaunay(points).simplices:
            if not Simplex(points[triangle]).is_degenerate:
                K.add_cell(triangle.tolist())
    elif augment is not None:
        raise ValueError("Unknown augmentation %r" % augment)
    return K, [K.chain(T) for T in currents]


class FlatNormResult(object):
    """
    Attributes:
        value (float): Cost of the returned decomposition.
        u (ChainVector): k-chain part.
        v (ChainVector): (k+1)-chain part, t = u + dv.
        lower (float): Linear programming optimum.
        upper (float): Cost of the rounded integer decomposition.
        certified (bool): Integral optimum, so the LP value is the integer flat norm.
    """
    def __init__(self, value, u, v, lower, upper, certified, iterations=0):
        self.value = value
        self.u = u
        self.v = v
        self.lower = lower
        self.upper = upper
        self.certified = certified
        self.iterations = iterations

    def as_dict(self):
        return {
            'value': self.value,
            'u': self.u.coefficients.tolist(),
            'v': self.v.coefficients.tolist(),
            'lower': self.lower,
            'upper': self.upper,
            'certified': self.certified,
        }

    def __repr__(self):
        return 'FlatNormResult(value=%r, certified=%r)' % (self.value, self.certified)


def _solve(c, A, b, basis, solver):
    if solver == 'simplex':
        result = simplex(c, A, b, basis)
        return result.x, result.iterations
    if solver == 'highs':
        result = scipy_linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method='highs')
        if result.status != 0:
            raise SizeLimitExceeded("HiGHS failed: %s" % result.message)
        return result.x, int(getattr(result, 'nit', 0))
    raise ValueError("Unknown solver %r" % solver)


def flat_norm(t, K, kind=JacobianKind.MASS_STAR, solver='simplex'):
    """
    Flat norm of a chain in a complex.

    Args:
        t (ChainVector): k-chain of K.
        K (SimplicialComplex): Complex carrying t.
        kind (JacobianKind): Mass used for the cell weights.
        solver (str): 'simplex' for the built-in solver, 'highs' for scipy's HiGHS.

    Returns:
        (FlatNormResult)

    Raises:
        SizeLimitExceeded: above LP_MAX_CELLS variables cells.
    """
    k = t.k
    n, n_up = K.count(k), K.count(k + 1)
    if n + n_up > config.LP_MAX_CELLS:
        raise SizeLimitExceeded("Flat norm over %d cells exceeds the cap of %d" % (n + n_up, config.LP_MAX_CELLS),
                                cells=n + n_up)
    w = K.weights(k, kind)
    w_up = K.weights(k + 1, kind) if n_up else np.zeros(0)
    if t.is_zero:
        return FlatNormResult(0.0, ChainVector(k, np.zeros(n)), ChainVector(k + 1, np.zeros(n_up)), 0.0, 0.0, True)
    identity = sparse.identity(n, format='csr')
    blocks = [identity, -identity]
    if n_up:
        D = K.boundary_matrix(k + 1).astype(float)
        blocks += [D, -D]
    A = sparse.hstack(blocks, format='csc')
    c = np.concatenate([w, w, w_up, w_up])
    b = t.coefficients
    basis = [i if b[i] >= 0 else n + i for i in range(n)]
    x, iterations = _solve(c, A, b, basis, solver)

    u = x[:n] - x[n:2 * n]
    v = x[2 * n:2 * n + n_up] - x[2 * n + n_up:]
    lower = float(c.dot(x))
    u_int, v_int = np.round(u), np.round(v)
    residual = b - u_int - (K.boundary_matrix(k + 1).dot(v_int) if n_up else 0.0)
    if np.all(np.abs(residual) <= 1e-9):
        upper = math.fsum(np.abs(u_int) * w) + math.fsum(np.abs(v_int) * w_up)
    else:
        u_int, v_int = b.copy(), np.zeros(n_up)
        upper = math.fsum(np.abs(b) * w)
    certified = bool(np.all(np.abs(x - np.round(x)) <= 1e-9)) and abs(upper - lower) <= 1e-9 * max(1.0, upper)
    logger.debug("Flat norm: lower %.12g, upper %.12g, certified %s", lower, upper, certified)
    if certified:
        return FlatNormResult(lower, ChainVector(k, u_int), ChainVector(k + 1, v_int), lower, upper, True, iterations)
    return FlatNormResult(lower, ChainVector(k, u), ChainVector(k + 1, v), lower, upper, False, iterations)


def flat_distance(T1, T2, K, kind=JacobianKind.MASS_STAR, solver='simplex'):
    """
    Flat norm of T1 - T2 in a shared complex: an upper bound for the
    intrinsic flat distance.
    """
    return flat_norm(K.chain(T1) - K.chain(T2), K, kind, solver).value


def flat_distance_report(T1, T2, K, kind=JacobianKind.MASS_STAR, solver='simplex'):
    result = flat_norm(K.chain(T1) - K.chain(T2), K, kind, solver)
    report = result.as_dict()
    report['note'] = UPPER_BOUND_NOTE
    return report


def homotopy_prisms(T, f):
    """
    Straight line homotopy from T to f_#T as a (k+1)-current.

    A cell [v_0 .. v_k] with images w_i gives the prisms
    (-1)^i [v_0 .. v_i, w_i .. w_k]; degenerate prisms are dropped. For a
    cycle T the boundary of the result is f_#T - T.
    """
    cells = []
    for s, multiplicity in T:
        images = np.asarray(f(s.vertices), dtype=float)
        for i in range(s.dimension + 1):
            prism = Simplex(np.vstack([s.vertices[:i + 1], images[i:]]))
            if not prism.is_degenerate:
                cells.append((prism, multiplicity * s.orientation * (-1) ** i))
    return PolyhedralCurrent(T.ambient, T.k + 1, cells)


def grid_complex(n, lower=(0.0, 0.0), upper=(1.0, 1.0), ambient=None):
    """
    Triangulated grid of n x n squares, each split along its rising diagonal.
    """
    K = SimplicialComplex(ambient or AmbientNorm.euclidean(2))
    xs = np.linspace(lower[0], upper[0], n + 1)
    ys = np.linspace(lower[1], upper[1], n + 1)
    for i, j in itertools.product(range(n), range(n)):
        a, b = (xs[i], ys[j]), (xs[i + 1], ys[j])
        c, d = (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1])
        K.add_simplex(Simplex([a, b, c]))
        K.add_simplex(Simplex([a, c, d]))
    return K


def staircase_current(n, ambient=None):
    """
    Staircase from (0, 0) to (1, 1) with n steps; mass 2 in the Euclidean norm.
    """
    points = [(0.0, 0.0)]
    for i in range(n):
        points.append(((i + 1.0) / n, i / float(n)))
        points.append(((i + 1.0) / n, (i + 1.0) / n))
    return curve_current(points, ambient=ambient)


def diagonal_current(n, ambient=None):
    return curve_current([(i / float(n), i / float(n)) for i in range(n + 1)], ambient=ambient)


def lower_semicontinuity_check(chains, limit, K, kind=JacobianKind.MASS_STAR, solver='simplex'):
    """
    Check M(t) <= liminf M(t_i) along a sequence flat converging to t.

    The liminf is estimated by the minimum over the second half of the sequence.

    Returns:
        (dict) Masses, flat distances to the limit and the verdict.
    """
    masses = [c.mass(K, kind) for c in chains]
    distances = [flat_norm(c - limit, K, kind, solver).value for c in chains]
    tail = masses[len(masses) // 2:]
    liminf = min(tail) if tail else float('inf')
    limit_mass = limit.mass(K, kind)
    return {
        'masses': masses,
        'flat_distances': distances,
        'liminf_mass': liminf,
        'limit_mass': limit_mass,
        'holds': limit_mass <= liminf + 1e-9,
        'strict': limit_mass < liminf - 1e-9,
    }


def _comass_bound(h, pis, points):
    gradients = [float(np.linalg.norm(p.matrix[0])) for p in pis]
    product = float(np.prod(gradients)) if gradients else 1.0
    h_max = float(np.max(np.abs(h(points)))) if len(points) else 0.0
    return max(h_max * product, float(np.linalg.norm(h.matrix[0])) * product)


def random_affine_form(k, n, rng):
    """
    Random test tuple (h, pi_1, ..., pi_k) of affine functions on R^n.
    """
    h = AffineMap.functional(rng.standard_normal(n), rng.standard_normal())
    return h, [AffineMap.functional(rng.standard_normal(n), rng.standard_normal()) for _ in range(k)]


def weak_convergence_check(currents, limit, K, forms=10, rng=None, kind=JacobianKind.MASS_STAR, solver='simplex'):
    """
    Evaluate a flat converging sequence and its limit on random affine test
    forms; each error must stay below flat distance times the form's comass bound.

    Returns:
        (dict) Errors per form, flat distances and the verdict.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    limit_chain = K.chain(limit)
    distances = [flat_norm(K.chain(T) - limit_chain, K, kind, solver).value for T in currents]
    points = np.array(K.vertices)
    errors, holds = [], True
    for _ in range(forms):
        h, pis = random_affine_form(limit.k, limit.ambient.dim, rng)
        target = evaluate(limit, h, pis)
        row = [abs(evaluate(T, h, pis) - target) for T in currents]
        bound = _comass_bound(h, pis, points)
        holds = holds and all(e <= d * bound + 1e-6 for e, d in zip(row, distances))
        errors.append(row)
    return {'errors': errors, 'flat_distances': distances, 'holds': holds}

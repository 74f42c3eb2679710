"""
Filling volume experiments: the l_inf filling lower bound for convex bodies,
the sphere embedding pipeline, the flat football and non-rigidity witnesses.
"""
import logging
import math

import numpy as np

from metric_currents.current import (
    PolyhedralCurrent, boundary, curve_current, density, evaluate, mass, push_forward, square_current,
)
from metric_currents.exceptions import BoundaryConditionError
from metric_currents.flatnorm import build_complex, flat_norm, homotopy_prisms, random_affine_form
from metric_currents.geometry import Simplex
from metric_currents.jacobian import JacobianKind, jac_inscribed_riemannian
from metric_currents.mesh import (
    ConvexBody, MeshMetricSpace, dedupe_vertices, grid_mesh, mcshane_extend, orient_counterclockwise,
)
from metric_currents.seminorm import AmbientNorm, Seminorm

logger = logging.getLogger(__name__)


class SphereDiscretization(object):
    """
    m directions p_j on the unit sphere of R^n, each with quadrature weight n/m.

    Directions are equally spaced for n = 2, a Fibonacci lattice for n = 3
    and normalized Gaussian samples from `rng` above.
    """
    def __init__(self, n, m, rng=None):
        if m < n:
            raise ValueError("Need at least %d directions, got %d" % (n, m))
        self.n = int(n)
        self.m = int(m)
        if n == 2:
            angles = 2.0 * np.pi * np.arange(m) / m
            directions = np.column_stack([np.cos(angles), np.sin(angles)])
        elif n == 3:
            golden = math.pi * (3.0 - math.sqrt(5.0))
            z = 1.0 - 2.0 * (np.arange(m) + 0.5) / m
            radius = np.sqrt(1.0 - z * z)
            theta = golden * np.arange(m)
            directions = np.column_stack([radius * np.cos(theta), radius * np.sin(theta), z])
        else:
            rng = np.random.default_rng(0) if rng is None else rng
            directions = rng.standard_normal((m, n))
            directions /= np.linalg.norm(directions, axis=1)[:, None]
        self.directions = directions

    @property
    def weights(self):
        return np.full(self.m, self.n / float(self.m))

    def weighted_norm(self):
        """
        sqrt(sum_j (n/m) y_j^2), the discretized L^2 norm with its normalization.
        """
        return AmbientNorm.quadratic(np.diag(self.weights))

    def max_norm(self):
        return AmbientNorm.max_norm(self.m)

    def __repr__(self):
        return 'SphereDiscretization(n=%d, m=%d)' % (self.n, self.m)


def phi_embedding(x, D):
    """
    x -> (<x, p_1>, ..., <x, p_m>)
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != D.n:
        raise ValueError("Expected points in R^%d" % D.n)
    return x.dot(D.directions.T)


def orthogonal_projection(y, D):
    """
    Orthogonal projection onto Phi(R^n) in the weighted inner product.

    Returns:
        (tuple) (projected vectors in R^m, preimages in R^n).
    """
    y = np.asarray(y, dtype=float)
    P = D.directions
    coordinates = np.linalg.solve(P.T.dot(P), P.T.dot(y.T)).T
    return coordinates.dot(P.T), coordinates


def _row_bounded(rng, n, m):
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=1)[:, None]
    return A * rng.uniform(0.5, 1.0, size=(m, 1))


def det_nonincrease_check(trials, n, m, rng=None, jacobian_trials=None):
    """
    Random linear maps A: R^n -> (R^m, max) with rows of norm at most one
    (1-Lipschitz). Checks |det| of A read in the weighted l2 norm is at most
    one, and Jac^ir(weighted l2 o A) <= Jac^ir(max o A) on a subset.

    Returns:
        (dict) Trial counts, violations and extremes.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    D = SphereDiscretization(n, m, rng)
    weighted, max_norm = D.weighted_norm(), D.max_norm()
    jacobian_trials = min(trials, 200) if jacobian_trials is None else jacobian_trials
    violations, ir_violations = 0, 0
    largest, largest_ratio = 0.0, 0.0
    for trial in range(trials):
        A = _row_bounded(rng, n, m)
        det = math.sqrt(max(np.linalg.det((n / float(m)) * A.T.dot(A)), 0.0))
        largest = max(largest, det)
        if det > 1.0 + 1e-9:
            violations += 1
        if trial < jacobian_trials:
            lower = jac_inscribed_riemannian(Seminorm(A, weighted))
            upper = jac_inscribed_riemannian(Seminorm(A, max_norm))
            if upper > 0:
                largest_ratio = max(largest_ratio, lower / upper)
            if lower > upper * (1.0 + 1e-6) + 1e-12:
                ir_violations += 1
    return {
        'trials': trials,
        'n': n,
        'm': m,
        'violations': violations,
        'max_det': largest,
        'jacobian_trials': jacobian_trials,
        'ir_violations': ir_violations,
        'max_ir_ratio': largest_ratio,
    }


class FillingCandidate(object):
    """
    Triangulated surface X with an identification of its boundary vertices
    with points of the boundary of a convex body.

    Attributes:
        space (MeshMetricSpace): X with its intrinsic graph metric.
        boundary_map (dict): Boundary vertex index -> point of the body's boundary.
        base_points (numpy.ndarray): Planar parameter of every vertex.
    """
    def __init__(self, name, body, space, boundary_map, base_points):
        self.name = name
        self.body = body
        self.space = space
        self.boundary_map = boundary_map
        self.base_points = base_points

    @property
    def is_flat(self):
        return bool(np.allclose(self.space.vertices[:, 2:], 0.0))

    def __repr__(self):
        return 'FillingCandidate(%r)' % self.name


def graph_candidate(name, body, height, n=16, extra_edges=None):
    """
    Graph of a height function over a refined mesh of a planar convex body,
    vanishing on its boundary.
    """
    if name.startswith('square') and np.allclose(body.vertices.min(axis=0), 0.0):
        points, triangles = grid_mesh(n, body.vertices.min(axis=0), body.vertices.max(axis=0))
    else:
        points, triangles = body.refined_mesh(n)
    z = np.asarray(height(points), dtype=float)
    return candidate_from_mesh(name, body, np.column_stack([points, z]), triangles, extra_edges)


def candidate_from_mesh(name, body, vertices, triangles, extra_edges=None):
    """
    Candidate from a triangle mesh in R^3 whose boundary vertices lie over
    the boundary of a planar body; vertices are identified through their
    first two coordinates.
    """
    vertices = np.asarray(vertices, dtype=float)
    if vertices.shape[1] == 2:
        vertices = np.column_stack([vertices, np.zeros(len(vertices))])
    base = vertices[:, :2]
    triangles = orient_counterclockwise(base, triangles)
    space = MeshMetricSpace.from_triangles(vertices, triangles, extra_edges=extra_edges)
    boundary_map = dict((int(i), base[i]) for i in space.boundary_vertices())
    outside = [i for i, p in boundary_map.items() if abs(body.gauge(p)[0] - 1.0) > 1e-6]
    if outside:
        raise BoundaryConditionError("Boundary vertex %d does not lie on the body's boundary" % outside[0],
                                     pair=(outside[0], None))
    return FillingCandidate(name, body, space, boundary_map, base)


def _pyramid(body, h):
    return lambda points: h * np.maximum(1.0 - body.gauge(points), 0.0)


def _bump(body, h):
    return lambda points: h * np.maximum(1.0 - body.gauge(points) ** 2, 0.0)


def candidate_corpus(n=16):
    """
    Identity fillings of the unit square and the hexagon, and five curved
    fillings over them.
    """
    square, hexagon = ConvexBody.square(), ConvexBody.hexagon()
    flat = lambda points: np.zeros(len(points))
    ridge = lambda p: 0.5 * np.minimum(2.0 * np.minimum(p[:, 1], 1.0 - p[:, 1]),
                                       4.0 * np.minimum(p[:, 0], 1.0 - p[:, 0]))
    sine = lambda p: 0.2 * np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1])
    return [
        graph_candidate('square', square, flat, n),
        graph_candidate('hexagon', hexagon, flat, n),
        graph_candidate('square-ridge-tent', square, ridge, n),
        graph_candidate('square-pyramid', square, _pyramid(square, 0.3), n),
        graph_candidate('square-bump', square, sine, n),
        graph_candidate('hexagon-pyramid', hexagon, _pyramid(hexagon, 0.3), n),
        graph_candidate('hexagon-bump', hexagon, _bump(hexagon, 0.2), n),
    ]


def _planar_boundary(candidate):
    cells = [(Simplex(candidate.base_points[t]), 1) for t in candidate.space.triangles]
    return boundary(PolyhedralCurrent(AmbientNorm.max_norm(2), 2, cells))


def _same_on_forms(S, T, rng, forms=8, tol=1e-9):
    """
    Compare two currents on random affine test forms. Cells collapsed by a
    push-forward vanish, so simplexwise equality of boundaries is too strict.
    """
    for _ in range(forms):
        h, pis = random_affine_form(S.k, S.ambient.dim, rng)
        a, b = evaluate(S, h, pis), evaluate(T, h, pis)
        if abs(a - b) > tol * (1.0 + abs(a) + abs(b)):
            return False
    return True


def ell_infty_filling_bound(C, X, samples=200, rng=None, tol=1e-9):
    """
    Lower bound M(X) >= Vol(C) through a 1-Lipschitz map of X into l_inf^n.

    The inverse boundary identification is extended coordinate-wise by
    McShane's formula to f: X -> l_inf^n; f_#[[X]] must have the boundary of
    C as boundary and density one exactly on C.

    Args:
        C (ConvexBody): Planar convex body.
        X (FillingCandidate): Candidate filling of its boundary.

    Returns:
        (dict) Masses, the gap M(X) - Vol(C) and the chain-level checks.

    Raises:
        BoundaryConditionError: if the boundary identification is not
            1-Lipschitz into l_inf^n.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    space = X.space
    boundary_indices = np.array(sorted(X.boundary_map))
    targets = np.array([X.boundary_map[i] for i in boundary_indices])
    d = space.distances()
    d_aa = d[np.ix_(boundary_indices, boundary_indices)]
    linf = np.max(np.abs(targets[:, None, :] - targets[None, :, :]), axis=-1)
    shortcuts = np.argwhere(linf > d_aa + tol)
    if len(shortcuts):
        i, j = shortcuts[0]
        raise BoundaryConditionError("Boundary identification is not 1-Lipschitz into l_inf",
                                     pair=(int(boundary_indices[i]), int(boundary_indices[j])),
                                     distance=float(d_aa[i, j]), target_distance=float(linf[i, j]))
    euclidean = np.linalg.norm(targets[:, None, :] - targets[None, :, :], axis=-1)
    isometric = bool(np.max(np.abs(euclidean - d_aa)) <= tol)

    d_qa = d[:, boundary_indices]
    f = np.column_stack([mcshane_extend(targets[:, j], 1.0, d_aa, d_qa) for j in range(C.dim)])
    image_ambient = AmbientNorm.max_norm(C.dim)
    image = PolyhedralCurrent(image_ambient, 2, [(Simplex(f[t]), 1) for t in space.triangles])
    boundary_ok = _same_on_forms(boundary(image), _planar_boundary(X), rng)

    lower, upper = C.vertices.min(axis=0) - 0.25, C.vertices.max(axis=0) + 0.25
    points = rng.uniform(lower, upper, size=(samples, C.dim))
    expected = C.contains(points).astype(int)
    density_ok = bool(np.all(density(image, points) == expected))

    filling_mass = mass(space.current(), JacobianKind.INSCRIBED_RIEMANNIAN).total
    report = {
        'candidate': X.name,
        'volume': C.volume,
        'mass': filling_mass,
        'image_mass': mass(image, JacobianKind.MASS_STAR).total,
        'gap': filling_mass - C.volume,
        'boundary_matches': boundary_ok,
        'density_matches': density_ok,
        'isometric_boundary': isometric,
    }
    logger.debug("Filling bound for %s: %r", X.name, report)
    return report


class Football(object):
    """
    Two unit half-disks pulled apart by eps and joined by two bridges
    [L/2, 1] x [-eps/2, eps/2] and its mirror image; the window between the
    bridges is a hole that collapses to a slit of length L.
    """
    def __init__(self, eps, L, h, space, boundary):
        self.eps = eps
        self.L = L
        self.h = h
        self.space = space
        self.boundary = boundary

    def collapse(self, points):
        """
        f_eps: shift the half-disks together and flatten the bridges.
        """
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        half = 0.5 * self.eps
        y = np.where(y >= half, y - half, np.where(y <= -half, y + half, 0.0))
        return np.stack([x, y], axis=-1)

    @property
    def area(self):
        return self.space.area()

    @property
    def exact_area(self):
        return math.pi + 2.0 * self.eps * (1.0 - 0.5 * self.L)

    def edge_lipschitz(self):
        u, v = self.space.vertices[self.space.edges[:, 0]], self.space.vertices[self.space.edges[:, 1]]
        stretched = np.linalg.norm(self.collapse(u) - self.collapse(v), axis=1)
        return float(np.max(stretched / self.space.lengths))

    def collapsed_boundary(self):
        return push_forward(self.collapse, self.boundary)

    def across_slit_distance(self, t):
        """
        Intrinsic distance between the points at height t above and below the slit.
        """
        half = 0.5 * self.eps
        i = self.space.nearest_vertex((0.0, half + t))
        j = self.space.nearest_vertex((0.0, -half - t))
        return self.space.distance(i, j)

    def report(self, t=0.01):
        cycle = self.collapsed_boundary()
        return {
            'eps': self.eps,
            'L': self.L,
            'h': self.h,
            'area': self.area,
            'exact_area': self.exact_area,
            'edge_lipschitz': self.edge_lipschitz(),
            'collapsed_boundary_closed': boundary(cycle).is_zero,
            'winding_number': winding_number(cycle),
            'across_slit_distance': self.across_slit_distance(t),
            'slit_limit_distance': 2.0 * math.sqrt((0.5 * self.L) ** 2 + t * t),
            'flat_disk_distance': 2.0 * t,
        }


def _nodes(a, b, h, even=False):
    count = max(1, int(math.ceil((b - a) / h)))
    if even:
        count += count % 2
    return np.linspace(a, b, count + 1)


def _append_grid(points, triangles, columns):
    """
    Mesh the region between consecutive columns, each column a list of
    points with the same number of rows.
    """
    for left, right in zip(columns[:-1], columns[1:]):
        offset = len(points)
        rows = len(left)
        points.extend(left)
        points.extend(right)
        for j in range(rows - 1):
            a, b = offset + j, offset + rows + j
            triangles.append((a, b, b + 1))
            triangles.append((a, b + 1, a + 1))


def make_flat_football(eps, L, h):
    """
    Triangulated football M_eps with its intrinsic graph metric.

    Args:
        eps (float): Width of the strip between the half-disks.
        L (float): Length of the slit, in (0, 2).
        h (float): Mesh size.

    Returns:
        (Football) Mesh space, boundary current and collapse map.
    """
    if not 0.0 < L < 2.0:
        raise ValueError("Slit length must lie in (0, 2), got %r" % L)
    if eps <= 0.0 or h <= 0.0:
        raise ValueError("Strip width and mesh size must be positive")
    half = 0.5 * eps
    xs = np.unique(np.concatenate([
        _nodes(-1.0, -0.5 * L, h), _nodes(-0.5 * L, 0.5 * L, h, even=True), _nodes(0.5 * L, 1.0, h)]))
    rows = int(math.ceil(1.0 / h))
    t = np.linspace(0.0, 1.0, rows + 1)
    points, triangles = [], []
    for sign in (1.0, -1.0):
        columns = []
        for x in xs:
            height = math.sqrt(max(1.0 - x * x, 0.0))
            columns.append([(x, sign * (half + s * height)) for s in t])
        _append_grid(points, triangles, columns)
    strip = np.linspace(-half, half, max(1, int(math.ceil(eps / h))) + 1)
    for lo, hi in ((-1.0, -0.5 * L), (0.5 * L, 1.0)):
        columns = [[(x, y) for y in strip] for x in xs if lo - 1e-12 <= x <= hi + 1e-12]
        _append_grid(points, triangles, columns)
    points, triangles = dedupe_vertices(np.array(points), np.array(triangles))
    triangles = orient_counterclockwise(points, triangles)
    keep = [i for i, tri in enumerate(triangles) if not Simplex(points[tri]).is_degenerate]
    triangles = triangles[keep]
    space = MeshMetricSpace.from_triangles(points, triangles)
    football = Football(eps, L, h, space, space.boundary_current())
    logger.debug("Football eps=%g L=%g h=%g: %r", eps, L, h, space)
    return football


def winding_number(cycle, center=(0.0, 0.0)):
    """
    Signed angle swept by a planar 1-cycle about `center`, in turns.
    """
    center = np.asarray(center, dtype=float)
    total = 0.0
    for s, multiplicity in cycle:
        a, b = s.vertices[0] - center, s.vertices[1] - center
        angle = math.atan2(a[0] * b[1] - a[1] * b[0], a.dot(b))
        total += s.orientation * multiplicity * angle
    return int(round(total / (2.0 * math.pi)))


def football_flat_distance(eps, L, h, solver='highs'):
    """
    Flat distance in the plane between the football boundary and its collapse,
    computed in the complex spanned by the straight line homotopy.
    """
    football = make_flat_football(eps, L, h)
    source = football.boundary
    target = football.collapsed_boundary()
    prisms = homotopy_prisms(source, football.collapse)
    K, (source_chain, target_chain, _) = build_complex([source, target, prisms], overlap_check=False)
    result = flat_norm(source_chain - target_chain, K, solver=solver)
    return {'eps': eps, 'flat_distance': result.value, 'homotopy_mass': mass(prisms).total,
            'certified': result.certified}


def make_linfty_square():
    """
    The unit square with the Euclidean norm and with the maximum norm: equal
    masses and boundary lengths, yet the identity is not an isometry.

    Returns:
        (dict) Masses per Jacobian, boundary lengths, the witness pair and
        its distances in both norms.
    """
    euclidean, maximum = AmbientNorm.euclidean(2), AmbientNorm.max_norm(2)
    T, T_inf = square_current(ambient=euclidean), square_current(ambient=maximum)
    x, y = np.zeros(2), np.ones(2)
    report = {
        'masses': [mass(T).total, mass(T_inf).total],
        'boundary_lengths': [mass(boundary(T)).total, mass(boundary(T_inf)).total],
        'distances': [float(euclidean(y - x)), float(maximum(y - x))],
        'busemann_masses': [mass(T, JacobianKind.BUSEMANN).total, mass(T_inf, JacobianKind.BUSEMANN).total],
        'ir_masses': [mass(T, JacobianKind.INSCRIBED_RIEMANNIAN).total,
                      mass(T_inf, JacobianKind.INSCRIBED_RIEMANNIAN).total],
        'witness_pair': [x.tolist(), y.tolist()],
        'identity_lipschitz': 1.0,
    }
    report['isometry'] = report['distances'][0] == report['distances'][1]
    return report


def make_subspace_metric_witness(m=64):
    """
    A polygonal half-circle of length pi: the identity from its intrinsic
    metric to the Euclidean subspace metric preserves mass and boundary but
    shrinks the distance between the endpoints from pi to about 2.
    """
    radius = (math.pi / (2.0 * m)) / math.sin(math.pi / (2.0 * m))
    angles = np.linspace(0.0, math.pi, m + 1)
    points = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    T = curve_current(points)
    intrinsic = mass(T).total
    subspace = float(np.linalg.norm(points[-1] - points[0]))
    return {
        'length': intrinsic,
        'intrinsic_distance': intrinsic,
        'subspace_distance': subspace,
        'boundary_mass': mass(boundary(T)).total,
        'isometry': abs(intrinsic - subspace) <= 1e-9,
    }

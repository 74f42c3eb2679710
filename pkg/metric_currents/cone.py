"""
Euclidean cones over metric spaces and the currents coned from polyhedral bases.

A cone current is handled two ways. Masses are computed chart by chart over
Delta_k x [0, 1], with the cone metric differential sqrt(r^2 sigma(v)^2 + s^2).
The chain-level boundary identity is checked on the join representation in
R^(N+1): apex at the origin, base lifted to height one.
"""
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from metric_currents import config
from metric_currents.current import PolyhedralCurrent, boundary, curve_current, mass
from metric_currents.geometry import Simplex
from metric_currents.jacobian import JacobianKind, jacobian
from metric_currents.seminorm import AmbientNorm, Seminorm, product_seminorm

logger = logging.getLogger(__name__)


def cone_distance(d_base, r, s):
    """
    sqrt(r^2 + s^2 - 2 r s cos d) when d < pi, r + s otherwise.
    """
    d_base, r, s = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in (d_base, r, s)])
    chord = np.sqrt(np.maximum(r * r + s * s - 2.0 * r * s * np.cos(np.minimum(d_base, math.pi)), 0.0))
    value = np.where(d_base < math.pi, chord, r + s)
    return float(value) if value.ndim == 0 else value


class ConePoint(object):
    """
    [(base, radius)] in the cone; all points of radius zero are the apex.
    """
    def __init__(self, base, radius):
        if not 0.0 <= radius <= 1.0:
            raise ValueError("Cone radius must lie in [0, 1], got %r" % radius)
        self.base = base
        self.radius = float(radius)

    @property
    def is_apex(self):
        return self.radius == 0.0

    def distance(self, other, base_metric):
        """
        Args:
            other (ConePoint): Second point.
            base_metric (callable): Distance between two base points.
        """
        if self.is_apex or other.is_apex:
            return self.radius + other.radius
        return cone_distance(base_metric(self.base, other.base), self.radius, other.radius)

    def __eq__(self, other):
        if not isinstance(other, ConePoint):
            return False
        if self.is_apex or other.is_apex:
            return self.is_apex and other.is_apex
        return self.radius == other.radius and np.array_equal(np.asarray(self.base), np.asarray(other.base))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(('apex',)) if self.is_apex else hash((self.radius, repr(self.base)))

    def __repr__(self):
        return 'ConePoint(apex)' if self.is_apex else 'ConePoint(%r, %r)' % (self.base, self.radius)


class ConeChart(object):
    """
    Lift of an affine base chart phi on the parameter simplex to
    (x, r) -> [(phi(x), r)].
    """
    def __init__(self, simplex, ambient):
        self.simplex = simplex
        self.ambient = ambient

    @property
    def base_seminorm(self):
        return Seminorm(self.simplex.edges.T, self.ambient)

    def __call__(self, lam, r):
        lam = np.asarray(lam, dtype=float)
        return ConePoint(self.simplex.vertices[0] + lam.dot(self.simplex.edges), r)

    def seminorm(self, r):
        """
        Metric differential at radius r: (v, s) -> sqrt(r^2 sigma(v)^2 + s^2).
        """
        return product_seminorm(self.base_seminorm.scaled(r), Seminorm(np.eye(1), AmbientNorm.euclidean(1)))

    def check_seminorm(self, samples=20, rng=None):
        """
        Largest deviation of the lifted seminorm from the cone formula at random (v, s, r).
        """
        rng = np.random.default_rng(0) if rng is None else rng
        k = self.simplex.dimension
        worst = 0.0
        for _ in range(samples):
            r = rng.uniform(0.0, 1.0)
            v, s = rng.standard_normal(k), rng.standard_normal()
            lifted = self.seminorm(r)(np.append(v, s))
            expected = math.sqrt((r * self.base_seminorm(v)) ** 2 + s * s)
            worst = max(worst, abs(lifted - expected))
        return worst


def cone_charts(T):
    return [(ConeChart(s, T.ambient), m) for s, m in T]


def cone_mass(T, kind=JacobianKind.INSCRIBED_RIEMANNIAN, order=None):
    """
    Mass of the cone current CT, integrating the lifted chart Jacobians over
    Delta_k x [0, 1] with Gauss-Legendre nodes in r.

    Args:
        T (PolyhedralCurrent): Base k-current.
        kind (JacobianKind): Jacobian of the mass.
        order (int, optional): Number of radial nodes; k + 1 integrates r^k exactly.
    """
    kind = JacobianKind.parse(kind)
    k = T.k
    if k == 0:
        return float(sum(abs(m) for _, m in T))
    nodes, weights = leggauss(order or k + 1)
    radii, weights = 0.5 * (nodes + 1.0), 0.5 * weights

    def chart_mass(item):
        chart, multiplicity = item
        values = [jacobian(chart.seminorm(r), kind) for r in radii]
        return abs(multiplicity) * math.fsum(w * v for w, v in zip(weights, values)) / math.factorial(k)

    return math.fsum(config.parallel_map(chart_mass, cone_charts(T)))


def cone_mass_ir(T, order=None):
    """
    M^ir(CT), which equals M^ir(T) / (k + 1).
    """
    return cone_mass(T, JacobianKind.INSCRIBED_RIEMANNIAN, order)


def join_ambient(T):
    return AmbientNorm.product([T.ambient, AmbientNorm.euclidean(1)])


def lift(T):
    """
    End copy e_#T: the base at height one in R^(N+1).
    """
    cells = [(Simplex(np.hstack([s.vertices, np.ones((len(s.vertices), 1))]), s.orientation), m)
             for s, m in T]
    return PolyhedralCurrent(join_ambient(T), T.k, cells)


def cone_current(T):
    """
    Join of the apex (origin of R^(N+1)) with the lifted base.
    """
    apex = np.zeros((1, T.ambient.dim + 1))
    cells = [(Simplex(np.vstack([apex, np.hstack([s.vertices, np.ones((len(s.vertices), 1))])]),
                      s.orientation), m) for s, m in T]
    return PolyhedralCurrent(join_ambient(T), T.k + 1, cells)


def cone_boundary_decomposition(T):
    """
    Split the boundary of the cone current into its radial part and its end.

    With apex first in the join, the boundary of CT is e_#T - C(dT); the
    radial summand returned is -C(dT).

    Returns:
        (tuple) (radial, end) whose sum is boundary(cone_current(T)).
    """
    end = lift(T)
    if T.k == 0:
        radial = PolyhedralCurrent(join_ambient(T), 0,
                                   [(Simplex(np.zeros((1, T.ambient.dim + 1))), -m) for _, m in T])
    else:
        radial = -cone_current(boundary(T))
    return radial, end


def _join_cell_mass(s, multiplicity, ambient, kind):
    """
    Cone metric mass of one cell of a join current: a cone over a base cell
    when the apex is among its vertices, a base cell at radius one otherwise.
    """
    at_apex = np.all(np.abs(s.vertices) <= config.SNAP_TOLERANCE, axis=1)
    base = s.vertices[~at_apex, :-1]
    if not len(base):
        return float(abs(multiplicity))
    cell = PolyhedralCurrent(ambient, len(base) - 1, [(Simplex(base), multiplicity)])
    if np.any(at_apex):
        return cone_mass(cell, kind)
    return mass(cell, kind).total


def cone_boundary_masses(T, kind=JacobianKind.MASS_STAR):
    """
    Masses around the bound M(d(CT)) <= M(C dT) + M(T), all in the cone metric.

    The boundary mass is read cell by cell off the join boundary of CT; the
    radial term is the cone over dT and the end is T itself at radius one.
    """
    kind = JacobianKind.parse(kind)
    radial, end = cone_boundary_decomposition(T)
    total = math.fsum(_join_cell_mass(s, m, T.ambient, kind) for s, m in boundary(cone_current(T)))
    if T.k == 0:
        radial_mass = float(abs(sum(m for _, m in T)))
    else:
        radial_mass = cone_mass(boundary(T), kind)
    end_mass = mass(T, kind).total
    return {
        'boundary_mass': total,
        'radial_mass': radial_mass,
        'end_mass': end_mass,
        'base_mass': mass(T, kind).total,
        'chain_identity': boundary(cone_current(T)) == radial + end,
        'bound_holds': total <= radial_mass + end_mass + 1e-9,
    }


def cone_report(T, kinds=(JacobianKind.INSCRIBED_RIEMANNIAN, JacobianKind.MASS_STAR, JacobianKind.BUSEMANN)):
    """
    Base mass, cone mass and their ratio per Jacobian kind. Only the inscribed
    Riemannian ratio is exactly 1 / (k + 1); the others are reported as data.
    """
    report = {'k': T.k}
    for kind in kinds:
        kind = JacobianKind.parse(kind)
        base = mass(T, kind).total
        coned = cone_mass(T, kind)
        report[kind.value] = {'base_mass': base, 'cone_mass': coned, 'ratio': coned / base if base else None}
    return report


def circle_polygon(m):
    """
    Vertices of a regular m-gon with perimeter exactly 2 pi.
    """
    radius = (math.pi / m) / math.sin(math.pi / m)
    angles = 2.0 * math.pi * np.arange(m) / m
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def cone_over_circle(m=64, samples=200, rng=None):
    """
    Cone over the round circle (an m-gon of perimeter 2 pi with its arc metric).

    Returns:
        (dict) Base and cone inscribed Riemannian masses, their ratio, and the
        largest deviation of cone distances from chords of the flat unit disk.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    T = curve_current(circle_polygon(m), closed=True)
    base = mass(T, JacobianKind.INSCRIBED_RIEMANNIAN).total
    coned = cone_mass_ir(T)
    worst = 0.0
    for _ in range(samples):
        i, j = rng.integers(m, size=2)
        r, s = rng.uniform(0.0, 1.0, size=2)
        steps = abs(int(i) - int(j))
        d = 2.0 * math.pi * min(steps, m - steps) / m
        theta_i, theta_j = 2.0 * math.pi * i / m, 2.0 * math.pi * j / m
        chord = math.hypot(r * math.cos(theta_i) - s * math.cos(theta_j),
                           r * math.sin(theta_i) - s * math.sin(theta_j))
        worst = max(worst, abs(cone_distance(d, r, s) - chord))
    return {'m': m, 'base_mass': base, 'cone_mass': coned, 'ratio': coned / base, 'disk_area': math.pi,
            'max_chord_error': worst}

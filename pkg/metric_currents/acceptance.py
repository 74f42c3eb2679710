"""
The acceptance suite run by `verify-all`.

Every criterion is a function of a numpy generator returning a report dict
with a boolean 'passed' entry. Reports hold only plain JSON values so that
two runs with the same seed serialize identically.
"""
import itertools
import json
import logging
import math
from collections import OrderedDict

import numpy as np

from metric_currents.cone import cone_mass, cone_over_circle
from metric_currents.current import PolyhedralCurrent, boundary, curve_current, mass, polygon_current, square_current
from metric_currents.filling import (
    SphereDiscretization, candidate_corpus, det_nonincrease_check, ell_infty_filling_bound, make_flat_football,
    make_linfty_square, phi_embedding,
)
from metric_currents.flatnorm import build_complex, flat_norm
from metric_currents.geometry import AffineMap, Simplex, SymmetricPolytope
from metric_currents.graph import graph_from_edges
from metric_currents.jacobian import JacobianKind, jac_inscribed_riemannian, jac_mass_star, jacobian, john_ellipsoid
from metric_currents.onedim import RIGID, check_n1_rigidity, decompose_1current
from metric_currents.seminorm import AmbientNorm, Seminorm, euclidean_seminorm, product_seminorm
from metric_currents.slicing import verify_mass_fubini, verify_slice_pushforward_commute

logger = logging.getLogger(__name__)

KINDS = (JacobianKind.BUSEMANN, JacobianKind.MASS_STAR, JacobianKind.INSCRIBED_RIEMANNIAN)

FULL_SIZES = {
    'jacobian_trials': 1000,
    'product_pairs': 100,
    'john_polygons': 20,
    'fubini_currents': 50,
    'commute_levels': 20,
    'graph_currents': 1000,
    'embedding_trials': 10000,
    'candidate_mesh': 16,
    'football_h': 0.01,
}

QUICK_SIZES = {
    'jacobian_trials': 30,
    'product_pairs': 10,
    'john_polygons': 3,
    'fubini_currents': 8,
    'commute_levels': 5,
    'graph_currents': 50,
    'embedding_trials': 500,
    'candidate_mesh': 6,
    'football_h': 0.05,
}


def _relative_gap(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def random_norm(rng, N):
    kind = ('euclidean', 'max', 'sum')[rng.integers(3)]
    return AmbientNorm.parse(kind, N)


def random_seminorm(rng, k, ambient=None):
    N = k + int(rng.integers(3))
    ambient = ambient or random_norm(rng, N)
    matrix = rng.standard_normal((ambient.dim, k))
    while np.linalg.matrix_rank(matrix) < k:
        matrix = rng.standard_normal((ambient.dim, k))
    return Seminorm(matrix, ambient)


def jacobian_axioms(rng, trials):
    worst = {'normalization': 0.0, 'monotonicity': 0.0, 'transformation': 0.0}
    for k in (1, 2, 3):
        for kind in KINDS:
            worst['normalization'] = max(worst['normalization'], abs(jacobian(euclidean_seminorm(k), kind) - 1.0))
    for _ in range(trials):
        k = int(rng.integers(1, 4))
        sigma = random_seminorm(rng, k)
        lower = Seminorm(sigma.matrix, AmbientNorm.max_norm(sigma.ambient.dim))
        upper = Seminorm(sigma.matrix, AmbientNorm.euclidean(sigma.ambient.dim))
        linear = rng.standard_normal((k, k))
        det = abs(np.linalg.det(linear))
        for kind in KINDS:
            value = jacobian(sigma, kind)
            worst['monotonicity'] = max(worst['monotonicity'],
                                        jacobian(lower, kind) - jacobian(upper, kind))
            if det > 1e-3:
                worst['transformation'] = max(worst['transformation'],
                                              _relative_gap(jacobian(sigma.compose(linear), kind), det * value))
    passed = worst['normalization'] <= 1e-9 and worst['monotonicity'] <= 1e-8 and worst['transformation'] <= 1e-8
    return {'trials': trials, 'worst': worst, 'passed': passed}


def john_grid_oracle(facets, rounds=16, size=21):
    """
    Largest centered ellipse L(unit disk), L = [[t, 0], [t b, t c]], inside
    {|xi . v| <= 1}, by repeated grid refinement over (b, c).
    """
    facets = np.asarray(facets, dtype=float)

    def area(b, c):
        L = np.array([[1.0, 0.0], [b, c]])
        t = 1.0 / np.max(np.linalg.norm(facets.dot(L), axis=1))
        return math.pi * t * t * c

    center, width = np.array([0.0, 1.0]), np.array([32.0, 32.0])
    best = area(*center)
    for _ in range(rounds):
        bs = np.linspace(center[0] - width[0], center[0] + width[0], size)
        cs = np.linspace(max(1e-6, center[1] - width[1]), center[1] + width[1], size)
        for b, c in itertools.product(bs, cs):
            value = area(b, c)
            if value > best:
                best, center = value, np.array([b, c])
        width = width / 4.0
    return best


def jacobian_special_values(rng, pairs, polygons):
    max_norm_values = [jac_mass_star(Seminorm(np.eye(k), AmbientNorm.max_norm(k))) for k in (1, 2, 3)]
    product_gap = 0.0
    for _ in range(pairs):
        k1 = int(rng.integers(1, 3))
        k2 = 1 if k1 == 2 else int(rng.integers(1, 3))
        first, second = random_seminorm(rng, k1), random_seminorm(rng, k2)
        joint = jac_inscribed_riemannian(product_seminorm(first, second))
        product_gap = max(product_gap, _relative_gap(
            joint, jac_inscribed_riemannian(first) * jac_inscribed_riemannian(second)))
    john_gap = 0.0
    for _ in range(polygons):
        facets = rng.standard_normal((3, 2))
        body = SymmetricPolytope(facets)
        john_gap = max(john_gap, abs(john_ellipsoid(body).volume() - john_grid_oracle(facets)))
    passed = (max(abs(v - 1.0) for v in max_norm_values) <= 1e-12 and product_gap <= 1e-6
              and john_gap <= 1e-4)
    return {'mass_star_max_norm': max_norm_values, 'product_rule_gap': product_gap,
            'john_oracle_gap': john_gap, 'passed': passed}


def coning(rng):
    bases = [
        PolyhedralCurrent(AmbientNorm.euclidean(2), 0, [(Simplex([rng.standard_normal(2)]), 2),
                                                        (Simplex([rng.standard_normal(2)]), -1)]),
        curve_current(rng.standard_normal((4, 2))),
        polygon_current([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], AmbientNorm.max_norm(2)),
    ]
    ratios = []
    for T in bases:
        base = mass(T, JacobianKind.INSCRIBED_RIEMANNIAN).total
        ratios.append(cone_mass(T, JacobianKind.INSCRIBED_RIEMANNIAN) / base)
    gaps = [abs(r - 1.0 / (T.k + 1)) for r, T in zip(ratios, bases)]
    circle = cone_over_circle(64, rng=rng)
    passed = (max(gaps) <= 1e-9 and abs(circle['ratio'] - 0.5) <= 1e-9
              and abs(circle['cone_mass'] - math.pi) <= 1e-9)
    return {'ratios': ratios, 'circle_ratio': circle['ratio'], 'circle_cone_mass': circle['cone_mass'],
            'passed': passed}


def random_planar_current(rng, cells=3):
    triangles = [(Simplex(rng.uniform(-1.0, 1.0, size=(3, 2))), int(rng.integers(1, 3))) for _ in range(cells)]
    return PolyhedralCurrent(AmbientNorm.parse(('euclidean', 'max', 'sum')[rng.integers(3)], 2), 2, triangles)


def slicing(rng, currents, levels):
    fubini_gap, commute, holds = 0.0, 0.0, True
    for _ in range(currents):
        T = random_planar_current(rng)
        report = verify_mass_fubini(T, int(rng.integers(2)))
        fubini_gap = max(fubini_gap, report['gap'])
        holds = holds and report['inequality_holds']
        f = AffineMap(np.eye(2) + 0.3 * rng.standard_normal((2, 2)), rng.standard_normal(2))
        commute = max(commute, verify_slice_pushforward_commute(T, f, 0, levels=levels, rng=rng)['max_difference'])
    return {'fubini_gap': fubini_gap, 'inequality_holds': holds, 'commute_difference': commute,
            'passed': fubini_gap <= 1e-9 and holds and commute <= 1e-9}


def random_graph_current(rng, nodes=6, arcs=8):
    points = rng.uniform(0.0, 1.0, size=(nodes, 2))
    edges = []
    for _ in range(arcs):
        tail, head = rng.choice(nodes, size=2, replace=False)
        edges.append((int(tail), int(head), int(rng.integers(1, 3))))
    return graph_from_edges(points, edges)


def decomposition(rng, graphs):
    conserved, boundary_counts, length_gap = True, True, 0.0
    for _ in range(graphs):
        report = decompose_1current(random_graph_current(rng)).verify()
        conserved = conserved and report['edges_conserved']
        boundary_counts = boundary_counts and report['boundary_count_holds']
        length_gap = max(length_gap, report['length_gap'])
    x = lambda points: np.asarray(points)[:, 0]
    straight = check_n1_rigidity(curve_current([(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]), x, (0.0, 1.0))
    bent = check_n1_rigidity(curve_current([(0.0, 0.0), (0.5, 0.2), (1.0, 0.0)]), x, (0.0, 1.0))
    rigidity = straight['verdict'] == RIGID and bent['verdict'] != RIGID and bent['witness'] is not None
    return {'graphs': graphs, 'edges_conserved': conserved, 'boundary_counts': boundary_counts,
            'length_gap': length_gap, 'straight': straight['verdict'], 'bent': bent['verdict'],
            'bent_witness': bent['witness']['relation'] if bent['witness'] else None,
            'passed': conserved and boundary_counts and length_gap <= 1e-12 and rigidity}


def brute_force_flat_norm(t, K, kind=JacobianKind.MASS_STAR):
    """
    Minimum of M(t - dv) + M(v) over integer (k+1)-chains v with entries in {-1, 0, 1}.
    """
    k = t.k
    w_u, w_v = K.weights(k, kind), K.weights(k + 1, kind)
    D = K.boundary_matrix(k + 1).toarray()
    best = float('inf')
    for v in itertools.product((-1, 0, 1), repeat=K.count(k + 1)):
        v = np.array(v, dtype=float)
        best = min(best, float(w_u.dot(np.abs(t.coefficients - D.dot(v))) + w_v.dot(np.abs(v))))
    return best


def flat_norms(rng):
    rows, certified, bounded = [], True, True
    for side in (1.0, 0.5, 8.0):
        T = square_current(side)
        K, (chain, cycle) = build_complex([T, boundary(T)])
        result = flat_norm(cycle, K)
        oracle = brute_force_flat_norm(cycle, K)
        certified = certified and result.certified
        bounded = bounded and result.value <= cycle.mass(K) + 1e-9
        rows.append({'side': side, 'value': result.value, 'oracle': oracle, 'expected': min(side ** 2, 4 * side)})
    exact = all(abs(r['value'] - r['oracle']) <= 1e-9 and abs(r['value'] - r['expected']) <= 1e-9 for r in rows)
    return {'squares': rows, 'certified': certified, 'below_mass': bounded,
            'passed': exact and certified and bounded}


def filling(rng, n):
    rows, passed = [], True
    for candidate in candidate_corpus(n):
        report = ell_infty_filling_bound(candidate.body, candidate, rng=rng)
        threshold = -1e-9 if candidate.is_flat else 0.01
        ok = report['gap'] >= threshold and report['boundary_matches'] and report['density_matches']
        passed = passed and ok
        rows.append({'candidate': candidate.name, 'gap': report['gap'], 'passed': ok})
    return {'candidates': rows, 'passed': passed}


def embedding(rng, trials):
    exactness = 0.0
    for m in range(3, 257):
        D = SphereDiscretization(2, m)
        x = rng.standard_normal(2)
        exactness = max(exactness, abs(D.weighted_norm()(phi_embedding(x, D)) - np.linalg.norm(x)))
    ms = (4, 8, 16, 32, 64)
    violations, ir_violations = 0, 0
    for m in ms:
        report = det_nonincrease_check(trials // len(ms), 2, m, rng=rng, jacobian_trials=5)
        violations += report['violations']
        ir_violations += report['ir_violations']
    return {'exactness': exactness, 'violations': violations, 'ir_violations': ir_violations,
            'passed': exactness <= 1e-12 and violations == 0 and ir_violations == 0}


def football(rng, h, eps=0.05, L=1.0, t=0.01):
    report = make_flat_football(eps, L, h).report(t)
    in_range = math.pi <= report['area'] <= math.pi + 2 * eps + 0.05
    close = _relative_gap(report['across_slit_distance'], report['slit_limit_distance']) <= 0.1
    report['passed'] = bool(in_range and report['edge_lipschitz'] <= 1.02 and close
                            and report['winding_number'] == 1)
    return report


def linfty_square(rng):
    report = make_linfty_square()
    expected = [[1.0, 1.0], [4.0, 4.0], [math.sqrt(2.0), 1.0]]
    actual = [report['masses'], report['boundary_lengths'], report['distances']]
    gap = max(abs(a - b) for row, target in zip(actual, expected) for a, b in zip(row, target))
    return {'masses': report['masses'], 'boundary_lengths': report['boundary_lengths'],
            'distances': report['distances'], 'gap': gap, 'passed': gap <= 1e-12 and not report['isometry']}


CRITERIA = OrderedDict([
    ('jacobian_axioms', lambda rng, sizes: jacobian_axioms(rng, sizes['jacobian_trials'])),
    ('jacobian_special_values',
     lambda rng, sizes: jacobian_special_values(rng, sizes['product_pairs'], sizes['john_polygons'])),
    ('coning', lambda rng, sizes: coning(rng)),
    ('slicing', lambda rng, sizes: slicing(rng, sizes['fubini_currents'], sizes['commute_levels'])),
    ('decomposition', lambda rng, sizes: decomposition(rng, sizes['graph_currents'])),
    ('flat_norm', lambda rng, sizes: flat_norms(rng)),
    ('filling', lambda rng, sizes: filling(rng, sizes['candidate_mesh'])),
    ('embedding', lambda rng, sizes: embedding(rng, sizes['embedding_trials'])),
    ('football', lambda rng, sizes: football(rng, sizes['football_h'])),
    ('linfty_square', lambda rng, sizes: linfty_square(rng)),
])


def _plain(value):
    if isinstance(value, dict):
        return dict((str(k), _plain(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def run_criterion(name, seed, sizes):
    """
    Each criterion draws from its own generator, seeded from the run seed and its position.
    """
    index = list(CRITERIA).index(name)
    rng = np.random.default_rng([seed, index])
    logger.info("Running acceptance criterion %s", name)
    return _plain(CRITERIA[name](rng, sizes))


def verify_all(seed=0, quick=False, only=None):
    """
    Run the acceptance criteria, then rerun the cheap ones to check that the
    reports are reproducible.

    Returns:
        (dict) Report per criterion and the overall verdict.
    """
    sizes = QUICK_SIZES if quick else FULL_SIZES
    names = list(only or CRITERIA)
    for name in names:
        if name not in CRITERIA:
            raise ValueError("Unknown criterion %r" % name)
    results = OrderedDict((name, run_criterion(name, seed, sizes)) for name in names)
    repeat = [name for name in ('coning', 'flat_norm', 'linfty_square') if name in results]
    identical = all(json.dumps(run_criterion(name, seed, sizes), sort_keys=True)
                    == json.dumps(results[name], sort_keys=True) for name in repeat)
    results['determinism'] = {'rerun': repeat, 'passed': identical}
    return {'seed': seed, 'quick': quick, 'criteria': results,
            'passed': all(r['passed'] for r in results.values())}

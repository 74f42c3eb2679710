"""
Readers and writers for currents, complexes, chains and meshes.

JSON output is bit-stable: cells are written in canonical order and keys
are sorted.
"""
import csv
import io
import json
import logging

import numpy as np

from metric_currents.current import PolyhedralCurrent
from metric_currents.flatnorm import ChainVector, SimplicialComplex
from metric_currents.geometry import Simplex
from metric_currents.seminorm import AmbientNorm

logger = logging.getLogger(__name__)


def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2)


def ambient_to_dict(ambient):
    norm = ambient.to_dict()
    return {'dim': ambient.dim, 'norm': {'tag': norm['tag'], 'params': norm['params']}}


def ambient_from_dict(data):
    try:
        dim = int(data['dim'])
        norm = data.get('norm') or {'tag': 'euclidean'}
        return AmbientNorm.parse(norm['tag'], dim, norm.get('params'))
    except (KeyError, TypeError) as e:
        raise ValueError("Malformed ambient %r: %s" % (data, e))


def current_to_dict(T):
    return {
        'ambient': ambient_to_dict(T.ambient),
        'k': T.k,
        'cells': [{'vertices': s.vertices.tolist(), 'multiplicity': int(s.orientation * m)} for s, m in T],
    }


def current_from_dict(data):
    """
    Build a current from its JSON form.

    Raises:
        ValueError: on a missing field, a non-integer multiplicity or a cell
            of the wrong dimension.
    """
    ambient = ambient_from_dict(data.get('ambient', {}))
    try:
        k = int(data['k'])
        raw_cells = data['cells']
    except (KeyError, TypeError) as e:
        raise ValueError("Malformed current: missing %s" % e)
    cells = []
    for i, cell in enumerate(raw_cells):
        vertices = np.asarray(cell['vertices'], dtype=float)
        if vertices.shape != (k + 1, ambient.dim):
            raise ValueError("Cell %d has shape %r, expected %r" % (i, vertices.shape, (k + 1, ambient.dim)))
        cells.append((Simplex(vertices), cell.get('multiplicity', 1)))
    return PolyhedralCurrent(ambient, k, cells)


def dump_current(T):
    return dumps(current_to_dict(T))


def load_current(text):
    return current_from_dict(json.loads(text))


def complex_to_dict(K):
    return K.as_dict()


def complex_from_dict(data):
    K = SimplicialComplex(ambient_from_dict(_ambient_field(data)))
    for v in data['vertices']:
        K.add_vertex(v)
    if len(K.vertices) != len(data['vertices']):
        raise ValueError("Complex repeats a vertex")
    for k in sorted(data.get('cells', {}), key=int):
        for cell in data['cells'][k]:
            K.add_cell(cell)
    return K


def _ambient_field(data):
    ambient = data['ambient']
    # Complexes written by SimplicialComplex.as_dict carry a bare norm dict.
    if 'tag' in ambient:
        return {'dim': ambient['dim'], 'norm': {'tag': ambient['tag'], 'params': ambient.get('params')}}
    return ambient


def chain_to_dict(chain):
    return {'k': chain.k, 'coefficients': [int(round(c)) if float(c).is_integer() else float(c)
                                           for c in chain.coefficients]}


def chain_from_dict(data, K=None):
    chain = ChainVector(int(data['k']), np.asarray(data['coefficients'], dtype=float))
    if K is not None and len(chain) != K.count(chain.k):
        raise ValueError("Chain has %d coefficients, complex has %d %d-cells"
                         % (len(chain), K.count(chain.k), chain.k))
    return chain


def read_off(text):
    """
    Parse the vertex and triangle blocks of an OFF file.

    Returns:
        (tuple) (vertices, triangles) arrays.
    """
    lines = [line.split('#', 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines or not lines[0].startswith('OFF'):
        raise ValueError("Missing OFF header")
    header = lines[0][3:].split() or lines.pop(1).split()
    n_vertices, n_faces = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) < n_vertices + n_faces:
        raise ValueError("OFF file is truncated")
    vertices = np.array([[float(x) for x in line.split()[:3]] for line in body[:n_vertices]])
    triangles = []
    for line in body[n_vertices:n_vertices + n_faces]:
        face = [int(x) for x in line.split()]
        if face[0] != 3:
            raise ValueError("Only triangular faces are supported, got %d vertices" % face[0])
        triangles.append(face[1:4])
    return vertices, np.array(triangles, dtype=int).reshape(-1, 3)


def write_off(vertices, triangles):
    vertices = np.asarray(vertices, dtype=float)
    if vertices.shape[1] == 2:
        vertices = np.column_stack([vertices, np.zeros(len(vertices))])
    out = ['OFF', '%d %d 0' % (len(vertices), len(triangles))]
    out.extend(' '.join(repr(float(x)) for x in v) for v in vertices)
    out.extend('3 %d %d %d' % tuple(t) for t in triangles)
    return '\n'.join(out) + '\n'


def write_csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buffer.getvalue()


def write_svg(T, size=400, margin=20):
    """
    SVG 1.1 drawing of a planar 0-, 1- or 2-current. Stroke width grows
    with |multiplicity|; negative multiplicities are drawn in red.
    """
    if T.ambient.dim != 2:
        raise ValueError("Only planar currents can be drawn")
    points = T.vertices() if not T.is_zero else np.zeros((1, 2))
    lower, upper = points.min(axis=0), points.max(axis=0)
    scale = (size - 2 * margin) / max(float(np.max(upper - lower)), 1e-12)

    def xy(p):
        return margin + (p[0] - lower[0]) * scale, size - margin - (p[1] - lower[1]) * scale

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%d" height="%d" viewBox="0 0 %d %d">'
        % (size, size, size, size),
    ]
    for s, multiplicity in T:
        m = s.orientation * multiplicity
        color = '#000000' if m > 0 else '#c00000'
        width = 1.0 + abs(m)
        coords = [xy(p) for p in s.vertices]
        if T.k == 0:
            lines.append('  <circle cx="%.3f" cy="%.3f" r="%.3f" fill="%s" />' % (coords[0] + (width + 1, color)))
        elif T.k == 1:
            lines.append('  <line x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" stroke="%s" stroke-width="%.1f" />'
                         % (coords[0] + coords[1] + (color, width)))
        else:
            path = ' '.join('%.3f,%.3f' % c for c in coords)
            lines.append('  <polygon points="%s" fill="%s" fill-opacity="%.2f" stroke="%s" stroke-width="0.5" />'
                         % (path, color, min(1.0, 0.2 * abs(m)), color))
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def write_text(path, text):
    with open(path, 'w') as f:
        f.write(text)
    logger.debug("Wrote %s", path)
    return path

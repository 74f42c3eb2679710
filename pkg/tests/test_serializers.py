# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import json
import os
import shutil
import tempfile
from unittest import TestCase

import numpy as np

from metric_currents.current import PolyhedralCurrent, boundary
from metric_currents.flatnorm import ChainVector, grid_complex
from metric_currents.mesh import grid_mesh
from metric_currents.seminorm import AmbientNorm
from metric_currents.serializers import (
    chain_from_dict, chain_to_dict, complex_from_dict, complex_to_dict, current_from_dict, current_to_dict,
    dump_current, dumps, load_current, read_off, write_csv, write_off, write_svg, write_text,
)

from tests.utils import assert_currents_equal, segment, unit_square

OFF_SQUARE = """OFF
# unit square
4 2 0
0 0 0
1 0 0
1 1 0
0 1 0
3 0 1 2
3 0 2 3
"""


class CurrentSerializationTestCase(TestCase):
    def test_round_trip(self):
        for T in (unit_square(), segment([0, 0], [2, 1], multiplicity=-2, ambient=AmbientNorm.max_norm(2))):
            assert_currents_equal(self, load_current(dump_current(T)), T)
            self.assertEqual(load_current(dump_current(T)).ambient, T.ambient)

    def test_bit_stable(self):
        self.assertEqual(dump_current(unit_square()), dump_current(unit_square()))
        self.assertEqual(dumps({'b': 1, 'a': 2}), '{\n  "a": 2,\n  "b": 1\n}')

    def test_layout(self):
        data = current_to_dict(segment([0, 0], [1, 0], multiplicity=3))
        self.assertEqual(data['ambient'], {'dim': 2, 'norm': {'tag': 'euclidean', 'params': {}}})
        self.assertEqual(data['cells'], [{'vertices': [[0.0, 0.0], [1.0, 0.0]], 'multiplicity': 3}])

    def test_default_multiplicity(self):
        T = current_from_dict({'ambient': {'dim': 2}, 'k': 1, 'cells': [{'vertices': [[0, 0], [1, 0]]}]})
        self.assertEqual([m for _, m in T], [1])

    def test_missing_field(self):
        with self.assertRaises(ValueError):
            current_from_dict({'ambient': {'dim': 2}, 'cells': []})

    def test_wrong_shape(self):
        with self.assertRaises(ValueError):
            current_from_dict({'ambient': {'dim': 2}, 'k': 2, 'cells': [{'vertices': [[0, 0], [1, 0]]}]})

    def test_malformed_ambient(self):
        with self.assertRaises(ValueError):
            current_from_dict({'ambient': {'norm': {'tag': 'max'}}, 'k': 0, 'cells': []})


class ComplexSerializationTestCase(TestCase):
    def test_round_trip(self):
        K = grid_complex(2)
        copy = complex_from_dict(json.loads(dumps(complex_to_dict(K))))
        self.assertEqual([copy.count(k) for k in range(3)], [K.count(k) for k in range(3)])
        self.assertEqual(copy.chain(boundary(grid_current(copy))).coefficients.tolist(),
                         K.chain(boundary(grid_current(K))).coefficients.tolist())
        self.assertEqual(copy.ambient, K.ambient)

    def test_repeated_vertex(self):
        data = {'ambient': {'tag': 'euclidean', 'dim': 2, 'params': {}}, 'vertices': [[0, 0], [0, 0]]}
        with self.assertRaises(ValueError):
            complex_from_dict(data)

    def test_chain(self):
        data = chain_to_dict(ChainVector(1, [1.0, 0.0, -2.0, 0.5]))
        self.assertEqual(data, {'k': 1, 'coefficients': [1, 0, -2, 0.5]})
        self.assertEqual(chain_from_dict(data).coefficients.tolist(), [1.0, 0.0, -2.0, 0.5])

    def test_chain_length(self):
        with self.assertRaises(ValueError):
            chain_from_dict({'k': 1, 'coefficients': [1, 2]}, grid_complex(1))


def grid_current(K):
    cells = [(K.simplex(2, i), 1) for i in range(K.count(2))]
    return PolyhedralCurrent(K.ambient, 2, cells)


class OffTestCase(TestCase):
    def test_read(self):
        vertices, triangles = read_off(OFF_SQUARE)
        self.assertEqual(vertices.shape, (4, 3))
        self.assertEqual(triangles.tolist(), [[0, 1, 2], [0, 2, 3]])

    def test_single_line_header(self):
        vertices, triangles = read_off("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        self.assertEqual((len(vertices), len(triangles)), (3, 1))

    def test_write_then_read(self):
        points, triangles = grid_mesh(2)
        vertices, read = read_off(write_off(points, triangles))
        np.testing.assert_array_equal(vertices[:, :2], points)
        np.testing.assert_array_equal(vertices[:, 2], np.zeros(len(points)))
        self.assertEqual(read.tolist(), triangles.tolist())

    def test_quads_rejected(self):
        with self.assertRaises(ValueError):
            read_off("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")

    def test_truncated(self):
        with self.assertRaises(ValueError):
            read_off("OFF\n4 2 0\n0 0 0\n")

    def test_header(self):
        with self.assertRaises(ValueError):
            read_off("PLY\n")


class TextOutputTestCase(TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_csv(self):
        self.assertEqual(write_csv(['name', 'value'], [['a', 0.5], ['b', np.float64(2.0)]]),
                         'name,value\na,0.5\nb,2.0\n')

    def test_svg(self):
        T = segment([0, 0], [1, 0]) + segment([0, 1], [1, 1], multiplicity=-1)
        svg = write_svg(T)
        self.assertTrue(svg.startswith('<?xml'))
        self.assertEqual(svg.count('<line'), 2)
        self.assertIn('#c00000', svg)

    def test_svg_surface(self):
        svg = write_svg(unit_square())
        self.assertEqual(svg.count('<polygon'), 2)

    def test_svg_planar_only(self):
        with self.assertRaises(ValueError):
            write_svg(segment([0, 0, 0], [1, 0, 0]))

    def test_write_text(self):
        path = write_text(os.path.join(self.directory, 'out.json'), '{}\n')
        with open(path) as f:
            self.assertEqual(f.read(), '{}\n')

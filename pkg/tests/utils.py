# -*- coding: utf-8 -*-
from __future__ import unicode_literals

import numpy as np

from metric_currents.current import PolyhedralCurrent, curve_current, square_current
from metric_currents.geometry import Simplex
from metric_currents.seminorm import AmbientNorm, Seminorm


def rng(seed=0):
    return np.random.default_rng(seed)


def triangle(points=((0, 0), (1, 0), (0, 1)), orientation=1):
    return Simplex(points, orientation)


def plane(kind='euclidean'):
    """
    Normed plane of the given kind.
    """
    return AmbientNorm(kind, 2)


def identity_seminorm(kind, k):
    return Seminorm(np.eye(k), AmbientNorm(kind, k))


def unit_square(ambient=None):
    return square_current(1.0, ambient=ambient)


def unit_circle(m=64, ambient=None):
    """
    Closed regular m-gon inscribed in the unit circle, counterclockwise.
    """
    angles = 2.0 * np.pi * np.arange(m) / m
    return curve_current(np.column_stack([np.cos(angles), np.sin(angles)]), closed=True,
                         ambient=ambient)


def segment(a, b, multiplicity=1, ambient=None):
    ambient = ambient or AmbientNorm.euclidean(len(a))
    return PolyhedralCurrent(ambient, 1, [(Simplex([a, b]), multiplicity)])


def assert_currents_equal(test, first, second):
    """
    Compare canonical cell lists with a readable failure message.
    """
    test.assertEqual(first.k, second.k)
    test.assertEqual(first.items(), second.items(),
                     "%r != %r" % (first.cells, second.cells))

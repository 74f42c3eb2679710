from collections import defaultdict

import numpy as np

from metric_currents.current import PolyhedralCurrent
from metric_currents.exceptions import GraphError
from metric_currents.geometry import Simplex, point, snap_key
from metric_currents.seminorm import AmbientNorm


class CurrentGraph(object):
    """
    Represents a 1-current as a graph: vertices as nodes and oriented
    segments with integer multiplicities as arcs.
    """
    def __init__(self, ambient=None):
        self.ambient = ambient
        self.nodes = {}
        self.edges = {}
        self.lazy_edges = defaultdict(int)

    def add_node(self, key, coords):
        coords = point(coords)
        if self.ambient is None:
            self.ambient = AmbientNorm.euclidean(len(coords))
        self.nodes[key] = coords

    def add_lazy_edge(self, tail, head, multiplicity=1):
        """
        Add arc to be resolved and merged later.
        """
        self.lazy_edges[(tail, head)] += int(multiplicity)

    def build_graph(self):
        """
        Read lazy arc list and build graph: antiparallel arcs cancel, parallel
        arcs merge, and arcs of zero multiplicity are dropped. Arcs are stored
        with positive multiplicity, reversed where needed.
        """
        merged = defaultdict(int)
        for (tail, head), multiplicity in self.lazy_edges.items():
            for node in (tail, head):
                if node not in self.nodes:
                    raise GraphError("Arc %r references nonexistent node %r" % ((tail, head), node), node)
            if tail == head:
                continue
            if tail < head:
                merged[(tail, head)] += multiplicity
            else:
                merged[(head, tail)] -= multiplicity
        self.edges = {}
        for (tail, head), multiplicity in sorted(merged.items()):
            if multiplicity > 0:
                self.edges[(tail, head)] = multiplicity
            elif multiplicity < 0:
                self.edges[(head, tail)] = -multiplicity

    def length(self, tail, head):
        return float(self.ambient(self.nodes[head] - self.nodes[tail]))

    def mass(self):
        return sum(m * self.length(tail, head) for (tail, head), m in self.edges.items())

    def excess(self):
        """
        Boundary multiplicities: incoming minus outgoing multiplicity per node.
        """
        excess = defaultdict(int)
        for (tail, head), multiplicity in self.edges.items():
            excess[head] += multiplicity
            excess[tail] -= multiplicity
        return dict((node, value) for node, value in excess.items() if value)

    def boundary_mass(self):
        return sum(abs(value) for value in self.excess().values())

    def to_current(self):
        cells = [(Simplex([self.nodes[tail], self.nodes[head]]), m) for (tail, head), m in self.edges.items()]
        return PolyhedralCurrent(self.ambient, 1, cells)

    def __repr__(self):
        return 'CurrentGraph(nodes=%d, edges=%d)' % (len(self.nodes), len(self.edges))


def build_current_graph(T):
    """
    Read the cells of a 1-current into a graph.

    Args:
        T (PolyhedralCurrent): 1-current.

    Returns:
        (CurrentGraph) Graph keyed by snapped vertex coordinates.
    """
    if T.k != 1:
        raise ValueError("Only 1-currents have a graph, got a %d-current" % T.k)
    graph = CurrentGraph(T.ambient)
    for s, multiplicity in T:
        keys = [snap_key(v) for v in s.vertices]
        for key, coords in zip(keys, s.vertices):
            if key not in graph.nodes:
                graph.add_node(key, coords)
        tail, head = keys if s.orientation > 0 else keys[::-1]
        graph.add_lazy_edge(tail, head, multiplicity)

    graph.build_graph()
    return graph


def graph_from_edges(points, edges, ambient=None):
    """
    Build a graph from a list of points and (tail index, head index[, multiplicity]) arcs.
    """
    graph = CurrentGraph(ambient)
    for i, coords in enumerate(points):
        graph.add_node(i, coords)
    for edge in edges:
        tail, head = edge[0], edge[1]
        graph.add_lazy_edge(tail, head, edge[2] if len(edge) > 2 else 1)
    graph.build_graph()
    return graph


def points_of(graph, keys):
    return np.array([graph.nodes[key] for key in keys])

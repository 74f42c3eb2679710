"""
Triangle meshes with graph shortest-path metrics, McShane extensions and
convex bodies.
"""
import logging

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import ConvexHull, Delaunay

from metric_currents import config
from metric_currents.current import PolyhedralCurrent, boundary, curve_current
from metric_currents.exceptions import NotLipschitz
from metric_currents.geometry import Simplex, snap_key
from metric_currents.seminorm import AmbientNorm

logger = logging.getLogger(__name__)


def triangle_edges(triangles):
    """
    Sorted unique undirected edges of a triangle list.
    """
    triangles = np.asarray(triangles, dtype=int).reshape(-1, 3)
    edges = np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    return np.unique(np.sort(edges, axis=1), axis=0)


def dedupe_vertices(points, triangles):
    """
    Merge vertices closer than the snapping tolerance and drop collapsed triangles.
    """
    index, keep, remap = {}, [], []
    for p in points:
        key = snap_key(p)
        if key not in index:
            index[key] = len(keep)
            keep.append(p)
        remap.append(index[key])
    remap = np.array(remap)
    triangles = remap[np.asarray(triangles, dtype=int)]
    distinct = ((triangles[:, 0] != triangles[:, 1]) & (triangles[:, 1] != triangles[:, 2])
                & (triangles[:, 0] != triangles[:, 2]))
    return np.array(keep), triangles[distinct]


class MeshMetricSpace(object):
    """
    Finite vertex set with weighted edges and the all-pairs shortest path metric.

    Attributes:
        vertices (numpy.ndarray): Vertex coordinates, for display and push-forwards.
        edges (numpy.ndarray): (e, 2) vertex index pairs.
        lengths (numpy.ndarray): Positive edge lengths.
        triangles (numpy.ndarray): Oriented triangles, possibly empty.
    """
    def __init__(self, vertices, edges, lengths=None, triangles=None, ambient=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        self.ambient = ambient or AmbientNorm.euclidean(self.vertices.shape[1])
        if lengths is None:
            lengths = self.ambient(self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]])
        self.lengths = np.asarray(lengths, dtype=float)
        if np.any(self.lengths <= 0.0):
            raise ValueError("Edge lengths must be positive")
        self.triangles = np.zeros((0, 3), dtype=int) if triangles is None else np.asarray(triangles, dtype=int)
        self._metric = None

    @classmethod
    def from_triangles(cls, vertices, triangles, ambient=None, extra_edges=None):
        """
        Mesh with the edges of its triangles, plus optional (i, j, length) shortcut edges.
        """
        vertices, triangles = np.asarray(vertices, dtype=float), np.asarray(triangles, dtype=int)
        edges = triangle_edges(triangles)
        space = cls(vertices, edges, triangles=triangles, ambient=ambient)
        if extra_edges:
            extra = np.array([(i, j) for i, j, _ in extra_edges], dtype=int)
            space.edges = np.vstack([space.edges, extra])
            space.lengths = np.concatenate([space.lengths, [length for _, _, length in extra_edges]])
        return space

    @property
    def size(self):
        return len(self.vertices)

    def adjacency(self):
        """
        Sparse length matrix keeping the shortest of parallel edges.
        """
        n = self.size
        pairs = np.sort(self.edges, axis=1)
        order = np.lexsort((self.lengths, pairs[:, 1], pairs[:, 0]))
        pairs, lengths = pairs[order], self.lengths[order]
        _, first = np.unique(pairs, axis=0, return_index=True)
        matrix = sparse.coo_matrix((lengths[first], (pairs[first, 0], pairs[first, 1])), shape=(n, n))
        return matrix.tocsr()

    def distances(self, sources=None):
        """
        Shortest path distances from `sources` (all vertices by default),
        split over GMT_THREADS workers.
        """
        adjacency = self.adjacency()
        if sources is None:
            if self._metric is None:
                chunks = np.array_split(np.arange(self.size), max(1, config.GMT_THREADS))
                rows = config.parallel_map(
                    lambda chunk: dijkstra(adjacency, directed=False, indices=chunk), [c for c in chunks if len(c)])
                self._metric = np.vstack(rows)
            return self._metric
        return dijkstra(adjacency, directed=False, indices=np.atleast_1d(sources))

    def distance(self, i, j):
        if self._metric is not None:
            return float(self._metric[i, j])
        return float(self.distances([i])[0, j])

    def nearest_vertex(self, coords):
        return int(np.argmin(np.linalg.norm(self.vertices - np.asarray(coords, dtype=float), axis=1)))

    def check_metric(self, tol=1e-12):
        """
        Symmetry, zero diagonal and triangle inequality of the graph metric.
        """
        d = self.distances()
        symmetric = bool(np.allclose(d, d.T, atol=tol))
        diagonal = bool(np.all(np.abs(np.diag(d)) <= tol))
        triangle = True
        for k in range(self.size):
            if np.any(d > d[:, k:k + 1] + d[k:k + 1, :] + tol):
                triangle = False
                break
        return {'symmetric': symmetric, 'zero_diagonal': diagonal, 'triangle_inequality': triangle}

    def current(self, ambient=None):
        """
        2-current of the oriented triangles.
        """
        ambient = ambient or self.ambient
        cells = [(Simplex(self.vertices[t]), 1) for t in self.triangles]
        return PolyhedralCurrent(ambient, 2, cells)

    def boundary_current(self, ambient=None):
        return boundary(self.current(ambient))

    def boundary_vertices(self):
        """
        Indices of vertices on edges that belong to a single triangle.
        """
        edges = np.sort(np.vstack([self.triangles[:, [0, 1]], self.triangles[:, [1, 2]],
                                   self.triangles[:, [2, 0]]]), axis=1)
        unique, counts = np.unique(edges, axis=0, return_counts=True)
        return np.unique(unique[counts == 1])

    def area(self):
        return sum(Simplex(self.vertices[t]).volume for t in self.triangles)

    def __repr__(self):
        return 'MeshMetricSpace(vertices=%d, edges=%d)' % (self.size, len(self.edges))


def check_lipschitz(values, L, distances, tol=1e-12):
    """
    Raises:
        NotLipschitz: with the first pair (i, j) where |f_i - f_j| > L d_ij.
    """
    values = np.asarray(values, dtype=float)
    excess = np.abs(values[:, None] - values[None, :]) - L * np.asarray(distances, dtype=float)
    scale = max(1.0, float(np.max(np.abs(values))) if len(values) else 1.0)
    bad = np.argwhere(excess > tol * scale)
    if len(bad):
        i, j = (int(x) for x in bad[0])
        raise NotLipschitz("Values are not %g-Lipschitz on pair (%d, %d)" % (L, i, j), pair=(i, j),
                           excess=float(excess[i, j]))


def mcshane_extend(values, L, dist_aa, dist_qa):
    """
    Extend an L-Lipschitz function from a finite set A to query points Q by
    f(x) = min over a of f(a) + L d(x, a).

    Args:
        values (array): f on A, length |A|.
        L (float): Lipschitz bound.
        dist_aa (array): |A| x |A| distances within A.
        dist_qa (array): |Q| x |A| distances from the query points to A.

    Returns:
        (numpy.ndarray) Extension at the query points.

    Raises:
        NotLipschitz: if f is not L-Lipschitz on A.
    """
    values = np.asarray(values, dtype=float)
    check_lipschitz(values, L, dist_aa)
    dist_qa = np.atleast_2d(np.asarray(dist_qa, dtype=float))
    return np.min(values[None, :] + L * dist_qa, axis=1)


class ConvexBody(object):
    """
    Convex polytope given by its vertices, listed counterclockwise in the plane.
    """
    def __init__(self, vertices):
        vertices = np.asarray(vertices, dtype=float)
        hull = ConvexHull(vertices)
        if len(hull.vertices) != len(vertices):
            raise ValueError("All vertices of a convex body must lie on its hull")
        if vertices.shape[1] == 2:
            vertices = vertices[hull.vertices]
        self.vertices = vertices
        self.hull = hull

    @classmethod
    def from_vertices(cls, vertices):
        return cls(vertices)

    @classmethod
    def square(cls, side=1.0):
        return cls([(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)])

    @classmethod
    def regular_polygon(cls, m, radius=1.0):
        angles = 2.0 * np.pi * np.arange(m) / m
        return cls(radius * np.column_stack([np.cos(angles), np.sin(angles)]))

    @classmethod
    def hexagon(cls, radius=1.0):
        return cls.regular_polygon(6, radius)

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def volume(self):
        return float(self.hull.volume)

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    def gauge(self, points):
        """
        Minkowski gauge about the vertex centroid: 1 on the boundary.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float)) - self.centroid
        normals, offsets = self.hull.equations[:, :-1], self.hull.equations[:, -1]
        offsets = -(offsets + normals.dot(self.centroid))
        return np.max(points.dot(normals.T) / offsets, axis=1)

    def contains(self, points, tol=1e-12):
        return self.gauge(points) <= 1.0 + tol

    def boundary_mesh(self, ambient=None):
        """
        Boundary (n-1)-current: the closed polygon in the plane, outward oriented
        hull triangles in space.
        """
        if self.dim == 2:
            return curve_current(self.vertices, closed=True, ambient=ambient)
        return boundary(self.triangulation(ambient))

    def triangulation(self, ambient=None):
        """
        Positively oriented n-current of the body.
        """
        ambient = ambient or AmbientNorm.euclidean(self.dim)
        cells = []
        for simplex in Delaunay(self.vertices).simplices:
            points = self.vertices[simplex]
            s = Simplex(points)
            if s.is_degenerate:
                continue
            orientation = 1 if np.linalg.det(s.edges) > 0 else -1
            cells.append((Simplex(points, orientation), 1))
        return PolyhedralCurrent(ambient, self.dim, cells)

    def refined_mesh(self, n):
        """
        Planar triangle mesh of the body: each fan triangle from the centroid
        split into n^2 congruent triangles.

        Returns:
            (tuple) (points, counterclockwise triangles).
        """
        if self.dim != 2:
            raise ValueError("Refined meshes are planar")
        center = self.centroid
        points, triangles = [], []
        for a, b in zip(self.vertices, np.roll(self.vertices, -1, axis=0)):
            index = {}
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    index[(i, j)] = len(points)
                    points.append(center + (a - center) * i / float(n) + (b - center) * j / float(n))
            for i in range(n):
                for j in range(n - i):
                    triangles.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
                    if i + j + 1 < n:
                        triangles.append((index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)]))
        points, triangles = dedupe_vertices(np.array(points), np.array(triangles))
        return points, orient_counterclockwise(points, triangles)

    def __repr__(self):
        return 'ConvexBody(vertices=%d, dim=%d)' % (len(self.vertices), self.dim)


def orient_counterclockwise(points, triangles):
    triangles = np.array(triangles, dtype=int)
    a, b, c = points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]]
    signed = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = signed < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def grid_mesh(n, lower=(0.0, 0.0), upper=(1.0, 1.0)):
    """
    Counterclockwise triangulation of a box by an n x n grid, split along rising diagonals.
    """
    xs = np.linspace(lower[0], upper[0], n + 1)
    ys = np.linspace(lower[1], upper[1], n + 1)
    points = np.array([(x, y) for y in ys for x in xs])
    triangles = []
    for j in range(n):
        for i in range(n):
            a, b = j * (n + 1) + i, j * (n + 1) + i + 1
            c, d = (j + 1) * (n + 1) + i + 1, (j + 1) * (n + 1) + i
            triangles.append((a, b, c))
            triangles.append((a, c, d))
    return points, np.array(triangles)

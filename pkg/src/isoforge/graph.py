"""Weighted geometric graphs and subset combinatorics.

A graph carries an embedding ``vertex id -> point in R^d`` and, per
undirected edge, a weight ``A > 0`` and a cost ``g >= 0``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError
from .geometry import EPS_GEOM, in_convex_hull


def edge_key(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x < y else (y, x)


@dataclass(frozen=True)
class GeometricGraph:
    dim: int
    points: Mapping[int, np.ndarray]
    weights: Mapping[tuple[int, int], float]
    costs: Mapping[tuple[int, int], float]
    adjacency: Mapping[int, tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = {int(k): np.asarray(v, dtype=float).reshape(-1) for k, v in self.points.items()}
        for k, p in pts.items():
            if len(p) != self.dim:
                raise InputError(f"vertex {k} has dimension {len(p)}, expected {self.dim}")
        adj: dict[int, list[int]] = {k: [] for k in pts}
        W: dict[tuple[int, int], float] = {}
        G: dict[tuple[int, int], float] = {}
        for (x, y), a in self.weights.items():
            x, y = int(x), int(y)
            if x == y:
                raise InputError(f"self-loop at vertex {x}")
            if x not in pts or y not in pts:
                raise InputError(f"edge ({x},{y}) references an unknown vertex")
            if not a > 0:
                raise InputError(f"edge ({x},{y}) has non-positive weight {a}")
            key = edge_key(x, y)
            if key in W:
                raise InputError(f"duplicate edge {key}")
            W[key] = float(a)
            c = float(self.costs.get((x, y), self.costs.get((y, x), 1.0)))
            if c < 0:
                raise InputError(f"edge ({x},{y}) has negative cost {c}")
            G[key] = c
            adj[x].append(y)
            adj[y].append(x)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "costs", G)
        object.__setattr__(self, "adjacency", {k: tuple(sorted(v)) for k, v in adj.items()})

    @classmethod
    def build(cls, points: Mapping[int, Iterable[float]], edges: Iterable, dim: int | None = None) -> "GeometricGraph":
        """Build from ``edges`` given as ``(x, y)``, ``(x, y, A)`` or ``(x, y, A, g)`` tuples."""
        pts = {int(k): np.asarray(v, dtype=float).reshape(-1) for k, v in points.items()}
        if dim is None:
            dim = len(next(iter(pts.values())))
        W, G = {}, {}
        for e in edges:
            x, y = int(e[0]), int(e[1])
            a = float(e[2]) if len(e) > 2 else 1.0
            c = float(e[3]) if len(e) > 3 else 1.0
            key = edge_key(x, y)
            if key in W:
                raise InputError(f"duplicate edge {key}")
            W[key] = a
            G[key] = c
        return cls(dim, pts, W, G)

    # -- accessors ---------------------------------------------------------
    @property
    def vertices(self) -> list[int]:
        return sorted(self.points)

    def point(self, x: int) -> np.ndarray:
        return self.points[x]

    def neighbors(self, x: int) -> tuple[int, ...]:
        try:
            return self.adjacency[x]
        except KeyError:
            raise InputError(f"unknown vertex id {x}") from None

    def has_edge(self, x: int, y: int) -> bool:
        return edge_key(x, y) in self.weights

    def A(self, x: int, y: int) -> float:
        return self.weights.get(edge_key(x, y), 0.0)

    def g(self, x: int, y: int) -> float:
        return self.costs[edge_key(x, y)]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.weights)

    def degree(self, x: int) -> int:
        return len(self.neighbors(x))

    # -- derived graphs ----------------------------------------------------
    def with_costs(self, costs: Mapping[tuple[int, int], float] | float) -> "GeometricGraph":
        if isinstance(costs, (int, float)):
            new = {e: float(costs) for e in self.weights}
        else:
            new = dict(self.costs)
            for (x, y), c in costs.items():
                new[edge_key(x, y)] = float(c)
        return GeometricGraph(self.dim, self.points, self.weights, new)

    def with_weights(self, weights: Mapping[tuple[int, int], float]) -> "GeometricGraph":
        new = dict(self.weights)
        for (x, y), a in weights.items():
            new[edge_key(x, y)] = float(a)
        return GeometricGraph(self.dim, self.points, new, self.costs)

    def transformed(self, matrix) -> "GeometricGraph":
        """Apply a linear map to the embedding; weights and costs are kept."""
        M = np.asarray(matrix, dtype=float)
        return GeometricGraph(self.dim, {k: M @ p for k, p in self.points.items()}, self.weights, self.costs)

    def induced(self, keep: Iterable[int]) -> "GeometricGraph":
        ks = set(keep)
        W = {e: a for e, a in self.weights.items() if e[0] in ks and e[1] in ks}
        G = {e: self.costs[e] for e in W}
        return GeometricGraph(self.dim, {k: self.points[k] for k in ks}, W, G)

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": {str(k): self.points[k].tolist() for k in self.vertices},
            "edges": [{"u": x, "v": y, "A": self.weights[(x, y)], "g": self.costs[(x, y)]} for x, y in self.edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeometricGraph":
        try:
            pts = {int(k): v for k, v in data["vertices"].items()}
            edges = [(e["u"], e["v"], e.get("A", 1.0), e.get("g", 1.0)) for e in data["edges"]]
            dim = int(data["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph JSON: {exc}") from None
        graph = cls.build(pts, edges, dim)
        isolated = [x for x in graph.vertices if graph.degree(x) == 0]
        if isolated:
            raise InputError(f"isolated vertices in graph JSON: {isolated[:5]}")
        return graph


@dataclass(frozen=True)
class SubsetView:
    omega: frozenset
    closure: frozenset
    boundary: tuple[tuple[int, int], ...]
    weighted_boundary: float
    components: tuple[frozenset, ...]

    @property
    def outer(self) -> list[int]:
        return sorted(self.closure - self.omega)

    def in_edges(self, y: int) -> list[int]:
        """Interior endpoints x of boundary edges (x, y) ending at outer vertex y."""
        return [x for x, z in self.boundary if z == y]

    @property
    def unique_in_edges(self) -> bool:
        """True iff every outer vertex has exactly one incoming boundary edge."""
        return len(self.outer) == len(self.boundary)


def subset_view(graph: GeometricGraph, omega: Iterable[int]) -> SubsetView:
    om = frozenset(int(x) for x in omega)
    if not om:
        raise InputError("omega must be nonempty")
    unknown = sorted(x for x in om if x not in graph.points)
    if unknown:
        raise InputError(f"unknown vertex ids in omega: {unknown[:5]}")
    closure = set(om)
    boundary = []
    for x in sorted(om):
        for y in graph.neighbors(x):
            if y not in om:
                closure.add(y)
                boundary.append((x, y))
    boundary.sort()
    wb = float(sum(graph.g(x, y) for x, y in boundary))
    return SubsetView(om, frozenset(closure), tuple(boundary), wb, connected_components(graph, om))


def connected_components(graph: GeometricGraph, omega: Iterable[int]) -> tuple[frozenset, ...]:
    rest = set(omega)
    comps = []
    while rest:
        start = min(rest)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in graph.neighbors(x):
                if y in rest and y not in seen:
                    seen.add(y)
                    queue.append(y)
        rest -= seen
        comps.append(frozenset(seen))
    return tuple(comps)


def is_connected(graph: GeometricGraph, omega: Iterable[int]) -> bool:
    return len(connected_components(graph, omega)) == 1


@dataclass(frozen=True)
class NeighborFan:
    center: int
    neighbors: tuple[int, ...]
    vectors: tuple[np.ndarray, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.vectors)


def neighbor_fan(graph: GeometricGraph, x: int) -> NeighborFan:
    nbrs = graph.neighbors(x)
    if not nbrs:
        raise InputError(f"vertex {x} is isolated")
    p = graph.point(x)
    vecs = tuple((graph.point(y) - p) * graph.A(x, y) ** 2 for y in nbrs)
    return NeighborFan(x, nbrs, vecs)


def check_local_convexity(graph: GeometricGraph, vertices: Iterable[int] | None = None) -> list[int]:
    """Vertices where the neighborhood condition fails.

    A vertex passes when its edge vectors span R^d and the convex hull of its
    neighbors contains no graph vertex other than itself and those neighbors.
    Only ``vertices`` are tested when given; the whole graph is still searched.
    """
    verts = graph.vertices
    P = np.array([graph.point(v) for v in verts])
    bad = []
    todo = verts if vertices is None else sorted(set(vertices))
    for x in todo:
        nbrs = graph.neighbors(x)
        if not nbrs:
            bad.append(x)
            continue
        Q = np.array([graph.point(y) for y in nbrs])
        if np.linalg.matrix_rank(Q - graph.point(x), tol=1e-9) < graph.dim:
            bad.append(x)
            continue
        center = Q.mean(axis=0)
        radius = float(np.max(np.linalg.norm(Q - center, axis=1)))
        allowed = set(nbrs) | {x}
        near = np.nonzero(np.linalg.norm(P - center, axis=1) <= radius * (1 + 1e-9) + 1e-12)[0]
        for i in near:
            z = verts[i]
            if z in allowed:
                continue
            if in_convex_hull(Q, P[i]):
                bad.append(x)
                break
    return bad


def check_linear_precision(graph: GeometricGraph) -> dict[int, np.ndarray]:
    """Residual of the Laplacian applied to the identity map at each vertex."""
    out = {}
    for x in graph.vertices:
        r = np.zeros(graph.dim)
        p = graph.point(x)
        for y in graph.neighbors(x):
            r += graph.A(x, y) ** 2 * (graph.point(y) - p)
        out[x] = r
    return out


def has_linear_precision(graph: GeometricGraph, x: int, tol: float = EPS_GEOM) -> bool:
    fan = neighbor_fan(graph, x)
    scale = max(1.0, sum(float(np.linalg.norm(v)) for v in fan.vectors))
    return bool(np.linalg.norm(np.sum(fan.vectors, axis=0)) <= tol * scale)

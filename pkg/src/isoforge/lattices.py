"""Periodic lattice examples with their reciprocal tessellations.

Most examples are built from a hyperplane arrangement: the tessellation K is
the complement of the planes ``<v_k, x> = c`` (c integer), every cell of K is a
graph vertex, and crossing a plane of family k moves the graph vertex by
``ell_k`` along the unit normal of that family.  That placement makes every
graph edge orthogonal to the facet it crosses, for any choice of the family
lengths ``ell_k``.

Windows are graph-distance balls around a seed vertex.  Vertices up to the
window radius form the core; one extra ring is materialized so that closures
of core subsets are complete.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, InvariantViolation
from .geometry import EPS_GEOM, Halfspace, Polytope, intersect_halfspaces, minkowski_constant
from .graph import GeometricGraph, edge_key, neighbor_fan, subset_view

SQRT3 = math.sqrt(3.0)


class WindowError(InputError):
    """A subset or enumeration reaches beyond the materialized window."""


@dataclass(frozen=True)
class LatticeBundle:
    kind: str
    graph: GeometricGraph
    dual_cells: Mapping[int, Polytope]
    facet_map: Mapping[tuple[int, int], float]
    window: int
    core: frozenset
    seed: int
    periods: np.ndarray
    labels: Mapping[int, tuple]
    params: dict = field(default_factory=dict)
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for x, p in self.graph.points.items():
            self._index[_round_key(p)] = x

    @property
    def dim(self) -> int:
        return self.graph.dim

    def locate(self, point) -> int | None:
        return self._index.get(_round_key(np.asarray(point, dtype=float)))

    def require_inside(self, omega: Iterable[int]) -> None:
        outside = sorted(set(omega) - self.core)
        if outside:
            raise WindowError(
                f"{len(outside)} vertices lie outside the window core (radius {self.window}); "
                f"increase --window"
            )

    def orbit_key(self, x: int) -> tuple:
        return self.orbit_key_of_point(self.graph.point(x))

    def orbit_key_of_point(self, point) -> tuple:
        """Fractional coordinates of ``point`` modulo the periods, rounded to 1e-6."""
        p = np.asarray(point, dtype=float)
        frac = np.linalg.solve(self.periods.T, p)
        frac = frac - np.floor(frac + 1e-9)
        return tuple(int(round(f * 1e6)) % 1000000 for f in frac)

    def orbit_reps(self) -> list[int]:
        """One core vertex per translation orbit, the one closest to the seed."""
        best: dict[tuple, tuple[float, tuple, int]] = {}
        s = self.graph.point(self.seed)
        for x in sorted(self.core):
            key = self.orbit_key(x)
            p = self.graph.point(x)
            cand = (round(float(np.linalg.norm(p - s)), 9), _round_key(p), x)
            if key not in best or cand < best[key]:
                best[key] = cand
        return sorted(v[2] for v in best.values())

    def translate_set(self, omega: Iterable[int], shift) -> frozenset | None:
        out = []
        t = np.asarray(shift, dtype=float)
        for x in omega:
            y = self.locate(self.graph.point(x) + t)
            if y is None:
                return None
            out.append(y)
        return frozenset(out)

    def to_dict(self) -> dict:
        data = self.graph.to_dict()
        data["kind"] = self.kind
        data["window"] = self.window
        data["cells"] = {str(x): self.dual_cells[x].to_dict() for x in sorted(self.dual_cells)}
        data["facets"] = [{"u": x, "v": y, "area": a} for (x, y), a in sorted(self.facet_map.items())]
        return data


def _round_key(p: np.ndarray) -> tuple:
    return tuple(int(round(float(c) * 1e7)) for c in p)


# ---------------------------------------------------------------------------
# arrangement construction


@dataclass(frozen=True)
class PlaneFamily:
    normal: np.ndarray  # planes <normal, x> = c for integer c
    length: float  # graph edge length across these planes
    A: float
    g: float


def _cell_polytope(families: Sequence[PlaneFamily], idx: tuple[int, ...]) -> Polytope:
    d = len(families[0].normal)
    hs = []
    for fam, n in zip(families, idx):
        hs.append(Halfspace(fam.normal, n + 1))
        hs.append(Halfspace(-fam.normal, -n))
    return intersect_halfspaces(hs, d)


def _arrangement_bundle(
    kind: str,
    families: Sequence[PlaneFamily],
    window: int,
    seed_point,
    cell_periods,
    params: dict,
) -> LatticeBundle:
    if window < 1:
        raise InputError("window must be >= 1")
    units = [f.normal / np.linalg.norm(f.normal) for f in families]
    seed_point = np.asarray(seed_point, dtype=float)
    seed_idx = tuple(int(math.floor(float(f.normal @ seed_point))) for f in families)
    seed_cell = _cell_polytope(families, seed_idx)
    if not seed_cell.volume > 0:
        raise InvariantViolation("seed point does not lie in the interior of a cell")
    origin = seed_cell.centroid()

    def position(idx):
        p = origin.copy()
        for k, (n, n0) in enumerate(zip(idx, seed_idx)):
            p = p + families[k].length * units[k] * (n - n0)
        return p

    depth = {seed_idx: 0}
    cells = {seed_idx: seed_cell}
    order = [seed_idx]
    adjacency: dict[tuple, list[tuple[tuple, int]]] = {}
    queue = deque([seed_idx])
    while queue:
        idx = queue.popleft()
        cell = cells[idx]
        nbrs = []
        for f in cell.facets:
            if f.area <= EPS_GEOM:
                continue
            for k, u in enumerate(units):
                if np.linalg.norm(f.normal - u) <= 1e-9:
                    step = 1
                elif np.linalg.norm(f.normal + u) <= 1e-9:
                    step = -1
                else:
                    continue
                j = list(idx)
                j[k] += step
                nbrs.append((tuple(j), k))
                break
            else:
                raise InvariantViolation(f"cell facet with normal {f.normal} matches no plane family")
        adjacency[idx] = nbrs
        if depth[idx] > window:
            continue
        for j, _ in nbrs:
            if j not in depth:
                depth[j] = depth[idx] + 1
                c = _cell_polytope(families, j)
                if not c.volume > 0:
                    raise InvariantViolation(f"neighbor cell {j} is degenerate")
                cells[j] = c
                order.append(j)
                queue.append(j)

    order.sort()
    ids = {idx: i for i, idx in enumerate(order)}
    points = {ids[idx]: position(idx) for idx in order}
    W, G = {}, {}
    for idx in order:
        for j, k in adjacency.get(idx, []):
            if j in ids:
                key = edge_key(ids[idx], ids[j])
                W[key] = families[k].A
                G[key] = families[k].g
    graph = GeometricGraph(len(origin), points, W, G)
    dual = {ids[idx]: cells[idx] for idx in order}
    core = frozenset(ids[idx] for idx in order if depth[idx] <= window)
    facet_map = _facet_map(graph, dual)
    P = np.asarray(cell_periods, dtype=float)
    gperiods = np.array([sum(families[k].length * units[k] * float(families[k].normal @ t) for k in range(len(families))) for t in P])
    labels = {ids[idx]: idx for idx in order}
    return LatticeBundle(kind, graph, dual, facet_map, window, core, ids[seed_idx], gperiods, labels, dict(params))


def _facet_map(graph: GeometricGraph, cells: Mapping[int, Polytope]) -> dict[tuple[int, int], float]:
    out = {}
    for x, y in graph.edges():
        out[(x, y)] = cells[x].facet_area(graph.point(y) - graph.point(x))
    return out


# ---------------------------------------------------------------------------
# concrete lattices


def _tri_line_normals() -> list[np.ndarray]:
    # the three line families of the unit triangular lattice, scaled so lines sit at integers
    return [
        np.array([0.0, 2.0 / SQRT3]),
        np.array([1.0, -1.0 / SQRT3]),
        np.array([1.0, 1.0 / SQRT3]),
    ]


def honeycomb(window: int = 4, matrix=None) -> LatticeBundle:
    """Honeycomb graph (barycenters of the unit triangles), optionally deformed by ``matrix``.

    For a deformation M the graph is mapped by M and the reciprocal tessellation by
    M^{-T}; weights are chosen so that both facet ratios stay constant and equal
    to their undeformed values.
    """
    M = np.eye(2) if matrix is None else np.asarray(matrix, dtype=float)
    if M.shape != (2, 2) or not np.all(np.isfinite(M)):
        raise InputError("affine matrix must be a finite 2x2 matrix")
    if abs(np.linalg.det(M)) <= 1e-12 * max(1.0, float(np.max(np.abs(M))) ** 2):
        raise InputError("affine matrix is singular")
    ell0 = SQRT3 / 3.0
    MinvT = np.linalg.inv(M).T
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    fams = []
    for v in _tri_line_normals():
        u = v / np.linalg.norm(v)
        ell = ell0 * float(np.linalg.norm(M @ v) / np.linalg.norm(v))
        facet = float(np.linalg.norm(MinvT @ (J @ u)))
        A = math.sqrt(facet / ell / SQRT3)
        g = math.sqrt(facet * ell * SQRT3)
        fams.append(PlaneFamily(M @ v, ell, A, g))
    lattice = np.array([[1.0, 0.0], [0.5, SQRT3 / 2]])
    cell_periods = (MinvT @ lattice.T).T
    seed = MinvT @ np.array([0.5, 0.1])
    params = {"matrix": M.tolist()}
    return _arrangement_bundle("honeycomb", fams, window, seed, cell_periods, params)


def bcc(window: int = 5) -> LatticeBundle:
    """Reciprocal graph of the BCC Delone tessellation by disphenoids.

    The graph is the Voronoi 1-skeleton of the BCC lattice scaled by 2, so that
    edge vectors are the permutations of (+-1, +-1, 0).
    """
    fams = []
    for v in ([1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]):
        fams.append(PlaneFamily(np.array(v, dtype=float) / 2.0, math.sqrt(2.0), 1.0, 1.0))
    cell_periods = [[2, 0, 0], [0, 2, 0], [1, 1, 1]]
    return _arrangement_bundle("bcc", fams, window, [0.11, 0.23, 0.05], cell_periods, {})


def fcc_subdivided(window: int = 3, ell1: float = 1.0) -> LatticeBundle:
    """FCC tessellation with octahedra cut into four tetrahedra by the planes x1, x2 in Z.

    Type-2 edges (across the cutting planes) have A = g = length = 1; type-1
    edges have length ``ell1`` with ell1 * A1^2 = g1^2 / ell1 = sqrt(3)/2.
    """
    if not ell1 > 0:
        raise InputError("ell1 must be positive")
    A1 = math.sqrt(SQRT3 / 2.0 / ell1)
    g1 = math.sqrt(SQRT3 / 2.0 * ell1)
    fams = [
        PlaneFamily(np.array([1.0, 0.0, 0.0]), 1.0, 1.0, 1.0),
        PlaneFamily(np.array([0.0, 1.0, 0.0]), 1.0, 1.0, 1.0),
    ]
    for s2 in (1, -1):
        for s3 in (1, -1):
            fams.append(PlaneFamily(np.array([0.5, 0.5 * s2, 0.5 * s3]), ell1, A1, g1))
    cell_periods = [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    return _arrangement_bundle("fcc_subdivided", fams, window, [0.31, 0.12, 0.07], cell_periods, {"ell1": ell1})


def product_grid(lambdas: Sequence[float] = (1.0, 1.0), window: int = 4) -> LatticeBundle:
    """Rectangular grid with spacings ``lambdas``; weights 1/lambda_i, costs 1."""
    lam = [float(x) for x in lambdas]
    if not lam or any(not x > 0 for x in lam):
        raise InputError("grid spacings must be positive")
    d = len(lam)
    fams = [PlaneFamily(np.eye(d)[i] / lam[i], lam[i], 1.0 / lam[i], 1.0) for i in range(d)]
    seed = np.array([0.5 * x for x in lam])
    return _arrangement_bundle("product_grid", fams, window, seed, np.diag(lam), {"lambdas": lam})


_TRI_DIRS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


def _hexnorm(m: int, n: int) -> int:
    return max(abs(m), abs(n), abs(m + n))


def triangular(window: int = 4) -> LatticeBundle:
    """Triangular lattice graph, unit edges, A = g = 1, hexagonal Voronoi dual cells."""
    if window < 1:
        raise InputError("window must be >= 1")
    a = np.array([1.0, 0.0])
    b = np.array([0.5, SQRT3 / 2])
    R = window + 1
    labels = sorted(
        (m, n) for m in range(-R, R + 1) for n in range(-R, R + 1) if _hexnorm(m, n) <= R
    )
    ids = {lab: i for i, lab in enumerate(labels)}
    points = {ids[(m, n)]: m * a + n * b for (m, n) in labels}
    W = {}
    for (m, n) in labels:
        for dm, dn in _TRI_DIRS:
            j = (m + dm, n + dn)
            if j in ids:
                W[edge_key(ids[(m, n)], ids[j])] = 1.0
    graph = GeometricGraph(2, points, W, {e: 1.0 for e in W})
    units = [(dm * a + dn * b) for dm, dn in _TRI_DIRS]
    cells = {}
    for lab in labels:
        x = points[ids[lab]]
        cells[ids[lab]] = intersect_halfspaces([Halfspace(u, 0.5 + float(u @ x)) for u in units], 2)
    core = frozenset(ids[lab] for lab in labels if _hexnorm(*lab) <= window)
    return LatticeBundle(
        "triangular",
        graph,
        cells,
        _facet_map(graph, cells),
        window,
        core,
        ids[(0, 0)],
        np.array([a, b]),
        {ids[lab]: lab for lab in labels},
        {},
    )


def generate(kind: str, window: int = 4, **params) -> LatticeBundle:
    """Dispatch by lattice name: product_grid, honeycomb, triangular, bcc, fcc_subdivided."""
    if kind == "product_grid":
        return product_grid(params.get("lambdas", (1.0, 1.0)), window)
    if kind == "honeycomb":
        return honeycomb(window, params.get("matrix"))
    if kind == "triangular":
        return triangular(window)
    if kind == "bcc":
        return bcc(window)
    if kind == "fcc_subdivided":
        return fcc_subdivided(window, params.get("ell1", 1.0))
    raise InputError(f"unknown lattice kind {kind!r}")


# ---------------------------------------------------------------------------
# structural checks


@dataclass(frozen=True)
class RatioReport:
    ratio_weight: tuple[float, float]  # min/max of area / (|x-y| A^2)
    ratio_cost: tuple[float, float]  # min/max of area |x-y| / g^2

    @property
    def weight_constant(self) -> float:
        return 0.5 * (self.ratio_weight[0] + self.ratio_weight[1])

    @property
    def cost_constant(self) -> float:
        return 0.5 * (self.ratio_cost[0] + self.ratio_cost[1])

    def constant(self, rtol: float = 1e-9) -> bool:
        return _rel_spread(self.ratio_weight) <= rtol and _rel_spread(self.ratio_cost) <= rtol


def _rel_spread(pair: tuple[float, float]) -> float:
    lo, hi = pair
    if hi <= 0:
        return math.inf
    return (hi - lo) / hi


def core_edges(bundle: LatticeBundle) -> list[tuple[int, int]]:
    return [(x, y) for x, y in bundle.graph.edges() if x in bundle.core or y in bundle.core]


def facet_ratios(bundle: LatticeBundle) -> RatioReport:
    g = bundle.graph
    r1, r2 = [], []
    for x, y in core_edges(bundle):
        area = bundle.facet_map[(x, y)]
        length = float(np.linalg.norm(g.point(y) - g.point(x)))
        r1.append(area / (length * g.A(x, y) ** 2))
        r2.append(area * length / g.g(x, y) ** 2 if g.g(x, y) > 0 else math.inf)
    return RatioReport((min(r1), max(r1)), (min(r2), max(r2)))


def reciprocity_defects(bundle: LatticeBundle, tol: float = EPS_GEOM) -> list[tuple[int, int, str]]:
    """Edges whose dual facet is missing, tilted, unmatched, or not in bijection."""
    g = bundle.graph
    bad = []
    for x, y in core_edges(bundle):
        e = g.point(y) - g.point(x)
        cx, cy = bundle.dual_cells[x], bundle.dual_cells[y]
        ax, ay = cx.facet_area(e), cy.facet_area(-e)
        if not ax > tol:
            bad.append((x, y, "no facet of the first cell is orthogonal to the edge"))
            continue
        if abs(ax - ay) > tol * max(1.0, ax):
            bad.append((x, y, "the two cells disagree on the shared facet area"))
            continue
        u = e / np.linalg.norm(e)
        hx = max(float(u @ v) for v in cx.vertices)
        hy = min(float(u @ v) for v in cy.vertices)
        if abs(hx - hy) > tol * (1.0 + abs(hx)):
            bad.append((x, y, "the two cells do not meet along the facet plane"))
    for x in sorted(bundle.core):
        nf = sum(1 for f in bundle.dual_cells[x].facets if f.area > tol)
        if nf != g.degree(x):
            bad.append((x, x, f"cell has {nf} facets but the vertex has degree {g.degree(x)}"))
    return bad


def cell_volume_range(bundle: LatticeBundle) -> tuple[float, float]:
    vols = [bundle.dual_cells[x].volume for x in bundle.core]
    return min(vols), max(vols)


def simplicial_defects(bundle: LatticeBundle) -> list[int]:
    d = bundle.dim
    return sorted(x for x in bundle.core if len(bundle.dual_cells[x].vertices) != d + 1)


def orbit_minkowski(bundle: LatticeBundle) -> dict[int, float]:
    """Minkowski constant of the neighbor fan at each orbit representative."""
    out = {}
    for x in bundle.orbit_reps():
        out[x] = minkowski_constant(neighbor_fan(bundle.graph, x).vectors).constant
    return out


def _weight_constant(bundle: LatticeBundle) -> float:
    rep = facet_ratios(bundle)
    if _rel_spread(rep.ratio_weight) > 1e-9:
        raise InputError(
            f"facet ratio area/(|x-y|A^2) is not constant: range {rep.ratio_weight}"
        )
    return rep.weight_constant


def _cost_constant(bundle: LatticeBundle) -> float:
    rep = facet_ratios(bundle)
    if _rel_spread(rep.ratio_cost) > 1e-9:
        raise InputError(f"facet ratio area|x-y|/g^2 is not constant: range {rep.ratio_cost}")
    return rep.cost_constant


# ---------------------------------------------------------------------------
# combinators


def product(b1: LatticeBundle, b2: LatticeBundle, check: bool = True) -> LatticeBundle:
    """Orthogonal product of two bundles.

    Edges of the first factor keep their weights and costs; edges of the second
    factor are rescaled so that both facet ratios stay constant on the product.
    """
    if check:
        from .transport import verify_sufficiency

        for name, b in (("first", b1), ("second", b2)):
            rep = verify_sufficiency(b)
            failing = [k for k, ok in rep.checks.items() if not ok]
            if failing:
                raise InputError(f"{name} factor fails the sufficiency check: {', '.join(failing)}")
    v1 = b1.dual_cells[b1.seed].volume
    v2 = b2.dual_cells[b2.seed].volume
    k1a, k2a = _weight_constant(b1), _weight_constant(b2)
    k1g, k2g = _cost_constant(b1), _cost_constant(b2)
    sA = math.sqrt(k2a * v1 / (k1a * v2))
    sg = math.sqrt(k2g * v1 / (k1g * v2))
    G1, G2 = b1.graph, b2.graph
    V1, V2 = G1.vertices, G2.vertices
    ids = {}
    points = {}
    for x1 in V1:
        for x2 in V2:
            i = len(ids)
            ids[(x1, x2)] = i
            points[i] = np.concatenate([G1.point(x1), G2.point(x2)])
    W, G = {}, {}
    for (x1, y1) in G1.edges():
        for z in V2:
            key = edge_key(ids[(x1, z)], ids[(y1, z)])
            W[key] = G1.A(x1, y1)
            G[key] = G1.g(x1, y1)
    for (x2, y2) in G2.edges():
        for z in V1:
            key = edge_key(ids[(z, x2)], ids[(z, y2)])
            W[key] = sA * G2.A(x2, y2)
            G[key] = sg * G2.g(x2, y2)
    d1, d2 = G1.dim, G2.dim
    graph = GeometricGraph(d1 + d2, points, W, G)
    cells = {}
    for (x1, x2), i in ids.items():
        hs = []
        for h in b1.dual_cells[x1].halfspaces:
            hs.append(Halfspace(np.concatenate([h.normal, np.zeros(d2)]), h.offset))
        for h in b2.dual_cells[x2].halfspaces:
            hs.append(Halfspace(np.concatenate([np.zeros(d1), h.normal]), h.offset))
        cells[i] = _LazyProductCell(hs, d1 + d2)
    cells = _LazyCells(cells)
    core = frozenset(ids[(x1, x2)] for x1 in b1.core for x2 in b2.core)
    periods = np.zeros((d1 + d2, d1 + d2))
    periods[:d1, :d1] = b1.periods
    periods[d1:, d1:] = b2.periods
    facet_map = _LazyFacets(graph, cells)
    labels = {i: (b1.labels[x1], b2.labels[x2]) for (x1, x2), i in ids.items()}
    params = {"factors": [b1.kind, b2.kind], "weight_scale": sA, "cost_scale": sg}
    return LatticeBundle(
        f"product({b1.kind},{b2.kind})",
        graph,
        cells,
        facet_map,
        min(b1.window, b2.window),
        core,
        ids[(b1.seed, b2.seed)],
        periods,
        labels,
        params,
    )


class _LazyProductCell:
    def __init__(self, halfspaces, dim):
        self.halfspaces = halfspaces
        self.dim = dim


class _LazyCells(Mapping):
    """Computes product cells on first access (4D cells are comparatively costly)."""

    def __init__(self, raw: dict):
        self._raw = raw
        self._done: dict[int, Polytope] = {}

    def __getitem__(self, key):
        if key not in self._done:
            spec = self._raw[key]
            self._done[key] = intersect_halfspaces(spec.halfspaces, spec.dim)
        return self._done[key]

    def __iter__(self):
        return iter(self._raw)

    def __len__(self):
        return len(self._raw)


class _LazyFacets(Mapping):
    def __init__(self, graph: GeometricGraph, cells: Mapping[int, Polytope]):
        self._graph = graph
        self._cells = cells
        self._done: dict[tuple[int, int], float] = {}

    def __getitem__(self, key):
        x, y = edge_key(*key)
        if (x, y) not in self._done:
            if not self._graph.has_edge(x, y):
                raise KeyError(key)
            self._done[(x, y)] = self._cells[x].facet_area(self._graph.point(y) - self._graph.point(x))
        return self._done[(x, y)]

    def __iter__(self):
        return iter(self._graph.edges())

    def __len__(self):
        return len(self._graph.weights)


def subdivide(
    b: LatticeBundle,
    new_edge_lengths: Mapping[int, float] | float | None = None,
    new_weights: Mapping[tuple[int, int], tuple[float, float]] | None = None,
) -> LatticeBundle:
    """Split every simplicial dual cell through its centroid into d+1 simplices.

    Each vertex x becomes a (d+1)-clique x_0..x_d, with x_i placed at
    ``x + kappa_x * area(F_i) * n_i`` (n_i the outer unit normal of facet i).
    That placement is forced up to the per-vertex scale ``kappa_x``, which is
    what ``new_edge_lengths`` controls: a float is a fraction of the largest
    admissible scale applied everywhere, a map gives kappa_x per original vertex.
    By default weights and costs are set so the original facet ratios carry
    over; supplied ``new_weights`` (edge -> (A, g)) are checked instead.
    """
    g0 = b.graph
    d = g0.dim
    bad = simplicial_defects(b)
    if bad:
        raise InputError(f"subdivision needs simplicial dual cells; vertex {bad[0]} is not")
    k1 = _weight_constant(b)
    k2 = _cost_constant(b)
    verts = g0.vertices
    # admissible scale: external edges must keep positive length
    pieces: dict[int, list[tuple[np.ndarray, float, np.ndarray]]] = {}
    kappa_max = math.inf
    for x in verts:
        cell = b.dual_cells[x]
        facets = [f for f in cell.facets if f.area > EPS_GEOM]
        if len(facets) != d + 1:
            raise InputError(f"cell of vertex {x} has {len(facets)} facets, expected {d + 1}")
        c = cell.centroid()
        sub = []
        for f in facets:
            sub.append((f.normal, f.area, np.vstack([cell.vertices[list(f.vertex_indices)], c[None, :]])))
        pieces[x] = sub
        for y in g0.neighbors(x):
            length = float(np.linalg.norm(g0.point(y) - g0.point(x)))
            kappa_max = min(kappa_max, length / (2.0 * max(f.area for f in facets)))
    if new_edge_lengths is None:
        new_edge_lengths = 0.5
    if isinstance(new_edge_lengths, (int, float)):
        if not 0 < new_edge_lengths < 1:
            raise InputError("relative subdivision scale must lie in (0, 1)")
        kappa = {x: float(new_edge_lengths) * kappa_max for x in verts}
    else:
        kappa = {x: float(new_edge_lengths[x]) for x in verts}
    ids: dict[tuple[int, int], int] = {}
    points = {}
    cells = {}
    for x in verts:
        for i, (n, area, simplex) in enumerate(pieces[x]):
            nid = len(ids)
            ids[(x, i)] = nid
            points[nid] = g0.point(x) + kappa[x] * area * n
            cells[nid] = intersect_halfspaces(_simplex_halfspaces(simplex), d)
    W, G = {}, {}
    areas = {}
    for x in verts:
        sub = pieces[x]
        for i in range(d + 1):
            for j in range(i + 1, d + 1):
                a, c = ids[(x, i)], ids[(x, j)]
                key = edge_key(a, c)
                W[key] = None
                areas[key] = cells[a].facet_area(points[c] - points[a])
        for y in g0.neighbors(x):
            if y < x:
                continue
            e = g0.point(y) - g0.point(x)
            e = e / np.linalg.norm(e)
            i = next(k for k, s in enumerate(sub) if np.linalg.norm(s[0] - e) <= 1e-9)
            j = next(k for k, s in enumerate(pieces[y]) if np.linalg.norm(s[0] + e) <= 1e-9)
            key = edge_key(ids[(x, i)], ids[(y, j)])
            W[key] = None
            areas[key] = sub[i][1]
    for key in list(W):
        x, y = key
        length = float(np.linalg.norm(points[y] - points[x]))
        if length <= 0:
            raise InputError("subdivision scale collapses an edge")
        if new_weights is not None and (key in new_weights or (y, x) in new_weights):
            A, gg = new_weights.get(key, new_weights.get((y, x)))
            r1 = areas[key] / (length * A * A)
            r2 = areas[key] * length / (gg * gg)
            if abs(r1 - k1) > 1e-9 * k1 or abs(r2 - k2) > 1e-9 * k2:
                raise InputError(
                    f"edge {key}: facet ratios ({r1:.12g}, {r2:.12g}) differ from ({k1:.12g}, {k2:.12g})"
                )
        else:
            A = math.sqrt(areas[key] / (length * k1))
            gg = math.sqrt(areas[key] * length / k2)
        W[key] = A
        G[key] = gg
    graph = GeometricGraph(d, points, W, G)
    core = frozenset(ids[(x, i)] for x in b.core for i in range(d + 1))
    labels = {nid: (b.labels[x], i) for (x, i), nid in ids.items()}
    out = LatticeBundle(
        f"subdivided({b.kind})",
        graph,
        cells,
        _facet_map(graph, cells),
        b.window,
        core,
        ids[(b.seed, 0)],
        b.periods,
        labels,
        {"base": b.kind},
    )
    return out


def _simplex_halfspaces(simplex: np.ndarray) -> list[Halfspace]:
    d = simplex.shape[1]
    c = simplex.mean(axis=0)
    hs = []
    for i in range(d + 1):
        face = np.delete(simplex, i, axis=0)
        M = face[1:] - face[0]
        _, _, vt = np.linalg.svd(M) if d > 1 else (None, None, np.eye(1))
        n = vt[-1]
        if n @ (face[0] - c) < 0:
            n = -n
        hs.append(Halfspace(n, float(n @ face[0])))
    return hs


# ---------------------------------------------------------------------------
# extremal reference subsets


def reference_subset(bundle: LatticeBundle, kind: str, k: int) -> frozenset:
    """Known extremal configurations.

    ``hex_triangular``: triangular-lattice hexagon H_k (3k^2+3k+1 vertices);
    ``hex_honeycomb``: the 6k^2 honeycomb vertices whose triangles tile a hexagon of side k;
    ``rhombic_dodeca_bcc``: the 24k^3 disphenoids tiling a rhombic dodecahedron.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if kind == "hex_triangular":
        if bundle.kind != "triangular":
            raise InputError("hex_triangular needs a triangular bundle")
        out = frozenset(x for x, lab in bundle.labels.items() if _hexnorm(*lab) <= k)
        expect = 3 * k * k + 3 * k + 1
    elif kind in ("hex_honeycomb", "rhombic_dodeca_bcc"):
        want = "honeycomb" if kind == "hex_honeycomb" else "bcc"
        if bundle.kind != want:
            raise InputError(f"{kind} needs a {want} bundle")
        out = frozenset(x for x, lab in bundle.labels.items() if all(-k <= n <= k - 1 for n in lab))
        expect = 6 * k * k if want == "honeycomb" else 24 * k ** 3
    else:
        raise InputError(f"unknown reference subset {kind!r}")
    if len(out) != expect:
        raise WindowError(f"{kind}({k}) needs a larger window: found {len(out)} of {expect} cells")
    bundle.require_inside(out)
    return out

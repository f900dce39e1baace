"""Connected-subset enumeration, isoperimetric scans and the triangular census."""

from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import InputError, InvariantViolation
from .graph import connected_components, subset_view
from .lattices import LatticeBundle, WindowError, _round_key

MAX_N_CAP = 16


# ---------------------------------------------------------------------------
# enumeration of connected subsets up to translation


def _order_key(bundle: LatticeBundle, x: int) -> tuple:
    return _round_key(bundle.graph.point(x))


def _relative(Q: np.ndarray, base: np.ndarray) -> tuple:
    # round the differences, not the coordinates, so translates agree exactly
    return tuple(sorted(_round_key(q - base) for q in Q))


def canonical_form(bundle: LatticeBundle, omega: Iterable[int]) -> tuple:
    """Sorted rounded coordinates relative to the lexicographically least vertex."""
    low = min(omega, key=lambda x: _order_key(bundle, x))
    Q = np.array([bundle.graph.point(x) for x in omega])
    return _relative(Q, bundle.graph.point(low))


def _ball(bundle: LatticeBundle, root: int, radius: int) -> set[int]:
    seen = {root}
    frontier = [root]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for y in bundle.graph.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _check_window(bundle: LatticeBundle, roots: list[int], max_n: int) -> None:
    for r in roots:
        ball = _ball(bundle, r, max_n - 1)
        if not ball <= bundle.core:
            raise WindowError(
                f"enumeration to size {max_n} from root {r} leaves the window core "
                f"(radius {bundle.window}); increase --window"
            )


class _Grower:
    """Redelmeier growth of connected sets whose least vertex is ``root``."""

    def __init__(self, bundle: LatticeBundle, root: int, max_n: int):
        self.graph = bundle.graph
        self.bundle = bundle
        self.root = root
        self.rkey = _order_key(bundle, root)
        self.max_n = max_n
        self._allowed: dict[int, bool] = {}

    def allowed(self, v: int) -> bool:
        if v not in self._allowed:
            self._allowed[v] = _order_key(self.bundle, v) > self.rkey
        return self._allowed[v]

    def _children(self, current: frozenset, untried: list[int], seen: frozenset):
        untried = list(untried)
        while untried:
            v = untried.pop()
            nxt = current | {v}
            new = [w for w in self.graph.neighbors(v) if w not in seen and self.allowed(w)]
            yield nxt, untried + new, seen | set(new)

    def _subtree(self, state) -> Iterator[frozenset]:
        current, untried, seen = state
        yield current
        if len(current) < self.max_n:
            for child in self._children(current, untried, seen):
                yield from self._subtree(child)

    def tasks(self) -> list:
        """Depth-two states whose subtrees partition everything below the root."""
        start = frozenset([self.root])
        if self.max_n == 1:
            return []
        first = [w for w in self.graph.neighbors(self.root) if self.allowed(w)]
        return list(self._children(start, first, frozenset(first) | start))

    def run(self, task) -> Iterator[frozenset]:
        return self._subtree(task)

    def __iter__(self) -> Iterator[frozenset]:
        yield frozenset([self.root])
        for t in self.tasks():
            yield from self._subtree(t)


def _grow(bundle: LatticeBundle, root: int, max_n: int) -> Iterator[frozenset]:
    return iter(_Grower(bundle, root, max_n))


def enumerate_connected_subsets(
    bundle: LatticeBundle,
    max_n: int,
    cap: int = MAX_N_CAP,
) -> Iterator[frozenset]:
    """Every connected subset with at most ``max_n`` vertices, once per translation class.

    Each class is represented with its lexicographically least vertex on the
    chosen representative of that vertex's translation orbit.
    """
    if max_n < 1:
        raise InputError("max_n must be >= 1")
    if max_n > cap:
        raise InputError(f"max_n = {max_n} exceeds the cap {cap}")
    roots = bundle.orbit_reps()
    _check_window(bundle, roots, max_n)
    for r in roots:
        yield from _grow(bundle, r, max_n)


# ---------------------------------------------------------------------------
# point symmetries


@dataclass(frozen=True)
class PointSymmetry:
    """Affine graph automorphism ``x -> R x + t`` with orthogonal ``R``, modulo periods."""

    matrix: np.ndarray
    shift: np.ndarray

    def apply(self, P: np.ndarray) -> np.ndarray:
        return P @ self.matrix.T + self.shift


def _independent(vectors: list[np.ndarray], d: int) -> list[int]:
    chosen: list[int] = []
    for i, v in enumerate(vectors):
        M = np.array([vectors[j] for j in chosen] + [v])
        if np.linalg.matrix_rank(M, tol=1e-9) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d:
                return chosen
    raise InputError("the neighbor fan does not span the space")


def _preserves(bundle: LatticeBundle, R: np.ndarray, t: np.ndarray) -> bool:
    g = bundle.graph
    image = R @ bundle.periods.T
    coeff = np.linalg.solve(bundle.periods.T, image)
    if not np.allclose(coeff, np.round(coeff), atol=1e-7):
        return False
    for x in bundle.orbit_reps():
        y = bundle.locate(R @ g.point(x) + t)
        if y is None:
            return False
        mapped = {}
        for z in g.neighbors(x):
            w = bundle.locate(R @ g.point(z) + t)
            if w is None:
                return False
            mapped[w] = z
        if set(mapped) != set(g.neighbors(y)):
            return False
        for w, z in mapped.items():
            if abs(g.A(x, z) - g.A(y, w)) > 1e-9 * g.A(x, z) or abs(g.g(x, z) - g.g(y, w)) > 1e-9 * g.g(x, z):
                return False
    return True


def point_group(bundle: LatticeBundle) -> list[PointSymmetry]:
    """Isometric automorphisms of the weighted lattice graph, one per coset of the periods.

    Candidates send ``d`` independent edges at the seed onto edges at an
    orbit representative; each is kept when it maps the periods into the
    period lattice and every representative's weighted neighborhood onto a
    weighted neighborhood.
    """
    g = bundle.graph
    d = bundle.dim
    x0 = bundle.seed
    p0 = g.point(x0)
    fan0 = [g.point(y) - p0 for y in g.neighbors(x0)]
    basis = _independent(fan0, d)
    B = np.array([fan0[i] for i in basis])
    out: list[PointSymmetry] = []
    seen = set()
    for r in bundle.orbit_reps():
        if g.degree(r) != g.degree(x0):
            continue
        pr = g.point(r)
        fan = [g.point(y) - pr for y in g.neighbors(r)]
        for choice in itertools.permutations(range(len(fan)), d):
            Bp = np.array([fan[i] for i in choice])
            R = np.linalg.solve(B, Bp).T
            if not np.allclose(R.T @ R, np.eye(d), atol=1e-9):
                continue
            t = pr - R @ p0
            key = (_round_key(R.reshape(-1)), bundle.orbit_key_of_point(t))
            if key in seen:
                continue
            if _preserves(bundle, R, t):
                seen.add(key)
                out.append(PointSymmetry(R, t))
    out.sort(key=lambda s: (_round_key(s.matrix.reshape(-1)), bundle.orbit_key_of_point(s.shift)))
    return out


def symmetry_key(bundle: LatticeBundle, omega: Iterable[int], group: list[PointSymmetry]) -> tuple[tuple, int]:
    """Class key of omega up to the group and periods, with the stabilizer size."""
    P = np.array([bundle.graph.point(x) for x in sorted(omega)])

    def key(Q):
        low = Q[min(range(len(Q)), key=lambda i: _round_key(Q[i]))]
        return bundle.orbit_key_of_point(low), _relative(Q, low)

    own = key(P)
    keys = [key(sym.apply(P)) for sym in group]
    return min(keys), sum(1 for k in keys if k == own)


# ---------------------------------------------------------------------------
# scans


def _exact(value: float, limit: int = 10**4) -> Fraction | None:
    """A small-denominator fraction within rounding of ``value``, else None."""
    frac = Fraction(value).limit_denominator(limit)
    if abs(float(frac) - value) <= 1e-11 * max(1.0, abs(value)):
        return frac
    return None


@dataclass(frozen=True)
class ScanResult:
    kind: str
    dim: int
    constant: float  # C / |H|
    constant_exact: Fraction | None
    per_n: dict[int, tuple[float, tuple[int, ...]]]
    counts: dict[int, int]
    constant_check: dict[int, bool]
    equality_sizes: list[int]
    observational: bool
    canonical: dict[int, tuple] = field(default_factory=dict)
    symmetry_counts: dict[int, int] | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "dim": self.dim,
            "constant": self.constant,
            "constant_exact": str(self.constant_exact) if self.constant_exact is not None else None,
            "observational": self.observational,
            "equality_sizes": list(self.equality_sizes),
            "rows": [
                {
                    "n": n,
                    "min_boundary": self.per_n[n][0],
                    "count": self.counts[n],
                    "inequality": self.constant_check[n],
                    "equality": n in self.equality_sizes,
                    "example": list(self.per_n[n][1]),
                }
                for n in sorted(self.per_n)
            ],
        }
        if self.symmetry_counts is not None:
            for row in out["rows"]:
                row["symmetry_classes"] = self.symmetry_counts[row["n"]]
        return out

    def csv_rows(self) -> list[list]:
        rows = [["n", "min_boundary", "equality_flag", "example_subset"]]
        for n in sorted(self.per_n):
            b, ex = self.per_n[n]
            rows.append([n, b, int(n in self.equality_sizes), " ".join(str(x) for x in ex)])
        return rows


def inequality_holds(n: int, perimeter: float, kappa: float, kappa_exact: Fraction | None, d: int) -> tuple[bool, bool]:
    """``(n^(d-1) <= kappa P^d, equality)`` in exact arithmetic when possible."""
    p = _exact(perimeter)
    if kappa_exact is not None and p is not None:
        lhs = Fraction(n) ** (d - 1)
        rhs = kappa_exact * p**d
        return lhs <= rhs, lhs == rhs
    lhs = float(n) ** (d - 1)
    rhs = kappa * perimeter**d
    tol = 1e-9 * max(lhs, rhs)
    return lhs <= rhs + tol, abs(lhs - rhs) <= tol


def _perimeter(graph, s: frozenset) -> float:
    return sum(graph.g(x, y) for x in s for y in graph.neighbors(x) if y not in s)


def _best_of(bundle: LatticeBundle, sets: Iterable[frozenset], group: list[PointSymmetry] | None = None):
    best: dict[int, tuple[float, tuple, tuple]] = {}
    count: dict[int, int] = {}
    classes: dict[int, dict[tuple, int]] = {}
    for s in sets:
        n = len(s)
        count[n] = count.get(n, 0) + 1
        if group is not None:
            key, stab = symmetry_key(bundle, s, group)
            classes.setdefault(n, {})[key] = stab
        p = round(_perimeter(bundle.graph, s), 9)
        cur = best.get(n)
        if cur is None or p <= cur[0]:
            cf = canonical_form(bundle, s)
            if cur is None or (p, cf) < (cur[0], cur[1]):
                best[n] = (p, cf, tuple(sorted(s)))
    return best, count, classes


# state shared with forked workers
_POOL_STATE: dict = {}


def _pool_work(index: int):
    bundle, max_n, tasks = _POOL_STATE["bundle"], _POOL_STATE["max_n"], _POOL_STATE["tasks"]
    root, task = tasks[index]
    return _best_of(bundle, _Grower(bundle, root, max_n).run(task), _POOL_STATE["group"])


def _run_serial(bundle: LatticeBundle, max_n: int, tasks: list, group) -> list:
    return [_best_of(bundle, _Grower(bundle, r, max_n).run(t), group) for r, t in tasks]


def _run_parallel(bundle: LatticeBundle, max_n: int, tasks: list, jobs: int, group) -> list:
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        return _run_serial(bundle, max_n, tasks, group)
    _POOL_STATE.update(bundle=bundle, max_n=max_n, tasks=tasks, group=group)
    try:
        with ctx.Pool(jobs) as pool:
            return pool.map(_pool_work, range(len(tasks)))
    finally:
        _POOL_STATE.clear()


@dataclass(frozen=True)
class InequalityCheck:
    n: int
    perimeter: float
    holds: bool
    equality: bool


def inequality_check(bundle: LatticeBundle, omega: Iterable[int], constant: float | None = None) -> InequalityCheck:
    """Evaluate ``n^(d-1) |H| <= C P^d`` on one subset, exactly where possible."""
    om = frozenset(omega)
    bundle.require_inside(om)
    if constant is None:
        from .transport import verify_sufficiency

        constant = verify_sufficiency(bundle).iso_constant
    p = _perimeter(bundle.graph, om)
    ok, eq = inequality_holds(len(om), p, constant, _exact(constant), bundle.dim)
    return InequalityCheck(len(om), p, ok, eq)


def scan(
    bundle: LatticeBundle,
    max_n: int,
    jobs: int = 1,
    cap: int = MAX_N_CAP,
    symmetry: bool = False,
) -> ScanResult:
    """Minimal weighted boundary of connected subsets for every size up to ``max_n``.

    Only connected subsets are scanned.  Boundaries add over components and
    ``t -> t^((d-1)/d)`` is subadditive, so the inequality for disconnected
    subsets follows from the connected case.  The inequality
    ``n^(d-1) |H| <= C P^d`` is checked per size.  A bundle failing
    sufficiency gives an observational scan; a violation is still an error
    when every hypothesis other than the tiling holds.

    With ``symmetry`` the subsets are also sorted into classes up to the
    point group; the class orbit sizes must add back up to the translation
    class count, which is checked.
    """
    from .transport import verify_sufficiency

    if max_n < 1:
        raise InputError("max_n must be >= 1")
    if max_n > cap:
        raise InputError(f"max_n = {max_n} exceeds the cap {cap}")
    rep = verify_sufficiency(bundle)
    hypotheses = all(ok for k, ok in rep.checks.items() if k != "dilation_tiling")
    kappa = rep.iso_constant
    kappa_exact = _exact(kappa)
    roots = bundle.orbit_reps()
    _check_window(bundle, roots, max_n)

    group = point_group(bundle) if symmetry else None
    singles = _best_of(bundle, (frozenset([r]) for r in roots), group)
    tasks = [(r, t) for r in roots for t in _Grower(bundle, r, max_n).tasks()]
    if jobs > 1 and len(tasks) > 1:
        parts = _run_parallel(bundle, max_n, tasks, jobs, group)
    else:
        parts = _run_serial(bundle, max_n, tasks, group)
    best: dict[int, tuple[float, tuple, tuple]] = {}
    counts: dict[int, int] = {}
    classes: dict[int, dict[tuple, int]] = {}
    for b, c, cl in [singles, *parts]:
        for n, v in b.items():
            if n not in best or (v[0], v[1]) < (best[n][0], best[n][1]):
                best[n] = v
        for n, k in c.items():
            counts[n] = counts.get(n, 0) + k
        for n, d in cl.items():
            classes.setdefault(n, {}).update(d)
    sym_counts = None
    if group is not None:
        sym_counts = {}
        for n in sorted(counts):
            orbit_total = sum(len(group) // stab for stab in classes[n].values())
            if orbit_total != counts[n]:
                raise InvariantViolation(
                    f"symmetry classes at n = {n} cover {orbit_total} translation classes, expected {counts[n]}"
                )
            sym_counts[n] = len(classes[n])
    checks, equal = {}, []
    for n in sorted(best):
        ok, eq = inequality_holds(n, best[n][0], kappa, kappa_exact, bundle.dim)
        checks[n] = ok
        if eq:
            equal.append(n)
        if hypotheses and not ok:
            raise InvariantViolation(
                f"isoperimetric inequality fails at n = {n} with boundary {best[n][0]} on {bundle.kind}"
            )
    return ScanResult(
        kind=bundle.kind,
        dim=bundle.dim,
        constant=kappa,
        constant_exact=kappa_exact,
        per_n={n: (v[0], v[2]) for n, v in sorted(best.items())},
        counts=dict(sorted(counts.items())),
        constant_check=checks,
        equality_sizes=equal,
        observational=not rep.passed,
        canonical={n: v[1] for n, v in sorted(best.items())},
        symmetry_counts=sym_counts,
    )


# ---------------------------------------------------------------------------
# connectedness reduction


def connectedness_reduction(bundle: LatticeBundle, omega: Iterable[int]) -> frozenset:
    """Translate components of omega until it is connected.

    Each step glues the next component to the union of the previous ones at
    a pair of extreme points, which keeps the size and strictly lowers the
    boundary.  Translations are by lattice periods only.
    """
    g = bundle.graph
    om = frozenset(omega)
    bundle.require_inside(om)
    comps = sorted(connected_components(g, om), key=lambda c: min(c))
    if len(comps) <= 1:
        return om
    dirs = []
    for x in sorted(om):
        for y in g.neighbors(x):
            v = g.point(y) - g.point(x)
            v = v / np.linalg.norm(v)
            if not any(np.allclose(v, w, atol=1e-9) for w in dirs):
                dirs.append(v)
    glued = comps[0]
    for comp in comps[1:]:
        moved = _glue(bundle, glued, comp, dirs)
        if moved is None:
            raise WindowError(
                "no lattice translation glues the components inside the window "
                "(on lattices with several vertex orbits some components cannot be glued)"
            )
        glued = glued | moved
    return glued


def _glue(bundle: LatticeBundle, base: frozenset, comp: frozenset, dirs) -> frozenset | None:
    g = bundle.graph

    def attempt(z: int, w: int):
        if bundle.orbit_key(z) != bundle.orbit_key(w):
            return None
        moved = bundle.translate_set(comp, g.point(z) - g.point(w))
        if moved is None or not moved <= bundle.core or moved & base:
            return None
        return moved

    for b in dirs:
        w1 = max(sorted(base), key=lambda x: float(g.point(x) @ b))
        w2 = min(sorted(comp), key=lambda x: float(g.point(x) @ b))
        steps = sorted(
            (z for z in g.neighbors(w1) if z not in base and float((g.point(z) - g.point(w1)) @ b) > 0),
            key=lambda z: (-float((g.point(z) - g.point(w1)) @ b), z),
        )
        for z in steps:
            moved = attempt(z, w2)
            if moved is not None:
                return moved
    # fall back to any attachment point of matching orbit
    frontier = sorted({y for x in base for y in g.neighbors(x) if y not in base})
    for z in frontier:
        for w in sorted(comp):
            moved = attempt(z, w)
            if moved is not None:
                return moved
    return None


# ---------------------------------------------------------------------------
# triangular census

_TRI_DIRS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


class CensusHypothesisError(InputError):
    """The subset is not a union of triangles bounded by one simple cycle."""


@dataclass(frozen=True)
class TriangularCensus:
    a: dict[int, int]
    X: int
    Y: int
    X_star: int
    Y_star: int
    E_count: int

    @property
    def ratio(self) -> Fraction:
        return triangular_ratio(self.X, self.Y)

    @property
    def dual_holds(self) -> bool:
        """``Y*^2 >= 6 X*`` on the dual hexagonal subset, equivalent to ratio >= 12."""
        return self.Y_star**2 >= 6 * self.X_star

    def to_dict(self) -> dict:
        return {
            "a": {str(k): v for k, v in sorted(self.a.items())},
            "X": self.X,
            "Y": self.Y,
            "X_star": self.X_star,
            "Y_star": self.Y_star,
            "E": self.E_count,
            "ratio": float(self.ratio),
        }


def triangular_ratio(X: int, Y: int) -> Fraction:
    den = 4 * X - Y + 2
    if den <= 0:
        raise CensusHypothesisError(f"4X - Y + 2 = {den} is not positive")
    return Fraction((Y - 6) ** 2, den)


def _faces(labels: frozenset) -> list[tuple[tuple[int, int], ...]]:
    out = []
    bases = {(m - a, n - b) for m, n in labels for a in (0, 1) for b in (0, 1)}
    for m, n in sorted(bases):
        up = ((m, n), (m + 1, n), (m, n + 1))
        down = ((m + 1, n), (m, n + 1), (m + 1, n + 1))
        for f in (up, down):
            if all(v in labels for v in f) and f not in out:
                out.append(f)
    return out


def census_from_labels(labels: Iterable[tuple[int, int]]) -> TriangularCensus:
    """Census of a set of triangular-lattice points in axial coordinates."""
    L = frozenset((int(m), int(n)) for m, n in labels)
    if not L:
        raise CensusHypothesisError("empty subset")
    nbr = {v: [(v[0] + dm, v[1] + dn) for dm, dn in _TRI_DIRS] for v in L}
    inner = {v: sum(1 for w in nbr[v] if w in L) for v in L}
    edges = {tuple(sorted((v, w))) for v in L for w in nbr[v] if w in L}
    faces = _faces(L)
    face_count: dict[tuple, int] = {}
    covered = set()
    for f in faces:
        covered.update(f)
        for i in range(3):
            e = tuple(sorted((f[i], f[(i + 1) % 3])))
            face_count[e] = face_count.get(e, 0) + 1
    if covered != L:
        raise CensusHypothesisError(f"vertices {sorted(L - covered)[:3]} lie in no triangle of the subset")
    loose = sorted(e for e in edges if e not in face_count)
    if loose:
        raise CensusHypothesisError(f"edge {loose[0]} lies in no triangle of the subset")
    bedges = [e for e, c in face_count.items() if c == 1]
    cycle_vertices = {v for e in bedges for v in e}
    C = {v for v in L if inner[v] < 6}
    if cycle_vertices != C:
        raise CensusHypothesisError("boundary vertices and boundary edges of the triangle complex disagree")
    deg: dict[tuple, list] = {}
    for a, b in bedges:
        deg.setdefault(a, []).append(b)
        deg.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in deg.values()):
        raise CensusHypothesisError("the boundary revisits a vertex (pinch point)")
    start = min(deg)
    prev, cur, steps = None, start, 0
    while True:
        nxt = deg[cur][0] if deg[cur][0] != prev else deg[cur][1]
        prev, cur = cur, nxt
        steps += 1
        if cur == start:
            break
    if steps != len(C):
        raise CensusHypothesisError("the boundary splits into several cycles")
    a = {i: 0 for i in (1, 2, 3, 4, 6)}
    for v in L:
        if v in C:
            i = inner[v] - 1
            if i not in (1, 2, 3, 4):
                raise CensusHypothesisError(f"boundary vertex {v} has {inner[v]} neighbors in the subset")
            a[i] += 1
        else:
            a[6] += 1
    X = len(L)
    Y = sum(6 - inner[v] for v in L)
    cen = TriangularCensus(a, X, Y, len(faces), len(bedges), len(edges))
    _assert_identities(cen)
    return cen


def _assert_identities(c: TriangularCensus) -> None:
    a = c.a
    checks = {
        "vertex count": c.X == a[1] + a[2] + a[3] + a[4] + a[6],
        "boundary count": c.Y == 4 * a[1] + 3 * a[2] + 2 * a[3] + a[4],
        "Gauss-Bonnet": 2 * a[1] + a[2] - a[4] == 6,
        "dual boundary": 2 * c.Y_star == c.Y - 6,
        "dual volume": 2 * c.X_star == 4 * c.X - c.Y + 2,
        "edge count": 2 * c.E_count == 6 * c.X - c.Y,
    }
    bad = [k for k, ok in checks.items() if not ok]
    if bad:
        raise InvariantViolation(f"census identities fail: {', '.join(bad)}")


def _labels_of(bundle: LatticeBundle, omega: Iterable[int]) -> list[tuple[int, int]]:
    if bundle.kind != "triangular":
        raise InputError("the census needs a triangular bundle")
    return [bundle.labels[x] for x in omega]


def triangular_census(bundle: LatticeBundle, omega: Iterable[int]) -> TriangularCensus:
    om = list(omega)
    bundle.require_inside(om)
    cen = census_from_labels(_labels_of(bundle, om))
    view = subset_view(bundle.graph, om)
    if len(view.boundary) != cen.Y:
        raise InvariantViolation("graph boundary count disagrees with the census")
    return cen


def triangular_inequality(bundle: LatticeBundle, omega: Iterable[int]) -> Fraction:
    """``(Y-6)^2 / (4X - Y + 2)``; at least 12, with equality on perfect hexagons."""
    return triangular_census(bundle, omega).ratio


def hexagon_labels(k: int) -> frozenset:
    return frozenset(
        (m, n) for m in range(-k, k + 1) for n in range(-k, k + 1) if max(abs(m), abs(n), abs(m + n)) <= k
    )


def enumerate_triangle_unions(max_x: int) -> Iterator[TriangularCensus | tuple]:
    """Unions of lattice triangles with at most ``max_x`` vertices, once per translation class.

    Yields ``(labels, census)`` for subsets bounded by one simple cycle, grown
    as edge-connected triangle sets (Redelmeier) and kept only when the
    triangle set is everything the vertex set spans.
    """

    def verts(t):
        m, n, o = t
        if o == 0:
            return ((m, n), (m + 1, n), (m, n + 1))
        return ((m + 1, n), (m, n + 1), (m + 1, n + 1))

    def nbrs(t):
        m, n, o = t
        if o == 0:
            return [(m, n, 1), (m, n - 1, 1), (m - 1, n, 1)]
        return [(m, n, 0), (m, n + 1, 0), (m + 1, n, 0)]

    seen_classes = set()

    def emit(tris: frozenset, vs: frozenset):
        if len(_faces(vs)) != len(tris):
            return None
        base = min(vs)
        key = frozenset((m - base[0], n - base[1]) for m, n in vs)
        if key in seen_classes:
            return None
        seen_classes.add(key)
        try:
            return key, census_from_labels(key)
        except CensusHypothesisError:
            return None

    def extend(cur: frozenset, vs: frozenset, untried: list, seen: frozenset, root):
        untried = list(untried)
        while untried:
            t = untried.pop()
            nv = vs | set(verts(t))
            if len(nv) > max_x:
                continue
            nxt = cur | {t}
            out = emit(nxt, nv)
            if out is not None:
                yield out
            new = [s for s in nbrs(t) if s not in seen and s > root]
            yield from extend(nxt, nv, untried + new, seen | set(new), root)

    for root in ((0, 0, 0), (0, 0, 1)):
        cur = frozenset([root])
        vs = frozenset(verts(root))
        if len(vs) > max_x:
            continue
        out = emit(cur, vs)
        if out is not None:
            yield out
        first = [s for s in nbrs(root) if s > root]
        yield from extend(cur, vs, first, frozenset(first) | cur, root)


def _normalize(labels: Iterable[tuple[int, int]]) -> tuple:
    pts = sorted(labels)
    m0, n0 = pts[0]
    return tuple((m - m0, n - n0) for m, n in pts)


def enumerate_disks(max_x: int, min_x: int = 3) -> Iterator[tuple[tuple, TriangularCensus]]:
    """Single-cycle unions of triangles grown one vertex at a time, by layers.

    Every such subset with at least four vertices keeps the hypothesis after
    deleting a suitable boundary vertex, so each layer is reached from the
    previous one.  Counts agree with ``enumerate_triangle_unions``.
    """
    layer = {_normalize([(0, 0), (1, 0), (0, 1)]), _normalize([(1, 0), (0, 1), (1, 1)])}
    x = 3
    while x <= max_x:
        nxt = set()
        for key in sorted(layer):
            cen = census_from_labels(key)
            if x >= min_x:
                yield key, cen
            if x == max_x:
                continue
            s = set(key)
            for v in sorted({(m + a, n + b) for m, n in key for a, b in _TRI_DIRS} - s):
                child = _normalize(key + (v,))
                if child in nxt:
                    continue
                try:
                    census_from_labels(child)
                except CensusHypothesisError:
                    continue
                nxt.add(child)
        layer = nxt
        x += 1

"""Discrete Laplacian, Neumann problems and the optimal Laplacian bound.

Sign convention: ``Delta_A u(x) = sum_y A(x,y)^2 (u(y) - u(x))``, so
restrictions of convex functions have nonnegative Laplacian.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import ConvergenceError, InputError, InvariantViolation
from .graph import GeometricGraph, SubsetView, connected_components, subset_view

SOLVE_RTOL = 1e-10
COMPAT_TOL = 1e-9


class CompatibilityError(InputError):
    """The data violate the per-component compatibility condition."""

    def __init__(self, message: str, defects: dict):
        super().__init__(message)
        self.defects = defects


class LPError(InvariantViolation):
    """The linear program is infeasible or unbounded where theory forbids it."""


# ---------------------------------------------------------------------------
# small dense linear algebra


def gauss_solve(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a square system by elimination with partial pivoting."""
    A = np.array(M, dtype=float)
    b = np.array(rhs, dtype=float)
    n = len(A)
    scale = max(1.0, float(np.max(np.abs(A)))) if n else 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= 1e-13 * scale:
            raise InvariantViolation(f"singular system at pivot {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        f = A[k + 1 :, k] / A[k, k]
        A[k + 1 :, k:] -= np.outer(f, A[k, k:])
        b[k + 1 :] -= f * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1 :] @ x[k + 1 :]) / A[k, k]
    return x


def null_space(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Basis (columns) of the null space via reduced row echelon form."""
    A = np.array(M, dtype=float)
    m, n = A.shape
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) <= tol * scale:
            A[r:, c] = 0.0
            continue
        A[[r, p]] = A[[p, r]]
        A[r] /= A[r, c]
        for i in range(m):
            if i != r and A[i, c] != 0.0:
                A[i] -= A[i, c] * A[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)))
    for j, fc in enumerate(free):
        basis[fc, j] = 1.0
        for i, pc in enumerate(pivots):
            basis[pc, j] = -A[i, fc]
    return basis


# ---------------------------------------------------------------------------
# Laplacian


def laplacian(graph: GeometricGraph, omega: Iterable[int], u: Mapping[int, float]) -> dict[int, float]:
    view = subset_view(graph, omega)
    missing = sorted(x for x in view.closure if x not in u)
    if missing:
        raise InputError(f"u is missing values on closure vertices {missing[:5]}")
    out = {}
    for x in sorted(view.omega):
        ux = u[x]
        out[x] = float(sum(graph.A(x, y) ** 2 * (u[y] - ux) for y in graph.neighbors(x)))
    return out


def divergence_residual(graph: GeometricGraph, omega: Iterable[int], u: Mapping[int, float]) -> float:
    """|sum of the Laplacian over omega - boundary flux|, zero up to rounding."""
    view = subset_view(graph, omega)
    lap = laplacian(graph, view.omega, u)
    flux = sum(graph.A(x, y) ** 2 * (u[y] - u[x]) for x, y in view.boundary)
    return abs(sum(lap.values()) - flux)


def _boundary_costs(graph: GeometricGraph, view: SubsetView, g) -> dict[tuple[int, int], float]:
    """Normalize ``g`` to a map from oriented boundary edges to costs.

    Accepts ``None`` (graph costs), a scalar, a map keyed by oriented edge
    ``(x, y)``, or a map keyed by outer vertex ``y``.
    """
    out = {}
    for x, y in view.boundary:
        if g is None:
            c = graph.g(x, y)
        elif isinstance(g, (int, float)):
            c = float(g)
        elif (x, y) in g:
            c = float(g[(x, y)])
        elif y in g:
            c = float(g[y])
        else:
            raise InputError(f"no boundary cost given for edge ({x},{y})")
        if not math.isfinite(c):
            raise InputError(f"boundary cost for ({x},{y}) is not finite")
        out[(x, y)] = c
    return out


def compatibility_sum(graph: GeometricGraph, omega: Iterable[int], g=None) -> float:
    """``c_g``: the boundary flux ``sum A g`` that the Laplacian must integrate to."""
    view = subset_view(graph, omega)
    costs = _boundary_costs(graph, view, g)
    return float(sum(graph.A(x, y) * c for (x, y), c in costs.items()))


def weighted_perimeter(graph: GeometricGraph, omega: Iterable[int], g=None) -> float:
    view = subset_view(graph, omega)
    return float(sum(_boundary_costs(graph, view, g).values()))


# ---------------------------------------------------------------------------
# Neumann problem


@dataclass(frozen=True)
class NeumannSolution:
    u: dict[int, float]
    selection: tuple[tuple[int, int], ...]
    f: dict[int, float]  # achieved Laplacian on omega
    target: dict[int, float]  # requested right-hand side
    mode: str  # "naive" or "hamamuki"
    fold: str
    omega: frozenset
    residual: float  # max |auxiliary Laplacian - target|
    divergence: float
    slack: dict[tuple[int, int], float] = field(default_factory=dict)  # u(y)-u(x)-g/A per boundary edge

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "fold": self.fold,
            "omega": sorted(self.omega),
            "u": {str(k): v for k, v in sorted(self.u.items())},
            "f": {str(k): v for k, v in sorted(self.f.items())},
            "selection": [list(e) for e in self.selection],
            "residual": self.residual,
            "divergence_residual": self.divergence,
        }


def _component_of(components) -> dict[int, int]:
    return {x: j for j, comp in enumerate(components) for x in comp}


def neumann_solve(
    graph: GeometricGraph,
    omega: Iterable[int],
    g=None,
    f=None,
    fold: str = "min",
) -> NeumannSolution:
    """Solve ``Delta_A u = f`` on omega with one saturated edge per outer vertex.

    Each boundary edge ``(x, y)`` gets its own auxiliary copy ``x_y`` of the
    outer vertex, which turns the problem into a uniquely solvable Neumann
    problem (up to per-component constants).  The copies are folded back into
    ``u(y)`` by ``min`` (default) or ``max``.  With the sign convention used
    here, the ``min`` fold gives ``Delta_A u <= f``; the ``max`` fold gives
    ``Delta_A u >= f``.
    """
    if fold not in ("min", "max"):
        raise InputError(f"fold must be 'min' or 'max', got {fold!r}")
    view = subset_view(graph, omega)
    if not view.boundary:
        raise InputError("omega has empty boundary; the Neumann problem is not posed")
    costs = _boundary_costs(graph, view, g)
    comps = view.components
    comp_of = _component_of(comps)
    flux = [0.0] * len(comps)
    for (x, y), c in costs.items():
        flux[comp_of[x]] += graph.A(x, y) * c
    if f is None:
        target = {x: flux[comp_of[x]] / len(comps[comp_of[x]]) for x in view.omega}
    elif isinstance(f, (int, float)):
        target = {x: float(f) for x in view.omega}
    else:
        try:
            target = {x: float(f[x]) for x in view.omega}
        except KeyError as exc:
            raise InputError(f"f is missing a value at vertex {exc.args[0]}") from None
    defects = {}
    for j, comp in enumerate(comps):
        d = sum(target[x] for x in comp) - flux[j]
        if abs(d) > COMPAT_TOL * max(1.0, abs(flux[j])):
            defects[min(comp)] = d
    if defects:
        raise CompatibilityError(
            "compatibility condition fails: sum of f minus boundary flux per component "
            + ", ".join(f"[component of {k}: {v:+.3e}]" for k, v in sorted(defects.items())),
            defects,
        )
    # Reduced system on omega: the auxiliary values are eliminated by
    # u(x_y) = u(x) + g/A, contributing the constant A g to row x.
    verts = sorted(view.omega)
    idx = {x: i for i, x in enumerate(verts)}
    n = len(verts)
    L = np.zeros((n, n))
    rhs = np.array([target[x] for x in verts])
    for x in verts:
        i = idx[x]
        for y in graph.neighbors(x):
            if y in view.omega:
                w = graph.A(x, y) ** 2
                L[i, idx[y]] += w
                L[i, i] -= w
    for (x, y), c in costs.items():
        rhs[idx[x]] -= graph.A(x, y) * c
    pinned = [idx[min(comp)] for comp in comps]
    keep = [i for i in range(n) if i not in pinned]
    sol = np.zeros(n)
    if keep:
        sol[keep] = gauss_solve(L[np.ix_(keep, keep)], rhs[keep])
    residual = float(np.max(np.abs(L @ sol - rhs))) if n else 0.0
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if residual > 1e-8 * scale:
        raise InvariantViolation(f"Neumann system residual {residual:.3e} exceeds tolerance")
    u = {x: float(sol[idx[x]]) for x in verts}
    aux: dict[int, list[tuple[float, int]]] = {}
    for (x, y), c in costs.items():
        aux.setdefault(y, []).append((u[x] + c / graph.A(x, y), x))
    selection = []
    pick = min if fold == "min" else max
    for y in sorted(aux):
        vals = aux[y]
        best = pick(v for v, _ in vals)
        u[y] = best
        tol = SOLVE_RTOL * max(1.0, abs(best))
        x_sel = min(x for v, x in vals if abs(v - best) <= tol)
        selection.append((x_sel, y))
    mode = "naive" if view.unique_in_edges else "hamamuki"
    achieved = laplacian(graph, view.omega, u)
    slack = {(x, y): u[y] - u[x] - c / graph.A(x, y) for (x, y), c in costs.items()}
    return NeumannSolution(
        u=u,
        selection=tuple(selection),
        f=achieved,
        target=target,
        mode=mode,
        fold=fold,
        omega=view.omega,
        residual=residual,
        divergence=divergence_residual(graph, view.omega, u),
        slack=slack,
    )


def naive_feasible(graph: GeometricGraph, omega: Iterable[int], g=None, f=None) -> bool:
    """Whether every boundary edge can saturate at once (rank test)."""
    view = subset_view(graph, omega)
    costs = _boundary_costs(graph, view, g)
    verts = sorted(view.closure)
    idx = {x: i for i, x in enumerate(verts)}
    if f is None:
        total = sum(graph.A(x, y) * c for (x, y), c in costs.items())
        fv = {x: total / len(view.omega) for x in view.omega}
    elif isinstance(f, (int, float)):
        fv = {x: float(f) for x in view.omega}
    else:
        fv = dict(f)
    rows, rhs = [], []
    for x in sorted(view.omega):
        r = np.zeros(len(verts))
        for y in graph.neighbors(x):
            w = graph.A(x, y) ** 2
            r[idx[y]] += w
            r[idx[x]] -= w
        rows.append(r)
        rhs.append(fv[x])
    for (x, y), c in sorted(costs.items()):
        r = np.zeros(len(verts))
        r[idx[y]] = 1.0
        r[idx[x]] = -1.0
        rows.append(r)
        rhs.append(c / graph.A(x, y))
    M = np.array(rows)
    aug = np.column_stack([M, rhs])
    return bool(np.linalg.matrix_rank(M, tol=1e-9) == np.linalg.matrix_rank(aug, tol=1e-9))


# ---------------------------------------------------------------------------
# directed system and dual vector


@dataclass(frozen=True)
class DirectedSystem:
    vertices: tuple[int, ...]
    omega: frozenset
    selection: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, float], ...]  # (from, to, weight)
    out_degree: dict[int, float]
    v: dict[int, float]

    @property
    def spread(self) -> float:
        """max v / min v over omega (diagnostic only)."""
        vals = [self.v[x] for x in self.omega]
        return max(vals) / min(vals)

    def residual(self) -> float:
        inflow = {x: 0.0 for x in self.vertices}
        for a, b, w in self.edges:
            inflow[b] += w * self.v[a]
        return max(abs(self.out_degree[x] * self.v[x] - inflow[x]) for x in self.vertices)


def _check_selection(view: SubsetView, selection) -> dict[int, int]:
    chosen: dict[int, int] = {}
    bset = set(view.boundary)
    for x, y in selection:
        if (x, y) not in bset:
            raise InputError(f"selected edge ({x},{y}) is not an oriented boundary edge")
        if y in chosen:
            raise InputError(f"outer vertex {y} is selected twice")
        chosen[y] = x
    missing = sorted(set(view.outer) - set(chosen))
    if missing:
        raise InputError(f"outer vertices without a selected edge: {missing[:5]}")
    return chosen


def _directed_matrix(graph: GeometricGraph, view: SubsetView, chosen: Mapping[int, int]):
    verts = sorted(view.closure)
    idx = {x: i for i, x in enumerate(verts)}
    M = np.zeros((len(verts), len(verts)))
    edges = []
    for x in sorted(view.omega):
        for y in graph.neighbors(x):
            w = graph.A(x, y) ** 2
            M[idx[x], idx[y]] += w
            M[idx[x], idx[x]] -= w
            edges.append((x, y, w))
    for y, x in sorted(chosen.items()):
        M[idx[y], idx[x]] += 1.0
        M[idx[y], idx[y]] -= 1.0
        edges.append((y, x, 1.0))
    return verts, idx, M, edges


def _weak_components(verts, edges) -> list[list[int]]:
    parent = {x: x for x in verts}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b, _ in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for x in verts:
        groups.setdefault(find(x), []).append(x)
    return [sorted(v) for _, v in sorted(groups.items())]


def dual_vector(graph: GeometricGraph, omega: Iterable[int], selection) -> DirectedSystem:
    """Null vector of the adjoint directed Laplacian, normalized to min 1 on omega."""
    view = subset_view(graph, omega)
    chosen = _check_selection(view, selection)
    verts, idx, M, edges = _directed_matrix(graph, view, chosen)
    v = {}
    for comp in _weak_components(verts, edges):
        sub = [idx[x] for x in comp]
        basis = null_space(M[np.ix_(sub, sub)].T)
        if basis.shape[1] != 1:
            raise InvariantViolation(
                f"adjoint directed Laplacian has nullity {basis.shape[1]} on the component of {comp[0]}"
            )
        vec = basis[:, 0]
        inner = [vec[i] for i, x in enumerate(comp) if x in view.omega]
        if not inner:
            raise InvariantViolation(f"directed component of {comp[0]} contains no vertex of omega")
        if min(inner) * max(inner) <= 0 or min(abs(t) for t in inner) <= 1e-12 * max(abs(t) for t in inner):
            raise InvariantViolation(f"dual vector vanishes or changes sign on omega near {comp[0]}")
        sgn = 1.0 if inner[0] > 0 else -1.0
        m = min(sgn * t for t in inner)
        for i, x in enumerate(comp):
            v[x] = float(sgn * vec[i] / m)
    out_deg = {x: 0.0 for x in verts}
    for a, _, w in edges:
        out_deg[a] += w
    return DirectedSystem(tuple(verts), view.omega, tuple(sorted((x, y) for y, x in chosen.items())), tuple(edges), out_deg, v)


def selection_constant(graph: GeometricGraph, omega: Iterable[int], g, system: DirectedSystem) -> float:
    """``sum_y (g/A)(y) v(y) / sum_omega v`` for the selection of ``system``."""
    view = subset_view(graph, omega)
    costs = _boundary_costs(graph, view, g)
    num = sum(costs[(x, y)] / graph.A(x, y) * system.v[y] for x, y in system.selection)
    den = sum(system.v[x] for x in view.omega)
    return num / den


def selection_lower_bound(graph: GeometricGraph, omega: Iterable[int], g, system: DirectedSystem) -> float:
    view = subset_view(graph, omega)
    costs = _boundary_costs(graph, view, g)
    num = sum(costs[(x, y)] / graph.A(x, y) * system.v[y] for x, y in system.selection)
    vmin = min(system.v[x] for x in view.omega)
    return min(0.0, -num / (len(view.omega) * vmin))


# ---------------------------------------------------------------------------
# dense simplex (Bland's rule)


def simplex_solve(
    c: np.ndarray,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    free: Iterable[int] | None = None,
    tol: float = 1e-11,
    max_iter: int = 50000,
) -> tuple[float, np.ndarray]:
    """Minimize ``c.x`` subject to equalities and ``<=`` rows.

    Variables are nonnegative except those listed in ``free``.  Two-phase
    tableau simplex with Dantzig pricing and a relative pivot threshold,
    falling back to Bland's rule after a long run of degenerate pivots.
    """
    c = np.asarray(c, dtype=float)
    n = len(c)
    free = sorted(set(free or ()))
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    # split free variables x = x+ - x-
    cols = [np.eye(n)[:, j] for j in range(n)] + [-np.eye(n)[:, j] for j in free]
    T = np.array(cols).T  # maps standard variables to original ones
    m_eq, m_ub = len(b_eq), len(b_ub)
    ns = T.shape[1]
    # standard form rows: [A T | slack] = b
    rows = np.zeros((m_eq + m_ub, ns + m_ub))
    rhs = np.concatenate([b_eq, b_ub])
    rows[:m_eq, :ns] = A_eq @ T
    rows[m_eq:, :ns] = A_ub @ T
    rows[m_eq:, ns:] = np.eye(m_ub)
    cost = np.concatenate([c @ T, np.zeros(m_ub)])
    neg = rhs < 0
    rows[neg] *= -1
    rhs = np.where(neg, -rhs, rhs)
    m, nv = rows.shape
    # phase 1 with one artificial per row
    tab = np.zeros((m + 1, nv + m + 1))
    tab[:m, :nv] = rows
    tab[:m, nv : nv + m] = np.eye(m)
    tab[:m, -1] = rhs
    basis = list(range(nv, nv + m))
    tab[m, nv : nv + m] = 1.0
    for i in range(m):
        tab[m] -= tab[i]

    def pivot(r, col):
        tab[r] /= tab[r, col]
        for i in range(len(tab)):
            if i != r and tab[i, col] != 0.0:
                tab[i] -= tab[i, col] * tab[r]
        basis[r] = col

    def run(allowed: int):
        stalled = 0
        for _ in range(max_iter):
            obj = tab[-1, :allowed]
            if stalled > 50 * (m + 1):
                # Bland's rule once degenerate pivots pile up, against cycling
                enter = next((j for j in range(allowed) if obj[j] < -tol), None)
            else:
                j = int(np.argmin(obj)) if allowed else 0
                enter = j if allowed and obj[j] < -tol else None
            if enter is None:
                return True
            col = tab[:m, enter]
            big = float(np.max(np.abs(col))) if m else 0.0
            cand = [i for i in range(m) if col[i] > max(tol, 1e-9 * big)]
            if not cand:
                return False
            ratios = {i: tab[i, -1] / col[i] for i in cand}
            low = min(ratios.values())
            ties = [i for i in cand if ratios[i] <= low + tol * max(1.0, abs(low))]
            if stalled > 50 * (m + 1):
                r = min(ties, key=lambda i: basis[i])
            else:
                r = max(ties, key=lambda i: (col[i], -basis[i]))
            stalled = stalled + 1 if ratios[r] <= tol else 0
            pivot(r, enter)
        raise ConvergenceError("simplex iteration cap reached")

    run(nv + m)
    if tab[-1, -1] < -1e-9 * max(1.0, float(np.max(np.abs(rhs))) if m else 1.0):
        raise LPError("linear program is infeasible")
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if abs(tab[i, j]) > 1e-9), None)
            if j is not None:
                pivot(i, j)
    keep_rows = [i for i in range(m) if basis[i] < nv]
    tab = np.vstack([tab[keep_rows], np.zeros(tab.shape[1])])
    basis = [basis[i] for i in keep_rows]
    m = len(keep_rows)
    tab = np.delete(tab, np.s_[nv : nv + len(rows)], axis=1)
    tab[-1, :nv] = cost
    tab[-1, -1] = 0.0
    for i, bcol in enumerate(basis):
        if tab[-1, bcol] != 0.0:
            tab[-1] -= tab[-1, bcol] * tab[i]
    if not run(nv):
        raise LPError("linear program is unbounded")
    xs = np.zeros(nv)
    for i, bcol in enumerate(basis):
        xs[bcol] = tab[i, -1]
    x = T @ xs[:ns]
    scale = 1.0 + float(np.max(np.abs(x))) if n else 1.0
    if len(b_eq) and np.max(np.abs(A_eq @ x - b_eq)) > 1e-7 * scale:
        raise LPError("simplex solution violates an equality")
    if len(b_ub) and np.max(A_ub @ x - b_ub) > 1e-7 * scale:
        raise LPError("simplex solution violates an inequality")
    return float(c @ x), x


@dataclass(frozen=True)
class LPResult:
    value: float
    u: dict[int, float]
    laplacian: dict[int, float]


def lp_oracle(graph: GeometricGraph, omega: Iterable[int], g, selection, check: bool = True) -> LPResult:
    """min z subject to the selected boundary equalities and ``z >= Delta_A u`` on omega."""
    view = subset_view(graph, omega)
    chosen = _check_selection(view, selection)
    costs = _boundary_costs(graph, view, g)
    verts = sorted(view.closure)
    idx = {x: i for i, x in enumerate(verts)}
    n = len(verts) + 1  # last variable is z
    A_eq, b_eq = [], []
    for y, x in sorted(chosen.items()):
        r = np.zeros(n)
        r[idx[y]] = 1.0
        r[idx[x]] = -1.0
        A_eq.append(r)
        b_eq.append(costs[(x, y)] / graph.A(x, y))
    # pin the additive constant
    r = np.zeros(n)
    r[idx[min(view.omega)]] = 1.0
    A_eq.append(r)
    b_eq.append(0.0)
    A_ub, b_ub = [], []
    for x in sorted(view.omega):
        r = np.zeros(n)
        for y in graph.neighbors(x):
            w = graph.A(x, y) ** 2
            r[idx[y]] += w
            r[idx[x]] -= w
        r[-1] = -1.0
        A_ub.append(r)
        b_ub.append(0.0)
    c = np.zeros(n)
    c[-1] = 1.0
    value, sol = simplex_solve(c, np.array(A_eq), np.array(b_eq), np.array(A_ub), np.array(b_ub), free=range(n))
    u = {x: float(sol[idx[x]]) for x in verts}
    lap = laplacian(graph, view.omega, u)
    if check:
        spread = max(lap.values()) - min(lap.values())
        if spread > 1e-8 * max(1.0, abs(value)):
            raise InvariantViolation(f"LP optimizer has nonconstant Laplacian (spread {spread:.3e})")
    return LPResult(value, u, lap)


# ---------------------------------------------------------------------------
# optimal constant


@dataclass(frozen=True)
class OptimalConstant:
    C: float
    best_selection: tuple[tuple[int, int], ...]
    per_selection: tuple[tuple[tuple[tuple[int, int], ...], float], ...]
    lp_crosscheck: float
    upper_bound: float  # c_g / #omega
    truncated: bool
    count: int

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "best_selection": [list(e) for e in self.best_selection],
            "lp_crosscheck": self.lp_crosscheck,
            "upper_bound": self.upper_bound,
            "truncated": self.truncated,
            "selections": self.count,
        }


def selections(view: SubsetView) -> tuple[list[int], list[list[int]]]:
    """Outer vertices (sorted) and, for each, its interior neighbors (sorted)."""
    outer = view.outer
    return outer, [sorted(view.in_edges(y)) for y in outer]


def optimal_constant(
    graph: GeometricGraph,
    omega: Iterable[int],
    g=None,
    selection_cap: int = 100000,
    jobs: int = 1,
) -> OptimalConstant:
    view = subset_view(graph, omega)
    if len(view.components) != 1:
        raise InputError("optimal_constant needs a connected omega")
    if selection_cap < 1:
        raise InputError("selection_cap must be positive")
    outer, choices = selections(view)
    total = math.prod(len(c) for c in choices)
    truncated = total > selection_cap
    combos = list(itertools.islice(itertools.product(*choices), selection_cap))
    upper = compatibility_sum(graph, view.omega, g) / len(view.omega)

    def evaluate(combo):
        sel = tuple((x, y) for x, y in zip(combo, outer))
        sys_ = dual_vector(graph, view.omega, sel)
        val = selection_constant(graph, view.omega, g, sys_)
        low = selection_lower_bound(graph, view.omega, g, sys_)
        if val < low - 1e-9 * max(1.0, abs(low)):
            raise InvariantViolation(f"selection constant {val} is below the lower bound {low}")
        return tuple(sorted(sel)), val

    if jobs > 1 and len(combos) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(evaluate, combos))
    else:
        results = [evaluate(c) for c in combos]
    best_sel, best = min(results, key=lambda r: (r[1], r[0]))
    # ties within rounding go to the lexicographically first selection
    for sel, val in results:
        if val <= best + 1e-12 * max(1.0, abs(best)) and sel < best_sel:
            best_sel, best = sel, val
    # a truncated search may miss the optimum, where the Laplacian is constant
    # and the constant is at most c_g/#omega
    lp = lp_oracle(graph, view.omega, g, best_sel, check=not truncated).value
    if abs(lp - best) > 1e-9 * max(1.0, abs(best)):
        raise InvariantViolation(f"LP value {lp!r} disagrees with the dual-vector formula {best!r}")
    if not truncated and best > upper + 1e-9 * max(1.0, abs(upper)):
        raise InvariantViolation(f"optimal constant {best} exceeds c_g/#omega = {upper}")
    return OptimalConstant(best, best_sel, tuple(results), lp, upper, truncated, len(results))

"""Power diagrams, equal-volume weight fitting and lattice sufficiency checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InputError, InvariantViolation
from .geometry import (
    Halfspace,
    MinkowskiIterationError,
    Polytope,
    hausdorff_vertices,
    intersect_halfspaces,
    minkowski_constant,
    second_moment,
)
from .graph import check_local_convexity, neighbor_fan, subset_view

VOLUME_RTOL = 1e-7


class TransportConvergenceError(ConvergenceError):
    def __init__(self, message: str, residual: float, diagram: "PowerDiagram"):
        super().__init__(message)
        self.residual = residual
        self.diagram = diagram


@dataclass(frozen=True)
class PowerDiagram:
    sites: np.ndarray
    weights: np.ndarray
    body: Polytope
    cells: tuple[Polytope, ...]
    volumes: np.ndarray

    @property
    def empty_cells(self) -> list[int]:
        return [i for i, v in enumerate(self.volumes) if v <= 0.0]

    def to_dict(self) -> dict:
        return {
            "sites": self.sites.tolist(),
            "weights": self.weights.tolist(),
            "volumes": self.volumes.tolist(),
            "cells": [c.vertices.tolist() for c in self.cells],
            "body_volume": self.body.volume,
        }


@dataclass(frozen=True)
class AleksandrovSolution:
    values: np.ndarray  # u(p) = (|p|^2 - w(p)) / 2
    cells: tuple[Polytope, ...]


def _as_sites(sites) -> np.ndarray:
    P = np.atleast_2d(np.asarray(sites, dtype=float))
    if len(P) == 0:
        raise InputError("at least one site is required")
    for i in range(len(P)):
        for j in range(i):
            if np.linalg.norm(P[i] - P[j]) <= 1e-12 * (1.0 + np.linalg.norm(P[i])):
                raise InputError(f"sites {j} and {i} coincide")
    return P


def power_cell(P: np.ndarray, w: np.ndarray, i: int, body: Polytope) -> Polytope:
    """``body`` intersected with ``{x : |p_i-x|^2 - w_i <= |p_j-x|^2 - w_j}``."""
    hs = list(body.halfspaces)
    p = P[i]
    for j, q in enumerate(P):
        if j == i:
            continue
        hs.append(Halfspace(2.0 * (q - p), float(q @ q - p @ p - w[j] + w[i])))
    return intersect_halfspaces(hs, P.shape[1])


def power_diagram(sites, weights, body: Polytope) -> PowerDiagram:
    P = _as_sites(sites)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if len(w) != len(P):
        raise InputError(f"{len(P)} sites but {len(w)} weights")
    if body.unbounded or not body.has_interior:
        raise InputError("the body must be bounded with nonempty interior")
    if P.shape[1] != body.dim:
        raise InputError("site dimension does not match the body")
    cells = tuple(power_cell(P, w, i, body) for i in range(len(P)))
    vols = np.array([c.volume for c in cells])
    return PowerDiagram(P, w, body, cells, vols)


def dual_objective(diagram: PowerDiagram, target: np.ndarray) -> float:
    """Kantorovich dual value ``sum_i int_{C_i} (|p_i-x|^2 - w_i) + sum_i w_i t_i``."""
    total = 0.0
    for i, cell in enumerate(diagram.cells):
        if cell.volume > 0:
            total += second_moment(cell, diagram.sites[i]) - diagram.weights[i] * cell.volume
    return total + float(diagram.weights @ target)


def _volume_jacobian(diag: PowerDiagram) -> np.ndarray:
    """Derivative of the cell volumes in the weights.

    Raising ``w_i`` pushes the facet shared with cell ``j`` outward by
    ``dw / (2 |p_i - p_j|)``, so ``dV_i/dw_j = -|F_ij| / (2 |p_i - p_j|)``.
    """
    P, w = diag.sites, diag.weights
    n = len(P)
    J = np.zeros((n, n))
    for i, cell in enumerate(diag.cells):
        if cell.volume <= 0.0:
            continue
        for j in range(n):
            if j == i:
                continue
            dvec = P[j] - P[i]
            dist = float(np.linalg.norm(dvec))
            unit = dvec / dist
            off = float(P[j] @ P[j] - P[i] @ P[i] - w[j] + w[i]) / (2.0 * dist)
            area = 0.0
            for f in cell.facets:
                if f.area > 0.0 and f.vertex_indices and np.linalg.norm(f.normal - unit) <= 1e-9:
                    v = cell.vertices[f.vertex_indices[0]]
                    if abs(float(v @ unit) - off) <= 1e-9 * (1.0 + abs(off)):
                        area += f.area
            J[i, j] -= area / (2.0 * dist)
            J[i, i] += area / (2.0 * dist)
    return 0.5 * (J + J.T)


def _newton_step(diag: PowerDiagram, target: np.ndarray) -> np.ndarray | None:
    J = _volume_jacobian(diag)[1:, 1:]
    r = (target - diag.volumes)[1:]
    if len(r) == 0:
        return None
    try:
        dw = np.linalg.solve(J, r)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(dw)):
        return None
    return np.concatenate([[0.0], dw])


def fit_equal_volumes(
    sites,
    body: Polytope,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> tuple[PowerDiagram, AleksandrovSolution]:
    """Find power weights giving every site the volume ``|body|/#sites``.

    Damped Newton on the concave dual once every cell is nonempty, with
    ``target - volume`` as gradient and the facet-area Jacobian as Hessian.
    A step is accepted when all cells keep at least half the smallest volume
    seen so far, the residual drops by ``tau / 2`` and the dual does not
    decrease.  Plain gradient ascent
    with step growth and halving is the fallback.  The first weight is
    pinned to 0.  Converged when every volume is within ``tol * |body|`` of
    the target.
    """
    P = _as_sites(sites)
    n = len(P)
    target = np.full(n, body.volume / n)
    w = np.zeros(n)
    diag = power_diagram(P, w, body)
    obj = dual_objective(diag, target)
    diam = float(np.max(np.ptp(body.vertices, axis=0)))
    spacing = min(
        (float(np.linalg.norm(P[i] - P[j])) for i in range(n) for j in range(i)),
        default=1.0,
    )
    step = spacing * diam / max(body.volume, 1e-300) * 0.5
    it = 0
    resid = float(np.max(np.abs(target - diag.volumes)))
    while resid > tol * body.volume:
        if it >= max_iter:
            raise TransportConvergenceError(
                f"weight fitting did not converge in {max_iter} iterations (residual {resid:.3e})",
                resid,
                diag,
            )
        it += 1
        accepted = None
        if np.all(diag.volumes > 0.0):
            dw = _newton_step(diag, target)
            floor = 0.5 * min(float(np.min(diag.volumes)), float(target[0]))
            tau = 1.0
            while dw is not None and tau > 1e-6:
                cand = w + tau * dw
                cd = power_diagram(P, cand, body)
                cres = float(np.max(np.abs(target - cd.volumes)))
                co = dual_objective(cd, target)
                ascent = co >= obj - 1e-13 * max(1.0, abs(obj))
                if ascent and np.min(cd.volumes) >= floor and cres <= (1.0 - tau / 2.0) * resid:
                    accepted = (cand, cd, co)
                    break
                tau *= 0.5
        if accepted is None:
            grad = target - diag.volumes
            while True:
                cand = w + step * grad
                cand -= cand[0]
                cd = power_diagram(P, cand, body)
                co = dual_objective(cd, target)
                if co >= obj - 1e-13 * max(1.0, abs(obj)):
                    break
                step *= 0.5
                if step < 1e-300:
                    raise TransportConvergenceError("line search collapsed", resid, diag)
            step *= 1.5
            accepted = (cand, cd, co)
        cand, cd, co = accepted
        if co < obj - 1e-10 * max(1.0, abs(obj)):
            raise InvariantViolation("dual objective decreased on an accepted step")
        w, diag, obj = cand, cd, co
        resid = float(np.max(np.abs(target - diag.volumes)))
    values = 0.5 * (np.sum(P * P, axis=1) - w)
    total = float(np.sum(diag.volumes))
    if abs(total - body.volume) > VOLUME_RTOL * body.volume:
        raise InvariantViolation(f"cell volumes sum to {total}, body has {body.volume}")
    return diag, AleksandrovSolution(values, diag.cells)


def legendre_cells(sites, values, body: Polytope) -> tuple[Polytope, ...]:
    """Subdifferentials of the discrete function ``values`` on ``sites``, clipped to body."""
    P = _as_sites(sites)
    c = np.asarray(values, dtype=float)
    out = []
    for i, p in enumerate(P):
        hs = list(body.halfspaces)
        for j, q in enumerate(P):
            if j != i:
                hs.append(Halfspace(q - p, float(c[j] - c[i])))
        out.append(intersect_halfspaces(hs, P.shape[1]))
    return tuple(out)


def legendre_defect(diagram: PowerDiagram, solution: AleksandrovSolution) -> float:
    cells = legendre_cells(diagram.sites, solution.values, diagram.body)
    return max(hausdorff_vertices(a, b) for a, b in zip(cells, diagram.cells))


def aleksandrov_function(graph, omega, g=None, tol: float = 1e-9) -> tuple[dict[int, float], PowerDiagram, AleksandrovSolution]:
    """Discrete function on omega whose subdifferentials split ``H_g`` into equal volumes.

    The values on omega come from the fitted power weights; each outer vertex
    gets the smallest value allowed by its boundary edges, ``min_x u(x) + g/A``.
    """
    from .pde import _boundary_costs
    from .subdifferential import target_polytope

    view = subset_view(graph, omega)
    om = sorted(view.omega)
    H = target_polytope(graph, om, g)
    if H.unbounded:
        raise InputError("the boundary target polytope is unbounded")
    diag, sol = fit_equal_volumes([graph.point(x) for x in om], H, tol=tol)
    u = {x: float(sol.values[i]) for i, x in enumerate(om)}
    for (x, y), c in sorted(_boundary_costs(graph, view, g).items()):
        val = u[x] + c / graph.A(x, y)
        u[y] = min(u.get(y, math.inf), val)
    return u, diag, sol


# ---------------------------------------------------------------------------
# sufficiency of a lattice bundle


@dataclass(frozen=True)
class SufficiencyReport:
    kind: str
    checks: dict[str, bool]
    ratio_weight: tuple[float, float]
    ratio_cost: tuple[float, float]
    volume_range: tuple[float, float]
    orbit_constants: dict[int, float]
    constant: float  # Minkowski constant of the fans
    body_volume: float  # |H| of the lattice
    tiling: dict = field(default_factory=dict)
    defects: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def iso_constant(self) -> float:
        """``C / |H|``: the constant in ``n^(d-1) <= (C/|H|) P^d``."""
        return self.constant / self.body_volume

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "checks": dict(self.checks),
            "passed": self.passed,
            "ratio_weight": list(self.ratio_weight),
            "ratio_cost": list(self.ratio_cost),
            "volume_range": list(self.volume_range),
            "orbit_constants": {str(k): v for k, v in sorted(self.orbit_constants.items())},
            "C": self.constant,
            "H": self.body_volume,
            "tiling": self.tiling,
        }


def lattice_body(bundle) -> Polytope:
    from .subdifferential import target_polytope

    return target_polytope(bundle.graph, bundle.orbit_reps(), lattice_wide=True)


def _tiling_search(bundle, H: Polytope, max_cells: int = 64) -> dict:
    """Look for a dilate ``t H + z`` exactly tiled by at least two dual cells.

    Centers ``z`` are cell vertices and centroids near the seed; dilations are
    read off from the cell facet planes parallel to a facet of H.
    """
    d = bundle.dim
    g = bundle.graph
    seed_pt = g.point(bundle.seed)
    near = [bundle.seed, *g.neighbors(bundle.seed)]
    cand = []
    for x in near:
        cell = bundle.dual_cells[x]
        cand.extend(cell.vertices)
        cand.append(cell.centroid())
    cand.append(seed_pt)
    Z = []
    for z in cand:
        if not any(np.linalg.norm(z - y) <= 1e-9 for y in Z):
            Z.append(np.asarray(z, dtype=float))
    # cells outside the window are absent, which can only make a tiling look incomplete
    cells = [bundle.dual_cells[x] for x in sorted(bundle.dual_cells)]
    faces = [f for f in H.facets if f.area > 0]
    N = np.array([f.normal for f in faces])
    b = np.max(H.vertices @ N.T, axis=0)
    n0, b0 = N[0], float(b[0])
    offsets = set()
    for cell in cells:
        for f in cell.facets:
            if f.area > 0 and np.linalg.norm(f.normal - n0) <= 1e-9:
                offsets.add(round(float(cell.vertices[f.vertex_indices[0]] @ n0), 9))
    centroid_pts = np.array([c.centroid() for c in cells])
    vols = np.array([c.volume for c in cells])
    best = {"found": False}
    for z in Z:
        for o in sorted(offsets):
            t = (o - float(n0 @ z)) / b0
            if t <= 1e-9:
                continue
            expect = t**d * H.volume
            if expect > max_cells * float(np.max(vols)):
                continue
            inside = np.all((centroid_pts - z) @ N.T <= t * b + 1e-9, axis=1)
            count = 0
            total = 0.0
            for i in np.nonzero(inside)[0]:
                V = cells[i].vertices - z
                if np.all(V @ N.T <= t * b + 1e-8 * (1 + t)):
                    count += 1
                    total += vols[i]
            if count >= 2 and abs(total - expect) <= 1e-7 * expect:
                if not best["found"] or count < best["cells"]:
                    best = {"found": True, "cells": count, "dilation": t, "center": [float(c) for c in z]}
    return best


def verify_sufficiency(bundle, rtol: float = 1e-7) -> SufficiencyReport:
    """Check the hypotheses under which the lattice inequality is sharp.

    Reports reciprocity of graph and dual cells, equal cell volumes, constancy
    of both facet ratios, equal fan constants across orbits, local convexity
    and whether a dilate of the lattice body is tiled by dual cells.
    """
    from .lattices import cell_volume_range, facet_ratios, reciprocity_defects

    defects = reciprocity_defects(bundle)
    lo, hi = cell_volume_range(bundle)
    rep = facet_ratios(bundle)
    consts = {}
    for x in bundle.orbit_reps():
        try:
            sol = minkowski_constant(neighbor_fan(bundle.graph, x).vectors)
        except MinkowskiIterationError as exc:
            sol = exc.best
        consts[x] = sol.constant if sol.feasible else math.nan
    cvals = list(consts.values())
    H = lattice_body(bundle)
    local = check_local_convexity(bundle.graph, bundle.orbit_reps())
    tiling = _tiling_search(bundle, H) if not H.unbounded else {"found": False}

    def const(pair):
        return pair[1] > 0 and (pair[1] - pair[0]) <= rtol * pair[1]

    checks = {
        "reciprocity": not defects,
        "equal_volumes": (hi - lo) <= rtol * hi,
        "weight_ratio_constant": const(rep.ratio_weight),
        "cost_ratio_constant": const(rep.ratio_cost),
        "orbit_constants_equal": all(math.isfinite(c) for c in cvals) and (max(cvals) - min(cvals)) <= rtol * max(cvals),
        "local_convexity": not local,
        "dilation_tiling": bool(tiling.get("found")),
    }
    return SufficiencyReport(
        kind=bundle.kind,
        checks=checks,
        ratio_weight=rep.ratio_weight,
        ratio_cost=rep.ratio_cost,
        volume_range=(lo, hi),
        orbit_constants=consts,
        constant=float(np.mean(cvals)),
        body_volume=H.volume,
        tiling=tiling,
        defects=defects,
    )

"""Subdifferential cells of discrete functions and the isoperimetric chain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, InvariantViolation
from .geometry import (
    EPS_VERT,
    Halfspace,
    MinkowskiIterationError,
    Polytope,
    hausdorff_vertices,
    intersect_halfspaces,
    minkowski_constant,
)
from .graph import GeometricGraph, neighbor_fan, subset_view
from .pde import _boundary_costs, compatibility_sum, laplacian

CHAIN_RTOL = 1e-6
MC_SAMPLES = 100000
MC_MAX_OVERLAP = 1e-3


class ChainPreconditionError(InputError):
    """u does not solve the Neumann inequality problem the chain assumes."""


def _cell(graph: GeometricGraph, u: Mapping[int, float], x: int, others: Iterable[int]) -> Polytope:
    px = graph.point(x)
    hs = []
    for z in others:
        if z == x:
            continue
        d = graph.point(z) - px
        if np.linalg.norm(d) == 0.0:
            raise InputError(f"vertices {x} and {z} share a position")
        hs.append(Halfspace(d, u[z] - u[x]))
    return intersect_halfspaces(hs, graph.dim)


def _require_values(view, u: Mapping[int, float]) -> None:
    missing = sorted(z for z in view.closure if z not in u)
    if missing:
        raise InputError(f"u is missing values on closure vertices {missing[:5]}")


def prox_subdifferential(graph: GeometricGraph, omega: Iterable[int], u: Mapping[int, float], x: int) -> Polytope:
    """Slopes supporting u at x against the graph neighbors of x."""
    view = subset_view(graph, omega)
    if x not in view.omega:
        raise InputError(f"vertex {x} is not in omega")
    _require_values(view, u)
    return _cell(graph, u, x, graph.neighbors(x))


def full_subdifferential(graph: GeometricGraph, omega: Iterable[int], u: Mapping[int, float], x: int) -> Polytope:
    """Slopes supporting u at x against every vertex of the closure."""
    view = subset_view(graph, omega)
    if x not in view.omega:
        raise InputError(f"vertex {x} is not in omega")
    _require_values(view, u)
    return _cell(graph, u, x, sorted(view.closure))


def target_polytope(
    graph: GeometricGraph,
    omega: Iterable[int],
    g=None,
    lattice_wide: bool = False,
) -> Polytope:
    """``{p : p.(y-x) <= g/A}`` over the oriented boundary edges of omega.

    With ``lattice_wide`` the intersection runs over every edge incident to a
    vertex of omega instead, which for a periodic graph and one vertex per
    translation orbit gives the body of the whole lattice.
    """
    view = subset_view(graph, omega)
    hs = []
    if lattice_wide:
        for x in sorted(view.omega):
            for y in graph.neighbors(x):
                c = graph.g(x, y) if g is None else (float(g) if isinstance(g, (int, float)) else float(g[(x, y)]))
                hs.append(Halfspace(graph.A(x, y) * (graph.point(y) - graph.point(x)), c))
    else:
        if not view.boundary:
            raise InputError("omega has empty boundary")
        costs = _boundary_costs(graph, view, g)
        for (x, y), c in sorted(costs.items()):
            hs.append(Halfspace(graph.point(y) - graph.point(x), c / graph.A(x, y)))
    return intersect_halfspaces(hs, graph.dim)


# ---------------------------------------------------------------------------
# Minkowski constants of neighbor fans, cached by fan geometry

_FAN_CACHE: dict[tuple, float] = {}


def fan_constant(graph: GeometricGraph, x: int) -> float:
    fan = neighbor_fan(graph, x).vectors
    key = tuple(sorted(tuple(round(float(c), 10) for c in v) for v in fan))
    if key not in _FAN_CACHE:
        try:
            sol = minkowski_constant(fan)
        except MinkowskiIterationError as exc:
            sol = exc.best
        _FAN_CACHE[key] = sol.constant if sol.feasible else math.inf
    return _FAN_CACHE[key]


# ---------------------------------------------------------------------------
# chain report


@dataclass(frozen=True)
class ChainReport:
    vol_Hg: float
    vol_union: float
    sum_prox: float
    sum_bound: float
    rhs: float
    equality_flags: dict[str, bool]
    monotone: bool
    overlap_fraction: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def values(self) -> tuple[float, float, float, float, float]:
        return (self.vol_Hg, self.vol_union, self.sum_prox, self.sum_bound, self.rhs)

    @property
    def all_equal(self) -> bool:
        return all(self.equality_flags.values())

    def to_dict(self) -> dict:
        return {
            "vol_Hg": self.vol_Hg,
            "vol_union": self.vol_union,
            "sum_prox": self.sum_prox,
            "sum_bound": self.sum_bound,
            "rhs": self.rhs,
            "equality_flags": dict(self.equality_flags),
            "monotone": self.monotone,
            "overlap_fraction": self.overlap_fraction,
            "diagnostics": self.diagnostics,
        }

    def csv_row(self) -> list:
        flags = "".join("1" if self.equality_flags[k] else "0" for k in sorted(self.equality_flags))
        return [*self.values, flags, self.overlap_fraction]


def _close(a: float, b: float, rtol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def _le(a: float, b: float, rtol: float) -> bool:
    if math.isinf(b):
        return True
    return a <= b + rtol * max(abs(a), abs(b), 1.0)


def overlap_fraction(cells: list[Polytope], samples: int = MC_SAMPLES, seed: int = 0) -> float:
    """Fraction of sampled points of the union lying in more than one cell."""
    live = [c for c in cells if c.has_interior and not c.unbounded]
    if len(live) < 2:
        return 0.0
    V = np.vstack([c.vertices for c in live])
    lo, hi = V.min(axis=0), V.max(axis=0)
    rng = np.random.default_rng(seed)
    P = rng.uniform(lo, hi, size=(samples, len(lo)))
    count = np.zeros(samples, dtype=int)
    for c in live:
        count += c.contains_many(P, slack=-1e-12).astype(int)
    inside = int(np.sum(count >= 1))
    if inside == 0:
        return 0.0
    return float(np.sum(count >= 2)) / inside


def chain_report(
    graph: GeometricGraph,
    omega: Iterable[int],
    u: Mapping[int, float],
    g=None,
    rtol: float = CHAIN_RTOL,
    samples: int = MC_SAMPLES,
    seed: int = 0,
) -> ChainReport:
    """Evaluate the five-term volume chain for a solution u.

    ``|H_g| <= |union of full cells| <= sum |prox cells| <= sum C_x (Lap u)^d
    <= max C_x c_g^d / #omega^(d-1)`` where ``c_g = sum A g`` over the boundary.
    """
    view = subset_view(graph, omega)
    _require_values(view, u)
    d = graph.dim
    n = len(view.omega)
    costs = _boundary_costs(graph, view, g)
    c_g = compatibility_sum(graph, view.omega, g)
    lap = laplacian(graph, view.omega, u)
    bound = c_g / n
    worst = max(lap.values()) - bound
    if worst > 1e-9 * max(1.0, abs(bound)):
        x = max(lap, key=lambda k: lap[k])
        raise ChainPreconditionError(
            f"Laplacian exceeds c_g/#omega = {bound:.12g} at vertex {x} by {worst:.3e}"
        )
    slack = {}
    for (x, y), c in costs.items():
        slack.setdefault(y, []).append((u[y] - u[x] - c / graph.A(x, y), x))
    unsat = []
    for y, vals in slack.items():
        m = min(abs(s) for s, _ in vals)
        if m > 1e-9 * max(1.0, abs(u[y])):
            unsat.append((m, y))
    if unsat:
        m, y = max(unsat)
        raise ChainPreconditionError(f"outer vertex {y} has no saturated boundary edge (closest gap {m:.3e})")
    ge_slack = sorted(y for y, vals in slack.items() if any(s > 1e-9 * max(1.0, abs(u[y])) for s, _ in vals))

    H = target_polytope(graph, view.omega, g)
    full = {x: _cell(graph, u, x, sorted(view.closure)) for x in sorted(view.omega)}
    prox = {x: _cell(graph, u, x, graph.neighbors(x)) for x in sorted(view.omega)}
    consts = {x: fan_constant(graph, x) for x in sorted(view.omega)}
    vol_H = H.volume
    vol_union = float(sum(c.volume for c in full.values()))
    sum_prox = float(sum(c.volume for c in prox.values()))
    sum_bound = float(sum(consts[x] * max(lap[x], 0.0) ** d for x in view.omega))
    cmax = max(consts.values())
    rhs = cmax * c_g**d / n ** (d - 1)
    vals = [vol_H, vol_union, sum_prox, sum_bound, rhs]
    monotone = all(_le(vals[i], vals[i + 1], rtol) for i in range(4))
    flags = {
        "a": _close(vol_H, vol_union, rtol),
        "c": _close(vol_union, sum_prox, rtol),
        "d": _close(sum_prox, sum_bound, rtol),
        "e": _close(sum_bound, rhs, rtol),
    }
    overlap = overlap_fraction(list(full.values()), samples, seed) if samples else 0.0
    lap_vals = list(lap.values())
    const_vals = list(consts.values())
    lap_constant = max(lap_vals) - min(lap_vals) <= rtol * max(1.0, max(abs(t) for t in lap_vals))
    c_constant = max(const_vals) - min(const_vals) <= rtol * max(const_vals)
    saturated = all(abs(s) <= 1e-9 * max(1.0, abs(u[y])) for y, v in slack.items() for s, _ in v)
    if all(flags.values()) and not (lap_constant and c_constant):
        raise InvariantViolation("chain is tight but the Laplacian or the fan constants are not constant")
    diagnostics = {
        "cells": {
            str(x): {
                "full": full[x].volume,
                "prox": prox[x].volume,
                "laplacian": lap[x],
                "C": consts[x],
            }
            for x in sorted(view.omega)
        },
        "laplacian_constant": lap_constant,
        "constants_equal": c_constant,
        "boundary_saturated": saturated,
        "outer_with_positive_slack": ge_slack,
        "c_g": c_g,
        "Hg_unbounded": H.unbounded,
    }
    return ChainReport(vol_H, vol_union, sum_prox, sum_bound, rhs, flags, monotone, overlap, diagnostics)


# ---------------------------------------------------------------------------
# convexity certificate


@dataclass(frozen=True)
class Certificate:
    convex: bool
    witness: int | None
    reason: str

    def __bool__(self) -> bool:
        return self.convex


def convexity_certificate(graph: GeometricGraph, omega: Iterable[int], u: Mapping[int, float]) -> Certificate:
    """Certify u as the restriction of a convex function.

    Requires, at every vertex of omega, a full-dimensional proximal cell equal
    to the full cell (mutual vertex containment within ``EPS_VERT``).
    """
    view = subset_view(graph, omega)
    _require_values(view, u)
    for x in sorted(view.omega):
        prox = _cell(graph, u, x, graph.neighbors(x))
        full = _cell(graph, u, x, sorted(view.closure))
        if prox.unbounded or full.unbounded:
            return Certificate(False, x, "unbounded subdifferential")
        if not full.has_interior:
            return Certificate(False, x, "subdifferential has empty interior")
        scale = 1.0 + float(np.max(np.abs(prox.vertices)))
        if hausdorff_vertices(prox, full) > EPS_VERT * scale * 10:
            return Certificate(False, x, "proximal and full subdifferentials differ")
    return Certificate(True, None, "proximal and full subdifferentials agree everywhere")

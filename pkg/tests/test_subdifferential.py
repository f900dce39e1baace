import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isoforge import lattices
from isoforge.errors import InputError
from isoforge.graph import GeometricGraph, subset_view
from isoforge.pde import neumann_solve
from isoforge.subdifferential import (
    ChainPreconditionError,
    chain_report,
    convexity_certificate,
    full_subdifferential,
    overlap_fraction,
    prox_subdifferential,
    target_polytope,
)
from isoforge.transport import aleksandrov_function, lattice_body

from conftest import bundle
from strategies import connected_subset

SQRT3 = math.sqrt(3.0)


def _square_grid():
    pts = {}
    edges = []
    ids = {}
    for i in range(-2, 3):
        for j in range(-2, 3):
            ids[(i, j)] = len(ids)
            pts[ids[(i, j)]] = [float(i), float(j)]
    for (i, j), k in ids.items():
        for di, dj in ((1, 0), (0, 1)):
            if (i + di, j + dj) in ids:
                edges.append((k, ids[(i + di, j + dj)]))
    return GeometricGraph.build(pts, edges), ids


def test_quadratic_prox_cell_on_grid():
    g, ids = _square_grid()
    u = {k: 0.5 * float(np.sum(np.square(g.point(k)))) for k in g.vertices}
    cell = prox_subdifferential(g, [ids[(0, 0)]], u, ids[(0, 0)])
    assert cell.volume == pytest.approx(1.0)
    assert np.abs(cell.vertices).max() == pytest.approx(0.5)


def test_affine_u_has_degenerate_cell():
    g, ids = _square_grid()
    u = {k: float(np.array([0.3, -0.2]) @ g.point(k)) for k in g.vertices}
    cell = prox_subdifferential(g, [ids[(0, 0)]], u, ids[(0, 0)])
    assert cell.volume == 0.0
    cert = convexity_certificate(g, [ids[(0, 0)]], u)
    assert not cert and cert.reason == "subdifferential has empty interior"


def test_single_vertex_full_equals_prox():
    g, ids = _square_grid()
    u = {k: float(np.sum(np.square(g.point(k)))) ** 1.5 for k in g.vertices}
    x = ids[(0, 0)]
    a, b = prox_subdifferential(g, [x], u, x), full_subdifferential(g, [x], u, x)
    assert a.volume == pytest.approx(b.volume)


def _hexagon_counterexample():
    # center 0 and hexagon vertices 1..6 in order; the center sees 2, 4, 6
    pts = {0: [0.0, 0.0]}
    for i in range(1, 7):
        t = math.pi / 2 - (i - 1) * math.pi / 3
        pts[i] = [math.cos(t), math.sin(t)]
    edges = [(0, 2), (0, 4), (0, 6)] + [(i, i % 6 + 1) for i in range(1, 7)]
    return GeometricGraph.build(pts, edges)


def test_hexagon_remark_full_differs_from_prox():
    g = _hexagon_counterexample()
    u1 = {0: 0.0, 1: 0.0, 3: 0.0, 5: 0.0, 2: 1.0, 4: 1.0, 6: 1.0}
    omega = [0, 1, 3, 5]
    assert subset_view(g, omega).closure == frozenset(range(7))
    prox = prox_subdifferential(g, omega, u1, 0)
    full = full_subdifferential(g, omega, u1, 0)
    assert prox.volume > 0
    assert full.volume == 0.0
    assert not convexity_certificate(g, omega, u1)


def test_target_polytope_lattice_bodies():
    assert lattice_body(bundle("honeycomb", 3)).volume == pytest.approx(6 * SQRT3, rel=1e-9)
    assert lattice_body(bundle("bcc", 2)).volume == pytest.approx(2.0, rel=1e-7)
    H = lattice_body(bundle("fcc_subdivided", 2))
    assert not H.unbounded
    # octahedron with two of its three vertex pairs truncated
    assert len(H.vertices) == 2 + 4 * 4
    assert len(H.facets) == 8 + 4


def test_target_polytope_requires_boundary():
    g = GeometricGraph.build({0: [0.0], 1: [1.0]}, [(0, 1)])
    with pytest.raises(InputError):
        target_polytope(g, [0, 1])


def test_aleksandrov_chain_on_honeycomb_hexagon(honeycomb):
    om = lattices.reference_subset(honeycomb, "hex_honeycomb", 1)
    u, diag, _ = aleksandrov_function(honeycomb.graph, om)
    rep = chain_report(honeycomb.graph, om, u)
    assert rep.all_equal
    assert rep.values == pytest.approx((6 * SQRT3,) * 5, rel=1e-6)
    assert all(v == pytest.approx(SQRT3, rel=1e-6) for v in diag.volumes)
    cells = rep.diagnostics["cells"]
    assert all(c["prox"] == pytest.approx(SQRT3, rel=1e-6) for c in cells.values())
    assert convexity_certificate(honeycomb.graph, om, u)


def test_square_block_on_grid_is_tight(grid):
    x = grid.seed
    p = grid.graph.point(x)
    om = [grid.locate(p + d) for d in ([0, 0], [1, 0], [0, 1], [1, 1])]
    sol = neumann_solve(grid.graph, om)
    rep = chain_report(grid.graph, om, sol.u)
    assert rep.values == pytest.approx((4.0,) * 5)
    assert rep.all_equal


def test_tromino_chain_is_strict(grid):
    p = grid.graph.point(grid.seed)
    om = [grid.locate(p + d) for d in ([0, 0], [1, 0], [0, 1])]
    sol = neumann_solve(grid.graph, om)
    rep = chain_report(grid.graph, om, sol.u)
    assert rep.monotone
    # full cells still tile H_g; the slack sits in the proximal and fan links
    assert rep.equality_flags["a"]
    assert not rep.equality_flags["c"] and not rep.equality_flags["d"]
    assert rep.values == pytest.approx((4.0, 4.0, 40 / 9, 16 / 3, 16 / 3))


def test_nonconstant_laplacian_makes_last_link_strict(triangular):
    lab = {v: k for k, v in triangular.labels.items()}
    om = [lab[(0, 0)], lab[(1, 0)], lab[(1, 1)], lab[(2, 1)]]
    sol = neumann_solve(triangular.graph, om)
    lap = list(sol.f.values())
    assert max(lap) - min(lap) > 1e-6
    rep = chain_report(triangular.graph, om, sol.u)
    assert not rep.equality_flags["e"]


def test_precondition_violations(honeycomb):
    om = lattices.reference_subset(honeycomb, "hex_honeycomb", 1)
    sol = neumann_solve(honeycomb.graph, om)
    bumped = dict(sol.u)
    y = sorted(set(bumped) - om)[0]
    bumped[y] += 0.5
    with pytest.raises(ChainPreconditionError):
        chain_report(honeycomb.graph, om, bumped)
    sunk = dict(sol.u)
    sunk[sorted(om)[0]] -= 1.0
    with pytest.raises(ChainPreconditionError, match="Laplacian"):
        chain_report(honeycomb.graph, om, sunk)


def test_convexity_certificates(honeycomb):
    om = [honeycomb.seed, *honeycomb.graph.neighbors(honeycomb.seed)]
    closure = subset_view(honeycomb.graph, om).closure
    u = {x: float(np.sum(np.square(honeycomb.graph.point(x)))) for x in closure}
    assert convexity_certificate(honeycomb.graph, om, u)
    broken = dict(u)
    broken[honeycomb.seed] += 5.0
    cert = convexity_certificate(honeycomb.graph, om, broken)
    assert not cert and cert.witness is not None


def test_overlap_of_disjoint_cells_is_zero():
    from isoforge.geometry import Halfspace, intersect_halfspaces

    left = intersect_halfspaces([Halfspace([1, 0], 0), Halfspace([-1, 0], 1), Halfspace([0, 1], 1), Halfspace([0, -1], 1)], 2)
    right = intersect_halfspaces([Halfspace([-1, 0], 0), Halfspace([1, 0], 1), Halfspace([0, 1], 1), Halfspace([0, -1], 1)], 2)
    assert overlap_fraction([left, right], 20000, seed=3) == 0.0
    assert overlap_fraction([left, left], 20000, seed=3) == pytest.approx(1.0)


def _random_costs(data, b, om):
    view = subset_view(b.graph, om)
    return {e: data.draw(st.floats(0.5, 2.0)) for e in view.boundary}


@pytest.mark.parametrize("kind", ["honeycomb", "triangular", "product_grid", "affine_honeycomb"])
@settings(max_examples=200)
@given(data=st.data())
def test_chain_monotone_and_cells_nested(kind, data):
    b = bundle(kind, 4)
    om = data.draw(connected_subset(b, 6))
    g = _random_costs(data, b, om) if data.draw(st.booleans()) else None
    sol = neumann_solve(b.graph, om, g)
    rep = chain_report(b.graph, om, sol.u, g, samples=20000, seed=data.draw(st.integers(0, 1000)))
    assert rep.monotone
    assert rep.overlap_fraction <= 1e-3
    for x in sorted(om):
        full = full_subdifferential(b.graph, om, sol.u, x)
        prox = prox_subdifferential(b.graph, om, sol.u, x)
        if full.unbounded:
            assert prox.unbounded
            continue
        for v in full.vertices:
            assert prox.contains(v, slack=1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isoforge.geometry import (
    EPS_GEOM,
    GeometryError,
    Halfspace,
    fan_feasible,
    hull_halfspaces,
    in_convex_hull,
    intersect_halfspaces,
    merge_fan,
    minkowski_constant,
    second_moment,
    triangulate,
    simplex_volume,
    wulff_shape,
)

SQRT3 = math.sqrt(3.0)
HONEY = [np.array([math.cos(t), math.sin(t)]) * SQRT3 / 3 for t in (math.pi / 2, 7 * math.pi / 6, 11 * math.pi / 6)]


def test_cube_from_six_halfspaces():
    hs = [Halfspace(s * np.eye(3)[i], 0.5) for i in range(3) for s in (1, -1)]
    P = intersect_halfspaces(hs, 3)
    assert P.volume == pytest.approx(1.0, rel=1e-12)
    assert len(P.vertices) == 8
    assert sorted(round(f.area, 12) for f in P.facets) == [1.0] * 6


def test_hexagon_from_honeycomb_directions():
    hs = [Halfspace(s * v, 1.0) for v in HONEY for s in (1, -1)]
    P = intersect_halfspaces(hs, 2)
    assert P.volume == pytest.approx(6 * SQRT3, rel=1e-12)
    assert len(P.vertices) == 6
    for f in P.facets:
        assert f.area == pytest.approx(2.0, rel=1e-12)


def test_strip_is_unbounded():
    P = intersect_halfspaces([Halfspace([1, 0], 1), Halfspace([-1, 0], 1)], 2)
    assert P.unbounded and P.volume == math.inf


def test_infeasible_region_has_zero_volume():
    P = intersect_halfspaces([Halfspace([1, 0], -1), Halfspace([-1, 0], -1), Halfspace([0, 1], 1), Halfspace([0, -1], 1)], 2)
    assert P.volume == 0.0
    assert not P.has_interior


def test_zero_normal_rejected():
    with pytest.raises(GeometryError):
        Halfspace([0.0, 0.0], 1.0)


directions = st.lists(
    st.floats(min_value=0, max_value=2 * math.pi, allow_nan=False), min_size=3, max_size=8, unique=True
)


def _bounded(angles, offsets):
    hs = [Halfspace([math.cos(a), math.sin(a)], b) for a, b in zip(angles, offsets)]
    return intersect_halfspaces(hs, 2)


@settings(max_examples=60)
@given(
    st.lists(st.floats(0, 2 * math.pi), min_size=3, max_size=7),
    st.lists(st.floats(0.2, 3.0), min_size=7, max_size=7),
)
def test_closure_identity_and_feasible_vertices(angles, offsets):
    P = _bounded(angles, offsets)
    if P.unbounded or not P.has_interior:
        return
    total = sum(f.area for f in P.facets)
    assert np.linalg.norm(P.closure_residual()) <= EPS_GEOM * total
    assert all(P.contains(v) for v in P.vertices)


@settings(max_examples=40)
@given(
    st.lists(st.floats(0, 2 * math.pi), min_size=4, max_size=7),
    st.lists(st.floats(0.2, 3.0), min_size=7, max_size=7),
    st.floats(0.1, 5.0),
)
def test_volume_scales_with_offsets(angles, offsets, lam):
    P = _bounded(angles, offsets)
    if P.unbounded or not P.has_interior:
        return
    Q = _bounded(angles, [lam * b for b in offsets])
    assert Q.volume == pytest.approx(lam**2 * P.volume, rel=1e-9)


def test_square_fan_constant():
    sol = minkowski_constant([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert sol.feasible
    assert sol.constant == pytest.approx(0.25, abs=1e-8)
    assert np.allclose(sol.c, 0.25, atol=1e-8)


def test_honeycomb_fan_constant():
    sol = minkowski_constant(HONEY)
    assert sol.constant == pytest.approx(SQRT3, rel=1e-8)
    edges = [f.area for f in sol.polytope.facets]
    assert edges == pytest.approx([2.0, 2.0, 2.0], rel=1e-6)


def test_infeasible_fan_reports_not_feasible():
    sol = minkowski_constant([[1, 0], [0, 1], [-1, -2]])
    assert not sol.feasible
    assert not fan_feasible([np.array([1.0, 0.0]), np.array([-1.0, 0.0])])


def test_parallel_vectors_are_merged():
    merged = merge_fan([[1, 0], [2, 0], [-3, 0], [0, 1], [0, -1]])
    assert len(merged) == 4
    assert any(np.allclose(v, [3, 0]) for v in merged)


def _random_fan(draw_angles, lengths):
    V = [np.array([math.cos(a), math.sin(a)]) * l for a, l in zip(draw_angles, lengths)]
    V.append(-np.sum(V, axis=0))
    return V


@st.composite
def feasible_fans(draw):
    a = draw(st.lists(st.floats(0, 2 * math.pi), min_size=3, max_size=3))
    l = draw(st.lists(st.floats(0.3, 2.0), min_size=3, max_size=3))
    V = _random_fan(a, l)
    if min(np.linalg.norm(v) for v in V) < 0.2 or not fan_feasible(V):
        from hypothesis import reject

        reject()
    U = [v / np.linalg.norm(v) for v in V]
    if min(np.linalg.norm(U[i] - U[j]) for i in range(4) for j in range(i)) < 0.1:
        from hypothesis import reject

        reject()
    return V


@settings(max_examples=25)
@given(feasible_fans())
def test_facet_area_law(V):
    sol = minkowski_constant(V)
    for v in sol.fan:
        assert sol.polytope.facet_area(v) == pytest.approx(sol.alpha * np.linalg.norm(v), rel=1e-7)
    assert sol.constant == pytest.approx(sol.alpha / 2, rel=1e-7)


@settings(max_examples=20)
@given(feasible_fans(), st.floats(-1, 1), st.floats(-1, 1))
def test_translation_invariance(V, w1, w2):
    sol = minkowski_constant(V)
    w = np.array([w1, w2])
    shifted = intersect_halfspaces([Halfspace(v, c + float(v @ w)) for v, c in zip(sol.fan, sol.c)], 2)
    assert shifted.volume == pytest.approx(sol.polytope.volume, rel=1e-9)


@settings(max_examples=6)
@given(feasible_fans())
def test_solver_matches_grid_search(V):
    sol = minkowski_constant(V)
    fan = sol.fan
    k = len(fan)
    # the cell volume is invariant under c -> c + (v.w), so one direction is left
    M = np.vstack([np.ones(k), [v[0] for v in fan], [v[1] for v in fan]])
    e = np.linalg.svd(M)[2][-1]
    c0 = np.full(k, 1.0 / k)
    best = 0.0
    for t in np.arange(-3.0, 3.0, 1e-3):
        c = c0 + t * e
        P = intersect_halfspaces([Halfspace(v, ck) for v, ck in zip(fan, c)], 2)
        if not P.unbounded:
            best = max(best, P.volume)
    assert sol.constant == pytest.approx(best, abs=1e-4)


def test_wulff_shapes():
    sq = wulff_shape([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert sq.volume == pytest.approx(4.0)
    hexa = wulff_shape(HONEY + [-v for v in HONEY])
    assert len(hexa.vertices) == 6
    apothems = [max(float(f.normal @ p) for p in hexa.vertices) for f in hexa.facets]
    assert apothems == pytest.approx([1.0] * 6)


def test_wulff_differs_from_minkowski_optimizer_for_unbalanced_fan():
    V = [[1.0, 0.0], [0.0, 2.0], [-1.0, -1.0]]
    assert not minkowski_constant(V).feasible
    W = wulff_shape(V)
    assert W.has_interior and not W.unbounded


def test_hull_and_membership():
    pts = [[0, 0], [2, 0], [0, 2], [2, 2], [1, 1]]
    assert len(hull_halfspaces(pts)) == 4
    assert in_convex_hull(pts, [1.5, 0.5])
    assert not in_convex_hull(pts, [2.5, 0.5])
    assert in_convex_hull([[0, 0], [2, 0]], [1, 0])
    assert not in_convex_hull([[0, 0], [2, 0]], [1, 0.1])


def test_triangulation_and_second_moment():
    sq = intersect_halfspaces([Halfspace(s * np.eye(2)[i], 1) for i in range(2) for s in (1, -1)], 2)
    simplices = triangulate(sq)
    assert sum(simplex_volume(S) for S in simplices) == pytest.approx(4.0)
    assert second_moment(sq, [0, 0]) == pytest.approx(8 / 3)
    cube = intersect_halfspaces([Halfspace(s * np.eye(3)[i], 1) for i in range(3) for s in (1, -1)], 3)
    assert second_moment(cube, [0, 0, 0]) == pytest.approx(8.0)
    assert second_moment(cube, [1, 0, 0]) == pytest.approx(8.0 + 8.0)


def test_triangulation_survives_near_duplicate_vertices():
    # a square whose corner is cut by a sliver 3e-9 wide
    hs = [Halfspace(s * np.eye(2)[i], 1) for i in range(2) for s in (1, -1)]
    hs.append(Halfspace([1.0, 1.0], 2.0 - 3e-9))
    poly = intersect_halfspaces(hs, 2)
    assert sum(simplex_volume(S) for S in triangulate(poly)) == pytest.approx(poly.volume, abs=1e-8)
    assert second_moment(poly, [0, 0]) == pytest.approx(8 / 3, rel=1e-14)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.2, 1)), min_size=1, max_size=8))
def test_triangulation_volume_matches(cuts):
    hs = [Halfspace(s * np.eye(3)[i], 1) for i in range(3) for s in (1, -1)]
    hs += [Halfspace([a, b, c], off) for a, b, c, off in cuts if abs(a) + abs(b) + abs(c) > 1e-3]
    poly = intersect_halfspaces(hs, 3)
    pieces = triangulate(poly)
    assert sum(simplex_volume(S) for S in pieces) == pytest.approx(poly.volume, abs=1e-8)
    # the moment recursion against the triangulation
    c = np.array([0.1, 0.2, -0.3])
    by_pieces = 0.0
    for S in pieces:
        Q = S - c
        by_pieces += simplex_volume(S) / 20 * (float(np.sum(Q * Q)) + float(np.sum(Q.sum(axis=0) ** 2)))
    assert second_moment(poly, c) == pytest.approx(by_pieces, abs=1e-7)
    # the second moment is quadratic in the center
    c = np.array([0.3, -0.2, 0.5])
    lhs = second_moment(poly, c) + second_moment(poly, -c)
    assert lhs == pytest.approx(2 * second_moment(poly, np.zeros(3)) + 2 * float(c @ c) * poly.volume, rel=1e-9, abs=1e-12)

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isoforge import lattices
from isoforge.errors import InputError
from isoforge.graph import (
    GeometricGraph,
    check_linear_precision,
    check_local_convexity,
    connected_components,
    is_connected,
    neighbor_fan,
    subset_view,
)


def test_single_honeycomb_vertex_boundary(honeycomb):
    view = subset_view(honeycomb.graph, [honeycomb.seed])
    assert len(view.boundary) == 3
    assert view.weighted_boundary == pytest.approx(3.0)


def test_hexagon_cycle_boundary(honeycomb):
    om = lattices.reference_subset(honeycomb, "hex_honeycomb", 1)
    view = subset_view(honeycomb.graph, om)
    assert len(om) == 6
    assert len(view.boundary) == 6
    assert view.unique_in_edges


def test_triangular_rhombus_has_shared_outer_vertices(triangular):
    lab = {v: k for k, v in triangular.labels.items()}
    om = [lab[(0, 0)], lab[(1, 0)], lab[(0, 1)], lab[(1, 1)]]
    view = subset_view(triangular.graph, om)
    assert len(view.outer) < len(view.boundary)
    assert not view.unique_in_edges


def test_whole_finite_graph_has_empty_boundary():
    g = GeometricGraph.build({0: [0.0], 1: [1.0], 2: [2.0]}, [(0, 1), (1, 2)])
    view = subset_view(g, [0, 1, 2])
    assert view.boundary == () and view.weighted_boundary == 0.0


def test_unknown_vertex_is_input_error(honeycomb):
    with pytest.raises(InputError):
        subset_view(honeycomb.graph, [10**9])
    with pytest.raises(InputError):
        honeycomb.graph.neighbors(10**9)


def test_fans():
    grid = lattices.product_grid((1.0, 1.0), 2)
    fan = neighbor_fan(grid.graph, grid.seed).as_array()
    assert sorted(map(tuple, np.round(fan, 12))) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    hc = lattices.honeycomb(2)
    fan = neighbor_fan(hc.graph, hc.seed).as_array()
    assert np.linalg.norm(fan, axis=1) == pytest.approx([math.sqrt(3) / 3] * 3)
    cosines = [fan[i] @ fan[j] / (np.linalg.norm(fan[i]) * np.linalg.norm(fan[j])) for i in range(3) for j in range(i)]
    assert cosines == pytest.approx([-0.5] * 3)
    tri = lattices.triangular(2)
    fan = neighbor_fan(tri.graph, tri.seed).as_array()
    assert np.linalg.norm(fan, axis=1) == pytest.approx([1.0] * 6)
    angles = sorted(math.atan2(v[1], v[0]) % (2 * math.pi) for v in fan)
    assert np.diff(angles) == pytest.approx([math.pi / 3] * 5)


def test_local_convexity(honeycomb):
    assert check_local_convexity(honeycomb.graph, honeycomb.core) == []
    pts = {0: [0, 0], 1: [1, 0], 2: [-1, 0], 3: [0, 1], 4: [1, 1]}
    g = GeometricGraph.build(pts, [(0, 1), (0, 2), (3, 4), (1, 4)])
    assert 0 in check_local_convexity(g)
    line = GeometricGraph.build({0: [0.0], 1: [1.0]}, [(0, 1)])
    assert check_local_convexity(line) == []


def test_linear_precision():
    hc = lattices.honeycomb(2)
    res = check_linear_precision(hc.graph)
    assert all(np.linalg.norm(res[x]) < 1e-12 for x in hc.core)
    b = lattices.bcc(1)
    res = check_linear_precision(b.graph)
    assert all(np.linalg.norm(res[x]) < 1e-12 for x in b.core)
    g = GeometricGraph.build({0: [0, 0], 1: [1, 0], 2: [0, 1]}, [(0, 1), (0, 2)])
    assert check_linear_precision(g)[0] == pytest.approx([1.0, 1.0])


def test_fan_sum_equals_linear_precision_residual(bcc):
    res = check_linear_precision(bcc.graph)
    for x in sorted(bcc.core)[:20]:
        total = np.zeros(3)
        for v in neighbor_fan(bcc.graph, x).vectors:
            total += v
        assert np.array_equal(total, res[x])


def test_json_round_trip(honeycomb):
    data = json.loads(json.dumps(honeycomb.graph.to_dict()))
    g = GeometricGraph.from_dict(data)
    assert g.edges() == honeycomb.graph.edges()
    with pytest.raises(InputError):
        GeometricGraph.from_dict({"dim": 2, "vertices": {"0": [0, 0], "1": [1, 0]}, "edges": []})
    with pytest.raises(InputError):
        GeometricGraph.from_dict({"dim": 2})


def test_duplicate_edge_rejected():
    with pytest.raises(InputError):
        GeometricGraph.build({0: [0.0], 1: [1.0]}, [(0, 1), (1, 0)])


@st.composite
def subsets(draw, kind):
    b = {"honeycomb": lattices.honeycomb(3), "triangular": lattices.triangular(3)}[kind]
    core = sorted(b.core)
    om = draw(st.sets(st.sampled_from(core), min_size=1, max_size=10))
    return b, om


@settings(max_examples=60)
@given(st.sampled_from(["honeycomb", "triangular"]).flatmap(subsets))
def test_subset_view_invariants(data):
    b, om = data
    view = subset_view(b.graph, om)
    assert view.omega <= view.closure
    targets = {y for _, y in view.boundary}
    assert targets == view.closure - view.omega
    assert len(view.outer) <= len(view.boundary)
    assert view.unique_in_edges == (len(view.outer) == len(view.boundary))
    assert set().union(*connected_components(b.graph, om)) == set(om)
    big = subset_view(b.graph, view.closure)
    assert big.closure >= view.closure
    assert not set(big.boundary) & {e for e in view.boundary if e[1] in view.omega}


def test_connectivity(grid):
    x = grid.seed
    y = grid.graph.neighbors(x)[0]
    assert is_connected(grid.graph, [x, y])
    far = max(grid.core, key=lambda z: np.linalg.norm(grid.graph.point(z) - grid.graph.point(x)))
    assert len(connected_components(grid.graph, [x, far])) == 2

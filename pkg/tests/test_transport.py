import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isoforge import lattices
from isoforge.errors import InputError
from isoforge.geometry import Halfspace, intersect_halfspaces
from isoforge.subdifferential import chain_report, target_polytope
from isoforge.transport import (
    TransportConvergenceError,
    aleksandrov_function,
    dual_objective,
    fit_equal_volumes,
    legendre_defect,
    power_diagram,
    verify_sufficiency,
)

from conftest import bundle

SQRT3 = math.sqrt(3.0)


def _box(a=1.0, d=2):
    hs = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        hs += [Halfspace(e, a), Halfspace(-e, a)]
    return intersect_halfspaces(hs, d)


def test_power_diagram_zero_weights_is_voronoi():
    diag = power_diagram([[-0.5, 0.0], [0.5, 0.0]], [0.0, 0.0], _box())
    assert diag.volumes == pytest.approx([2.0, 2.0])
    assert diag.empty_cells == []


def test_power_weights_shift_the_bisector():
    # |x-p|^2 - w equal at x = t gives t = w / 2 for sites at -/+ 1/2
    diag = power_diagram([[-0.5, 0.0], [0.5, 0.0]], [0.4, 0.0], _box())
    assert diag.volumes == pytest.approx([2.4, 1.6])


def test_power_diagram_input_errors():
    with pytest.raises(InputError):
        power_diagram([[0.0, 0.0], [0.0, 0.0]], [0.0, 0.0], _box())
    with pytest.raises(InputError):
        power_diagram([[0.0, 0.0]], [0.0, 1.0], _box())
    with pytest.raises(InputError):
        power_diagram([[0.0, 0.0, 0.0]], [0.0], _box())


@settings(max_examples=30)
@given(st.lists(st.tuples(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9)), min_size=2, max_size=6), st.data())
def test_fit_equal_volumes_random_sites(pts, data):
    P = np.array(pts)
    for i in range(len(P)):
        for j in range(i):
            if np.linalg.norm(P[i] - P[j]) < 0.05:
                return
    body = _box()
    diag, sol = fit_equal_volumes(P, body, tol=1e-8)
    assert diag.volumes == pytest.approx(np.full(len(P), body.volume / len(P)), abs=1e-7)
    assert float(np.sum(diag.volumes)) == pytest.approx(body.volume, rel=1e-7)
    assert legendre_defect(diag, sol) <= 1e-6
    # the fitted weights maximize the concave dual
    k = data.draw(st.integers(0, len(P) - 1))
    w = diag.weights.copy()
    w[k] += data.draw(st.sampled_from([-1e-2, 1e-2]))
    target = np.full(len(P), body.volume / len(P))
    assert dual_objective(power_diagram(P, w, body), target) <= dual_objective(diag, target) + 1e-12


@pytest.mark.parametrize("a", [0.25, 0.5])
def test_fit_with_a_nearly_degenerate_cell(a):
    # one cell picks up a corner sliver a few 1e-9 wide
    P = np.array([[0.0, 0.0], [a, 0.0], [1e-9, a]])
    diag, _ = fit_equal_volumes(P, _box(), tol=1e-8)
    assert diag.volumes == pytest.approx(np.full(3, 4.0 / 3.0), abs=1e-7)


def test_fit_reports_nonconvergence():
    P = np.array([[-0.9, 0.0], [-0.89, 0.0], [0.9, 0.9], [0.9, -0.9]])
    with pytest.raises(TransportConvergenceError) as info:
        fit_equal_volumes(P, _box(), tol=1e-12, max_iter=0)
    assert info.value.residual > 0
    assert len(info.value.diagram.volumes) == 4


def test_fit_on_honeycomb_hexagon(honeycomb):
    om = sorted(lattices.reference_subset(honeycomb, "hex_honeycomb", 1))
    H = target_polytope(honeycomb.graph, om)
    assert H.volume == pytest.approx(6 * SQRT3)
    diag, sol = fit_equal_volumes([honeycomb.graph.point(x) for x in om], H, tol=1e-10)
    assert diag.volumes == pytest.approx([SQRT3] * 6, rel=1e-8)
    assert legendre_defect(diag, sol) <= 1e-8


def test_aleksandrov_function_satisfies_chain(honeycomb):
    om = lattices.reference_subset(honeycomb, "hex_honeycomb", 1)
    u, diag, sol = aleksandrov_function(honeycomb.graph, om)
    assert set(u) == set(om) | {y for x in om for y in honeycomb.graph.neighbors(x)}
    rep = chain_report(honeycomb.graph, om, u)
    assert rep.all_equal and rep.monotone


def test_aleksandrov_on_triangular_is_strict(triangular):
    lab = {v: k for k, v in triangular.labels.items()}
    om = [lab[(0, 0)], lab[(1, 0)], lab[(1, 1)]]
    u, diag, _ = aleksandrov_function(triangular.graph, om)
    assert diag.volumes == pytest.approx([diag.body.volume / 3] * 3, rel=1e-7)
    rep = chain_report(triangular.graph, om, u)
    assert rep.monotone
    assert rep.vol_Hg < rep.rhs


def test_aleksandrov_rejects_unbounded_target():
    from isoforge.graph import GeometricGraph

    g = GeometricGraph.build({0: [0.0, 0.0], 1: [1.0, 0.0], 2: [-1.0, 0.0]}, [(0, 1), (0, 2)])
    with pytest.raises(InputError):
        aleksandrov_function(g, [0])


EXPECTED = {
    # kind, window: (passes, C, |H|)
    ("honeycomb", 4): (True, SQRT3, 6 * SQRT3),
    ("product_grid", 4): (True, 0.25, 4.0),
    ("bcc", 5): (True, 1 / 12, 2.0),
    ("triangular", 4): (False, SQRT3 / 18, 2 * SQRT3),
    ("fcc_subdivided", 3): (False, 1 / 3, None),
    ("affine_honeycomb", 4): (False, None, None),
}


@pytest.mark.parametrize("key", sorted(EXPECTED))
def test_verify_sufficiency(key):
    kind, window = key
    passes, C, H = EXPECTED[key]
    rep = verify_sufficiency(bundle(kind, window))
    assert rep.passed is passes
    failing = [k for k, v in rep.checks.items() if not v]
    assert failing == ([] if passes else ["dilation_tiling"])
    if C is not None:
        assert rep.constant == pytest.approx(C, rel=1e-7)
    if H is not None:
        assert rep.body_volume == pytest.approx(H, rel=1e-7)
    if passes:
        b = bundle(kind, window)
        t = rep.tiling["dilation"]
        cell = b.dual_cells[b.seed].volume
        assert rep.tiling["cells"] * cell == pytest.approx(t**b.dim * rep.body_volume, rel=1e-6)


def test_bcc_tiling_needs_room():
    assert not verify_sufficiency(bundle("bcc", 3)).checks["dilation_tiling"]


def test_iso_constants():
    assert verify_sufficiency(bundle("honeycomb", 4)).iso_constant == pytest.approx(1 / 6)
    assert verify_sufficiency(bundle("bcc", 5)).iso_constant == pytest.approx(1 / 24)
    assert verify_sufficiency(bundle("product_grid", 4)).iso_constant == pytest.approx(1 / 16)

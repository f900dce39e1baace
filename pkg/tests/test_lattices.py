import math

import numpy as np
import pytest

from isoforge import lattices
from isoforge.errors import InputError
from isoforge.geometry import minkowski_constant
from isoforge.graph import check_local_convexity, neighbor_fan, subset_view
from isoforge.lattices import (
    WindowError,
    cell_volume_range,
    facet_ratios,
    orbit_minkowski,
    reciprocity_defects,
    reference_subset,
)

from conftest import bundle

SQRT3 = math.sqrt(3.0)
KINDS = [("honeycomb", 3), ("affine_honeycomb", 3), ("triangular", 3), ("product_grid", 3), ("bcc", 2), ("fcc_subdivided", 2)]


@pytest.mark.parametrize("kind,window", KINDS)
def test_bundle_structure(kind, window):
    b = bundle(kind, window)
    assert reciprocity_defects(b) == []
    lo, hi = cell_volume_range(b)
    assert hi - lo <= 1e-9 * hi
    assert facet_ratios(b).constant(1e-9)
    assert check_local_convexity(b.graph, b.orbit_reps()) == []


def test_honeycomb_cells_and_degrees():
    b = lattices.honeycomb(2)
    assert all(b.graph.degree(x) == 3 for x in b.core)
    assert cell_volume_range(b) == pytest.approx((SQRT3 / 4, SQRT3 / 4))


def test_bcc_disphenoid_cells():
    b = lattices.bcc(1)
    c = b.dual_cells[b.seed]
    assert len(c.vertices) == 4
    edges = sorted(
        round(float(np.linalg.norm(c.vertices[i] - c.vertices[j]) ** 2), 9) for i in range(4) for j in range(i)
    )
    # a disphenoid: opposite edges equal, here two of squared length 4 and four of 3
    assert edges == [3.0, 3.0, 3.0, 3.0, 4.0, 4.0]


def test_fcc_facet_areas():
    b = lattices.fcc_subdivided(1)
    assert sorted({round(a, 9) for a in b.facet_map.values()}) == [round(SQRT3 / 2, 9), 1.0]


def test_orbit_constants():
    assert list(orbit_minkowski(lattices.honeycomb(2)).values()) == pytest.approx([SQRT3] * 2, rel=1e-8)
    assert list(orbit_minkowski(lattices.product_grid((1.0, 1.0), 2)).values()) == pytest.approx([0.25], rel=1e-8)


def test_grid_fan_rescaled_axes():
    b = lattices.product_grid((0.5, 2.0), 2)
    fan = neighbor_fan(b.graph, b.seed).as_array()
    assert sorted(np.round(np.abs(fan).max(axis=1), 12)) == [0.5, 0.5, 2.0, 2.0]
    assert minkowski_constant(fan).constant == pytest.approx(0.25, rel=1e-8)


def test_singular_affine_matrix():
    with pytest.raises(InputError):
        lattices.honeycomb(2, [[1, 2], [2, 4]])
    with pytest.raises(InputError):
        lattices.generate("penrose")


def test_product_of_segments_is_square_grid():
    seg = lattices.product_grid((1.0,), 3)
    p = lattices.product(seg, seg)
    fan = sorted(map(tuple, np.round(neighbor_fan(p.graph, p.seed).as_array(), 12)))
    assert fan == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_product_constant_factorizes():
    h = lattices.honeycomb(2)
    p = lattices.product(h, lattices.product_grid((1.0,), 2))
    assert p.dim == 3
    fan = neighbor_fan(p.graph, p.seed).as_array()
    flat = [v[:2] for v in fan if abs(v[2]) < 1e-12]
    axis = [v[2:] for v in fan if abs(v[2]) >= 1e-12]
    c1 = minkowski_constant(flat).constant
    c2 = minkowski_constant(axis).constant
    assert c1 == pytest.approx(SQRT3, rel=1e-8)
    # the budget splits 2:1 between the factors
    assert minkowski_constant(fan).constant == pytest.approx(c1 * c2 * 4 / 27, rel=1e-7)
    assert reciprocity_defects(p) == []


def test_product_of_honeycombs_is_combinatorially_sound():
    p = lattices.product(lattices.honeycomb(1), lattices.honeycomb(1), check=False)
    assert p.dim == 4
    assert p.graph.degree(p.seed) == 6


def test_subdivided_honeycomb():
    h = lattices.honeycomb(2)
    s = lattices.subdivide(h)
    lo, hi = cell_volume_range(s)
    assert lo == pytest.approx(SQRT3 / 12, rel=1e-9) and hi == pytest.approx(SQRT3 / 12, rel=1e-9)
    assert reciprocity_defects(s) == []
    assert facet_ratios(s).constant(1e-9)


def test_subdivided_bcc():
    s = lattices.subdivide(lattices.bcc(1))
    lo, hi = cell_volume_range(s)
    assert lo == pytest.approx(2 / 3 / 4, rel=1e-9) and hi == pytest.approx(2 / 3 / 4, rel=1e-9)


def test_subdivide_needs_simplicial_cells():
    with pytest.raises(InputError):
        lattices.subdivide(lattices.product_grid((1.0, 1.0), 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hexagon_reference_counts(k):
    tri = lattices.triangular(k + 1)
    om = reference_subset(tri, "hex_triangular", k)
    assert len(om) == 3 * k * k + 3 * k + 1
    assert len(subset_view(tri.graph, om).boundary) == 12 * k + 6
    hc = lattices.honeycomb(2 * k + 1)
    om = reference_subset(hc, "hex_honeycomb", k)
    assert len(om) == 6 * k * k
    assert len(subset_view(hc.graph, om).boundary) == 6 * k


def test_rhombic_dodecahedron_reference():
    b = bundle("bcc", 6)
    om = reference_subset(b, "rhombic_dodeca_bcc", 1)
    assert len(om) == 24
    assert len(subset_view(b.graph, om).boundary) == 24


def test_reference_needs_window():
    with pytest.raises(WindowError):
        reference_subset(lattices.triangular(1), "hex_triangular", 2)
    with pytest.raises(InputError):
        reference_subset(lattices.triangular(1), "hex_honeycomb", 1)


def test_orbits_and_translation(honeycomb):
    reps = honeycomb.orbit_reps()
    assert len(reps) == 2
    x = honeycomb.seed
    shift = honeycomb.periods[0]
    moved = honeycomb.translate_set([x], shift)
    (y,) = moved
    assert honeycomb.orbit_key(y) == honeycomb.orbit_key(x)
    assert honeycomb.translate_set([x], [0.123, 0.0]) is None

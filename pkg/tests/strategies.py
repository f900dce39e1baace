"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from isoforge.graph import GeometricGraph


@st.composite
def connected_subset(draw, bundle, max_size=8, min_size=1):
    """Random connected subset grown from the seed by picking frontier vertices."""
    size = draw(st.integers(min_size, max_size))
    om = [bundle.seed]
    core = bundle.core
    while len(om) < size:
        frontier = sorted({y for x in om for y in bundle.graph.neighbors(x) if y not in om and y in core})
        if not frontier:
            break
        om.append(draw(st.sampled_from(frontier)))
    return frozenset(om)


def path_graph(n=3, A=1.0, g=1.0):
    """Vertices 0..n-1 at integer positions on a line."""
    pts = {i: [float(i)] for i in range(n)}
    return GeometricGraph.build(pts, [(i, i + 1, A, g) for i in range(n - 1)])


def star_graph(k=4):
    import math

    pts = {0: [0.0, 0.0]}
    for i in range(k):
        t = 2 * math.pi * i / k
        pts[i + 1] = [math.cos(t), math.sin(t)]
    return GeometricGraph.build(pts, [(0, i + 1) for i in range(k)])

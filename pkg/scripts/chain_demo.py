"""The five-term volume chain on a few small subsets.

Tight on the honeycomb hexagon, strict on a square-grid tromino and on a
triangular-lattice path.

    python scripts/chain_demo.py
"""

import sys

import numpy as np

from isoforge import lattices
from isoforge.pde import neumann_solve
from isoforge.subdifferential import chain_report
from isoforge.transport import aleksandrov_function


def show(name, rep):
    vals = ", ".join(f"{v:.6f}" for v in rep.values)
    flags = "".join("1" if rep.equality_flags[k] else "0" for k in sorted(rep.equality_flags))
    print(f"{name:28s} {vals}  flags(a,c,d,e)={flags}  overlap={rep.overlap_fraction:.1e}")


def main() -> int:
    hb = lattices.honeycomb(4)
    hexagon = lattices.reference_subset(hb, "hex_honeycomb", 1)
    show("honeycomb hexagon (Neumann)", chain_report(hb.graph, hexagon, neumann_solve(hb.graph, hexagon).u))
    u, _, _ = aleksandrov_function(hb.graph, hexagon)
    show("honeycomb hexagon (transport)", chain_report(hb.graph, hexagon, u))

    grid = lattices.product_grid(window=4)
    p = grid.graph.point(grid.seed)
    tromino = [grid.locate(p + np.array(d)) for d in ([0, 0], [1, 0], [0, 1])]
    show("grid tromino", chain_report(grid.graph, tromino, neumann_solve(grid.graph, tromino).u))

    tri = lattices.triangular(4)
    lab = {v: k for k, v in tri.labels.items()}
    path = [lab[(0, 0)], lab[(1, 0)], lab[(1, 1)], lab[(2, 1)]]
    show("triangular path", chain_report(tri.graph, path, neumann_solve(tri.graph, path).u))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Geodesic trees of a stationary field, and where their rays merge.

Every site takes one out-step, toward the smaller of its two increments;
following the steps yields the semi-infinite geodesic in the field's
direction.  Distinct starting points coalesce: the pairwise merge levels
below are tiny next to the window size.  Writes a figure to
demos/out/geodesic_tree.svg.
"""

import os

import numpy as np

from lppgeo import (
    LatticeWindow,
    RenderOptions,
    coalescence_point,
    follow_geodesic,
    geodesic_graph,
    render_svg,
    sample_weight_field,
    stationary_busemann_field,
)

OUT = os.path.join(os.path.dirname(__file__), "out")


def main() -> None:
    window = LatticeWindow(0, 60, 0, 60)
    field = sample_weight_field(window, seed=303)
    b = stationary_busemann_field(window, 0.5, field, boundary_seed=14)
    g = geodesic_graph(b)

    starts = [(0, 0), (8, 0), (0, 8), (20, 4), (4, 20)]
    print(f"geodesic graph at alpha=0.5 on {window}")
    print(f"{'pair':>20s} {'merge site':>12s} {'merge level':>12s}")
    for a in starts:
        for c in starts:
            if a >= c:
                continue
            r = coalescence_point(a, c, g)
            if r.coalesced:
                lvl = r.site[0] + r.site[1]
                print(f"{str(a)+' vs '+str(c):>20s} {str(r.site):>12s} {lvl:12d}")
            else:
                print(f"{str(a)+' vs '+str(c):>20s} {'escaped':>12s} {'-':>12s}")

    path = follow_geodesic(g, (0, 0))
    e1_steps = sum(1 for p, q in zip(path, path[1:]) if q[0] > p[0])
    print(f"\ngeodesic from (0,0): {len(path) - 1} steps, "
          f"{e1_steps} along e1, exits at {path[-1]}")

    os.makedirs(OUT, exist_ok=True)
    fig = os.path.join(OUT, "geodesic_tree.svg")
    small = LatticeWindow(0, 24, 0, 24)
    sf = sample_weight_field(small, seed=303)
    sb = stationary_busemann_field(small, 0.5, sf, boundary_seed=14)
    svg = render_svg((geodesic_graph(sb),), options=RenderOptions(cell=22.0))
    with open(fig, "w") as fh:
        fh.write(svg)
    print(f"figure: {fig}")


if __name__ == "__main__":
    main()

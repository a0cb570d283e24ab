"""The instability graph of a direction interval.

Between the bracket fields of an interval [alpha_lo, alpha_hi] the
increment differences put positive mass on some dual edges; those edges
form a web of forward-flowing paths.  Mass is conserved at every interior
dual site, branch and coalescence points mark out-degree and in-degree
two, and the intersection of the two geodesic graphs splits into islands,
one terminal each.  Writes demos/out/instability_web.svg.
"""

import os

import numpy as np

from lppgeo import (
    Direction,
    LatticeWindow,
    Sign,
    classify_points,
    flow_check,
    geodesic_graph,
    horizon_busemann_field,
    instability_graph,
    island_components,
    render_svg,
)

OUT = os.path.join(os.path.dirname(__file__), "out")


def main() -> None:
    window = LatticeWindow(0, 40, 0, 40)
    lo, hi = 0.42, 0.58
    b_lo, b_hi = horizon_busemann_field(
        window, [(Direction(lo), Sign.NONE), (Direction(hi), Sign.NONE)],
        horizon=4096, seed=8,
    )

    inst = instability_graph(b_lo, b_hi)
    print(f"interval [{lo}, {hi}] on {window}, horizon 4096")
    print(f"instability edges: {inst.n_edges}, total mass {inst.total_mass:.3f}")
    print(f"dual vertices touched: {len(inst.vertices())} of {41 * 41}")

    pc = classify_points(inst)
    print(f"branch points {len(pc.branch)}, coalescence points {len(pc.coalesce)}")

    rep = flow_check(b_lo, b_hi)
    print(f"flow conservation over {rep.n_sites} interior dual sites: "
          f"max residual {rep.max_residual:.2e}, ok={rep.ok()}")

    g_lo, g_hi = geodesic_graph(b_lo), geodesic_graph(b_hi)
    comps = island_components(g_lo, g_hi)
    sizes = sorted((c.size for c in comps), reverse=True)
    interior = sum(1 for c in comps if not c.censored)
    print(f"islands: {len(comps)} ({interior} with interior terminals), "
          f"largest sizes {sizes[:5]}")

    os.makedirs(OUT, exist_ok=True)
    fig = os.path.join(OUT, "instability_web.svg")
    with open(fig, "w") as fh:
        fh.write(render_svg((g_lo, g_hi), inst))
    print(f"figure: {fig}")


if __name__ == "__main__":
    main()

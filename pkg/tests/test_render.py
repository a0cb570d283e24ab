"""SVG rendering: determinism, group structure, and the bisection geometry."""

import re

import numpy as np
import pytest

from lppgeo import (
    Direction,
    InstabilityGraph,
    LatticeWindow,
    RenderOptions,
    Sign,
    classify_points,
    geodesic_graph,
    horizon_busemann_field,
    instability_graph,
    render_svg,
)


@pytest.fixture(scope="module")
def scene():
    w = LatticeWindow(0, 12, 0, 12)
    b_lo, b_hi = horizon_busemann_field(
        w, [(Direction(0.40), Sign.NONE), (Direction(0.60), Sign.NONE)], 256, 0
    )
    return geodesic_graph(b_lo), geodesic_graph(b_hi), instability_graph(b_lo, b_hi)


def group(svg: str, gid: str) -> str:
    m = re.search(rf'<g id="{gid}"[^>]*>(.*?)</g>', svg, re.S)
    assert m, f"group {gid} missing"
    return m.group(1)


def lines_in(chunk: str):
    return re.findall(
        r'<line x1="([\d.-]+)" y1="([\d.-]+)" x2="([\d.-]+)" y2="([\d.-]+)"', chunk
    )


class TestDocument:
    def test_byte_identical_reruns(self, scene):
        g_lo, g_hi, ig = scene
        a = render_svg((g_lo, g_hi), ig)
        b = render_svg((g_lo, g_hi), ig)
        assert a == b
        assert a.startswith("<svg ") and a.endswith("</svg>\n")
        assert "\r" not in a

    def test_element_counts_match_the_graphs(self, scene):
        g_lo, g_hi, ig = scene
        svg = render_svg((g_lo, g_hi), ig)
        assert len(lines_in(group(svg, "frame"))) == 13 + 13
        assert len(lines_in(group(svg, "geodesic-0"))) == int(np.sum(g_lo.step != 0))
        assert len(lines_in(group(svg, "geodesic-1"))) == int(np.sum(g_hi.step != 0))
        assert len(lines_in(group(svg, "instability"))) == ig.n_edges
        marks = group(svg, "marks")
        pc = classify_points(ig)
        assert marks.count('fill="#111111"') == len(pc.branch)
        assert marks.count('fill="none"') == len(pc.coalesce)

    def test_empty_instability_renders_the_frame_alone(self):
        w = LatticeWindow(0, 4, 0, 4)
        empty = InstabilityGraph(
            (0.4, 0.6), w, np.zeros((5, 5)), np.zeros((5, 5))
        )
        svg = render_svg(instability=empty)
        assert len(lines_in(svg)) == len(lines_in(group(svg, "frame")))
        assert "<circle" not in svg

    def test_input_validation(self, scene):
        g_lo, _, ig = scene
        with pytest.raises(ValueError, match="nothing to render"):
            render_svg()
        other = InstabilityGraph(
            (0.4, 0.6), LatticeWindow(0, 3, 0, 3), np.zeros((4, 4)), np.zeros((4, 4))
        )
        with pytest.raises(ValueError, match="share one window"):
            render_svg((g_lo,), other)
        point = InstabilityGraph(
            (0.4, 0.6), LatticeWindow(0, 0, 0, 0), np.zeros((1, 1)), np.zeros((1, 1))
        )
        with pytest.raises(ValueError, match="no lattice edges"):
            render_svg(instability=point)

    def test_options_change_the_styling(self, scene):
        g_lo, g_hi, ig = scene
        opt = RenderOptions(cell=10.0, geodesic_colors=("#00ff00",))
        svg = render_svg((g_lo, g_hi), ig, opt)
        # one color recycled across both graphs
        assert svg.count('stroke="#00ff00"') == 2
        assert render_svg((g_lo, g_hi), ig) != svg


class TestDualGeometry:
    def test_each_drawn_edge_bisects_one_missing_primal_edge(self, scene):
        """A dual segment crosses exactly the primal edge between its two
        straddled sites; that edge must be absent from the agreement graph
        of the bracket pair."""
        g_lo, g_hi, ig = scene
        opt = RenderOptions()
        svg = render_svg((g_lo, g_hi), ig, opt)
        w = ig.window

        def invert(px: str, py: str) -> tuple[float, float]:
            x = (float(px) - opt.margin) / opt.cell + w.x_min
            y = w.y_max - (float(py) - opt.margin) / opt.cell
            return round(2 * x) / 2, round(2 * y) / 2

        agree = set()
        for i in range(w.nx):
            for j in range(w.ny):
                s = int(g_lo.step[i, j])
                if s != 0 and s == int(g_hi.step[i, j]):
                    x, y = w.x_min + i, w.y_min + j
                    to = (x + 1, y) if s == 1 else (x, y + 1)
                    agree.add(((x, y), to))

        drawn = lines_in(group(svg, "instability"))
        assert len(drawn) == ig.n_edges
        for x1, y1, x2, y2 in drawn:
            (ax, ay), (bx, by) = invert(x1, y1), invert(x2, y2)
            mx, my = (ax + bx) / 2, (ay + by) / 2
            if ay == by:  # west edge crosses the vertical primal edge
                primal = ((mx, my - 0.5), (mx, my + 0.5))
            else:  # south edge crosses the horizontal one
                primal = ((mx - 0.5, my), (mx + 0.5, my))
            fr = (int(primal[0][0]), int(primal[0][1]))
            to = (int(primal[1][0]), int(primal[1][1]))
            assert primal[0] == fr and primal[1] == to  # midpoint on the lattice
            assert (fr, to) not in agree

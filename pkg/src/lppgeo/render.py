"""Deterministic SVG figures for geodesic and instability graphs.

Hand-rolled documents: fixed-precision coordinates, sorted element order,
no timestamps, so identical inputs render byte-identical files.  Geodesic
graphs draw as site-to-site segments, instability edges on the dual
lattice (vertices at site + (1/2, 1/2)), with branch points (out-degree
two) filled and coalescence points (in-degree two) hollow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GeodesicGraph, InstabilityGraph


@dataclass(frozen=True)
class RenderOptions:
    """Geometry and style knobs for render_svg.

    geodesic_colors / geodesic_widths style the graphs in the order given
    to render_svg; two contrasting defaults for a bracket pair.
    """

    cell: float = 18.0
    margin: float = 26.0
    background: str = "#ffffff"
    frame_color: str = "#cccccc"
    frame_width: float = 0.6
    geodesic_colors: tuple[str, ...] = ("#2a6fb0", "#c23b22")
    geodesic_widths: tuple[float, ...] = (2.8, 1.3)
    instability_color: str = "#111111"
    instability_width: float = 2.0
    mark_radius: float = 3.2
    branch_color: str = "#111111"
    coalescence_color: str = "#888888"


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_svg(
    geodesics: tuple[GeodesicGraph, ...] = (),
    instability: InstabilityGraph | None = None,
    options: RenderOptions | None = None,
) -> str:
    """Render the given graphs over their common window as an SVG document.

    All graphs must share one window with at least one lattice edge.  With
    an empty instability graph and no geodesic graphs the output is the
    lattice frame alone.
    """
    opt = options or RenderOptions()
    graphs = list(geodesics) + ([instability] if instability is not None else [])
    if not graphs:
        raise ValueError("nothing to render: no graphs given")
    w = graphs[0].window
    if any(g.window != w for g in graphs[1:]):
        raise ValueError("graphs must share one window")
    if w.nx < 2 and w.ny < 2:
        raise ValueError("window has no lattice edges to render")

    cell, margin = opt.cell, opt.margin
    width = 2 * margin + (w.nx - 1) * cell
    height = 2 * margin + (w.ny - 1) * cell

    def sx(x: float) -> float:
        return margin + (x - w.x_min) * cell

    def sy(y: float) -> float:
        return margin + (w.y_max - y) * cell

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect width="{_f(width)}" height="{_f(height)}" fill="{opt.background}"/>',
    ]

    out.append(
        f'<g id="frame" stroke="{opt.frame_color}" '
        f'stroke-width="{_f(opt.frame_width)}">'
    )
    if w.ny >= 2:
        for x in range(w.x_min, w.x_max + 1):
            out.append(
                f'<line x1="{_f(sx(x))}" y1="{_f(sy(w.y_max))}" '
                f'x2="{_f(sx(x))}" y2="{_f(sy(w.y_min))}"/>'
            )
    if w.nx >= 2:
        for y in range(w.y_min, w.y_max + 1):
            out.append(
                f'<line x1="{_f(sx(w.x_min))}" y1="{_f(sy(y))}" '
                f'x2="{_f(sx(w.x_max))}" y2="{_f(sy(y))}"/>'
            )
    out.append("</g>")

    for k, g in enumerate(geodesics):
        color = opt.geodesic_colors[k % len(opt.geodesic_colors)]
        swidth = opt.geodesic_widths[k % len(opt.geodesic_widths)]
        out.append(
            f'<g id="geodesic-{k}" stroke="{color}" '
            f'stroke-width="{_f(swidth)}" stroke-linecap="round">'
        )
        for i in range(w.nx):
            for j in range(w.ny):
                s = int(g.step[i, j])
                if s not in (1, 2):
                    continue
                x, y = w.x_min + i, w.y_min + j
                tx, ty = (x + 1, y) if s == 1 else (x, y + 1)
                out.append(
                    f'<line x1="{_f(sx(x))}" y1="{_f(sy(y))}" '
                    f'x2="{_f(sx(tx))}" y2="{_f(sy(ty))}"/>'
                )
        out.append("</g>")

    if instability is not None:
        out.append(
            f'<g id="instability" stroke="{opt.instability_color}" '
            f'stroke-width="{_f(opt.instability_width)}" stroke-linecap="round">'
        )
        for fr, to, _mass in sorted(instability.edges()):
            out.append(
                f'<line x1="{_f(sx(fr[0] + 0.5))}" y1="{_f(sy(fr[1] + 0.5))}" '
                f'x2="{_f(sx(to[0] + 0.5))}" y2="{_f(sy(to[1] + 0.5))}"/>'
            )
        out.append("</g>")

        south = instability.south_mass > 0
        west = instability.west_mass > 0
        out.append('<g id="marks">')
        for i, j in zip(*np.nonzero(south & west)):
            x, y = w.x_min + int(i), w.y_min + int(j)
            out.append(
                f'<circle cx="{_f(sx(x + 0.5))}" cy="{_f(sy(y + 0.5))}" '
                f'r="{_f(opt.mark_radius)}" fill="{opt.branch_color}"/>'
            )
        # in-degree two: a south edge arriving from above and a west edge
        # arriving from the right
        incoming = south[:-1, 1:] & west[1:, :-1]
        for i, j in zip(*np.nonzero(incoming)):
            x, y = w.x_min + int(i), w.y_min + int(j)
            out.append(
                f'<circle cx="{_f(sx(x + 0.5))}" cy="{_f(sy(y + 0.5))}" '
                f'r="{_f(opt.mark_radius)}" fill="none" '
                f'stroke="{opt.coalescence_color}" '
                f'stroke-width="{_f(opt.frame_width * 2)}"/>'
            )
        out.append("</g>")

    out.append("</svg>")
    return "\n".join(out) + "\n"

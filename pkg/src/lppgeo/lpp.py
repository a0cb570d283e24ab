"""Directed last-passage percolation on the planar lattice.

Passage times follow the terminal-exclusion convention: the weight of a path
counts its initial site and every interior site but not its terminal site, so
G(x, x) = 0 and G satisfies the interior Bellman recursion
G(x, y) = max_i ( G(x, y - e_i) + w(y - e_i) ).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .field import InvalidWindowError, LatticeWindow, WeightField

TIE_TOL = 1e-9


@dataclass(frozen=True)
class Direction:
    """Point of the direction simplex, parametrized by alpha in (0, 1).

    alpha is the characteristic parameter of the direction: the associated
    unit-sum direction vector is xi(alpha) below, alpha -> xi is a bijection
    from (0,1) onto the open simplex, and the gradient of the shape function
    at xi(alpha) is (1/alpha, 1/(1-alpha)).
    """

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie strictly in (0,1), got {self.alpha}")

    @property
    def xi(self) -> tuple[float, float]:
        a, b = self.alpha**2, (1.0 - self.alpha) ** 2
        s = a + b
        return (a / s, b / s)

    @property
    def gradient(self) -> tuple[float, float]:
        return (1.0 / self.alpha, 1.0 / (1.0 - self.alpha))


def shape_function(xi) -> np.ndarray | float:
    """Limit of G(0, n*xi)/n for xi in the closed first quadrant."""
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape[-1] != 2:
        raise ValueError("xi must have two coordinates")
    if np.any(xi < 0):
        raise ValueError("xi must lie in the first quadrant")
    g = (np.sqrt(xi[..., 0]) + np.sqrt(xi[..., 1])) ** 2
    return float(g) if g.ndim == 0 else g


def alpha_of_direction(xi) -> float:
    """Characteristic parameter of an interior direction (scale invariant)."""
    x1, x2 = float(xi[0]), float(xi[1])
    if x1 <= 0 or x2 <= 0:
        raise ValueError(f"direction {xi} lies on the boundary of the quadrant")
    r1, r2 = math.sqrt(x1), math.sqrt(x2)
    return r1 / (r1 + r2)


def direction_of_alpha(alpha: float) -> tuple[float, float]:
    return Direction(alpha).xi


class PassageMode(enum.Enum):
    FROM_ANCHOR = "from_anchor"
    TO_ANCHOR = "to_anchor"


FROM_ANCHOR = PassageMode.FROM_ANCHOR
TO_ANCHOR = PassageMode.TO_ANCHOR


@dataclass
class PassageTimes:
    """Passage times between a fixed anchor and every site of a window.

    values[i, j] is G(anchor, site) in FROM_ANCHOR mode and G(site, anchor)
    in TO_ANCHOR mode; sites not ordered with the anchor hold -inf.
    """

    anchor: tuple[int, int]
    mode: PassageMode
    window: LatticeWindow
    values: np.ndarray

    def value(self, x: int, y: int) -> float:
        i, j = self.window.index(x, y)
        return float(self.values[i, j])


def _antidiagonal_sweep(h: np.ndarray, chunks: int = 1) -> None:
    """In-place max-plus sweep.  On entry h holds the site weights with h[0,0]
    already seeded; on exit h[i,j] = w[i,j] + max(h[i-1,j], h[i,j-1]) along
    increasing anti-diagonals.  chunks > 1 evaluates each anti-diagonal in
    pieces (the elementwise update has no cross-element dependency, so chunked
    evaluation is bit-identical to one pass)."""
    nx, ny = h.shape
    if nx == 1:
        h[0, 1:] += np.cumsum(h[0, :-1])
        return
    if ny == 1:
        h[1:, 0] += np.cumsum(h[:-1, 0])
        return
    flat = h.ravel()
    step = ny - 1
    for d in range(1, nx + ny - 1):
        i0 = max(0, d - (ny - 1))
        i1 = min(d, nx - 1)
        n = i1 - i0 + 1
        base = d + i0 * step
        seg = flat[base : base + (n - 1) * step + 1 : step]
        pred = np.full(n, -np.inf)
        # west predecessors (i-1, j): indices i0-1 .. i1-1 of diagonal d-1
        wlo = max(i0 - 1, 0)
        if wlo <= i1 - 1:
            wb = (d - 1) + wlo * step
            wn = i1 - wlo
            pred[wlo - (i0 - 1) :] = flat[wb : wb + (wn - 1) * step + 1 : step]
        # south predecessors (i, j-1): indices i0 .. min(i1, d-1) of diagonal d-1
        shi = min(i1, d - 1)
        if i0 <= shi:
            sb = (d - 1) + i0 * step
            sn = shi - i0 + 1
            ssl = flat[sb : sb + (sn - 1) * step + 1 : step]
            if chunks <= 1 or sn < chunks:
                np.maximum(pred[:sn], ssl, out=pred[:sn])
            else:
                for k in range(chunks):
                    lo = k * sn // chunks
                    hi = (k + 1) * sn // chunks
                    np.maximum(pred[lo:hi], ssl[lo:hi], out=pred[lo:hi])
        seg += pred


def passage_times(
    field: WeightField,
    anchor: tuple[int, int],
    mode: PassageMode = FROM_ANCHOR,
    chunks: int = 1,
) -> PassageTimes:
    """All passage times between the anchor and the field's window.

    FROM_ANCHOR fills G(anchor, v) for v >= anchor; TO_ANCHOR fills
    G(v, anchor) for v <= anchor.  The sweep runs over anti-diagonals, each a
    strided vector update.
    """
    ax, ay = anchor
    w = field.window
    if not w.contains(ax, ay):
        raise InvalidWindowError(f"anchor ({ax},{ay}) outside window {w}")
    ai, aj = w.index(ax, ay)
    out = np.full(w.shape, -np.inf)
    if mode == FROM_ANCHOR:
        sub = field.values[ai:, aj:].copy()
        _antidiagonal_sweep(sub, chunks=chunks)
        # H includes the terminal weight; passage times exclude it
        out[ai:, aj:] = sub - field.values[ai:, aj:]
    elif mode == TO_ANCHOR:
        sub = field.values[: ai + 1, : aj + 1][::-1, ::-1].copy()
        sub[0, 0] = 0.0  # seed zero: the anchor weight is excluded
        _antidiagonal_sweep(sub, chunks=chunks)
        res = sub[::-1, ::-1].copy()
        res[ai, aj] = 0.0
        out[: ai + 1, : aj + 1] = res
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PassageTimes((ax, ay), mode, w, out)


def bellman_residual(pt: PassageTimes, field: WeightField) -> float:
    """Largest violation of the interior Bellman recursion (0 when exact)."""
    g = pt.values
    w = field.values
    if pt.mode == FROM_ANCHOR:
        ai, aj = pt.window.index(*pt.anchor)
        sub = g[ai:, aj:]
        wsub = w[ai:, aj:]
        best = np.full(sub.shape, -np.inf)
        best[1:, :] = sub[:-1, :] + wsub[:-1, :]
        best[:, 1:] = np.maximum(best[:, 1:], sub[:, :-1] + wsub[:, :-1])
        resid = np.abs(sub[1:, 1:] - best[1:, 1:])
        edge1 = np.abs(sub[1:, 0] - best[1:, 0])
        edge2 = np.abs(sub[0, 1:] - best[0, 1:])
        return float(max(resid.max(initial=0), edge1.max(initial=0), edge2.max(initial=0)))
    ai, aj = pt.window.index(*pt.anchor)
    sub = g[: ai + 1, : aj + 1]
    wsub = w[: ai + 1, : aj + 1]
    best = np.full(sub.shape, -np.inf)
    best[:-1, :] = sub[1:, :]
    best[:, :-1] = np.maximum(best[:, :-1], sub[:, 1:])
    vals = wsub + best
    mask = np.isfinite(sub)
    mask[ai, aj] = False
    return float(np.abs((sub - vals)[mask]).max(initial=0))


def finite_geodesic(
    field: WeightField, x: tuple[int, int], y: tuple[int, int]
) -> list[tuple[int, int]]:
    """The rightmost geodesic from x to y (ties prefer the e2 predecessor).

    Requires x <= y coordinatewise; returns the site sequence from x to y.
    """
    if not (x[0] <= y[0] and x[1] <= y[1]):
        raise ValueError(f"geodesic endpoints must be ordered, got {x} !<= {y}")
    box = LatticeWindow(x[0], y[0], x[1], y[1])
    vals = field.weights_on(box)
    sub = WeightField(box, vals.copy())
    pt = passage_times(sub, x, FROM_ANCHOR)
    g = pt.values
    w = vals
    i, j = box.index(*y)
    path = [(y[0], y[1])]
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            via_e2 = g[i, j - 1] + w[i, j - 1]
            via_e1 = g[i - 1, j] + w[i - 1, j]
            if via_e2 >= via_e1:
                j -= 1
            else:
                i -= 1
        path.append((box.x_min + i, box.y_min + j))
    path.reverse()
    return path


def path_weight(field: WeightField, path: list[tuple[int, int]]) -> float:
    """Weight of an up-right path, terminal site excluded."""
    return float(sum(field.weight(*p) for p in path[:-1]))

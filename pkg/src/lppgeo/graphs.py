"""Geodesic graphs, their duals, and the instability structure between two
coupled directions.

The geodesic graph of an increment field steps e1 where U < V and e2 where
U > V (exact ties, a measure-zero event, are routed by the field's sign tag).
Dual objects live on the shifted lattice: the dual site of x is
x* = x + (1/2, 1/2), drawn here as the integer pair x so that dual edges can
be stored in site-indexed arrays.

Between a coupled pair of fields (directions zeta < eta on one environment)
the increment differences are nonnegative edge masses; dual edges carrying
mass form the instability graph, whose vertices are exactly the dual sites
where the two geodesic graphs disagree downstream.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dfield

import numpy as np

from .busemann import BusemannField, BusemannMode, Sign, busemann_value, coupled
from .field import LatticeWindow
from .lpp import Direction

MASS_TOL = 1e-9
TIE_TOL = 1e-9


@dataclass
class GeodesicGraph:
    """One out-step per site: step[i,j] is 1 (e1), 2 (e2), or 0 (undefined,
    at margins where the field's increments are not both available)."""

    direction: object
    sign: Sign
    window: LatticeWindow
    step: np.ndarray
    bfield: BusemannField | None = None
    tie_count: int = 0

    def step_at(self, x: int, y: int) -> int:
        i, j = self.window.index(x, y)
        return int(self.step[i, j])


def geodesic_graph(bfield: BusemannField) -> GeodesicGraph:
    """Step field of the increment-minimizing geodesics of a Busemann field."""
    U, V = bfield.U, bfield.V
    defined = ~np.isnan(U) & ~np.isnan(V)
    tie_default = 1 if bfield.sign == Sign.PLUS else 2
    step = np.zeros(U.shape, dtype=np.int8)
    step[defined & (U < V)] = 1
    step[defined & (U > V)] = 2
    step[defined & (U == V)] = tie_default
    ties = int(np.sum(defined & (np.abs(U - V) <= TIE_TOL)))
    return GeodesicGraph(
        direction=bfield.direction,
        sign=bfield.sign,
        window=bfield.window,
        step=step,
        bfield=bfield,
        tie_count=ties,
    )


def follow_geodesic(
    graph: GeodesicGraph, x: tuple[int, int], max_steps: int | None = None
) -> list[tuple[int, int]]:
    """Follow out-steps from x until the step field runs out (window margin)
    or max_steps is reached.  Returns the visited sites, x included."""
    w = graph.window
    i, j = w.index(*x)
    path = [(x[0], x[1])]
    while max_steps is None or len(path) - 1 < max_steps:
        s = graph.step[i, j]
        if s == 0:
            break
        if s == 1:
            i += 1
        else:
            j += 1
        if i >= w.nx or j >= w.ny:
            break
        path.append((w.x_min + i, w.y_min + j))
    return path


@dataclass(frozen=True)
class CoalescenceResult:
    site: tuple[int, int] | None
    censored: bool
    exit_sites: tuple = ()

    @property
    def coalesced(self) -> bool:
        return self.site is not None


def coalescence_point(
    x: tuple[int, int], y: tuple[int, int], graph: GeodesicGraph
) -> CoalescenceResult:
    """First common site of the geodesics from x and y, or a censored result
    when either geodesic leaves the window first.

    Advancing always the path at the lower level makes the first common site
    also the level-minimal one.
    """
    w = graph.window
    a = w.index(*x)
    b = w.index(*y)

    def advance(p):
        s = graph.step[p]
        if s == 0:
            return None
        q = (p[0] + 1, p[1]) if s == 1 else (p[0], p[1] + 1)
        if q[0] >= w.nx or q[1] >= w.ny:
            return None
        return q

    while True:
        if a == b:
            return CoalescenceResult((w.x_min + a[0], w.y_min + a[1]), False)
        if a[0] + a[1] <= b[0] + b[1]:
            nxt = advance(a)
            if nxt is None:
                return CoalescenceResult(None, True, ((w.x_min + a[0], w.y_min + a[1]),))
            a = nxt
        else:
            nxt = advance(b)
            if nxt is None:
                return CoalescenceResult(None, True, ((w.x_min + b[0], w.y_min + b[1]),))
            b = nxt


@dataclass
class DualGraph:
    """Down-left dual steps: dual site x + (1/2,1/2) points to its e_i-shifted
    neighbor exactly when the primal step at x is e_i, so dual edges never
    cross present primal edges."""

    window: LatticeWindow
    step: np.ndarray  # same coding as the primal graph it came from

    def edges(self):
        w = self.window
        for i in range(w.nx):
            for j in range(w.ny):
                s = self.step[i, j]
                if s == 0:
                    continue
                fr = (w.x_min + i, w.y_min + j)
                to = (fr[0] - 1, fr[1]) if s == 1 else (fr[0], fr[1] - 1)
                yield fr, to


def dual_graph(graph: GeodesicGraph) -> DualGraph:
    return DualGraph(graph.window, graph.step.copy())


def _check_coupled_pair(b_lo: BusemannField, b_hi: BusemannField) -> None:
    if not coupled(b_lo, b_hi):
        raise ValueError(
            "fields are not coupled: both must be HORIZON mode on one "
            "environment, window, and horizon"
        )
    a_lo, a_hi = b_lo.direction.alpha, b_hi.direction.alpha
    if a_lo > a_hi:
        raise ValueError(f"interval ends out of order: {a_lo} > {a_hi}")
    if a_lo == a_hi and not (b_lo.sign == Sign.MINUS and b_hi.sign == Sign.PLUS):
        raise ValueError(
            "a degenerate interval needs the (MINUS, PLUS) sign pair to carry "
            "the one-sided limits"
        )


def interval_mass(
    x: tuple[int, int],
    y: tuple[int, int],
    b_lo: BusemannField,
    b_hi: BusemannField,
) -> float:
    """Mass the direction interval (b_lo, b_hi] puts on the pair (x, y):
    the difference of the two Busemann values.  Nonpositive on horizontal
    edges, nonnegative on vertical ones, additive along paths."""
    _check_coupled_pair(b_lo, b_hi)
    return busemann_value(b_hi, x, y) - busemann_value(b_lo, x, y)


@dataclass
class InstabilityGraph:
    """Dual edges carrying positive increment-difference mass.

    south_mass[i, j] > 0 puts the edge (x*, x* - e2) at x = window site
    (i, j), carrying the horizontal-edge mass; west_mass the edge
    (x*, x* - e1) with the vertical-edge mass.  Entries are 0 where no mass
    exceeds MASS_TOL and NaN where the pair's increments are unavailable.
    """

    interval: tuple[float, float]
    window: LatticeWindow
    south_mass: np.ndarray
    west_mass: np.ndarray
    b_lo: BusemannField | None = None
    b_hi: BusemannField | None = None

    @property
    def n_edges(self) -> int:
        return int(np.sum(self.south_mass > 0) + np.sum(self.west_mass > 0))

    @property
    def total_mass(self) -> float:
        return float(np.nansum(self.south_mass) + np.nansum(self.west_mass))

    def vertices(self) -> set[tuple[int, int]]:
        """Dual sites incident to at least one edge, as integer pairs x
        (standing for x + (1/2, 1/2))."""
        w = self.window
        out: set[tuple[int, int]] = set()
        si, sj = np.nonzero(self.south_mass > 0)
        for i, j in zip(si, sj):
            out.add((w.x_min + i, w.y_min + j))
            out.add((w.x_min + i, w.y_min + j - 1))
        wi, wj = np.nonzero(self.west_mass > 0)
        for i, j in zip(wi, wj):
            out.add((w.x_min + i, w.y_min + j))
            out.add((w.x_min + i - 1, w.y_min + j))
        return out

    def edges(self):
        """Yield (from_dual, to_dual, mass) triples, south then west."""
        w = self.window
        si, sj = np.nonzero(self.south_mass > 0)
        for i, j in zip(si, sj):
            fr = (w.x_min + i, w.y_min + j)
            yield fr, (fr[0], fr[1] - 1), float(self.south_mass[i, j])
        wi, wj = np.nonzero(self.west_mass > 0)
        for i, j in zip(wi, wj):
            fr = (w.x_min + i, w.y_min + j)
            yield fr, (fr[0] - 1, fr[1]), float(self.west_mass[i, j])

    def vertex_censored(self, v: tuple[int, int]) -> bool:
        """True when some edge incident to the dual site v could exist outside
        the region where both fields are defined."""
        i = v[0] - self.window.x_min
        j = v[1] - self.window.y_min
        for ii, jj in ((i, j), (i, j + 1), (i + 1, j)):
            if not (0 <= ii < self.window.nx and 0 <= jj < self.window.ny):
                return True
            if np.isnan(self.south_mass[ii, jj]) or np.isnan(self.west_mass[ii, jj]):
                return True
        return False


def instability_graph(b_lo: BusemannField, b_hi: BusemannField) -> InstabilityGraph:
    """Dual edges on which the interval (b_lo, b_hi] carries mass."""
    _check_coupled_pair(b_lo, b_hi)
    hm = b_lo.U - b_hi.U
    wm = b_hi.V - b_lo.V
    south = np.where(hm > MASS_TOL, hm, 0.0)
    west = np.where(wm > MASS_TOL, wm, 0.0)
    south[np.isnan(hm)] = np.nan
    west[np.isnan(wm)] = np.nan
    return InstabilityGraph(
        interval=(b_lo.direction.alpha, b_hi.direction.alpha),
        window=b_lo.window,
        south_mass=south,
        west_mass=west,
        b_lo=b_lo,
        b_hi=b_hi,
    )


@dataclass
class PointClasses:
    """Classification of instability-graph vertices by their edge pattern."""

    graph: InstabilityGraph
    branch: set[tuple[int, int]] = dfield(default_factory=set)
    coalesce: set[tuple[int, int]] = dfield(default_factory=set)
    cif_violations: list = dfield(default_factory=list)

    def ancestors(self, v: tuple[int, int]) -> set[tuple[int, int]]:
        """Dual sites from which mass flows into v (reverse reachability)."""
        g = self.graph
        w = g.window
        south = g.south_mass > 0
        west = g.west_mass > 0
        seen: set[tuple[int, int]] = set()
        stack = [v]
        while stack:
            p = stack.pop()
            # in-edge from the north neighbor's south edge
            for q, mask in (
                ((p[0], p[1] + 1), south),
                ((p[0] + 1, p[1]), west),
            ):
                if q in seen:
                    continue
                i, j = q[0] - w.x_min, q[1] - w.y_min
                if 0 <= i < w.nx and 0 <= j < w.ny and mask[i, j]:
                    seen.add(q)
                    stack.append(q)
        return seen


def classify_points(
    graph: InstabilityGraph,
    cif_map: dict[tuple[int, int], object] | None = None,
    cif_slack: float = 0.0,
) -> PointClasses:
    """Branch points carry both out-edges, coalescence points both in-edges.

    When cif directions are supplied (keyed by the primal site x whose dual
    x + (1/2,1/2) is the vertex), branch membership is cross-checked against
    the interval: a branch vertex must have its cif direction inside
    [alpha_lo - slack, alpha_hi + slack], a non-branch vertex outside the
    open interval widened the other way; mismatches are recorded.
    """
    south = graph.south_mass > 0
    west = graph.west_mass > 0
    w = graph.window
    out = PointClasses(graph)
    bi, bj = np.nonzero(south & west)
    for i, j in zip(bi, bj):
        out.branch.add((w.x_min + i, w.y_min + j))
    in_s = south[:, 1:]  # south edge of x+e2 enters x*
    in_w = west[1:, :]  # west edge of x+e1 enters x*
    ci, cj = np.nonzero(in_s[:-1, :] & in_w[:, :-1])
    for i, j in zip(ci, cj):
        out.coalesce.add((w.x_min + i, w.y_min + j))
    if cif_map:
        a_lo, a_hi = graph.interval
        for site, direction in cif_map.items():
            a = direction.alpha
            is_branch = site in out.branch
            if is_branch and not (a_lo - cif_slack <= a <= a_hi + cif_slack):
                out.cif_violations.append((site, a, "branch-outside"))
            if not is_branch and (a_lo + cif_slack < a < a_hi - cif_slack):
                out.cif_violations.append((site, a, "nonbranch-inside"))
    return out


@dataclass
class IslandComponent:
    """Weak component of the intersection of the two bracket geodesic graphs.

    All member geodesics flow to `terminal`; interior terminals are the sites
    where the bracket's graphs disagree, censored ones sit on the window
    margin with their continuation unknown.
    """

    window: LatticeWindow
    flat_sites: np.ndarray
    terminal: tuple[int, int]
    censored: bool

    @property
    def size(self) -> int:
        return self.flat_sites.size

    def sites(self) -> list[tuple[int, int]]:
        ny = self.window.ny
        return [
            (self.window.x_min + int(f) // ny, self.window.y_min + int(f) % ny)
            for f in self.flat_sites
        ]


def _resolve_pointers(succ: np.ndarray) -> np.ndarray:
    """Iterate succ[succ[...]] to fixed points (succ must be progress-free of
    cycles except self-loops)."""
    while True:
        nxt = succ[succ]
        if np.array_equal(nxt, succ):
            return succ
        succ = nxt


def island_components(
    g_lo: GeodesicGraph, g_hi: GeodesicGraph
) -> list[IslandComponent]:
    """Components of the agreement graph of a coupled bracket pair."""
    if g_lo.window != g_hi.window:
        raise ValueError("island components need graphs on one window")
    nx, ny = g_lo.step.shape
    s_lo = g_lo.step
    s_hi = g_hi.step
    agree = (s_lo == s_hi) & (s_lo != 0)
    idx = np.arange(nx * ny)
    succ = idx.copy()
    fi, fj = np.nonzero(agree)
    flat = fi * ny + fj
    stepv = s_lo[fi, fj]
    tgt = np.where(stepv == 1, flat + ny, flat + 1)
    # successors leaving the window stay self (censored sinks)
    ok = np.where(stepv == 1, fi + 1 < nx, fj + 1 < ny)
    succ[flat[ok]] = tgt[ok]
    roots = _resolve_pointers(succ)
    comps = []
    for r in np.unique(roots):
        members = np.flatnonzero(roots == r)
        ri, rj = divmod(int(r), ny)
        interior_disagree = (
            s_lo[ri, rj] != 0 and s_hi[ri, rj] != 0 and s_lo[ri, rj] != s_hi[ri, rj]
        )
        comps.append(
            IslandComponent(
                window=g_lo.window,
                flat_sites=members,
                terminal=(g_lo.window.x_min + ri, g_lo.window.y_min + rj),
                censored=not interior_disagree,
            )
        )
    return comps


@dataclass
class FlowReport:
    n_sites: int
    max_residual: float
    min_out_mass: float
    diag_max_residual: float

    def ok(self, tol: float = MASS_TOL) -> bool:
        return self.max_residual < tol and self.min_out_mass > -tol


def flow_check(b_lo: BusemannField, b_hi: BusemannField) -> FlowReport:
    """Conservation of interval mass at every interior dual site.

    Outgoing mass (south + west edge) must equal incoming mass (the north
    neighbor's south edge plus the east neighbor's west edge); both outgoing
    components must be nonnegative.  Also aggregates the telescoped
    anti-diagonal sums: outgoing totals per diagonal, boundary corrected,
    reproduce the incoming totals one diagonal down.
    """
    _check_coupled_pair(b_lo, b_hi)
    hm = b_lo.U - b_hi.U
    wm = b_hi.V - b_lo.V
    out_tot = hm[:-1, :-1] + wm[:-1, :-1]
    in_tot = hm[:-1, 1:] + wm[1:, :-1]
    resid = out_tot - in_tot
    valid = ~np.isnan(resid)
    n = int(valid.sum())
    max_resid = float(np.abs(resid[valid]).max(initial=0.0))
    mins = []
    for arr in (hm, wm):
        a = arr[~np.isnan(arr)]
        if a.size:
            mins.append(a.min())
    min_out = float(min(mins)) if mins else 0.0
    # telescoping along anti-diagonals of the valid region
    nx, ny = resid.shape
    diag_res = 0.0
    if n:
        ii, jj = np.nonzero(valid)
        d = ii + jj
        sums = np.zeros(int(d.max()) + 1)
        np.add.at(sums, d, resid[ii, jj])
        diag_res = float(np.abs(sums).max(initial=0.0))
    return FlowReport(n, max_resid, min_out, diag_res)


def write_edges_tsv(
    graph: GeodesicGraph | DualGraph | InstabilityGraph, path
) -> None:
    """Edge-list export: tab-separated from_x from_y to_x to_y [mass] rows.

    A leading comment records the graph kind and window (plus direction and
    sign for geodesic graphs) so read_edges_tsv can rebuild the object;
    masses print at full precision.  Written atomically.
    """
    if not isinstance(graph, (GeodesicGraph, DualGraph, InstabilityGraph)):
        raise TypeError(f"cannot export edges of {type(graph).__name__}")
    w = graph.window
    head = f"window={w.x_min},{w.x_max},{w.y_min},{w.y_max}"
    if isinstance(graph, GeodesicGraph):
        head = (
            f"# lppgeo-edges kind=geodesic {head} "
            f"alpha={float(graph.direction.alpha):.17g} sign={graph.sign.name}"
        )
        lines = [head, "from_x\tfrom_y\tto_x\tto_y"]
        for i in range(w.nx):
            for j in range(w.ny):
                s = int(graph.step[i, j])
                if s == 0:
                    continue
                x, y = w.x_min + i, w.y_min + j
                tx, ty = (x + 1, y) if s == 1 else (x, y + 1)
                lines.append(f"{x}\t{y}\t{tx}\t{ty}")
    elif isinstance(graph, DualGraph):
        lines = [f"# lppgeo-edges kind=dual {head}", "from_x\tfrom_y\tto_x\tto_y"]
        for fr, to in graph.edges():
            lines.append(f"{fr[0]}\t{fr[1]}\t{to[0]}\t{to[1]}")
    elif isinstance(graph, InstabilityGraph):
        lo, hi = graph.interval
        lines = [
            f"# lppgeo-edges kind=instability {head} "
            f"interval={lo:.17g},{hi:.17g}",
            "from_x\tfrom_y\tto_x\tto_y\tmass",
        ]
        for fr, to, mass in graph.edges():
            lines.append(f"{fr[0]}\t{fr[1]}\t{to[0]}\t{to[1]}\t{mass:.17g}")
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_edges_tsv(path) -> GeodesicGraph | DualGraph | InstabilityGraph:
    """Rebuild a graph written by write_edges_tsv.

    Instability masses absent from the file (margins recorded as unknown in
    the source object) load as zero.
    """
    with open(path) as fh:
        header = fh.readline().strip()
        fields = dict(
            part.split("=", 1) for part in header.split() if "=" in part
        )
        if not header.startswith("# lppgeo-edges") or "kind" not in fields:
            raise ValueError(f"{path}: not an edge-list export")
        xm, xM, ym, yM = (int(v) for v in fields["window"].split(","))
        w = LatticeWindow(xm, xM, ym, yM)
        fh.readline()  # column names
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append(line.split("\t"))
    kind = fields["kind"]
    if kind in ("geodesic", "dual"):
        step = np.zeros((w.nx, w.ny), dtype=np.int8)
        for r in rows:
            fx, fy, tx, ty = (int(v) for v in r[:4])
            i, j = w.index(fx, fy)
            d = (tx - fx, ty - fy)
            if kind == "geodesic":
                step[i, j] = 1 if d == (1, 0) else 2
            else:
                step[i, j] = 1 if d == (-1, 0) else 2
        if kind == "dual":
            return DualGraph(w, step)
        return GeodesicGraph(
            direction=Direction(float(fields["alpha"])),
            sign=Sign[fields["sign"]],
            window=w,
            step=step,
        )
    if kind == "instability":
        south = np.zeros((w.nx, w.ny), dtype=np.float64)
        west = np.zeros((w.nx, w.ny), dtype=np.float64)
        for r in rows:
            fx, fy, tx, ty = (int(v) for v in r[:4])
            i, j = w.index(fx, fy)
            if (tx - fx, ty - fy) == (0, -1):
                south[i, j] = float(r[4])
            else:
                west[i, j] = float(r[4])
        lo, hi = (float(v) for v in fields["interval"].split(","))
        return InstabilityGraph((lo, hi), w, south, west)
    raise ValueError(f"{path}: unknown edge-list kind {kind!r}")

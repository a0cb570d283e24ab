"""Acceptance suite: one callable per advertised numerical guarantee.

Each criterion takes a sub-seed plus keyword overrides and returns a
StatsReport.  The registry fixes the names, the order, and the seed
derivation (sub-seed k for registry slot k), so one master seed reproduces
every report byte for byte; runtimes are kept out of the JSON summary for
the same reason.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .busemann import (
    Sign,
    _fan_pair,
    cif_direction,
    find_jump_directions,
    horizon_busemann_field,
    jump_count_estimate,
    stationary_busemann_field,
)
from .field import LatticeWindow, derive_seed, sample_weight_field
from .graphs import (
    MASS_TOL,
    _resolve_pointers,
    dual_graph,
    flow_check,
    geodesic_graph,
)
from .lpp import Direction, PassageMode, alpha_of_direction, passage_times
from .queueing import catalan_pmf, coupled_line_busemann, palm_pmf
from .stats import (
    ExpLaw,
    PmfLaw,
    StatsError,
    StatsReport,
    distribution_tests,
    make_report,
    map_indexed,
)

SUITE_VERSION = "1.0"
DEFAULT_MASTER_SEED = 2

_POINT_SEED = LatticeWindow(0, 0, 0, 0)  # one-site window; fields extend by seed


def _extensible_field(seed: int):
    return sample_weight_field(_POINT_SEED, seed)


# --- criterion 1: order probability on the coupled line ----------------------


def jump_probability(
    seed: int,
    n_samples: int = 100_000,
    alpha: float = 0.3,
    beta: float = 0.6,
    tolerance: float = 0.005,
) -> StatsReport:
    """P(departure > service) at a site of the jointly stationary line.

    The event is exactly {the slower-direction increment exceeds the site
    weight}, with closed-form probability (beta - alpha) / beta.
    """
    line = coupled_line_busemann(alpha, beta, n_samples, seed)
    p_hat = float(np.mean(line.Itilde > line.Y))
    expected = (beta - alpha) / beta
    return make_report(
        "jump-probability",
        abs(p_hat - expected),
        tolerance,
        n_samples,
        (seed,),
        {
            "alpha": alpha,
            "beta": beta,
            "p_hat": p_hat,
            "expected": expected,
            "burn_in": line.burn_in,
            "buffer_truncated": line.truncated,
        },
    )


# --- criterion 2: gap law between coupled-line jumps -------------------------


def catalan_gap_law(
    seed: int,
    n_gaps: int = 100_000,
    alpha: float = 0.3,
    beta: float = 0.6,
    level: float = 0.001,
) -> StatsReport:
    """Chi-square of inter-jump gaps against the Catalan-number pmf."""
    p_jump = (beta - alpha) / beta
    length = int(math.ceil(n_gaps / p_jump * 1.05)) + 1000
    line = coupled_line_busemann(alpha, beta, length, seed)
    idx = np.flatnonzero(line.Itilde > line.Y)
    if idx.size < n_gaps + 1:
        raise StatsError(
            f"line of length {length} produced only {max(idx.size - 1, 0)} gaps, "
            f"need {n_gaps}"
        )
    gaps = np.diff(idx)[:n_gaps]
    law = PmfLaw(tuple(catalan_pmf(np.arange(1, 9), alpha, beta)))
    return distribution_tests(
        gaps,
        law,
        test_name="catalan-gap-law",
        level=level,
        seeds=(seed,),
        params={"alpha": alpha, "beta": beta, "line_length": length},
    )


# --- criterion 3: narrow-bracket conditioning vs the balanced gap law -------


def palm_bracket_pmf(
    seed: int,
    min_records: int = 20_000,
    center: float = 0.5,
    width: float = 0.01,
    max_n: int = 6,
    tolerance: float = 0.01,
) -> StatsReport:
    """Conditional gap pmf for a shrinking bracket vs the balanced closed form.

    Conditioning on a jump inside the width-`width` bracket around `center`
    is realized by the coupled line at rates (center -/+ width/2); the
    resulting gap frequencies must sit within `tolerance` of the balanced
    pmf bucket by bucket for n <= max_n.  The closed forms themselves must
    coincide bitwise at equal rates.
    """
    alpha = center - width / 2.0
    beta = center + width / 2.0
    p_jump = (beta - alpha) / beta
    length = int(math.ceil(2.5 * min_records / p_jump))
    line = coupled_line_busemann(alpha, beta, length, seed)
    idx = np.flatnonzero(line.Itilde > line.Y)
    gaps = np.diff(idx)
    if gaps.size < min_records:
        raise StatsError(
            f"bracket line of length {length} produced {gaps.size} records, "
            f"need {min_records}"
        )
    ns = np.arange(1, max_n + 1)
    counts = np.bincount(np.minimum(gaps, max_n + 1), minlength=max_n + 2)
    freq = counts[1 : max_n + 1] / gaps.size
    reference = palm_pmf(ns)
    deviation = float(np.max(np.abs(freq - reference)))
    identity_ok = all(
        catalan_pmf(k, a, a) == palm_pmf(k)
        for k in range(1, 13)
        for a in (0.3, center, 0.7)
    )
    statistic = deviation if identity_ok else max(deviation, 1.0)
    return make_report(
        "palm-bracket-pmf",
        statistic,
        tolerance,
        int(gaps.size),
        (seed,),
        {
            "alpha": alpha,
            "beta": beta,
            "bracket_width": width,
            "line_length": length,
            "max_n": max_n,
            "frequencies": [float(v) for v in freq],
            "reference": [float(v) for v in reference],
            "equal_rate_identity": bool(identity_ok),
        },
    )


# --- criterion 4: marginal laws on the coupled line --------------------------


def queue_marginals_ks(
    seed: int,
    n_samples: int = 100_000,
    alpha: float = 0.3,
    beta: float = 0.6,
    level: float = 0.05,
    sojourn_spacing: int = 50,
) -> StatsReport:
    """KS tests of the three marginals of the jointly stationary line.

    Departures and services are iid, so the plain KS threshold applies.  The
    sojourn sequence is Markov with a short memory; its samples are taken at
    `sojourn_spacing` from a proportionally longer line so the iid threshold
    is honest (spacing chosen far above the measured correlation length).
    """
    line = coupled_line_busemann(alpha, beta, n_samples, derive_seed(seed, 1))
    long_line = coupled_line_busemann(
        alpha, beta, n_samples * sojourn_spacing, derive_seed(seed, 2)
    )
    sojourn = long_line.J[::sojourn_spacing][:n_samples]
    parts = {
        "departures": distribution_tests(
            line.Itilde, ExpLaw(alpha), test_name="departures", level=level, seeds=(seed,)
        ),
        "services": distribution_tests(
            line.Y, ExpLaw(beta), test_name="services", level=level, seeds=(seed,)
        ),
        "sojourns": distribution_tests(
            sojourn, ExpLaw(beta - alpha), test_name="sojourns", level=level, seeds=(seed,)
        ),
    }
    ratios = {k: r.statistic / r.threshold for k, r in parts.items()}
    params = {
        "alpha": alpha,
        "beta": beta,
        "level": level,
        "sojourn_spacing": sojourn_spacing,
    }
    for k, r in parts.items():
        params[f"{k}_ks"] = r.statistic
        params[f"{k}_p_value"] = r.params["p_value"]
    return make_report(
        "queue-marginals-ks",
        max(ratios.values()),
        1.0,
        3 * n_samples,
        (seed,),
        params,
    )


# --- criterion 5: jump count and jump mass of one edge -----------------------


def jump_count_mass(
    seed: int,
    replicas: int = 1000,
    alpha_lo: float = 0.2,
    alpha_hi: float = 0.4,
    horizon: int = 4096,
    tolerance: float = 0.10,
) -> StatsReport:
    """Scan the horizontal edge at the origin across replicas.

    The expected number of limit jumps in (lo, hi) is log(hi/lo); the
    expected total gap mass is 1/lo - 1/hi.  The mass is taken as the raw
    mean of per-replica gap sums (telescoping makes it multiplet-exact);
    the count comes from jump_count_estimate, since raw record counts
    overshoot the limit count by the finite-horizon multiplet factor.  Both
    estimates must land within `tolerance` relatively.
    """
    edge = ((0, 0), (1, 0))
    expected_count = math.log(alpha_hi / alpha_lo)
    expected_mass = 1.0 / alpha_lo - 1.0 / alpha_hi

    def one(r: int):
        f = _extensible_field(derive_seed(seed, 10_000 + r))
        return find_jump_directions(edge, f, (alpha_lo, alpha_hi), horizon)

    scans = map_indexed(one, replicas)
    counts = np.array([len(s) for s in scans], dtype=np.float64)
    masses = np.array([sum(rec.gap for rec in s) for s in scans], dtype=np.float64)
    count_est = jump_count_estimate(scans)
    mm = float(masses.mean())
    statistic = max(
        abs(count_est / expected_count - 1.0), abs(mm / expected_mass - 1.0)
    )
    zero_fraction = float(np.mean(counts == 0))
    return make_report(
        "jump-count-mass",
        statistic,
        tolerance,
        replicas,
        (seed,),
        {
            "alpha_lo": alpha_lo,
            "alpha_hi": alpha_hi,
            "horizon": horizon,
            "count_estimate": count_est,
            "expected_count": expected_count,
            "zero_jump_fraction": zero_fraction,
            "se_count_estimate": float(
                math.sqrt((1.0 - zero_fraction) / (zero_fraction * replicas))
            ),
            "mean_raw_record_count": float(counts.mean()),
            "mean_mass": mm,
            "expected_mass": expected_mass,
            "se_mass": float(masses.std(ddof=1) / math.sqrt(replicas)),
        },
    )


# --- criterion 6: the law of large numbers along the diagonal ----------------


def shape_mean(
    seed: int,
    n: int = 500,
    replicas: int = 50,
    tolerance: float = 0.02,
) -> StatsReport:
    """Mean diagonal passage time per step against the limit constant 4."""

    def one(r: int) -> float:
        f = sample_weight_field(LatticeWindow(0, n, 0, n), derive_seed(seed, r + 1))
        pt = passage_times(f, (0, 0), PassageMode.FROM_ANCHOR)
        return pt.value(n, n) / n

    vals = np.array(map_indexed(one, replicas))
    mean = float(vals.mean())
    return make_report(
        "shape-mean",
        abs(mean - 4.0) / 4.0,
        tolerance,
        replicas,
        (seed,),
        {
            "n": n,
            "mean": mean,
            "expected": 4.0,
            "se": float(vals.std(ddof=1) / math.sqrt(replicas)),
        },
    )


# --- criterion 7: exactness of the algebraic identities ----------------------


def exact_residuals(
    seed: int,
    size: int = 1030,
    flow_size: int = 1000,
    horizon: int = 4096,
    alpha: float = 0.41,
    tol: float = 1e-9,
) -> StatsReport:
    """Recovery, cocycle closure, primal/dual no-crossing, mass conservation.

    All four identities must hold below `tol` on windows of at least 10^6
    sites; recovery holds bitwise by construction, the rest must stay at
    rounding scale.
    """
    win = LatticeWindow(0, size, 0, size)
    f = sample_weight_field(win, derive_seed(seed, 1))
    b = stationary_busemann_field(win, alpha, f, derive_seed(seed, 2))
    finite = ~np.isnan(b.U) & ~np.isnan(b.V)
    recovery = float(
        np.max(np.abs(np.minimum(b.U, b.V)[finite] - f.values[finite]))
    )
    closure = b._closure_residual()
    g = geodesic_graph(b)
    d = dual_graph(g)
    # a south dual step crosses the primal e1 edge at the same site, a west
    # dual step the primal e2 edge; the counts must vanish
    crossings = int(
        np.sum((d.step == 2) & (g.step == 1)) + np.sum((d.step == 1) & (g.step == 2))
    )
    fwin = LatticeWindow(0, flow_size, 0, flow_size)
    b_lo, b_hi = horizon_busemann_field(
        fwin,
        [(Direction(0.45), Sign.NONE), (Direction(0.55), Sign.NONE)],
        horizon,
        derive_seed(seed, 3),
    )
    rep = flow_check(b_lo, b_hi)
    statistic = max(
        recovery,
        closure,
        float(crossings),
        rep.max_residual,
        max(0.0, -rep.min_out_mass),
        rep.diag_max_residual,
    )
    return make_report(
        "exact-residuals",
        statistic,
        tol,
        win.n_sites + rep.n_sites,
        (seed,),
        {
            "stationary_window": size,
            "flow_window": flow_size,
            "horizon": horizon,
            "alpha": alpha,
            "recovery_max": recovery,
            "closure_max": closure,
            "dual_crossings": crossings,
            "flow_max": rep.max_residual,
            "flow_diagonal_max": rep.diag_max_residual,
            "min_out_mass": rep.min_out_mass,
        },
    )


# --- criterion 8: coalescence of a block of geodesic roots -------------------


def coalescence_window(
    seed: int,
    trials: int = 100,
    roots: int = 50,
    span: int = 2000,
    alpha: float = 0.5,
    allowed_failures: int = 1,
) -> StatsReport:
    """All geodesics rooted in [0, roots]^2 must merge inside [0, span]^2.

    Success in a trial means the whole root block reaches one common site
    (equivalently, leaves the window through one point); exits through
    distinct sites count as failures, never as censored.
    """

    def one(t: int) -> int:
        win = LatticeWindow(0, span, 0, span)
        f = sample_weight_field(win, derive_seed(seed, 20_000 + 2 * t))
        b = stationary_busemann_field(win, alpha, f, derive_seed(seed, 20_001 + 2 * t))
        g = geodesic_graph(b)
        nx, ny = win.shape
        step = g.step.ravel()
        flat = np.arange(nx * ny, dtype=np.int64)
        ii, jj = flat // ny, flat % ny
        succ = flat.copy()
        m1 = (step == 1) & (ii < nx - 1)
        m2 = (step == 2) & (jj < ny - 1)
        succ[m1] = flat[m1] + ny
        succ[m2] = flat[m2] + 1
        sinks = _resolve_pointers(succ)
        block = (np.arange(roots + 1)[:, None] * ny + np.arange(roots + 1)).ravel()
        return int(np.unique(sinks[block]).size == 1)

    wins = sum(map_indexed(one, trials))
    return make_report(
        "coalescence-window",
        (trials - wins) / trials,
        allowed_failures / trials,
        trials,
        (seed,),
        {
            "trials": trials,
            "successes": int(wins),
            "root_block": roots,
            "span": span,
            "alpha": alpha,
        },
    )


# --- criterion 9: interface direction vs increment-difference scan -----------


def cif_vs_scan(
    seed: int,
    trials: int = 100,
    horizon: int = 4096,
    grid_lo: float = 0.02,
    grid_hi: float = 0.98,
    grid_points: int = 49,
    max_grid_steps: int = 2,
    min_agreement: float = 0.95,
) -> StatsReport:
    """Two estimates of the interface direction at the origin must agree.

    The bisection estimate probes single targets on the grid; the scan
    estimate locates the sign change of the fused level-line difference.
    Agreement means within `max_grid_steps` grid spacings; trials without a
    sign change in range count against agreement.
    """
    grid = np.linspace(grid_lo, grid_hi, grid_points)
    gstep = float(grid[1] - grid[0])
    n = horizon
    i_lo = max(1, math.floor(n * Direction(grid_lo).xi[0]))
    i_hi = min(n - 1, math.ceil(n * Direction(grid_hi).xi[0]))

    def one(t: int) -> int:
        f = _extensible_field(derive_seed(seed, 40_000 + t))
        try:
            a_cif = cif_direction((0, 0), f, grid, n).alpha
        except ValueError:
            return 0
        Du = _fan_pair(f, (0, 0), (1, 0), n, i_lo, i_hi)
        Dv = _fan_pair(f, (0, 0), (0, 1), n, i_lo, i_hi)
        D = Dv - Du
        if not (D[0] < 0 <= D[-1]):
            return 0
        v1 = i_lo + int(np.argmax(D >= 0))
        a_scan = alpha_of_direction((v1 - 0.5, n - v1 + 0.5))
        return int(abs(a_cif - a_scan) <= max_grid_steps * gstep + 1e-12)

    agree = sum(map_indexed(one, trials))
    return make_report(
        "cif-vs-scan",
        1.0 - agree / trials,
        1.0 - min_agreement,
        trials,
        (seed,),
        {
            "trials": trials,
            "agreements": int(agree),
            "horizon": horizon,
            "grid": [grid_lo, grid_hi, grid_points],
            "max_grid_steps": max_grid_steps,
        },
    )


# --- criterion 10: growth of the instability set of one jump direction ------


def instability_edge_growth(
    seed: int,
    replicas: int = 4,
    alpha_lo: float = 0.25,
    alpha_hi: float = 0.75,
    horizon: int = 4096,
    sizes: tuple = (100, 200, 400),
) -> StatsReport:
    """Edge counts of scanned jump directions across nested boxes.

    For every jump found on the origin's horizontal edge, the coupled pair at
    the jump's bracketing targets is built over the largest box and the
    mass-carrying edges are counted per box size s.  Counts must stay within
    2 s^(3/2) sqrt(log s) and grow with a fitted exponent below 2.
    """
    sizes = tuple(sorted(int(s) for s in sizes))
    smax = sizes[-1]
    win = LatticeWindow(0, smax, 0, smax)
    logs = np.log(np.asarray(sizes, dtype=np.float64))

    def one(r: int):
        env = derive_seed(seed, 50_000 + r)
        f = _extensible_field(env)
        scan = find_jump_directions(((0, 0), (1, 0)), f, (alpha_lo, alpha_hi), horizon)
        out = []
        for rec in scan:
            b_lo, b_hi = horizon_busemann_field(
                win,
                [
                    (Direction(rec.bracket[0]), Sign.NONE),
                    (Direction(rec.bracket[1]), Sign.NONE),
                ],
                horizon,
                env,
            )
            if b_hi.target[0] != b_lo.target[0] + 1:
                raise StatsError(
                    f"bracket of jump at alpha={rec.alpha_star} does not resolve "
                    f"to adjacent targets at horizon {horizon}"
                )
            south = (b_lo.U - b_hi.U) > MASS_TOL
            west = (b_hi.V - b_lo.V) > MASS_TOL
            counts = [
                int(np.sum(south[: s + 1, : s + 1]) + np.sum(west[: s + 1, : s + 1]))
                for s in sizes
            ]
            out.append((rec.alpha_star, counts))
        return out

    jumps = [item for sub in map_indexed(one, replicas) for item in sub]
    max_ratio = 0.0
    max_slope = 0.0
    detail = []
    for alpha_star, counts in jumps:
        bounds = [2.0 * s**1.5 * math.sqrt(math.log(s)) for s in sizes]
        ratio = max(c / b for c, b in zip(counts, bounds))
        slope = float(np.polyfit(logs, np.log(np.asarray(counts, float)), 1)[0])
        max_ratio = max(max_ratio, ratio)
        max_slope = max(max_slope, slope)
        detail.append({"alpha_star": alpha_star, "counts": counts, "slope": slope})
    statistic = max(max_ratio, max_slope / 2.0) if jumps else 0.0
    return make_report(
        "instability-edge-growth",
        statistic,
        1.0,
        len(jumps),
        (seed,),
        {
            "replicas": replicas,
            "alpha_lo": alpha_lo,
            "alpha_hi": alpha_hi,
            "horizon": horizon,
            "sizes": list(sizes),
            "n_jumps": len(jumps),
            "max_count_ratio": max_ratio,
            "max_growth_exponent": max_slope,
            "jumps": detail,
        },
    )


# --- the suite runner --------------------------------------------------------

ACCEPTANCE_TESTS = (
    ("jump-probability", jump_probability),
    ("catalan-gap-law", catalan_gap_law),
    ("palm-bracket-pmf", palm_bracket_pmf),
    ("queue-marginals-ks", queue_marginals_ks),
    ("jump-count-mass", jump_count_mass),
    ("shape-mean", shape_mean),
    ("exact-residuals", exact_residuals),
    ("coalescence-window", coalescence_window),
    ("cif-vs-scan", cif_vs_scan),
    ("instability-edge-growth", instability_edge_growth),
)


@dataclass(frozen=True)
class AcceptanceRun:
    """Reports plus timing; only the reports enter the JSON summary."""

    master_seed: int
    reports: tuple
    runtimes: dict

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.reports if r.verdict == "PASS")

    @property
    def n_fail(self) -> int:
        return len(self.reports) - self.n_pass

    def summary_json(self) -> str:
        doc = {
            "suite_version": SUITE_VERSION,
            "master_seed": self.master_seed,
            "reports": [r.to_dict() for r in self.reports],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def summary_text(self) -> str:
        lines = []
        for r in self.reports:
            lines.append(
                f"{r.verdict} {r.test_name}: statistic={r.statistic:.6g} "
                f"threshold={r.threshold:.6g} ({self.runtimes.get(r.test_name, 0.0):.1f} s)"
            )
        total = sum(self.runtimes.values())
        lines.append(f"{self.n_pass}/{len(self.reports)} passed in {total:.1f} s")
        return "\n".join(lines)


def acceptance_suite(config=None, master_seed: int = DEFAULT_MASTER_SEED) -> AcceptanceRun:
    """Run the (configured subset of the) acceptance criteria.

    config maps "tests" to the list of names to run and any test name to a
    dict of keyword overrides for that criterion.  Per-test errors become
    failing reports; the suite always continues.
    """
    names = [n for n, _ in ACCEPTANCE_TESTS]
    cfg = dict(config or {})
    selected = cfg.pop("tests", None)
    if selected is None:
        selected = names
    unknown = [t for t in list(selected) + list(cfg) if t not in names]
    if unknown:
        raise StatsError(
            f"unknown test name(s) {unknown}; valid names: {', '.join(names)}"
        )
    reports = []
    runtimes = {}
    for k, (name, fn) in enumerate(ACCEPTANCE_TESTS):
        if name not in selected:
            continue
        sub = derive_seed(master_seed, 100 + k)
        t0 = time.perf_counter()
        try:
            rep = fn(sub, **cfg.get(name, {}))
        except Exception as exc:  # deliberate: the suite must keep going
            rep = make_report(
                name, 1.0, 0.0, 0, (sub,), {"error": f"{type(exc).__name__}: {exc}"}
            )
        runtimes[name] = time.perf_counter() - t0
        reports.append(rep)
    return AcceptanceRun(master_seed, tuple(reports), runtimes)

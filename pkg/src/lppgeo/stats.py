"""Monte-Carlo harness: goodness-of-fit reports and edge-density estimation.

Every empirical result is a StatsReport with a one-sided pass rule:
PASS iff statistic <= threshold.  Censoring beyond CENSOR_LIMIT fails the
report outright regardless of the statistic, with the reason in params.
Reports serialize to JSON deterministically; anything timing-related stays
out of them.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .busemann import Sign, horizon_busemann_field, level_target
from .field import LatticeWindow, derive_seed
from .graphs import MASS_TOL
from .lpp import Direction

CENSOR_LIMIT = 0.10


class StatsError(ValueError):
    """Unusable sample set or malformed suite configuration."""


@dataclass(frozen=True)
class StatsReport:
    test_name: str
    params: dict
    n_samples: int
    statistic: float
    threshold: float
    verdict: str
    seeds: tuple
    censored_fraction: float = 0.0

    def to_dict(self) -> dict:
        return {
            "test_name": self.test_name,
            "params": self.params,
            "n_samples": self.n_samples,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "seeds": list(self.seeds),
            "censored_fraction": self.censored_fraction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def make_report(
    test_name: str,
    statistic: float,
    threshold: float,
    n_samples: int,
    seeds,
    params: dict | None = None,
    censored_fraction: float = 0.0,
) -> StatsReport:
    """Apply the pass rule; censoring above CENSOR_LIMIT fails outright."""
    params = dict(params or {})
    verdict = "PASS" if statistic <= threshold else "FAIL"
    if censored_fraction > CENSOR_LIMIT:
        verdict = "FAIL"
        params["fail_reason"] = (
            f"censored fraction {censored_fraction:.4f} exceeds {CENSOR_LIMIT}"
        )
    return StatsReport(
        test_name=test_name,
        params=params,
        n_samples=int(n_samples),
        statistic=float(statistic),
        threshold=float(threshold),
        verdict=verdict,
        seeds=tuple(int(s) for s in seeds),
        censored_fraction=float(censored_fraction),
    )


# --- reference laws ----------------------------------------------------------


@dataclass(frozen=True)
class ExpLaw:
    """Exponential reference with the given rate."""

    rate: float

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return -np.expm1(-self.rate * np.asarray(x, dtype=np.float64))

    def label(self) -> str:
        return f"exp(rate={self.rate!r})"


@dataclass(frozen=True)
class PmfLaw:
    """Reference pmf on {1, 2, ...}: probs[n-1] = P(n) for n <= len(probs),
    everything larger pooled into one tail bucket."""

    probs: tuple

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("probs must be a nonempty 1-d sequence")
        if np.any(p <= 0):
            raise ValueError("pmf buckets must have positive probability")
        if float(p.sum()) >= 1.0:
            raise ValueError("pmf must leave positive mass for the tail bucket")
        object.__setattr__(self, "probs", tuple(float(v) for v in p))

    @property
    def tail_from(self) -> int:
        return len(self.probs) + 1

    @property
    def tail_prob(self) -> float:
        return 1.0 - float(np.sum(self.probs))

    def label(self) -> str:
        return f"pmf(1..{len(self.probs)}+tail)"


# --- goodness of fit ---------------------------------------------------------


def distribution_tests(
    samples,
    reference,
    *,
    test_name: str = "distribution",
    level: float = 0.05,
    censored=None,
    seeds=(),
    params: dict | None = None,
) -> StatsReport:
    """Test samples against a reference law.

    Continuous references get a one-sample KS statistic against the asymptotic
    critical value at `level`; pmf references get a Pearson chi-square with the
    law's tail bucketing.  Censored entries are excluded from the statistic and
    reported as a fraction.
    """
    values = np.asarray(samples, dtype=np.float64).ravel()
    if censored is None:
        cens = np.zeros(values.shape, dtype=bool)
    else:
        cens = np.asarray(censored, dtype=bool).ravel()
        if cens.shape != values.shape:
            raise StatsError("censoring mask must match the sample shape")
    if values.size == 0 or bool(np.all(cens)):
        raise StatsError("all samples censored: nothing to test")
    unc = values[~cens]
    if unc.size < 30:
        raise StatsError(f"need at least 30 uncensored samples, got {unc.size}")
    if not 0 < level < 1:
        raise StatsError(f"significance level must be in (0,1), got {level}")
    frac = float(np.mean(cens))
    info = dict(params or {})
    info["level"] = level
    n = unc.size

    if isinstance(reference, ExpLaw):
        xs = np.sort(unc)
        F = reference.cdf(xs)
        grid = np.arange(1, n + 1, dtype=np.float64) / n
        ks = float(max(np.max(grid - F), np.max(F - (grid - 1.0 / n))))
        threshold = float(sps.kstwobign.isf(level) / math.sqrt(n))
        info["law"] = reference.label()
        info["ks_statistic"] = ks
        info["p_value"] = float(sps.kstwobign.sf(ks * math.sqrt(n)))
        return make_report(test_name, ks, threshold, n, seeds, info, frac)

    if isinstance(reference, PmfLaw):
        ints = unc.astype(np.int64)
        if np.any(ints != unc) or np.any(ints < 1):
            raise StatsError("pmf references need integer samples >= 1")
        k = len(reference.probs)
        clipped = np.minimum(ints, k + 1)
        observed = np.bincount(clipped, minlength=k + 2)[1:].astype(np.float64)
        expected = n * np.asarray(reference.probs + (reference.tail_prob,))
        stat = float(np.sum((observed - expected) ** 2 / expected))
        df = k  # k+1 buckets, fully specified reference
        threshold = float(sps.chi2.isf(level, df))
        info["law"] = reference.label()
        info["chi2_statistic"] = stat
        info["df"] = df
        info["p_value"] = float(sps.chi2.sf(stat, df))
        info["min_expected_count"] = float(np.min(expected))
        return make_report(test_name, stat, threshold, n, seeds, info, frac)

    raise StatsError(f"unsupported reference law: {reference!r}")


# --- edge-density estimation -------------------------------------------------


def _as_alpha(d) -> float:
    if isinstance(d, Direction):
        return d.alpha
    return float(d)


def _interval_bounds(interval) -> tuple[float, float]:
    if isinstance(interval, (Direction, float, int)):
        a = _as_alpha(interval)
        return a, a
    lo, hi = interval
    return _as_alpha(lo), _as_alpha(hi)


def estimate_densities(
    interval,
    window_sizes,
    replicas: int,
    seed: int,
    *,
    horizon: int | None = None,
) -> StatsReport:
    """Empirical densities of instability edges for a direction interval.

    For each replica one coupled pair of finite-horizon fields is built and
    the fractions of dual sites in [0,s-1]^2 carrying horizontal mass
    (kappa1), vertical mass (kappa2), or both (kappa12) are recorded per
    window size s.  kappa12 at the largest size is compared against the
    frequency of the competition-interface direction falling inside the
    interval (the sign condition on the same pair); the report passes when
    the two agree within three standard errors.

    A single direction (zero-width interval) is the degenerate case: the two
    fields coincide and every density is exactly zero.  With an explicit
    horizon too coarse to separate the endpoint targets the interval has zero
    grid coverage and the call raises.
    """
    a_lo, a_hi = _interval_bounds(interval)
    if not (0.0 < a_lo <= a_hi < 1.0):
        raise StatsError(f"interval must sit inside (0,1), got [{a_lo}, {a_hi}]")
    sizes = sorted(set(int(s) for s in np.atleast_1d(window_sizes)))
    if not sizes or sizes[0] < 2:
        raise StatsError(f"window sizes must be integers >= 2, got {window_sizes}")
    if replicas < 1:
        raise StatsError(f"replicas must be >= 1, got {replicas}")
    s_max = sizes[-1]

    base_params = {
        "alpha_lo": a_lo,
        "alpha_hi": a_hi,
        "width": a_hi - a_lo,
        "window_sizes": sizes,
        "replicas": replicas,
    }
    if a_lo == a_hi:
        params = dict(base_params)
        params["degenerate"] = True
        for key in ("kappa1", "kappa2", "kappa12"):
            params[key] = {str(s): [0.0, 0.0] for s in sizes}
        params["cif_in_interval_freq"] = 0.0
        return make_report("edge-densities", 0.0, 0.0, 0, (seed,), params)

    d_lo, d_hi = Direction(a_lo), Direction(a_hi)
    if horizon is None:
        n = 256
        while True:
            t_lo = level_target(d_lo, n, Sign.NONE)
            t_hi = level_target(d_hi, n, Sign.NONE)
            if t_hi[0] - t_lo[0] >= 1 and t_lo[0] >= s_max and t_hi[1] >= s_max:
                break
            n *= 2
            if n > 1 << 22:
                raise StatsError(
                    f"no workable horizon below 2^22 for interval [{a_lo}, {a_hi}]"
                )
    else:
        n = int(horizon)
        t_lo = level_target(d_lo, n, Sign.NONE)
        t_hi = level_target(d_hi, n, Sign.NONE)
        if t_hi[0] - t_lo[0] < 1:
            raise StatsError(
                f"interval [{a_lo}, {a_hi}] has zero grid coverage at horizon {n}: "
                f"both endpoints resolve to target {t_lo}"
            )
    win = LatticeWindow(0, s_max, 0, s_max)

    def one(r: int):
        env = derive_seed(seed, 1000 + r)
        b_lo, b_hi = horizon_busemann_field(win, [(d_lo, Sign.NONE), (d_hi, Sign.NONE)], n, env)
        south = b_lo.U - b_hi.U
        west = b_hi.V - b_lo.V
        sm = south > MASS_TOL
        wm = west > MASS_TOL
        cond = (b_lo.V <= b_lo.U) & (b_hi.V >= b_hi.U)
        k1 = [float(np.mean(sm[:s, :s])) for s in sizes]
        k2 = [float(np.mean(wm[:s, :s])) for s in sizes]
        k12 = [float(np.mean((sm & wm)[:s, :s])) for s in sizes]
        freq = float(np.mean(cond[:s_max, :s_max]))
        return k1, k2, k12, freq

    results = map_indexed(one, replicas)
    k1 = np.array([r[0] for r in results])
    k2 = np.array([r[1] for r in results])
    k12 = np.array([r[2] for r in results])
    freq = np.array([r[3] for r in results])

    def summarize(mat: np.ndarray) -> dict:
        out = {}
        for col, s in enumerate(sizes):
            vals = mat[:, col]
            se = float(np.std(vals, ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
            out[str(s)] = [float(np.mean(vals)), se]
        return out

    diff = k12[:, -1] - freq
    if replicas > 1:
        se_diff = float(np.std(diff, ddof=1) / math.sqrt(replicas))
    else:
        # single replica: binomial site-count proxy, ignoring spatial correlation
        p = max(float(k12[0, -1]), 1.0 / s_max**2)
        se_diff = math.sqrt(2.0 * p / s_max**2)
    params = dict(base_params)
    params["horizon"] = n
    params["kappa1"] = summarize(k1)
    params["kappa2"] = summarize(k2)
    params["kappa12"] = summarize(k12)
    params["cif_in_interval_freq"] = float(np.mean(freq))
    params["kappa12_vs_cif_diff"] = float(np.mean(diff))
    return make_report(
        "edge-densities",
        abs(float(np.mean(diff))),
        3.0 * se_diff,
        replicas * s_max * s_max,
        (seed,),
        params,
    )


# --- worker-thread plumbing --------------------------------------------------


def worker_count() -> int:
    """Default worker-thread count, from LPPGEO_THREADS (>=1)."""
    try:
        return max(1, int(os.environ.get("LPPGEO_THREADS", "1")))
    except ValueError:
        return 1


def map_indexed(fn, n: int, threads: int | None = None) -> list:
    """[fn(0), ..., fn(n-1)], optionally across worker threads.

    Results are collected by index, so aggregates never depend on scheduling
    order; fn must derive any randomness from its index.
    """
    k = worker_count() if threads is None else max(1, int(threads))
    if k == 1 or n <= 1:
        return [fn(i) for i in range(n)]
    out = [None] * n
    with ThreadPoolExecutor(max_workers=k) as ex:
        futures = {ex.submit(fn, i): i for i in range(n)}
        for fut in as_completed(futures):
            out[futures[fut]] = fut.result()
    return out

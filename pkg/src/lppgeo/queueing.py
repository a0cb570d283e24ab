"""Single-server queue recursions and the random-walk laws behind them.

The backward recursion J_k = Y_k + (J_{k+1} - I_k)^+ together with the
departure map Itilde_k = Y_k + (I_k - J_{k+1})^+ is the exact mechanism
driving every backward increment sweep in this package; here it is exposed
on its own, with the stationary coupled line, the embedded random walk
functionals (ladder epochs, last-exit times, the future-infimum W), and the
closed-form Catalan interarrival laws used as test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from .field import derive_seed, stream_exponential


def queue_operator(
    I: np.ndarray, Y: np.ndarray, terminal_J: float
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the backward queue recursion on a finite segment.

    I are inter-arrival times, Y service times, terminal_J the sojourn value
    beyond the right end.  Returns (J, Itilde) with, exactly as floats,
    J_k = Y_k + (J_{k+1} - I_k)^+  and  Itilde_k = Y_k + (I_k - J_{k+1})^+.
    """
    I = np.asarray(I, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if I.ndim != 1 or Y.ndim != 1 or I.shape != Y.shape or I.size == 0:
        raise ValueError(
            f"I and Y must be equal-length nonempty 1-d arrays, got {I.shape} and {Y.shape}"
        )
    if not (np.all(I > 0) and np.all(Y > 0)):
        raise ValueError("inter-arrival and service times must be strictly positive")
    terminal_J = float(terminal_J)
    if not terminal_J > 0:
        raise ValueError(f"terminal_J must be strictly positive, got {terminal_J}")
    m = I.size
    J = np.empty(m + 1)
    J[m] = terminal_J
    Il = I.tolist()
    Yl = Y.tolist()
    Jl = J.tolist()
    nxt = terminal_J
    for k in range(m - 1, -1, -1):
        d = nxt - Il[k]
        nxt = Yl[k] + (d if d > 0.0 else 0.0)
        Jl[k] = nxt
    J = np.array(Jl)
    Itilde = Y + np.maximum(I - J[1:], 0.0)
    return J[:-1], Itilde


def _queue_scan(
    I: np.ndarray, Y: np.ndarray, terminal_J: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sup-formula evaluation of the same recursion.

    Returns (J, R) where R[t] = cumsum(Y, terminal)[t] - cumsum(I)[t-1] is the
    record sequence whose suffix maxima give J.  Agrees with queue_operator up
    to cumsum rounding; used inside the window sweeps where only 1e-9 scale
    residuals are contractual.
    """
    m = I.size
    cy = np.empty(m + 1)
    np.cumsum(Y, out=cy[:m])
    cy[m] = cy[m - 1] + terminal_J
    ci = np.empty(m + 1)
    ci[0] = 0.0
    np.cumsum(I, out=ci[1:])
    R = cy - ci
    S = np.maximum.accumulate(R[::-1])[::-1]
    base = np.empty(m)
    base[0] = 0.0
    base[1:] = cy[: m - 1] - ci[1:m]
    return S[:m] - base, R


@dataclass
class QueueLine:
    """Jointly stationary queue segment over index_range = [lo, hi).

    Arrays are indexed k - lo.  terminal_J is the sojourn value at hi, so the
    recursion J_k = Y_k + (J_{k+1} - I_k)^+ closes exactly on the stored data.
    """

    alpha: float
    beta: float
    index_range: tuple[int, int]
    I: np.ndarray
    Y: np.ndarray
    Itilde: np.ndarray
    J: np.ndarray
    terminal_J: float
    burn_in: int = 0
    truncated: bool = False
    seed: int | None = None

    def __post_init__(self) -> None:
        lo, hi = self.index_range
        n = hi - lo
        for name in ("I", "Y", "Itilde", "J"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have length {n}, got {arr.shape}")
        if not 0 < self.alpha < self.beta < 1:
            raise ValueError(
                f"need 0 < alpha < beta < 1, got alpha={self.alpha}, beta={self.beta}"
            )
        if np.any(self.Itilde < self.Y):
            raise ValueError("departure times must dominate service times")
        jn = np.append(self.J[1:], self.terminal_J)
        if not (
            np.array_equal(self.J, self.Y + np.maximum(jn - self.I, 0.0))
            and np.array_equal(self.Itilde, self.Y + np.maximum(self.I - jn, 0.0))
        ):
            raise ValueError("queue recursion does not close on the stored arrays")


def coupled_line_busemann(
    alpha: float, beta: float, N: int, seed: int, max_doublings: int = 8
) -> QueueLine:
    """Exactly stationary queue line with inter-arrival rate alpha and service
    rate beta on core indices [0, N).

    The terminal sojourn is drawn from its stationary Exp(beta - alpha) law, so
    the core is exact in law for any buffer; on top of that the right buffer is
    doubled until the sup defining every core J is attained at an interior
    index (truncated flags the rare failure at the doubling cap).
    """
    if not 0 < alpha < beta < 1:
        raise ValueError(f"need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")
    if N < 1:
        raise ValueError(f"core length must be positive, got {N}")
    drift = 1.0 / alpha - 1.0 / beta
    burn = max(1, math.ceil(50.0 / drift))
    terminal = float(
        stream_exponential(derive_seed(seed, 3), 0, 1, rate=beta - alpha)[0]
    )
    truncated = True
    for _ in range(max_doublings + 1):
        M = N + burn
        I = stream_exponential(derive_seed(seed, 1), 0, M, rate=alpha)
        Y = stream_exponential(derive_seed(seed, 2), 0, M, rate=beta)
        _, R = _queue_scan(I, Y, terminal)
        # sup for every core J attained before the terminal index?
        if np.max(R[N - 1 : M]) >= R[M]:
            truncated = False
            break
        burn *= 2
    J, Itilde = queue_operator(I, Y, terminal)
    return QueueLine(
        alpha=alpha,
        beta=beta,
        index_range=(0, N),
        I=I[:N].copy(),
        Y=Y[:N].copy(),
        Itilde=Itilde[:N].copy(),
        J=J[:N].copy(),
        terminal_J=float(J[N]),  # burn >= 1, so index N is inside the buffer
        burn_in=burn,
        truncated=truncated,
        seed=seed,
    )


@dataclass
class WalkPath:
    """Integer-indexed walk with S_0 = 0.

    steps[k] is the increment X_i for i = first_index + k; partial sums are
    defined on [first_index - 1, last_index] and anchored at S_0 = 0, so the
    index 0 must lie in that range.
    """

    steps: np.ndarray
    first_index: int = 1

    def __post_init__(self) -> None:
        self.steps = np.asarray(self.steps, dtype=np.float64)
        if self.steps.ndim != 1 or self.steps.size == 0:
            raise ValueError("steps must be a nonempty 1-d array")
        if not (self.first_index - 1 <= 0 <= self.last_index):
            raise ValueError("index 0 must lie in the walk's index range")

    @property
    def last_index(self) -> int:
        return self.first_index + self.steps.size - 1

    def partial_sums(self) -> tuple[np.ndarray, np.ndarray]:
        """(indices, S values) over [first_index - 1, last_index]."""
        ns = np.arange(self.first_index - 1, self.last_index + 1)
        raw = np.concatenate([[0.0], np.cumsum(self.steps)])
        return ns, raw - raw[0 - (self.first_index - 1)]

    def value(self, n: int) -> float:
        ns, S = self.partial_sums()
        if not ns[0] <= n <= ns[-1]:
            raise ValueError(f"index {n} outside walk range [{ns[0]}, {ns[-1]}]")
        return float(S[n - ns[0]])


@dataclass
class WalkW:
    walk: WalkPath
    W: np.ndarray  # W_k for k = 0 .. len-1
    truncated: np.ndarray  # per-k flag: infimum only attained at the cut


def walk_W(I: np.ndarray, Y: np.ndarray) -> WalkW:
    """Future-infimum functional of the embedded walk.

    The walk steps are X_i = I_{i-1} - Y_i for i = 1 .. m-1 and
    W_k = inf_{n > k} S_n - S_k, taken over the available range; truncated[k]
    marks infima attained only at the right cut.
    """
    I = np.asarray(I, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if I.shape != Y.shape or I.ndim != 1 or I.size < 2:
        raise ValueError("I and Y must be equal-length 1-d arrays with at least 2 entries")
    walk = WalkPath(I[:-1] - Y[1:], first_index=1)
    _, S = walk.partial_sums()  # S_0 .. S_{m-1}
    m = S.size
    sufmin = np.minimum.accumulate(S[::-1])[::-1]
    W = sufmin[1:] - S[:-1]
    # the infimum is censored when nothing before the cut attains it
    trunc = np.empty(m - 1, dtype=bool)
    trunc[-1] = True
    if m > 2:
        inner = np.minimum.accumulate(S[1:-1][::-1])[::-1]  # min over (k, m-2]
        trunc[:-1] = inner > S[-1]
    return WalkW(walk, W, trunc)


@dataclass
class LadderEpochs:
    epochs: np.ndarray  # lambda_0 = 0, then the strict ascending record times
    heights: np.ndarray  # H_i = S_{lambda_i} - S_{lambda_{i-1}}, i >= 1
    found: bool  # False when no epoch beyond lambda_0 exists in range


def ladder_epochs(walk: WalkPath) -> LadderEpochs:
    """Strict ascending ladder epochs of the walk from index 0 onward."""
    ns, S = walk.partial_sums()
    k0 = int(np.searchsorted(ns, 0))
    Sf = S[k0:]
    if Sf.size < 2:
        return LadderEpochs(np.array([0]), np.array([]), False)
    prev_max = np.maximum.accumulate(Sf[:-1])
    rec = Sf[1:] > prev_max
    idx = np.flatnonzero(rec) + 1
    epochs = np.concatenate([[0], idx])
    heights = np.diff(Sf[epochs])
    return LadderEpochs(epochs, heights, idx.size > 0)


@dataclass
class LastExitTimes:
    """Indices n with S_n strictly below the whole future in range.

    nonneg lists them for n >= 0 in increasing order (sigma_0 first), neg for
    n < 0 in increasing order (sigma_{-1} last).  Flags are per entry: True
    when the future minimum constraining that entry is attained only at the
    right cut, so membership could change under extension.
    """

    nonneg: np.ndarray
    neg: np.ndarray
    nonneg_censored: np.ndarray = dfield(default_factory=lambda: np.array([], bool))
    neg_censored: np.ndarray = dfield(default_factory=lambda: np.array([], bool))

    def sigma(self, i: int) -> int:
        if i >= 0:
            if i >= self.nonneg.size:
                raise IndexError(f"sigma_{i} not found in range")
            return int(self.nonneg[i])
        if -i > self.neg.size:
            raise IndexError(f"sigma_{i} not found in range")
        return int(self.neg[self.neg.size + i])


def last_exit_times(walk: WalkPath) -> LastExitTimes:
    ns, S = walk.partial_sums()
    m = S.size
    if m < 2:
        return LastExitTimes(np.array([], int), np.array([], int))
    sufmin_excl = np.minimum.accumulate(S[:0:-1])[::-1]  # min over (n, last]
    hit = S[:-1] < sufmin_excl
    idx = np.flatnonzero(hit)
    # censored when the future min is attained only at the final index
    if m > 2:
        inner = np.minimum.accumulate(S[-2:0:-1])[::-1]  # min over (n, last-1]
        cens_all = np.empty(m - 1, dtype=bool)
        cens_all[:-1] = inner > S[-1]
        cens_all[-1] = True
    else:
        cens_all = np.array([True])
    n_vals = ns[idx]
    cens = cens_all[idx]
    negm = n_vals < 0
    return LastExitTimes(n_vals[~negm], n_vals[negm], cens[~negm], cens[negm])


def reflect_walk(walk: WalkPath) -> WalkPath:
    """The reflected walk S~_k = -S_{-k} on the mirrored index range."""
    return WalkPath(walk.steps[::-1], first_index=-walk.last_index + 1)


# --- closed-form oracles -----------------------------------------------------


def _catalan_weighted(n, r: float, lead: float):
    """p_n = C_{n-1} r^{n-1} lead via the Catalan ratio recurrence.

    C_k / C_{k-1} = 2(2k-1)/(k+1), so no big integer ever materializes and
    n in the thousands stays representable even though C_515 overflows a
    float.
    """
    narr = np.asarray(n)
    if np.any(narr < 1) or not np.issubdtype(narr.dtype, np.integer):
        raise ValueError("n must consist of integers >= 1")
    kmax = int(narr.max())
    p = np.empty(kmax)
    p[0] = lead
    for k in range(1, kmax):
        p[k] = p[k - 1] * r * (2.0 * (2.0 * k - 1.0) / (k + 1.0))
    out = p[narr.ravel() - 1]
    return float(out[0]) if narr.ndim == 0 else out.reshape(narr.shape)


def catalan_pmf(n, alpha: float, beta: float):
    """Interarrival law of queue jump times: mass of gap size n >= 1."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("rates must be positive")
    r = (alpha * beta) / ((alpha + beta) * (alpha + beta))
    return _catalan_weighted(n, r, beta / (alpha + beta))


def palm_pmf(n):
    """Gap law in the balanced case: C_{n-1} 2^{1-2n}."""
    return _catalan_weighted(n, 0.25, 0.5)


def ssrw_zero_set(seed: int, length: int) -> np.ndarray:
    """Zero times (even integers in [2, 2*length]) of a simple +-1 walk.

    Simulation oracle: gaps between consecutive zeros, in units of two steps,
    follow palm_pmf.
    """
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    from .field import site_uniform

    idx = np.arange(2 * length, dtype=np.int64)
    steps = np.where(site_uniform(seed, idx, np.zeros_like(idx)) < 0.5, 1, -1)
    S = np.cumsum(steps)
    t = np.flatnonzero(S == 0) + 1
    return t

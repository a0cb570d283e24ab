"""Queueing identities and the random-walk laws behind the bracket pmfs.

A stationary single-server queue maps (arrivals, services) to (departures,
new arrivals) with three exact marginal laws; the number of service times
between direction jumps follows a Catalan-weighted geometric pmf, and its
balanced limit matches the gaps of a simple random walk's zero set.
"""

import numpy as np

from lppgeo import (
    catalan_pmf,
    coupled_line_busemann,
    ladder_epochs,
    palm_pmf,
    queue_operator,
    ssrw_zero_set,
    walk_W,
)


def empirical_ks(samples: np.ndarray, rate: float) -> float:
    xs = np.sort(samples)
    F = -np.expm1(-rate * xs)
    n = xs.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - F), np.max(F - (grid - 1 / n))))


def main() -> None:
    alpha, beta = 0.3, 0.6
    line = coupled_line_busemann(alpha, beta, N=50_000, seed=99)
    print(f"stationary queue line, arrival rate {alpha}, service rate {beta}, "
          f"N={line.I.size}")
    print(f"  burn-in buffer {line.burn_in}, truncated={line.truncated}")
    for name, data, rate in (
        ("inter-arrivals out", line.Itilde, alpha),
        ("services", line.Y, beta),
        ("sojourns", line.J, beta - alpha),
    ):
        print(f"  {name:18s} mean {data.mean():8.4f} target {1/rate:8.4f}  "
              f"KS {empirical_ks(data, rate):.4f}")

    # one-step closure: the service time is recovered as min(Itilde, J)
    J, It = queue_operator(line.I, line.Y, line.terminal_J)
    rec = np.abs(np.minimum(It, J) - line.Y).max()
    print(f"  recovery min(Itilde, J) = Y: max residual {rec:.1e}")

    w = walk_W(line.I, line.Y)
    lad = ladder_epochs(w.walk)
    print(f"\nwalk of increment differences: {lad.epochs.size} ladder epochs "
          f"over {line.I.size} steps")

    gaps = np.diff(ssrw_zero_set(seed=6, length=4_000_000)) // 2
    print(f"\nbracket-length pmfs ({gaps.size} walk excursions observed):")
    print(f"{'n':>3s} {'catalan pmf':>12s} {'balanced':>10s} {'ssrw gaps':>10s}")
    for n in range(1, 7):
        cp = catalan_pmf(n, alpha, beta)
        bal = palm_pmf(n)
        emp = float(np.mean(gaps == n))
        print(f"{n:3d} {cp:12.6f} {bal:10.6f} {emp:10.6f}")
    print("(catalan at alpha=beta equals the balanced column exactly)")


if __name__ == "__main__":
    main()

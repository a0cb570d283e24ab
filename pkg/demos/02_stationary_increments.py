"""Exact stationary increment fields and their algebra.

The two increment arrays U and V satisfy, site by site:

  recovery      min(U, V) = weight          (exactly, to the last bit)
  closure       U(x) + V(x+e1) = V(x) + U(x+e2)

and each single line of U (resp. V) is an iid exponential family.  Whole
windows are NOT iid, so the empirical check below sticks to one row and
one column.
"""

import numpy as np

from lppgeo import LatticeWindow, sample_weight_field, stationary_busemann_field


def ks_distance(samples: np.ndarray, rate: float) -> float:
    xs = np.sort(samples)
    F = -np.expm1(-rate * xs)
    n = xs.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - F), np.max(F - (grid - 1 / n))))


def main() -> None:
    window = LatticeWindow(0, 400, 0, 400)
    field = sample_weight_field(window, seed=11)
    alpha = 0.35
    b = stationary_busemann_field(window, alpha, field, boundary_seed=1812)

    both = ~np.isnan(b.U) & ~np.isnan(b.V)
    rec = np.minimum(b.U[both], b.V[both]) - field.values[both]
    print(f"stationary field at alpha={alpha} on {window}")
    print(f"recovery residual:  max |min(U,V) - w| = {np.abs(rec).max():.1e}")

    lhs = b.U[:-1, :-1] + b.V[1:, :-1]
    rhs = b.V[:-1, :-1] + b.U[:-1, 1:]
    print(f"closure residual:   max = {np.nanmax(np.abs(lhs - rhs)):.2e}")

    # marginals: U-increments along a row are Exp(alpha), V-increments along
    # a column Exp(1 - alpha)
    row_u = b.U[:-1, 0]
    col_v = b.V[0, :-1]
    print()
    print(f"row of U:    mean {row_u.mean():.4f} target {1/alpha:.4f},"
          f" KS distance {ks_distance(row_u, alpha):.4f}")
    print(f"column of V: mean {col_v.mean():.4f} target {1/(1-alpha):.4f},"
          f" KS distance {ks_distance(col_v, 1 - alpha):.4f}")
    print(f"(KS 5% line for n={row_u.size}: {1.358 / np.sqrt(row_u.size):.4f})")


if __name__ == "__main__":
    main()

"""Sample a weight field and watch the growth shape emerge.

Passage times from the origin grow linearly along rays, and the scaled
diagonal value G(0, (n,n)) / n approaches 4.  The off-diagonal profile
follows (sqrt(x) + sqrt(y))^2 after the same scaling.
"""

import numpy as np

from lppgeo import (
    FROM_ANCHOR,
    LatticeWindow,
    direction_of_alpha,
    passage_times,
    sample_weight_field,
    shape_function,
)


def main() -> None:
    n = 600
    field = sample_weight_field(LatticeWindow(0, n, 0, n), seed=20260801)
    pt = passage_times(field, (0, 0), FROM_ANCHOR)

    print(f"weight field on [0,{n}]^2, mean weight {field.values.mean():.4f}")
    print()
    print("scaled diagonal passage times, target 4:")
    for k in (50, 150, 300, 600):
        print(f"  G(0, ({k},{k})) / {k} = {pt.values[k, k] / k:.4f}")

    print()
    print("profile along the anti-diagonal x + y = 600, target (sqrt(x)+sqrt(y))^2/n:")
    print(f"  {'site':>12s} {'measured':>9s} {'limit':>7s}")
    for x in (100, 200, 300, 400, 500):
        y = 600 - x
        xi = (x / 600, y / 600)
        limit = shape_function(xi)
        print(f"  ({x:3d},{y:3d})    {pt.values[x, y] / 600:9.4f} {limit:7.4f}")

    # a direction parameter alpha in (0,1) names the ray xi(alpha); the map
    # concentrates near the axes as alpha approaches 0 or 1
    print()
    print("direction parameterization:")
    for a in (0.2, 0.5, 0.8):
        xi = direction_of_alpha(a)
        print(f"  alpha={a:.1f} -> xi=({xi[0]:.4f}, {xi[1]:.4f}), shape {shape_function(xi):.4f}")


if __name__ == "__main__":
    main()

"""Density experiment: transition densities p^(0)..p^(N) of the log price.

a = 0.2, sqrt(eps) = 0.15, beta = -0.85, t = 2, y0 = 0 on y in [-2.5, 2.5].
"""

import argparse
import csv

import numpy as np

from lvsmile import ModelParams, density


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=8)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--out", default="density_orders.csv")
    args = ap.parse_args()

    p = ModelParams.from_sqrt_eps(0.2, 0.15, -0.85, 0.0)
    grid = np.round(np.arange(-2.5, 2.5 + 1e-9, args.step), 10)
    d = density(p, 2.0, 0.0, args.order, grid)

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y"] + [f"p{n}" for n in range(args.order + 1)])
        for i, y in enumerate(grid):
            w.writerow([format(y, ".17g")] + [format(v, ".17g") for v in d.p_orders[:, i]])

    peak = d.p_orders.max(axis=1)
    print(" n   mass      E[e^Y]    sup|p_n - p_(n-1)| / sup p_n")
    for n in range(args.order + 1):
        mass = np.trapezoid(d.p_orders[n], grid)
        mart = np.trapezoid(np.exp(grid) * d.p_orders[n], grid)
        gap = np.max(np.abs(d.p_orders[n] - d.p_orders[n - 1])) / peak[n] if n else float("nan")
        print(f"{n:2d}  {mass:.6f}  {mart:.6f}  {gap:.4f}")
    tail = grid <= -1.5
    n6 = min(6, args.order)
    fat = np.all(d.p_orders[n6][tail] > d.p_orders[0][tail])
    print(f"p{n6} > p0 on all of y <= -1.5: {fat}")
    # below the validity threshold the tail terms oscillate in n
    print(f"min p{args.order} on y <= -1.5: {np.min(d.p_orders[-1][tail]):.3g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

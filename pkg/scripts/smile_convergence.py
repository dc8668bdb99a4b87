"""Long-dated smile experiment: truncated implied-vol expansions sigma^(n) against the
implied vol of the N = 10 series price.

a = 0.25, sqrt(eps) = 0.15, beta = -0.75, y = 0.1, t = 3, LMMR in [-1, 1].
"""

import argparse
import csv

import numpy as np

from lvsmile import ModelParams, smile_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("--count", type=int, default=41)
    ap.add_argument("--out", default="smile_convergence.csv")
    args = ap.parse_args()

    p = ModelParams.from_sqrt_eps(0.25, 0.15, -0.75, 0.1)
    t = 3.0
    lmmr = np.linspace(-1.0, 1.0, args.count)
    curve = smile_curve(p, t, p.y + t * lmmr, args.order, with_reference=True)

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lmmr", "k", "sigma_ref"] + [f"sigma{n}" for n in range(args.order + 1)])
        for pt in curve.points:
            if pt.error:
                print(f"k={pt.k:.3f}: {pt.error}")
                continue
            w.writerow([format(v, ".17g") for v in (pt.lmmr, pt.k, pt.reference, *pt.sigmas)])

    print(" lmmr   sigma_ref  " + "  ".join(f"err{n}(bp)" for n in range(2, args.order + 1)))
    for pt in curve.points[:: max(1, args.count // 10)]:
        if pt.error:
            continue
        errs = "  ".join(f"{1e4 * (s - pt.reference):+9.2f}" for s in pt.sigmas[2:])
        print(f"{pt.lmmr:+.2f}  {pt.reference:.6f}  {errs}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

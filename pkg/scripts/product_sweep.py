"""Slack of the second-eigenvalue bound over product spheres S^a(r1) x S^b(r2) in S^{n+1}.

Writes one CSV row per (n, a, r1) and prints the smallest relative slack per n.

    python scripts/product_sweep.py --n 7 8 9 10 --points 40 --out product_sweep.csv
"""

import argparse
import csv

import numpy as np

from paneitz_bound import ProductSphere, verify_theorem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[7, 8, 9, 10])
    ap.add_argument("--points", type=int, default=40, help="r1 samples per (n, a)")
    ap.add_argument("--r1-min", type=float, default=0.05)
    ap.add_argument("--r1-max", type=float, default=0.95)
    ap.add_argument("--out", default="product_sweep.csv")
    args = ap.parse_args()

    columns = ["n", "a", "b", "r1", "lambda1", "lambda2", "rhs_theorem", "rhs_corollary", "slack", "rel_slack"]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for n in args.n:
            worst = None
            for a in range(1, n):
                for r1 in np.linspace(args.r1_min, args.r1_max, args.points):
                    m = ProductSphere.from_r1(a, n - a, float(r1))
                    rep = verify_theorem(m)
                    rel = rep.slack_theorem / rep.rhs_theorem
                    writer.writerow([n, a, n - a, repr(float(r1)), repr(rep.lambda1), repr(rep.lambda2),
                                     repr(rep.rhs_theorem), repr(rep.rhs_corollary), repr(rep.slack_theorem), repr(rel)])
                    if worst is None or rel < worst[0]:
                        worst = (rel, a, float(r1))
            print(f"n={n}: min relative slack {worst[0]:.4e} at a={worst[1]}, r1={worst[2]:.4f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

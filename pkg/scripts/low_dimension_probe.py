"""Evaluate the second-eigenvalue inequality for 3 <= n <= 6, outside its proven range.

Spheres attain equality in every dimension, so the probe looks at products and
tori, where a negative slack would be a low-dimensional counterexample to the
statement (not to the theorem, which assumes n >= 7).

    python scripts/low_dimension_probe.py --points 60 --tori 200 --seed 1
"""

import argparse
import warnings

import numpy as np

from paneitz_bound import FlatTorus, GeodesicSphere, ProbeWarning, ProductSphere, verify_theorem


def probe(models):
    rel = []
    for m in models:
        rep = verify_theorem(m)
        rel.append(rep.slack_theorem / abs(rep.rhs_theorem))
    return np.array(rel)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=60)
    ap.add_argument("--tori", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    warnings.simplefilter("ignore", ProbeWarning)

    for n in range(3, 7):
        sphere = verify_theorem(GeodesicSphere(n, 1, 0, 1.0))
        products = [ProductSphere.from_r1(a, n - a, float(r1))
                    for a in range(1, n) for r1 in np.linspace(0.05, 0.95, args.points)]
        tori = [FlatTorus.normalized(rng.uniform(0.2, 1.0, n)) for _ in range(args.tori)]
        prod_rel, torus_rel = probe(products), probe(tori)
        print(
            f"n={n}: sphere slack {sphere.slack_theorem:+.3e} | "
            f"products min rel slack {prod_rel.min():+.4f} ({(prod_rel < 0).sum()}/{prod_rel.size} negative) | "
            f"tori min rel slack {torus_rel.min():+.4f} ({(torus_rel < 0).sum()}/{torus_rel.size} negative)"
        )


if __name__ == "__main__":
    main()

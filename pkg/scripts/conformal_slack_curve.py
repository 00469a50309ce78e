"""Slack of the two integral inequalities on the equal-radius 7-torus as |p| grows.

Each point builds the Moebius-deformed immersion on a periodic grid, extracts
the conformal factor spectrally and reports conformality defect and slacks.
The circle whose plane contains p needs more points than the others.

    python scripts/conformal_slack_curve.py --norms 0.05 0.1 0.2 0.3 0.4 --n1 24
"""

import argparse

from paneitz_bound import FlatTorus
from paneitz_bound.conformal import _lemma24_from_u, axis_parameter, conformality_defect, torus_immersion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--norms", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.3])
    ap.add_argument("--n1", type=int, default=24, help="grid points on the circle carrying p")
    args = ap.parse_args()
    m = FlatTorus.equal(7)
    grid = (args.n1,) + (8,) * 6
    print(f"{'|p|':>5} {'defect':>9} {'slack (intermediate)':>21} {'slack (final)':>14}")
    for norm in args.norms:
        p = axis_parameter(m, norm)
        X = torus_immersion(m, grid, p)
        defect, u = conformality_defect(X)
        del X
        rep = _lemma24_from_u(m, u, p)
        print(f"{norm:5.2f} {defect:9.1e} {rep.slack_intermediate:21.6f} {rep.slack_lemma:14.6f}")


if __name__ == "__main__":
    main()

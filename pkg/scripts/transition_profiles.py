"""Tabulate a(x, w), b(x, w) and the sup-distance of G, H from F_GUE.

Usage: python3 scripts/transition_profiles.py [--out-dir DIR]
"""

import argparse
import os

import numpy as np

from pnglab.distributions import Kind, cdf_table
from pnglab.painleve2 import default_table
from pnglab.transition import ab_at, profile_signed

WS = (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", help="write one x,a,b CSV per w here")
    args = ap.parse_args()
    pt = default_table()

    print(f"{'w':>6}{'a(-2,w)':>14}{'a(0,w)':>14}{'a(2,w)':>14}")
    for w in WS:
        a, _ = ab_at(pt, np.array([-2.0, 0.0, 2.0]), w)
        print(f"{w:>6.2f}" + "".join(f"{v:>14.6e}" for v in a))
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            with open(os.path.join(args.out_dir, f"ab_w{w:+.2f}.csv"), "w") as fh:
                profile_signed(pt, w).to_csv(fh)

    gue = cdf_table(pt, Kind.GUE).cdf
    print(f"\n{'w':>6}{'sup|G-F_GUE|':>16}{'sup|H(w,w)-F_GUE|':>20}")
    for w in (0.5, 1.0, 2.0, 3.0, 4.0):
        g = np.max(np.abs(cdf_table(pt, Kind.G, (w,)).cdf - gue))
        h = np.max(np.abs(cdf_table(pt, Kind.H, (w, w)).cdf - gue))
        print(f"{w:>6.2f}{g:>16.4f}{h:>20.4f}")


if __name__ == "__main__":
    main()

"""KS distance of rescaled Monte Carlo samples from the limit laws, by system size.

Usage: python3 scripts/mc_convergence.py [--samples 4000] [--seed 2024] [--times 30 100]
"""

import argparse
import time

from pnglab.distributions import Kind, cdf_table
from pnglab.harness import Model, ScalingSpec, ks_distance, run_mc
from pnglab.painleve2 import default_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--times", type=float, nargs="+", default=[30.0, 100.0])
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()
    pt = default_table()

    runs = [
        ("alpha=0 vs F_GUE", "PNG_TW", {}, cdf_table(pt, Kind.GUE)),
        ("alpha+=2 vs Phi", "PNG_GAUSS", {"alpha_plus": 2.0}, cdf_table(pt, Kind.NORMAL)),
        ("alpha+-=2 vs Phi^2", "PNG_GAUSS", {"alpha_plus": 2.0, "alpha_minus": 2.0}, cdf_table(pt, Kind.NORMAL_SQUARED)),
        ("w+=0 vs G(.;0)", "CRITICAL_PNG", {"w_plus": 0.0, "alpha_minus": 0.0}, cdf_table(pt, Kind.G, (0.0,))),
        ("w+=1 vs G(.;1)", "CRITICAL_PNG", {"w_plus": 1.0, "alpha_minus": 0.0}, cdf_table(pt, Kind.G, (1.0,))),
        ("w+-=0 vs F_0", "CRITICAL_PNG", {"w_plus": 0.0, "w_minus": 0.0}, cdf_table(pt, Kind.F0)),
    ]
    print(f"{'run':<22}{'t':>7}{'KS':>9}{'mean':>10}{'secs':>8}")
    for name, regime, params, target in runs:
        for t in args.times:
            t0 = time.perf_counter()
            try:
                spec = ScalingSpec.make(regime, t=t, **params)
            except ValueError as exc:  # e.g. w too large for t, so that alpha < 0
                print(f"{name:<22}{t:>7.0f}  skipped: {exc}")
                continue
            s = run_mc(Model.PNG, spec, args.samples, args.seed, args.threads)
            ks = ks_distance(s, target)
            print(f"{name:<22}{t:>7.0f}{ks:>9.4f}{s.mean:>10.4f}{time.perf_counter() - t0:>8.1f}")


if __name__ == "__main__":
    main()

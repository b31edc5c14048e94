"""Compare exact finite-size CDFs with Monte Carlo and show the Poissonization gap.

Usage: python3 scripts/exact_vs_mc.py [--samples 20000] [--seed 1]
"""

import argparse

import numpy as np

from pnglab.exact import lpp_cdf_exact, png_cdf_exact
from pnglab.harness import ScalingSpec, raw_samples


def _gap(raw, exact):
    emp = np.searchsorted(np.sort(raw), np.arange(len(exact)), side="right") / len(raw)
    return float(np.max(np.abs(emp - exact)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    cases = [
        ("png t=4 a=(0.5,0.5)", ScalingSpec.make("PNG_TW", t=4, alpha_plus=0.5, alpha_minus=0.5),
         lambda m: png_cdf_exact(4.0, 0.5, 0.5, m)),
        ("lpp N=6 q=0.25", ScalingSpec.make("LPP_TW", n=6, q=0.25),
         lambda m: lpp_cdf_exact(6, 0.25, 0.0, 0.0, m)),
        ("lpp N=6 q=0.25 a=(0.8,1.2)", ScalingSpec.make("LPP_TW", n=6, q=0.25, alpha_plus=0.8, alpha_minus=1.2),
         lambda m: lpp_cdf_exact(6, 0.25, 0.8, 1.2, m)),
    ]
    print(f"{'case':<30}{'sup|ECDF-exact|':>18}{'1.36/sqrt(n)':>14}")
    for name, spec, exact in cases:
        raw = raw_samples(spec, args.samples, args.seed, args.threads)
        d = _gap(raw, exact(int(raw.max()) + 1).cdf)
        print(f"{name:<30}{d:>18.4f}{1.36 / np.sqrt(args.samples):>14.4f}")

    print("\nPoissonization, t = 2, sqrt(q) = t/N")
    for a in (0.0, 0.5):
        png = png_cdf_exact(2.0, a, a, 30).cdf
        row = []
        for n in (20, 40, 80, 160):
            row.append(np.max(np.abs(lpp_cdf_exact(n, (2.0 / n) ** 2, a, a, 30).cdf - png)))
        print(f"alpha = {a}: " + "  ".join(f"N={n}: {g:.4f} (N*gap {n * g:.2f})" for n, g in zip((20, 40, 80, 160), row)))


if __name__ == "__main__":
    main()

"""The characteristic length of near-critical percolation.

L(p) is the smallest box size whose crossing probability is confidently
below 1/4.  It diverges at p = 1/2 like |p - 1/2|^(-4/3), and the
occupied/vacant swap makes L(p) = L(1 - p) exactly.

Run:  python3 demos/char_length.py [--samples 4000]
"""
import argparse

from diffront.percolation import estimate_characteristic_length
from diffront.scaling import fit_scaling

ap = argparse.ArgumentParser()
ap.add_argument("--samples", type=int, default=4000)
args = ap.parse_args()

ps = [0.52, 0.54, 0.56, 0.58, 0.60]
pts = []
for p in ps:
    est = estimate_characteristic_length(p, samples_per_size=args.samples, seed=0)
    mirror = estimate_characteristic_length(1 - p, samples_per_size=args.samples, seed=0)
    n = int(est.L)
    print(f"p={p:.2f}  L={n:4d}  L(1-p)={int(mirror.L):4d}  P(cross at L)={est.curve[n][0]:.3f}")
    pts.append((p - 0.5, est.L))

fit = fit_scaling(pts)
print(f"\nslope of log L vs log|p - 1/2|: {fit.slope:.3f}  (-4/3 = {-4 / 3:.3f})")

"""Fronts in the dense phase: width, length and the two-arm characterization.

With t / n fixed at 0.25 the front sits at r* ~ sqrt(t) and wanders by about
t^(2/7).  Its length grows like t^(5/7): the width t^(2/7), times the
circumference sqrt(t), times the two-arm probability (t^(2/7))^(-1/4).
The front edges in the middle band are exactly those with an occupied path
inward and a vacant path outward.

Run:  python3 demos/dense_front.py [--replicas 10]
"""
import argparse
import statistics

from diffront.experiments import expected_length_decomposition, run_dense_front
from diffront.scaling import fit_scaling

ap = argparse.ArgumentParser()
ap.add_argument("--replicas", type=int, default=10)
ap.add_argument("--seed", type=int, default=7)
args = ap.parse_args()

times = [625, 2500, 10_000]
rows = run_dense_front(times, args.replicas, args.seed, lam=0.25)

medians = []
print("     t   median L   L/t^(5/7)  median max_in  median max_out  t^(2/7)  two-arm ok")
for t in times:
    rs = [r for r in rows if r["t"] == t and r["ok"]]
    L = statistics.median(r["L"] for r in rs)
    medians.append((t, L))
    checked = [r for r in rs if r["two_arm_match"] is not None]
    good = sum(r["two_arm_match"] for r in checked)
    print(f"{t:6d}  {L:9.0f}  {L / expected_length_decomposition(t):10.2f}"
          f"  {statistics.median(r['max_in'] for r in rs):13.2f}"
          f"  {statistics.median(r['max_out'] for r in rs):14.2f}"
          f"  {t ** (2 / 7):7.2f}  {good}/{len(checked)}")

fit = fit_scaling(medians)
print(f"\nlength exponent: {fit.slope:.3f} +- {fit.stderr:.3f}  (5/7 = {5 / 7:.3f})")

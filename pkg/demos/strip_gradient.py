"""Gradient percolation in a strip with p(y) = 1 - y/N.

The interface between the phase attached to the bottom and the one attached
to the top stays within about N^(4/7) of the line y = N/2, and its length is
about N^(3/7) per unit width.

Run:  python3 demos/strip_gradient.py
"""
import statistics

from diffront.experiments import default_ell, run_strip
from diffront.render import render_snapshot
from diffront.percolation import strip_front, strip_gradient_sample

for N in (64, 128, 256, 512):
    ell = default_ell(N)
    rows = run_strip(N, 40, seed=3, ell=ell)
    dev = statistics.median(r["max_dev"] for r in rows)
    per = statistics.median(r["L_over_ell"] for r in rows)
    uniq = sum(r["unique"] for r in rows) / len(rows)
    print(f"N={N:4d} ell={ell:3d}  max dev {dev:6.1f} (N^(4/7)={N ** (4 / 7):5.1f})"
          f"  L/ell {per:5.2f} (N^(3/7)={N ** (3 / 7):4.2f})  unique {uniq:.2f}")

sample = strip_gradient_sample(128, 200, seed=1)
path = render_snapshot(sample, "strip_N128.ppm", front=strip_front(sample).curve)
print(f"\nwrote {path}")

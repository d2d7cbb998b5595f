"""Particles injected at the origin at rate mu.

Here the front never collapses: its radius grows like c(mu) sqrt(t), where
c(mu)^2 solves E1(c^2) = 2 pi ln 2 / (mu sqrt(3)).

Run:  python3 demos/source_growth.py
"""
import math
import statistics

from diffront.experiments import run_source_growth
from diffront.occupation import source_radius_constant

mu = 50.0
times = [100, 400, 1600, 6400]
rows = run_source_growth(mu, times, replicas=8, seed=5)
c = source_radius_constant(mu)
print(f"mu={mu}: predicted radius / sqrt(t) = {c:.4f}\n")
print("    t   particles   mean radius / sqrt(t)   median L")
for t in times:
    rs = [r for r in rows if r["t"] == t and r["ok"]]
    rad = statistics.mean(r["mean_radius"] for r in rs) / math.sqrt(t)
    print(f"{t:5d}  {statistics.mean(r['particles'] for r in rs):10.0f}"
          f"  {rad:22.4f}  {statistics.median(r['L'] for r in rs):9.0f}")

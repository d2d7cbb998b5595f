"""Dense and dilute phases along one run of n = 10^4 walkers.

The same particles are observed at a list of times.  Early on the occupied
sites form one big cluster with a clean front around r*; past t_c the cloud
has thinned out and every cluster is of logarithmic size.  Each snapshot is
written as a PPM image with the front drawn in red when there is one.
At the very first times the filled disk is itself narrower than c ln n, so
the diameter test reports "dilute" there too; the dense phase is a statement
about times that grow with n.

Run:  python3 demos/regime_sweep.py [--scale 0.25]
The CLI equivalent is:  diffront sweep --config demos/sweep_n10000.toml
"""
import argparse
from pathlib import Path

from diffront.config import ExperimentConfig
from diffront.experiments import run_experiment

ap = argparse.ArgumentParser()
ap.add_argument("--scale", type=float, default=1.0)
ap.add_argument("--out", default="out/sweep")
args = ap.parse_args()

cfg = ExperimentConfig.load(Path(__file__).with_name("sweep_n10000.toml"))
cfg.scale = args.scale
cfg.out = args.out
rows = run_experiment(cfg)

print("     t  verdict  max diam  threshold     r*       L")
for r in rows:
    rs = "-" if r["r_star"] is None else f"{r['r_star']:.1f}"
    print(f"{r['t']:6d}  {r['verdict']:7s}  {r['max_diameter']:8.1f}  {r['threshold']:9.1f}"
          f"  {rs:>6}  {r['L']}")
print(f"\nimages in {cfg.out}/")

"""Calibrate the implied constants and freeze them into the package data file.

Every constant is measured at a calibration point that differs from the one
the test suite checks, then rounded outward:

    hoeffding_C   sup of pi_t(z) / exp(-|z|^2 / 2t) over t <= 256
    lclt_C        LCLT relative error times t^(3/4), at t = 100
    cumulative_C      |rho_t - rho_bar_t| times t^(9/16) on t^(7/16) <= |z| <= t^(9/16), at t = 256
    cumulative_floor_C2     smallest C2 with min rho_t >= C1 log t - C2 on |z| <= t^0.4, t in {64, 128}
    slope_C1/C2   profile slope bracket at lambda = 0.25, t = 100
    dilute_c      2x the largest max-diameter / ln n seen in a pilot of 40 exact-n runs

Run:  python3 demos/calibrate_constants.py [--write]
"""
import argparse
import math
from importlib import resources

import numpy as np
import tomli
import tomli_w

from diffront import geometry, sampler, walk_kernel as wk
from diffront.occupation import ProfileParams, profile_inverse, profile_slope


def ceil_sig(x, digits=2):
    """Round up to ``digits`` significant figures."""
    if x <= 0:
        return 0.0
    e = math.floor(math.log10(x)) - digits + 1
    return round(math.ceil(x / 10 ** e) * 10 ** e, 12)


def floor_sig(x, digits=2):
    e = math.floor(math.log10(x)) - digits + 1
    return round(math.floor(x / 10 ** e) * 10 ** e, 12)


def hoeffding_C():
    worst = 0.0
    for t, P in enumerate(wk.iter_distributions(256)):
        if t == 0:
            continue
        worst = max(worst, wk.validate_hoeffding(wk.WalkField(t, P), C=1.0))
    print(f"  worst pi / exp(-r^2/2t) over t <= 256: {worst:.4f}")
    return 1.0 if worst <= 1.0 else ceil_sig(worst)


def lclt_C():
    err = wk.lclt_max_relative_error(wk.exact_distribution(100))
    print(f"  LCLT relative error at t=100: {err:.5f}")
    return ceil_sig(err * 100 ** 0.75)


def cumulative_C():
    err = wk.cumulative_max_error(wk.cumulative_kernel(256))
    print(f"  cumulative kernel error at t=256: {err:.6f}")
    return ceil_sig(err * 256 ** (9 / 16))


def cumulative_floor_C2():
    C1 = math.sqrt(3) * math.exp(-1) / (2 * math.pi) * 0.2
    need = -math.inf
    for t in (64, 128):
        rho = wk.cumulative_kernel(t)
        sel = rho.norms() <= t ** 0.4
        need = max(need, C1 * math.log(t) - float(rho.values[sel].min()))
    print(f"  lower-bound slack C1 log t - min rho: {need:.4f}")
    return max(0.0, ceil_sig(need))


def slope_constants():
    t = 100
    P = ProfileParams("fixed-n", t, n=t / 0.25)
    r = np.linspace(profile_inverse(P, 0.6), profile_inverse(P, 0.4), 2001)
    s = profile_slope(P, r) * math.sqrt(t)
    C1 = ceil_sig(-s.min() / math.sqrt(math.log(t)))
    C2 = floor_sig(-s.max())
    print(f"  slope * sqrt(t) in [{s.min():.4f}, {s.max():.4f}]")
    return C1, C2


def dilute_c(n=10_000, t=10_000, seeds=range(1000, 1040)):
    worst = 0.0
    for seed in seeds:
        f = sampler.simulate_particles(n, [t], seed)[0]
        rep = geometry.connected_clusters(sampler.occupancy_to_percolation(f))
        worst = max(worst, rep.max_diameter / math.log(n))
    print(f"  pilot max diameter / ln n: {worst:.3f}")
    return float(math.ceil(2 * worst))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write", action="store_true", help="overwrite the packaged constants")
    args = ap.parse_args()

    with resources.files("diffront").joinpath("data/constants.toml").open("rb") as fh:
        data = tomli.load(fh)
    wkc = data["walk_kernel"]
    print("walk kernel")
    wkc["hoeffding_C"] = hoeffding_C()
    wkc["lclt_C"] = lclt_C()
    wkc["cumulative_C"] = cumulative_C()
    wkc["cumulative_floor_C2"] = cumulative_floor_C2()
    print("occupation")
    c1, c2 = slope_constants()
    data.setdefault("occupation", {}).update(slope_C1=c1, slope_C2=c2)
    print("geometry")
    data["geometry"]["dilute_c"] = dilute_c()
    for sec, vals in data.items():
        print(f"[{sec}]", vals)
    if args.write:
        path = resources.files("diffront").joinpath("data/constants.toml")
        text = "# Calibrated constants. Regenerate with demos/calibrate_constants.py --write.\n\n"
        text += tomli_w.dumps(data)
        with open(str(path), "w") as fh:
            fh.write(text)
        print("written", path)


if __name__ == "__main__":
    main()

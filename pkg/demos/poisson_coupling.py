"""Exact-n walkers against the Poisson field on the front region.

The Poisson field makes sites independent, which is what the dense-front runs
use.  On a region A the number of exact-n particles is Binomial(n, pi_t(A)),
which is within total variation pi_t(A) of Poisson(n pi_t(A)).  The bound
is small only when A carries little of the walk's mass.

Run:  python3 demos/poisson_coupling.py
"""
import numpy as np
from scipy import stats

from diffront.sampler import (
    chen_stein_bound, front_coupling_region, particle_positions, particles_in_region,
)

n, seeds = 10_000, 2000
for t in (100, 2500):
    A = front_coupling_region(n, t)
    bound = chen_stein_bound(n, t, A)
    counts = np.array([particles_in_region(particle_positions(n, t, s), A)
                       for s in range(seeds)])
    exact = 0.5 * np.abs(stats.binom.pmf(np.arange(n + 1), n, bound)
                         - stats.poisson.pmf(np.arange(n + 1), n * bound)).sum()
    print(f"t={t:5d}  |A|={len(A):6d}  pi_t(A)={bound:.3f}  TV(Bin, Poi)={exact:.3f}"
          f"  mean count {counts.mean():.1f} vs {n * bound:.1f}"
          f"  var {counts.var():.1f} (Poisson would give {n * bound:.1f})")

"""The walk kernel, its Gaussian limit and the occupation profile it induces.

A single walker on the triangular lattice spreads like a Gaussian of variance
t/2 per coordinate.  With n walkers started at the origin, a site is
occupied with probability 1 - (1 - pi_t(z))^n, and the radius where that
probability crosses 1/2 is r* = sqrt(t log(lambda_c n / t)).  The cloud
keeps a filled core until t_c = lambda_c n, and r* peaks
at t_max = t_c / e.

Run:  python3 demos/kernel_and_profile.py
"""
import math

import numpy as np

from diffront import occupation as occ, walk_kernel as wk
from diffront.constants import LAMBDA_C, LAMBDA_MAX

# exact kernel against the local limit
for t in (100, 200, 400, 800):
    err = wk.lclt_max_relative_error(wk.kernel(t))
    print(f"t={t:4d}  max relative LCLT error on |z| <= t^(9/16): {err:.2e}")

# the two routes to pi_t agree
t = 300
conv = wk.exact_distribution(t).values
spec = wk.spectral_distribution(t).values
# the spectral window is narrower; beyond it the kernel is below e^-50
h = spec.shape[0] // 2
conv = conv[t - h:t + h + 1, t - h:t + h + 1]
print(f"\nconvolution vs spectral at t={t}: max diff {np.abs(conv - spec).max():.1e}")

print(f"\nlambda_c   = {LAMBDA_C:.10f}")
print(f"lambda_max = {LAMBDA_MAX:.10f}")
n = 10_000
print(f"n={n}: t_max = {math.floor(LAMBDA_MAX * n)}, t_c = {math.floor(LAMBDA_C * n)}")

# r* against time; it rises, peaks at t_max, then collapses at t_c
print("\n     t      r*    r*/sqrt(t)")
for t in (10, 100, 500, 1000, 1463, 2500, 3500, 3976):
    r = occ.critical_radius(n, t)
    print(f"{t:6d}  {r:6.2f}  {r / math.sqrt(t):8.4f}")

# the occupation profile drops from 0.6 to 0.4 over a band much thinner than r*
t = 2500
params = occ.ProfileParams("fixed-n", t, n=n)
r_star = occ.critical_radius(n, t)
r_in = occ.profile_inverse(params, 0.6)
r_out = occ.profile_inverse(params, 0.4)
print(f"\nt={t}: r*={r_star:.2f}, p=0.6 at {r_in:.2f}, p=0.4 at {r_out:.2f}")
for r in (r_star - 10, r_star, r_star + 10):
    print(f"  p({r:6.2f}) = {occ.radial_profile(n, t, r):.4f}")

"""Occupation profiles, critical constants and fluctuation scales.

Everything here is deterministic and works on real-valued radii; the lattice
only enters through the exact kernel in :func:`exact_occupation_prob`.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .constants import LAMBDA_C, LAMBDA_MAX, LCLT_PREFACTOR
from .errors import DomainError
from .walk_kernel import exp_integral_inverse, kernel, lclt_density, rho_bar

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ProfileParams:
    mode: str  # "fixed-n" or "source"
    t: float
    n: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if self.mode not in ("fixed-n", "source"):
            raise ValueError(f"unknown profile mode {self.mode!r}")
        if self.t < 1:
            raise DomainError("t must be >= 1")
        if self.mode == "fixed-n" and not (self.n and self.n >= 1):
            raise DomainError("fixed-n profile needs n >= 1")
        if self.mode == "source" and not (self.mu and self.mu > 0):
            raise DomainError("source profile needs mu > 0")

    def profile(self, r):
        if self.mode == "fixed-n":
            return radial_profile(self.n, self.t, r)
        return source_profile(self.mu, self.t, r)

    @property
    def sup(self) -> float:
        """Supremum of the profile over r > 0 (its value at 0 or 0+)."""
        if self.mode == "fixed-n":
            return radial_profile(self.n, self.t, 0.0)
        return 1.0


@dataclass(frozen=True)
class CriticalSummary:
    lambda_c: float
    lambda_max: float
    r_star: float | None
    r_minus: float | None
    r_plus: float | None
    sigma_pred: float | None

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "CriticalSummary":
        return cls(**json.loads(text))


def occupation_from_kernel(n, pi):
    """``1 - (1 - pi)^n`` for kernel values ``pi`` (scalar or array)."""
    pi = np.asarray(pi, dtype=float)
    with np.errstate(divide="ignore"):
        out = -np.expm1(n * np.log1p(-np.minimum(pi, 1.0)))
    out = np.where(pi >= 1.0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def poisson_from_kernel(n, pi):
    """``1 - exp(-n pi)``."""
    out = -np.expm1(-n * np.asarray(pi, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def exact_occupation_prob(n, t, z):
    """``p~_{n,t}(z) = 1 - (1 - pi_t(z))^n`` with the exact kernel."""
    if n < 1 or t < 0:
        raise DomainError("need n >= 1 and t >= 0")
    return occupation_from_kernel(n, kernel(int(t)).get(z))


def poisson_occupation_prob(n, t, z):
    """``1 - exp(-n pi_t(z))`` with the exact kernel."""
    if n < 1 or t < 0:
        raise DomainError("need n >= 1 and t >= 0")
    return poisson_from_kernel(n, kernel(int(t)).get(z))


def radial_profile(n, t, r):
    """``pbar_{n,t}(r) = 1 - exp(-n * pibar_t(r))``."""
    return poisson_from_kernel(n, lclt_density(t, r))


def lambda_constants():
    """``(lambda_c, lambda_max)``; ``lambda_max = lambda_c / e``."""
    return LAMBDA_C, LAMBDA_MAX


def critical_radius(n, t):
    """``r* = sqrt(t log(lambda_c n / t))``, or ``None`` past ``t_c = lambda_c n``."""
    ratio = LAMBDA_C * n / t
    if ratio < 1.0:
        return None
    return math.sqrt(t * math.log(ratio))


def _bisect_decreasing(f, target, lo, hi, tol):
    # f decreasing on [lo, hi] with f(lo) >= target >= f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def profile_inverse(params: ProfileParams, target: float, tol: float = 1e-9) -> float:
    """Radius at which the profile equals ``target``, by bisection.

    The bracket is refined to ``tol`` lattice units, far below the
    1e-6 contract, so that the profile value matches ``target`` to ~1e-9.
    """
    sup = params.sup
    if not 0.0 < target < sup:
        raise DomainError(f"target {target} outside the attainable range (0, {sup:.12g})")
    f = params.profile
    lo = 0.0 if params.mode == "fixed-n" else 1e-12
    hi = math.sqrt(params.t)
    while f(hi) > target:
        hi *= 2.0
    return _bisect_decreasing(f, target, lo, hi, tol)


def power_law_length(p):
    """Theoretical characteristic length ``|p - 1/2|^(-4/3)``."""
    d = abs(p - 0.5)
    return math.inf if d == 0 else d ** (-4.0 / 3.0)


def sigma_fluctuation(params: ProfileParams, L_model=power_law_length, r_star=None):
    """``sigma^+, sigma^-`` with ``sigma^pm = sup{s : L(p(floor(r*) +- s)) >= s}``.

    ``L_model`` maps an occupation parameter to a length.  The map
    ``s -> L(p(floor(r*) +- s)) - s`` is decreasing, so both suprema are found
    by bisection.  ``sigma^-`` is capped at ``floor(r*)``.
    """
    if r_star is None:
        r_star = profile_inverse(params, 0.5)
    base = math.floor(r_star)
    f = params.profile

    def g_plus(s):
        return L_model(float(f(base + s))) - s

    def g_minus(s):
        return L_model(float(f(base - s))) - s

    def solve(g, cap):
        if g(0.0) <= 0:
            return 0.0
        hi = 1.0
        while g(hi) > 0:
            if hi >= cap:
                return cap
            hi = min(2.0 * hi, cap)
        lo = 0.0
        while hi - lo > 1e-9 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    return solve(g_plus, math.inf), solve(g_minus, float(base))


def profile_slope(params: ProfileParams, r, h: float = 1e-4):
    """Centred finite difference of the profile in r."""
    f = params.profile
    return (f(r + h) - f(r - h)) / (2.0 * h)


def source_profile(mu, t, r):
    """``qbar_{mu,t}(r) = 1 - exp(-mu * rho_bar_t(r))`` for ``r > 0``."""
    return -np.expm1(-mu * rho_bar(t, r))


def source_radius_constant(mu) -> float:
    """``r*_{mu,t} / sqrt(t) = sqrt(E1^{-1}(2 pi log 2 / (mu sqrt 3)))``."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    return math.sqrt(exp_integral_inverse(LN2 / (mu * LCLT_PREFACTOR)))


def source_critical_radius(mu, t) -> float:
    return source_radius_constant(mu) * math.sqrt(t)


def critical_summary(n, t, delta: float = 0.1, L_model=power_law_length) -> CriticalSummary:
    """Critical constants and radii for the fixed-n profile at ``(n, t)``."""
    r_star = critical_radius(n, t)
    params = ProfileParams("fixed-n", t, n=n)
    r_minus = r_plus = sigma = None
    if r_star is not None:
        sup = params.sup
        if 0.5 + delta < sup:
            r_minus = profile_inverse(params, 0.5 + delta)
        r_plus = profile_inverse(params, 0.5 - delta)
        if r_star > 0:
            sp, sm = sigma_fluctuation(params, L_model, r_star)
            sigma = 0.5 * (sp + sm)
    return CriticalSummary(LAMBDA_C, LAMBDA_MAX, r_star, r_minus, r_plus, sigma)


def source_summary(mu, t, L_model=power_law_length) -> CriticalSummary:
    params = ProfileParams("source", t, mu=mu)
    r_star = source_critical_radius(mu, t)
    sp, sm = sigma_fluctuation(params, L_model, r_star)
    return CriticalSummary(LAMBDA_C, LAMBDA_MAX, r_star,
                           profile_inverse(params, 0.75), profile_inverse(params, 0.25),
                           0.5 * (sp + sm))


__all__ = [
    "ProfileParams", "CriticalSummary", "exact_occupation_prob", "poisson_occupation_prob",
    "occupation_from_kernel", "poisson_from_kernel",
    "radial_profile", "lambda_constants", "critical_radius", "profile_inverse",
    "sigma_fluctuation", "power_law_length", "profile_slope", "source_profile",
    "source_radius_constant", "source_critical_radius", "critical_summary",
    "source_summary",
]

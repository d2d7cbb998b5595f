"""Single-walker distributions on the triangular lattice.

``pi_t`` is the law of a simple random walk after ``t`` steps (1/6 per
neighbour) and ``rho_t = sum_{u<=t} pi_u`` its cumulative occupation.  Both
are held on a dense ``(2t+1) x (2t+1)`` array centred on the origin.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from . import constants
from .constants import EULER_GAMMA, LCLT_PREFACTOR
from .errors import BoundViolation, DomainError, ResourceCapError
from .lattice import NEIGHBOR_OFFSETS, SitePos, norm_sq


@dataclass(frozen=True, eq=False)
class _KernelArray:
    t: int
    values: np.ndarray = field(repr=False)

    @property
    def half_width(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def a0(self) -> int:
        return -self.half_width

    @property
    def b0(self) -> int:
        return -self.half_width

    def get(self, z) -> float:
        h = self.half_width
        i, j = z[0] + h, z[1] + h
        if 0 <= i < self.values.shape[0] and 0 <= j < self.values.shape[1]:
            return float(self.values[i, j])
        return 0.0

    __getitem__ = get

    def items(self):
        """Sparse view: ``(SitePos, value)`` for every nonzero entry, lexicographic."""
        h = self.half_width
        i, j = np.nonzero(self.values)
        for ii, jj in zip(i.tolist(), j.tolist()):
            yield SitePos(ii - h, jj - h), float(self.values[ii, jj])

    def total(self) -> float:
        return math.fsum(self.values.ravel())

    def coords(self):
        h = self.half_width
        r = np.arange(-h, h + 1)
        return np.meshgrid(r, r, indexing="ij")

    def norms(self):
        A, B = self.coords()
        return np.sqrt(norm_sq(A, B).astype(float))

    def values_at(self, a, b):
        """Vectorised lookup with zero outside the stored window."""
        h = self.half_width
        i = np.asarray(a) + h
        j = np.asarray(b) + h
        n = self.values.shape[0]
        ok = (i >= 0) & (i < n) & (j >= 0) & (j < n)
        out = np.zeros(np.broadcast(i, j).shape)
        out[ok] = self.values[i[ok], j[ok]]
        return out

    def mass(self, region) -> float:
        """Sum of the field over the sites of ``region``."""
        s = region.sites()
        return math.fsum(self.values_at(s[:, 0], s[:, 1]))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "b", "value"])
            for z, v in self.items():
                w.writerow([z.a, z.b, repr(v)])


class WalkField(_KernelArray):
    """``pi_t`` on the window ``[-h, h]^2`` (``h = t`` for convolved kernels)."""


class CumulativeField(_KernelArray):
    """``rho_t(z) = sum_{u=0}^t pi_u(z)``."""


def _check_cap(t, cap):
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if cap is None:
        cap = constants.get("walk_kernel", "convolution_cap")
    if t > cap:
        raise ResourceCapError(f"t={t} exceeds the convolution cap {cap}")


# path counts stay exact in float64 while 6^u <= 2^53
_EXACT_STEPS = 20


def _spread(P: np.ndarray) -> np.ndarray:
    m = P.shape[0]
    Q = np.zeros((m + 2, m + 2))
    for da, db in NEIGHBOR_OFFSETS:
        Q[1 + da:1 + da + m, 1 + db:1 + db + m] += P
    return Q


def _step(P: np.ndarray) -> np.ndarray:
    Q = _spread(P)
    Q /= 6.0
    return Q


def iter_distributions(t: int):
    """Yield ``pi_0, ..., pi_t`` as centred arrays of side ``2u+1``.

    Up to ``u = 20`` the walk counts are integers held exactly, so each
    yielded probability is the correctly rounded value of ``count / 6^u``.
    """
    P = np.ones((1, 1))
    yield P
    counts = P
    for u in range(1, t + 1):
        if u <= _EXACT_STEPS:
            counts = _spread(counts)
            P = counts / 6.0 ** u
        else:
            P = _step(P)
        yield P


def exact_distribution(t: int, cap: int | None = None) -> WalkField:
    """``pi_t`` by t-fold convolution of the uniform six-neighbour step."""
    _check_cap(t, cap)
    for P in iter_distributions(t):
        pass
    return WalkField(t, P)


def cumulative_kernel(t: int, cap: int | None = None) -> CumulativeField:
    """``rho_t`` accumulated alongside the convolution with Kahan summation."""
    _check_cap(t, cap)
    n = 2 * t + 1
    acc = np.zeros((n, n))
    comp = np.zeros((n, n))
    for u, P in enumerate(iter_distributions(t)):
        lo, hi = t - u, t + u + 1
        s = acc[lo:hi, lo:hi]
        c = comp[lo:hi, lo:hi]
        y = P - c
        tot = s + y
        c[...] = (tot - s) - y
        s[...] = tot
    return CumulativeField(t, acc)


def spectral_distribution(t: int, half_width: int | None = None) -> WalkField:
    """``pi_t`` from the characteristic function on a periodic grid.

    Exact up to floating point: the window is wide enough that the mass
    aliased by periodic wrap-around is below ``exp(-50)`` (Hoeffding with C=1).
    Intended for ``t`` beyond the convolution cap.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if half_width is None:
        half_width = min(t, int(math.ceil(math.sqrt(100.0 * max(t, 1)))))
    h = int(half_width)
    M = sfft.next_fast_len(2 * h + 1)
    grid_limit = constants.get("sampler", "max_grid_sites")
    if M * M > grid_limit:
        raise ResourceCapError(f"spectral grid {M}x{M} exceeds {grid_limit} sites")
    k = 2.0 * np.pi * sfft.fftfreq(M)
    k1 = k[:, None]
    k2 = k[None, :]
    phi = (np.cos(k1) + np.cos(k2) + np.cos(k1 - k2)) / 3.0
    P = sfft.ifft2(phi ** t).real
    idx = np.arange(-h, h + 1) % M
    out = P[np.ix_(idx, idx)]
    r = np.arange(-h, h + 1)
    A, B = np.meshgrid(r, r, indexing="ij")
    support = (np.abs(A) <= t) & (np.abs(B) <= t) & (np.abs(A + B) <= t)
    out = np.where(support, np.clip(out, 0.0, 1.0), 0.0)
    return WalkField(t, out)


def kernel(t: int, cap: int | None = None) -> WalkField:
    """Convolved kernel within the cap, spectral kernel beyond it."""
    if cap is None:
        cap = constants.get("walk_kernel", "convolution_cap")
    if t <= min(cap, 512):
        return exact_distribution(t, cap)
    return spectral_distribution(t)


@lru_cache(maxsize=8)
def cached_kernel(t: int) -> WalkField:
    """:func:`kernel` with a small cache; the returned values are read-only."""
    P = kernel(t)
    P.values.setflags(write=False)
    return P


def lclt_density(t, r):
    """Gaussian approximation ``sqrt(3)/(2 pi t) * exp(-r^2/t)`` of ``pi_t``."""
    if np.any(np.asarray(t) <= 0):
        raise DomainError("LCLT density needs t >= 1")
    r = np.asarray(r, dtype=float)
    out = LCLT_PREFACTOR / t * np.exp(-r * r / t)
    return float(out) if out.ndim == 0 else out


def lclt_max_relative_error(field: WalkField, exponent: float = 9 / 16) -> float:
    """``max |pi_t(z) / pibar_t(|z|) - 1|`` over ``|z| <= t**exponent``."""
    t = field.t
    R = field.norms()
    inside = R <= t ** exponent + 1e-12
    ratio = field.values[inside] / lclt_density(t, R[inside])
    return float(np.max(np.abs(ratio - 1.0)))


def hoeffding_envelope(t, r, C=None):
    """A priori bound ``C * exp(-r^2 / 2t)`` on ``pi_t``."""
    if C is None:
        C = constants.get("walk_kernel", "hoeffding_C")
    if C <= 0:
        raise DomainError("envelope constant must be positive")
    if np.any(np.asarray(t) <= 0):
        raise DomainError("envelope needs t >= 1")
    r = np.asarray(r, dtype=float)
    out = C * np.exp(-r * r / (2.0 * t))
    return float(out) if out.ndim == 0 else out


def validate_hoeffding(field: WalkField, C=None) -> float:
    """Check ``pi_t <= C exp(-|z|^2/2t)`` everywhere; returns the worst ratio.

    Raises :class:`BoundViolation` when any site exceeds the envelope.
    """
    if C is None:
        C = constants.get("walk_kernel", "hoeffding_C")
    if field.t == 0:
        worst = float(field.values.max()) / C
    else:
        env = hoeffding_envelope(field.t, field.norms(), C)
        worst = float(np.max(field.values / env))
    if worst > 1.0 + 1e-12:
        raise BoundViolation(f"pi_{field.t} exceeds {C} exp(-r^2/2t) by factor {worst:.6g}")
    return worst


# exponential integral ------------------------------------------------------

def _e1_series(x: float) -> float:
    s = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        add = term / k
        s += add
        if abs(add) < 1e-17 * abs(s) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - s


def _e1_contfrac(x: float) -> float:
    # modified Lentz on the even form of the continued fraction
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


def _e1(x: float) -> float:
    if not x > 0:
        raise DomainError(f"E1 needs x > 0, got {x}")
    if x <= 1.0:
        return _e1_series(x)
    return _e1_contfrac(x)


def exp_integral(x):
    """``E1(x) = int_x^inf e^-u / u du`` for ``x > 0``."""
    if np.ndim(x) == 0:
        return _e1(float(x))
    x = np.asarray(x, dtype=float)
    return np.array([_e1(v) for v in x.ravel()]).reshape(x.shape)


def exp_integral_inverse(y: float, rtol: float = 1e-13) -> float:
    """Solve ``E1(x) = y`` by bisection; ``E1`` maps (0, inf) onto itself."""
    if not y > 0:
        raise DomainError(f"E1 inverse needs y > 0, got {y}")
    lo, hi = 1.0, 1.0
    while _e1(lo) < y:
        lo *= 0.5
    while _e1(hi) > y:
        hi *= 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _e1(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rho_bar(t, r):
    """Continuum cumulative kernel ``sqrt(3)/(2 pi) * E1(r^2/t)``."""
    if np.any(np.asarray(t) <= 0):
        raise DomainError("rho_bar needs t >= 1")
    if np.any(np.asarray(r) <= 0):
        raise DomainError("rho_bar diverges at r = 0")
    return LCLT_PREFACTOR * exp_integral(np.asarray(r, dtype=float) ** 2 / t)


def cumulative_max_error(field: CumulativeField) -> float:
    """``max |rho_t(z) - rho_bar_t(|z|)|`` over ``t^(7/16) <= |z| <= t^(9/16)``."""
    t = field.t
    R = field.norms()
    sel = (R >= t ** (7 / 16) - 1e-12) & (R <= t ** (9 / 16) + 1e-12)
    return float(np.max(np.abs(field.values[sel] - rho_bar(t, R[sel]))))


def spectral_cumulative(t: int, half_width: int | None = None) -> CumulativeField:
    """``rho_t`` from the geometric series of the characteristic function.

    With a grid of side at least ``2t+1`` nothing aliases and the result is
    exact up to floating point; smaller windows drop mass below ``t e^-50``.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if half_width is None:
        half_width = min(t, int(math.ceil(math.sqrt(100.0 * max(t, 1)))))
    h = int(half_width)
    M = sfft.next_fast_len(2 * h + 1)
    if M * M > constants.get("sampler", "max_grid_sites"):
        raise ResourceCapError(f"spectral grid {M}x{M} too large")
    k = 2.0 * np.pi * sfft.fftfreq(M)
    k1 = k[:, None]
    k2 = k[None, :]
    one_minus = (2.0 / 3.0) * (np.sin(k1 / 2) ** 2 + np.sin(k2 / 2) ** 2
                               + np.sin((k1 - k2) / 2) ** 2)
    phi = 1.0 - one_minus
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = phi > 0
        numer = np.where(pos, -np.expm1((t + 1) * np.log(np.where(pos, phi, 1.0))),
                         1.0 - phi ** (t + 1))
        S = numer / one_minus
    S[0, 0] = t + 1.0
    R = sfft.ifft2(S).real
    idx = np.arange(-h, h + 1) % M
    out = R[np.ix_(idx, idx)]
    r = np.arange(-h, h + 1)
    A, B = np.meshgrid(r, r, indexing="ij")
    support = (np.abs(A) <= t) & (np.abs(B) <= t) & (np.abs(A + B) <= t)
    return CumulativeField(t, np.where(support, np.maximum(out, 0.0), 0.0))

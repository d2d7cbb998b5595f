"""Occupancy engines: exact n-walker clouds, Poisson fields and the source model.

Binary field format (little endian)::

    b"DFOC"  magic
    u8       format version (1)
    u32      length of the JSON header in bytes
    bytes    JSON header: mode, t, seed, n / mu, a0, b0, shape, batches
    u32      number of runs R
    R x (u32 run length, u32 count)
             run-length encoded counts over the bounding box, C order
             (lexicographic in (a, b))
"""
from __future__ import annotations

import csv
import json
import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .errors import DomainError, ResourceCapError
from .lattice import NEIGHBOR_OFFSETS, Region, SitePos, norm_sq
from .occupation import critical_radius, profile_inverse, ProfileParams
from .percolation import PercolationSample
from .rng import generator
from .walk_kernel import cached_kernel, lclt_density

log = logging.getLogger(__name__)

OFFSETS = np.array(NEIGHBOR_OFFSETS, dtype=np.int64)
STEP_P = np.full(6, 1.0 / 6.0)
BLOCK = 1 << 16          # particles per RNG stream
ROW_BLOCK = 256          # grid rows per RNG stream
MAGIC = b"DFOC"


@dataclass(frozen=True, eq=False)
class OccupancyField:
    mode: str                     # "exact-n" | "poisson-field" | "source"
    t: int
    seed: int
    a0: int
    b0: int
    counts: np.ndarray = field(repr=False)
    n: float | None = None
    mu: float | None = None
    region: Region | None = None
    batches: tuple = ()

    def __post_init__(self):
        c = np.ascontiguousarray(self.counts, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def get(self, z) -> int:
        i, j = z[0] - self.a0, z[1] - self.b0
        if 0 <= i < self.counts.shape[0] and 0 <= j < self.counts.shape[1]:
            return int(self.counts[i, j])
        return 0

    __getitem__ = get

    def items(self):
        i, j = np.nonzero(self.counts)
        for ii, jj in zip(i.tolist(), j.tolist()):
            yield SitePos(ii + self.a0, jj + self.b0), int(self.counts[ii, jj])

    def total(self) -> int:
        return int(self.counts.sum())

    def header(self) -> dict:
        return dict(mode=self.mode, t=self.t, seed=self.seed, n=self.n, mu=self.mu,
                    a0=self.a0, b0=self.b0, shape=list(self.counts.shape),
                    batches=list(self.batches),
                    region=self.region.descriptor() if self.region is not None else None)

    def to_bytes(self) -> bytes:
        flat = self.counts.ravel()
        if flat.size:
            change = np.flatnonzero(np.diff(flat)) + 1
            starts = np.concatenate([[0], change])
            lengths = np.diff(np.concatenate([starts, [flat.size]]))
            values = flat[starts]
        else:
            lengths = values = np.zeros(0, dtype=np.int64)
        head = json.dumps(self.header(), sort_keys=True).encode()
        runs = np.empty((len(lengths), 2), dtype="<u4")
        runs[:, 0] = lengths
        runs[:, 1] = values
        return b"".join([MAGIC, struct.pack("<BI", 1, len(head)), head,
                         struct.pack("<I", len(lengths)), runs.tobytes()])

    @classmethod
    def from_bytes(cls, data: bytes) -> "OccupancyField":
        if data[:4] != MAGIC:
            raise ValueError("not an occupancy field (bad magic)")
        version, hlen = struct.unpack_from("<BI", data, 4)
        if version != 1:
            raise ValueError(f"unsupported field format version {version}")
        off = 4 + 5
        head = json.loads(data[off:off + hlen])
        off += hlen
        (nruns,) = struct.unpack_from("<I", data, off)
        off += 4
        runs = np.frombuffer(data, dtype="<u4", count=2 * nruns, offset=off).reshape(-1, 2)
        flat = np.repeat(runs[:, 1].astype(np.int64), runs[:, 0].astype(np.int64))
        counts = flat.reshape(head["shape"])
        region = None
        if head["region"] is not None:
            from .lattice import build_region
            region = build_region(head["region"])
        return cls(head["mode"], head["t"], head["seed"], head["a0"], head["b0"], counts,
                   n=head["n"], mu=head["mu"], region=region, batches=tuple(head["batches"]))

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "OccupancyField":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "b", "count"])
            for z, c in self.items():
                w.writerow([z.a, z.b, c])


def _grid_from_positions(pos):
    if len(pos) == 0:
        return 0, 0, np.zeros((1, 1), dtype=np.int64)
    a0, b0 = pos.min(axis=0)
    a1, b1 = pos.max(axis=0)
    shape = (int(a1 - a0 + 1), int(b1 - b0 + 1))
    lin = (pos[:, 0] - a0) * shape[1] + (pos[:, 1] - b0)
    counts = np.bincount(lin, minlength=shape[0] * shape[1]).reshape(shape)
    return int(a0), int(b0), counts


def _check_snapshots(snapshots):
    snaps = [int(s) for s in snapshots]
    if not snaps:
        raise ValueError("need at least one snapshot time")
    if any(s < 0 for s in snaps) or snaps != sorted(snaps):
        raise ValueError("snapshot times must be sorted and non-negative")
    return snaps


def _displace(pos, steps, rng):
    """Advance particles by ``steps`` uniform six-neighbour steps each.

    The step counts per direction are multinomial, which is the exact law of
    the displacement after ``steps`` independent steps.
    """
    if np.isscalar(steps):
        if steps == 0 or len(pos) == 0:
            return
        counts = rng.multinomial(int(steps), STEP_P, size=len(pos))
    else:
        counts = rng.multinomial(steps, STEP_P)
    pos += counts @ OFFSETS


def simulate_particles(n, snapshots, seed, max_particles=None):
    """Exact n-walker engine: one field per snapshot time."""
    if n < 1:
        raise DomainError("need n >= 1")
    if max_particles is None:
        max_particles = constants.get("sampler", "max_particles")
    if n > max_particles:
        raise ResourceCapError(f"n={n} exceeds the particle cap {max_particles}")
    snaps = _check_snapshots(snapshots)
    n = int(n)
    pos = np.zeros((n, 2), dtype=np.int64)
    streams = [generator(seed, "particles", b) for b in range(math.ceil(n / BLOCK))]
    out = []
    prev = 0
    for T in snaps:
        k = T - prev
        for b, rng in enumerate(streams):
            _displace(pos[b * BLOCK:(b + 1) * BLOCK], k, rng)
        prev = T
        a0, b0, counts = _grid_from_positions(pos)
        out.append(OccupancyField("exact-n", T, seed, a0, b0, counts, n=n))
    return out


def particle_positions(n, t, seed):
    """Positions after ``t`` steps, same streams as :func:`simulate_particles`."""
    pos = np.zeros((int(n), 2), dtype=np.int64)
    for b in range(math.ceil(n / BLOCK)):
        _displace(pos[b * BLOCK:(b + 1) * BLOCK], t, generator(seed, "particles", b))
    return pos


def lclt_cutoff_radius(n, t, C=None):
    """Radius beyond which ``n * C * exp(-r^2/2t) < 1e-3``."""
    if C is None:
        C = constants.get("walk_kernel", "hoeffding_C")
    return math.sqrt(2.0 * t * math.log(max(n * C * 1e3, 1.0)))


def expected_counts(n, t, region: Region, kernel_mode="lclt"):
    """``n * pi_t(z)`` (or its Gaussian substitute) over the region's bounding box."""
    if kernel_mode == "exact":
        A, B = region.coords()
        lam = n * cached_kernel(int(t)).values_at(A, B)
    elif kernel_mode == "lclt":
        if t == 0:
            raise DomainError("lclt mode needs t >= 1")
        R = region.norms()
        r_cut = lclt_cutoff_radius(n, t)
        lam = np.where(R <= r_cut, n * lclt_density(t, R), 0.0)
        log.debug("lclt field: r_cut=%.3f, region radius %.3f", r_cut, float(R[region.mask].max()))
    else:
        raise ValueError(f"unknown kernel mode {kernel_mode!r}")
    return np.where(region.mask, lam, 0.0)


def sample_poisson_field(n, t, region: Region, kernel_mode="lclt", seed=0) -> OccupancyField:
    """Independent ``Poisson(n pi_t(z))`` counts on the sites of ``region``."""
    grid_limit = constants.get("sampler", "max_grid_sites")
    if region.mask.size > grid_limit:
        raise ResourceCapError(f"region grid {region.shape} exceeds {grid_limit} sites")
    lam = expected_counts(n, t, region, kernel_mode)
    counts = np.zeros(region.shape, dtype=np.int64)
    for blk, start in enumerate(range(0, region.shape[0], ROW_BLOCK)):
        rows = slice(start, start + ROW_BLOCK)
        sub = lam[rows]
        live = sub > 0
        if live.any():
            vals = generator(seed, "poisson-field", blk).poisson(sub[live])
            block = np.zeros(sub.shape, dtype=np.int64)
            block[live] = vals
            counts[rows] = block
    return OccupancyField("poisson-field", int(t), seed, region.a0, region.b0, counts,
                          n=n, region=region)


def simulate_source(mu, snapshots, seed, fixed_batch=None, max_particles=None):
    """Particles arrive at the origin at every time ``s = 0, 1, ...``.

    Batch sizes are ``Poisson(mu)`` (or ``fixed_batch`` when given).  At time
    ``T`` a particle born at ``s <= T`` has made ``T - s`` steps, so the field
    at ``T`` includes the batch created at ``T`` itself, matching
    ``N_T(z) ~ Poisson(mu * rho_T(z))``.
    """
    if not mu > 0 and fixed_batch is None:
        raise DomainError("mu must be positive")
    if max_particles is None:
        max_particles = constants.get("sampler", "max_particles")
    snaps = _check_snapshots(snapshots)
    T_max = snaps[-1]
    if fixed_batch is None:
        batches = generator(seed, "arrivals").poisson(mu, size=T_max + 1)
    else:
        batches = np.full(T_max + 1, int(fixed_batch))
    total = int(batches.sum())
    if total > max_particles:
        raise ResourceCapError(f"{total} particles exceed the cap {max_particles}")
    birth = np.repeat(np.arange(T_max + 1), batches)
    pos = np.zeros((total, 2), dtype=np.int64)
    streams = [generator(seed, "source-particles", b) for b in range(max(1, math.ceil(total / BLOCK)))]
    out = []
    prev = -1
    alive = 0
    for T in snaps:
        now = int(np.searchsorted(birth, T, side="right"))
        # particles alive at prev advance T - prev steps; newcomers T - birth
        steps = np.where(np.arange(now) < alive, T - prev, T - birth[:now])
        for b, rng in enumerate(streams):
            lo, hi = b * BLOCK, min((b + 1) * BLOCK, now)
            if lo >= hi:
                continue
            _displace(pos[lo:hi], steps[lo:hi], rng)
        alive = now
        prev = T
        a0, b0, counts = _grid_from_positions(pos[:now])
        out.append(OccupancyField("source", T, seed, a0, b0, counts,
                                  mu=None if fixed_batch is not None else mu,
                                  n=fixed_batch, batches=tuple(int(x) for x in batches[:T + 1])))
    return out


def chen_stein_bound(n, t, region: Region, field=None) -> float:
    """``min(1, pi_t(A))``.

    The number of the ``n`` particles that land in ``A`` is Binomial and
    within total variation ``pi_t(A)`` of ``Poisson(n pi_t(A))``; hence the
    exact-n configuration on ``A`` can be coupled with the Poisson-field
    configuration so that they agree with probability at least ``1 - pi_t(A)``.
    """
    if len(region) == 0:
        return 0.0
    if field is None:
        field = cached_kernel(int(t))
    return min(1.0, field.mass(region))


def _para(a1, a2, b1, b2):
    a1, b1 = int(math.floor(a1)), int(math.floor(b1))
    a2, b2 = int(math.ceil(a2)), int(math.ceil(b2))
    return Region.parallelogram(a1, max(a1, a2), b1, max(b1, b2))


def front_coupling_region(n, t, eps=0.01, delta=0.1) -> Region:
    """Annulus of half-width ``2 t^(2/7+eps)`` around ``r*`` plus connecting strips.

    Main annulus, small annulus ``[t^eps, 2 t^eps]`` around the origin, inner
    strips ``s1-``, ``s2-``, ``s3-`` and outer strips ``s1+``, ``s2+``, ``s3+``
    along the positive a-axis.
    """
    r_star = critical_radius(n, t)
    if r_star is None:
        raise DomainError("front region needs t <= lambda_c n")
    params = ProfileParams("fixed-n", t, n=n)
    r_minus = profile_inverse(params, 0.5 + delta)
    r_plus = profile_inverse(params, 0.5 - delta)
    w = t ** (2.0 / 7.0 + eps)
    te = t ** eps
    parts = [
        Region.annulus(max(0.0, r_star - 2 * w), r_star + 2 * w),
        Region.annulus(te, 2 * te),
        _para(r_minus / 2, r_star - 0.99 * w, 0, w),            # s1-
        _para(0.75 * r_minus, 0.75 * r_minus + te, 0, w),       # s2-
        _para(0, r_minus, 0, te),                              # s3-
        _para(r_star + 0.99 * w, 2 * r_plus, 0, w),             # s1+
        _para(1.5 * r_plus, 1.5 * r_plus + te, 0, w),           # s2+
        _para(r_plus, t, 0, te),                               # s3+
    ]
    return parts[0].union(*parts[1:])


def occupancy_to_percolation(field: OccupancyField, region: Region | None = None) -> PercolationSample:
    """Occupied iff the site holds at least one particle; restricted to ``region``."""
    if region is None:
        region = field.region
    if region is None:
        region = Region.parallelogram(field.a0, field.a0 + field.counts.shape[0] - 1,
                                      field.b0, field.b0 + field.counts.shape[1] - 1)
    A, B = region.coords()
    i = A - field.a0
    j = B - field.b0
    ok = (i >= 0) & (i < field.counts.shape[0]) & (j >= 0) & (j < field.counts.shape[1])
    occ = np.zeros(region.shape, dtype=bool)
    occ[ok] = field.counts[i[ok], j[ok]] >= 1
    return PercolationSample(region, occ, dict(kind="occupancy", mode=field.mode,
                                               t=field.t, seed=field.seed))


def radial_sample(n, t, seed, radius=None, kernel_mode="lclt") -> PercolationSample:
    """Poisson-field percolation sample on a disk (default radius: the LCLT cutoff)."""
    if radius is None:
        radius = lclt_cutoff_radius(n, t)
    region = Region.disk(radius)
    return occupancy_to_percolation(sample_poisson_field(n, t, region, kernel_mode, seed))


def particles_in_region(pos, region: Region) -> int:
    return int(region.contains_array(pos[:, 0], pos[:, 1]).sum())


__all__ = [
    "OccupancyField", "simulate_particles", "sample_poisson_field", "simulate_source",
    "chen_stein_bound", "front_coupling_region", "occupancy_to_percolation",
    "radial_sample", "lclt_cutoff_radius", "expected_counts", "particle_positions",
    "particles_in_region", "norm_sq",
]

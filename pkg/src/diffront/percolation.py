"""Inhomogeneous Bernoulli site percolation, crossings and characteristic length.

Connectivity uses the six-neighbour adjacency for both occupied and vacant
sites.  Because site percolation on the triangular lattice is self-matching,
an occupied left-right crossing of a rhombus exists iff no vacant top-bottom
crossing does.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .constants import EPSILON
from .dual import FrontCurve, boundary_edges, trace_paths
from .errors import FrontError
from .lattice import STRUCTURE, Region
from .rng import generator

STRUCTURE_STACK = np.zeros((3, 3, 3), dtype=bool)
STRUCTURE_STACK[1] = STRUCTURE


@dataclass(frozen=True, eq=False)
class PercolationSample:
    region: Region
    occupied: np.ndarray = field(repr=False)  # same shape as region.mask, False off-region
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        occ = np.asarray(self.occupied, bool) & self.region.mask
        occ.setflags(write=False)
        object.__setattr__(self, "occupied", occ)

    @property
    def vacant(self) -> np.ndarray:
        return self.region.mask & ~self.occupied

    def status(self, z):
        """True (occupied), False (vacant) or None off-region."""
        if z not in self.region:
            return None
        return bool(self.occupied[z[0] - self.region.a0, z[1] - self.region.b0])

    def occupied_fraction(self) -> float:
        return float(self.occupied.sum()) / len(self.region)


def sample_bernoulli(param, region: Region, seed, *, stream=0) -> PercolationSample:
    """Each site of ``region`` occupied independently with probability ``param``.

    ``param`` is a constant, an array over the region's bounding box, or a
    callable ``f(A, B)`` of axial coordinate arrays.
    """
    if callable(param):
        A, B = region.coords()
        p = np.asarray(param(A, B), dtype=float)
    else:
        p = np.broadcast_to(np.asarray(param, dtype=float), region.shape)
    U = generator(seed, "bernoulli", stream).random(region.shape)
    return PercolationSample(region, U < p,
                             dict(kind="bernoulli", seed=seed, stream=stream))


def _box_view(sample: PercolationSample, box):
    a1, a2, b1, b2 = box
    reg = sample.region
    i1, i2 = a1 - reg.a0, a2 - reg.a0
    j1, j2 = b1 - reg.b0, b2 - reg.b0
    if i1 < 0 or j1 < 0 or i2 >= reg.shape[0] or j2 >= reg.shape[1] \
            or not reg.mask[i1:i2 + 1, j1:j2 + 1].all():
        raise ValueError(f"parallelogram {box} not contained in the sample region")
    return sample.occupied[i1:i2 + 1, j1:j2 + 1]


def _spans(mask: np.ndarray, direction: str) -> bool:
    lab, _ = ndimage.label(mask, structure=STRUCTURE)
    if direction == "horizontal":
        s1, s2 = lab[0, :], lab[-1, :]
    else:
        s1, s2 = lab[:, 0], lab[:, -1]
    common = np.intersect1d(s1[s1 > 0], s2[s2 > 0])
    return common.size > 0


def has_crossing(sample: PercolationSample, box, direction="horizontal", polarity="occupied"):
    """Crossing of the parallelogram ``box = (a1, a2, b1, b2)``.

    Horizontal joins the columns ``a = a1`` and ``a = a2``; vertical joins the
    rows ``b = b1`` and ``b = b2``.
    """
    if direction not in ("horizontal", "vertical"):
        raise ValueError(f"bad direction {direction!r}")
    if polarity not in ("occupied", "vacant"):
        raise ValueError(f"bad polarity {polarity!r}")
    occ = _box_view(sample, box)
    return _spans(occ if polarity == "occupied" else ~occ, direction)


def rhombus_crossings(U: np.ndarray, q: float) -> np.ndarray:
    """Occupied horizontal crossings for a stack of uniform fields.

    ``U`` has shape ``(samples, m, m)``; a site is occupied iff ``U < q``.
    Returns a boolean vector, one entry per sample.
    """
    occ = U < q
    lab, _ = ndimage.label(occ, structure=STRUCTURE_STACK)
    left, right = lab[:, 0, :], lab[:, -1, :]
    common = np.intersect1d(left[left > 0], right[right > 0])
    return np.isin(left, common).any(axis=1)


def _wilson_upper(k, n, z=1.96):
    ph = k / n
    den = 1 + z * z / n
    centre = ph + z * z / (2 * n)
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n))
    return (centre + half) / den


def geometric_mesh(ratio=1.25, n_max=4096):
    sizes = [1]
    x = 1.0
    while sizes[-1] < n_max:
        x *= ratio
        sizes.append(max(sizes[-1] + 1, int(round(x))))
    return sizes


@dataclass
class CharLengthEstimate:
    p: float
    epsilon: float
    L: float                    # math.inf at p = 1/2
    samples_per_size: int
    confidence: str
    curve: dict = field(default_factory=dict)  # n -> (p_hat, upper bound)

    def to_json(self) -> str:
        d = dict(p=self.p, epsilon=self.epsilon,
                 L=None if math.isinf(self.L) else self.L,
                 samples_per_size=self.samples_per_size, confidence=self.confidence,
                 curve={str(k): list(v) for k, v in sorted(self.curve.items())})
        return json.dumps(d)


def crossing_probability(q, n, samples, seed, chunk=None):
    """Monte Carlo ``P_q(C_H([0,n] x [0,n]))`` with matched uniforms per ``(seed, n)``."""
    rng = generator(seed, "charlen", n)
    m = n + 1
    if chunk is None:
        chunk = max(1, min(samples, 2_000_000 // (m * m)))
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        U = rng.random((k, m, m))
        hits += int(rhombus_crossings(U, q).sum())
        done += k
    return hits


def estimate_characteristic_length(p, epsilon=EPSILON, samples_per_size=1000, seed=0,
                                   ratio=1.25, n_max=4096) -> CharLengthEstimate:
    """Smallest mesh size whose crossing probability is confidently below ``epsilon``.

    For ``p > 1/2`` vacant crossings are counted through the swap
    ``vacant = {U < 1 - p}``, so ``p`` and ``1 - p`` share every draw and
    give identical estimates under the same seed.
    """
    conf = "Wilson 95% upper bound"
    if p == 0.5:
        return CharLengthEstimate(p, epsilon, math.inf, samples_per_size, conf)
    q = min(p, 1.0 - p)
    mesh = geometric_mesh(ratio, n_max)
    curve = {}

    def below(idx):
        n = mesh[idx]
        if n not in curve:
            k = crossing_probability(q, n, samples_per_size, seed)
            curve[n] = (k / samples_per_size, _wilson_upper(k, samples_per_size))
        return curve[n][1] < epsilon

    # bracket by doubling n, then bisect over mesh indices
    lo, hi = -1, 0
    while not below(hi):
        lo = hi
        target = 2 * mesh[hi]
        nxt = next((i for i, n in enumerate(mesh) if n >= target), None)
        if nxt is None:
            raise RuntimeError(f"no crossing decay up to n={mesh[-1]} at p={p}")
        hi = nxt
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            hi = mid
        else:
            lo = mid
    return CharLengthEstimate(p, epsilon, float(mesh[hi]), samples_per_size, conf, curve)


# gradient percolation in a strip ------------------------------------------------

def strip_gradient_sample(N, ell, seed) -> PercolationSample:
    """Strip ``[0, ell] x [0, N]`` with occupation ``p(b) = 1 - b/N``."""
    if N < 4 or ell < 1:
        raise ValueError("need N >= 4 and ell >= 1")
    region = Region.strip(ell, N)
    s = sample_bernoulli(lambda A, B: 1.0 - B / N, region, seed)
    return PercolationSample(region, s.occupied, dict(kind="strip", N=N, ell=ell, seed=seed))


@dataclass(frozen=True, eq=False)
class StripFront:
    curve: FrontCurve
    length: int
    max_deviation: float
    unique: bool

    def to_json(self) -> str:
        return json.dumps(dict(length=self.length, max_deviation=self.max_deviation,
                               unique=self.unique))


def _touching(labels, rows):
    ids = np.unique(labels[rows])
    return ids[ids > 0]


def strip_front(sample: PercolationSample, y_center=None) -> StripFront:
    """Lower hull of the vacant cluster of the top row.

    The traced path separates the region filled from the bottom (everything
    not in the top vacant cluster) from that cluster.  ``unique`` is True iff
    this path coincides with the upper hull of the occupied cluster of the
    bottom row, i.e. a single interface touches both phases.
    """
    reg = sample.region
    occ = sample.occupied
    vac = sample.vacant
    N = reg.bounds[3] - reg.bounds[2]
    if y_center is None:
        y_center = reg.b0 + N / 2.0
    top = (slice(None), -1)
    bottom = (slice(None), 0)

    vlab, _ = ndimage.label(vac, structure=STRUCTURE)
    V = np.isin(vlab, _touching(vlab, top))
    if V[bottom].any():
        raise FrontError("vacant crossing from top to bottom: phases not separated")
    hlab, _ = ndimage.label(reg.mask & ~V, structure=STRUCTURE)
    H0 = np.isin(hlab, _touching(hlab, bottom))
    edges, ins, outs = boundary_edges(H0, V, reg.a0, reg.b0)
    if len(edges) == 0:
        raise FrontError("no boundary between the bottom and top phases")
    paths = trace_paths(edges, ins)
    if len(paths) != 1 or paths[0][1]:
        raise FrontError(f"expected one open interface, found {len(paths)} pieces")
    curve = FrontCurve.from_path(edges, ins, outs, paths[0][0], closed=False)

    olab, _ = ndimage.label(occ, structure=STRUCTURE)
    O = np.isin(olab, _touching(olab, bottom))
    unique = False
    if not O[top].any():
        glab, _ = ndimage.label(reg.mask & ~O, structure=STRUCTURE)
        G = np.isin(glab, _touching(glab, top))
        e2, _, _ = boundary_edges(O, G, reg.a0, reg.b0)
        unique = set(map(tuple, e2.tolist())) == curve.edge_set()
    dev = float(np.max(np.abs(curve.vertex_axial[:, 1] - y_center)))
    return StripFront(curve, curve.length, dev, unique)

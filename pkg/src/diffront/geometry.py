"""Clusters, phase verdicts and the interface around the origin.

The front of a radial sample is built constructively: the vacant "ocean" is
everything vacant that is connected to the outside of the sample (sites off
the region count as vacant), the filled origin component ``H0`` is the
connected component of the non-ocean sites that contains the origin, and the
front is the loop of dual edges between ``H0`` and the ocean.  Every such
edge has an occupied endpoint in ``H0`` and a vacant endpoint in the ocean.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .dual import EDGE_ENDPOINTS, FrontCurve, boundary_edges, trace_paths
from .errors import FrontError
from .lattice import STRUCTURE, embed, norm_sq
from .percolation import PercolationSample, has_crossing
from .scaling import ScalingFit, fit_scaling

# projection directions for the cluster diameter, 30 degrees apart
_ANGLES = np.arange(6) * (math.pi / 6.0)


@dataclass(frozen=True, eq=False)
class ClusterReport:
    count: int
    sizes: np.ndarray = field(repr=False)      # sizes[k] for label k + 1
    diameters: np.ndarray = field(repr=False)
    origin_id: int | None                      # label (1-based) of the origin's cluster
    labels: np.ndarray = field(repr=False)     # over the sample region's bounding box

    @property
    def max_diameter(self) -> float:
        return float(self.diameters.max()) if self.count else 0.0

    @property
    def origin_diameter(self) -> float:
        return float(self.diameters[self.origin_id - 1]) if self.origin_id else 0.0


def connected_clusters(sample: PercolationSample) -> ClusterReport:
    """Occupied clusters with six-neighbour adjacency.

    Labels follow the lexicographic order of each cluster's first site.  The
    diameter is the largest width of the cluster's Euclidean site set over
    six projection directions; it underestimates the true diameter by a
    factor of at most ``cos(15 deg)``.
    """
    reg = sample.region
    labels, count = ndimage.label(sample.occupied, structure=STRUCTURE)
    if count == 0:
        empty = np.zeros(0)
        return ClusterReport(0, empty.astype(np.int64), empty, None, labels)
    A, B = reg.coords()
    x, y = embed(A.astype(float), B.astype(float))
    idx = np.arange(1, count + 1)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    diam = np.zeros(count)
    for th in _ANGLES:
        proj = x * math.cos(th) + y * math.sin(th)
        width = (np.asarray(ndimage.maximum(proj, labels, idx))
                 - np.asarray(ndimage.minimum(proj, labels, idx)))
        np.maximum(diam, width, out=diam)
    origin_id = None
    if (0, 0) in reg:
        lab = int(labels[-reg.a0, -reg.b0])
        origin_id = lab or None
    return ClusterReport(int(count), sizes, diam, origin_id, labels)


@dataclass(frozen=True)
class PhaseReport:
    verdict: str          # "dilute" or "dense"
    max_diameter: float
    threshold: float      # c * ln n
    origin_diameter: float
    n: float
    t: float
    c: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


def classify_phase(n, t, sample: PercolationSample, c, report: ClusterReport | None = None):
    """Dilute iff every cluster has diameter at most ``c ln n``."""
    if not c > 0:
        raise ValueError("c must be positive")
    if report is None:
        report = connected_clusters(sample)
    thr = c * math.log(n)
    verdict = "dilute" if report.max_diameter <= thr else "dense"
    return PhaseReport(verdict, report.max_diameter, thr, report.origin_diameter, n, t, c)


# front extraction ------------------------------------------------------------

def _padded(sample: PercolationSample, outer_r=None):
    """Occupied mask padded by one vacant layer, with its coordinate grids."""
    reg = sample.region
    occ = np.pad(sample.occupied, 1)
    a0, b0 = reg.a0 - 1, reg.b0 - 1
    A, B = np.meshgrid(np.arange(occ.shape[0]) + a0, np.arange(occ.shape[1]) + b0,
                       indexing="ij")
    n2 = norm_sq(A, B)
    if outer_r is not None:
        occ &= n2 <= outer_r * outer_r + 1e-9
    return occ, n2, a0, b0


def _ocean(occ):
    vlab, _ = ndimage.label(~occ, structure=STRUCTURE)
    border = np.concatenate([vlab[0], vlab[-1], vlab[:, 0], vlab[:, -1]])
    ids = np.unique(border[border > 0])
    return np.isin(vlab, ids)


def extract_front(sample: PercolationSample, inner_r, outer_r=None) -> FrontCurve:
    """Outer boundary of the filled origin component.

    Sites beyond ``outer_r`` (default: keep the whole region) are treated as
    vacant, so the result does not change when the region is enlarged
    beyond ``outer_r``.  Raises :class:`FrontError` when the ocean comes
    within ``inner_r`` of the origin.
    """
    if outer_r is not None and not inner_r < outer_r:
        raise ValueError("need inner_r < outer_r")
    occ, n2, a0, b0 = _padded(sample, outer_r)
    ocean = _ocean(occ)
    if (0, 0) not in sample.region:
        raise ValueError("sample region must contain the origin")
    if np.any(ocean & (n2 <= inner_r * inner_r + 1e-9)):
        raise FrontError(f"vacant ocean reaches radius {inner_r}: no separating interface")
    hlab, _ = ndimage.label(~ocean, structure=STRUCTURE)
    H0 = hlab == hlab[-a0, -b0]
    edges, ins, outs = boundary_edges(H0, ocean, a0, b0)
    paths = trace_paths(edges, ins)
    if len(paths) != 1 or not paths[0][1]:
        raise FrontError(f"hull walk did not close into one loop ({len(paths)} pieces)")
    front = FrontCurve.from_path(edges, ins, outs, paths[0][0], closed=True)
    if abs(front.winding_number()) != 1:
        raise FrontError(f"front winds {front.winding_number()} times around the origin")
    return front


@dataclass(frozen=True)
class FrontStats:
    length: int
    max_outward: float
    max_inward: float
    min_radius: float
    max_radius: float
    mean_radius: float
    r_star: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


def front_statistics(front: FrontCurve, r_star) -> FrontStats:
    r = front.radii()[:-1] if front.closed else front.radii()
    return FrontStats(front.length, float(r.max() - r_star), float(r_star - r.min()),
                      float(r.min()), float(r.max()), float(r.mean()), float(r_star))


def edge_midpoint_radius(edges) -> np.ndarray:
    """Euclidean radius of the midpoint of each primal edge ``(a, b, k)``.

    This point is also the midpoint of the crossing dual edge.
    """
    edges = np.asarray(edges)
    k = edges[:, 2]
    da = np.zeros(len(edges))
    db = np.zeros(len(edges))
    for kk, ((p1a, p1b), (p2a, p2b)) in EDGE_ENDPOINTS.items():
        sel = k == kk
        da[sel] = 0.5 * (p1a + p2a)
        db[sel] = 0.5 * (p1b + p2b)
    x, y = embed(edges[:, 0] + da, edges[:, 1] + db)
    return np.hypot(x, y)


def edges_in_annulus(edges, r1, r2) -> set:
    edges = np.asarray(edges).reshape(-1, 3)
    r = edge_midpoint_radius(edges)
    keep = (r >= r1) & (r <= r2)
    return set(map(tuple, edges[keep].tolist()))


def two_arm_edges(sample: PercolationSample, mid_annulus, inner_target_r, outer_target_r) -> set:
    """Dual edges in ``mid_annulus = (r1, r2)`` carrying both arms.

    The occupied endpoint must be joined by occupied sites to
    ``disk(inner_target_r)`` and the vacant endpoint by vacant sites to the
    outside of ``disk(outer_target_r)`` (sites off the region count as
    vacant).  Edges are selected by the radius of their midpoint.
    """
    r1, r2 = mid_annulus
    if not inner_target_r < r1 <= r2 < outer_target_r:
        raise ValueError("need inner_target_r < mid annulus < outer_target_r")
    occ, n2, a0, b0 = _padded(sample)
    olab, _ = ndimage.label(occ, structure=STRUCTURE)
    ids = np.unique(olab[occ & (n2 <= inner_target_r ** 2 + 1e-9)])
    arm_in = np.isin(olab, ids[ids > 0])
    vac = ~occ
    vlab, _ = ndimage.label(vac, structure=STRUCTURE)
    ids = np.unique(vlab[vac & (n2 > outer_target_r ** 2 + 1e-9)])
    arm_out = np.isin(vlab, ids[ids > 0])
    if not arm_in.any() or not arm_out.any():
        return set()
    edges, _, _ = boundary_edges(arm_in, arm_out, a0, b0)
    return edges_in_annulus(edges, r1, r2)


# crossings near the critical circle ---------------------------------------------

def radial_crossings(sample: PercolationSample, r_star, side) -> list[bool]:
    """Occupied radial crossings of four rhombi of the given side centred on the circle.

    The rhombi sit on the +a, -a, +b and -b axes; the crossing joins the
    side nearer the origin to the far side.
    """
    s = int(round(side))
    c = int(round(r_star))
    lo, hi = c - s // 2, c - s // 2 + s
    w1, w2 = -(s // 2), -(s // 2) + s
    boxes = [((lo, hi, w1, w2), "horizontal"), ((-hi, -lo, w1, w2), "horizontal"),
             ((w1, w2, lo, hi), "vertical"), ((w1, w2, -hi, -lo), "vertical")]
    return [has_crossing(sample, box, d, "occupied") for box, d in boxes]


# box counting --------------------------------------------------------------

class DegenerateCurve(ValueError):
    """The curve is too small for the requested box sizes."""


def _densify(xy, step):
    seg = np.diff(xy, axis=0)
    seglen = np.hypot(seg[:, 0], seg[:, 1])
    k = np.maximum(1, np.ceil(seglen / step).astype(int))
    pts = [xy[:-1]]
    kmax = int(k.max())
    for j in range(1, kmax):
        sel = j < k
        frac = (j / k[sel])[:, None]
        pts.append(xy[:-1][sel] + frac * seg[sel])
    pts.append(xy[-1:])
    return np.concatenate(pts)


def box_counts(curve, scales) -> np.ndarray:
    """Number of grid boxes of each side met by the polyline ``curve``."""
    xy = curve.vertices if isinstance(curve, FrontCurve) else np.asarray(curve, float)
    scales = np.asarray(scales, dtype=float)
    pts = _densify(xy, scales.min() / 16.0)
    origin = pts.min(axis=0)
    out = []
    for s in scales:
        cells = np.floor((pts - origin) / s).astype(np.int64)
        out.append(len(np.unique(cells, axis=0)))
    return np.array(out)


def geometric_scales(lo, hi, count):
    return np.geomspace(lo, hi, count)


def box_counting_dimension(curve, scales, min_decades=1.5, min_scales=4) -> ScalingFit:
    """Box-counting dimension of a polyline in the Euclidean plane.

    The fit is on the points ``(1/s, N(s))`` so that the returned slope is the
    dimension itself.
    """
    scales = np.sort(np.asarray(scales, dtype=float))[::-1]
    if len(scales) < min_scales:
        raise ValueError(f"need at least {min_scales} scales")
    if np.any(scales <= 0) or np.any(np.diff(scales) >= 0):
        raise ValueError("scales must be positive and distinct")
    span = math.log10(scales[0] / scales[-1])
    if span < min_decades - 1e-12:
        raise ValueError(f"scales span {span:.2f} decades, need {min_decades}")
    counts = box_counts(curve, scales)
    if counts.min() < len(scales) or len(np.unique(counts)) < 3:
        raise DegenerateCurve(f"box counts {counts.tolist()} too few for {len(scales)} scales")
    return fit_scaling(zip(1.0 / scales, counts))

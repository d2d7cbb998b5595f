"""Snapshot images as binary PPM.

File layout: ``b"P6\\n<width> <height>\\n255\\n"`` followed by ``height`` rows of
``width`` RGB byte triples, top row first.  Each pixel shows the lattice site
nearest to it in the Euclidean plane; occupied sites are dark, everything
else is the light background, and a front is drawn on top in red.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .dual import FrontCurve
from .lattice import SQRT3, Region, embed, norm_sq
from .percolation import PercolationSample
from .sampler import OccupancyField, occupancy_to_percolation

BACKGROUND = (236, 236, 236)
OCCUPIED = (28, 28, 40)
FRONT = (210, 20, 20)


def _nearest_site(x, y):
    b = y * (2.0 / SQRT3)
    a = x - 0.5 * b
    a0, b0 = np.floor(a), np.floor(b)
    best = None
    best_d = None
    for da in (0, 1):
        for db in (0, 1):
            ca, cb = a0 + da, b0 + db
            ex, ey = embed(ca, cb)
            d = (ex - x) ** 2 + (ey - y) ** 2
            if best is None:
                best, best_d = (ca, cb), d
            else:
                sel = d < best_d
                best = (np.where(sel, ca, best[0]), np.where(sel, cb, best[1]))
                best_d = np.where(sel, d, best_d)
    return best[0].astype(np.int64), best[1].astype(np.int64)


def _extent(region: Region, front: FrontCurve | None):
    a1, a2, b1, b2 = region.bounds
    xs, ys = embed(np.array([a1, a2, a1, a2], float), np.array([b1, b1, b2, b2], float))
    lo = [xs.min() - 1, ys.min() - 1]
    hi = [xs.max() + 1, ys.max() + 1]
    if front is not None:
        lo = np.minimum(lo, front.vertices.min(axis=0) - 1)
        hi = np.maximum(hi, front.vertices.max(axis=0) + 1)
    return np.asarray(lo, float), np.asarray(hi, float)


def snapshot_pixels(obj, front: FrontCurve | None = None, pixels_per_unit=3.0,
                    size=None) -> np.ndarray:
    """RGB array ``(height, width, 3)`` for a field, a sample or a front."""
    if isinstance(obj, OccupancyField):
        obj = occupancy_to_percolation(obj)
    if isinstance(obj, FrontCurve):
        front = obj
        v = obj.vertex_axial
        reg = Region.disk(math.ceil(float(np.sqrt(norm_sq(v[:, 0], v[:, 1]).max())) + 2))
        obj = PercolationSample(reg, np.zeros(reg.shape, bool))
    if not isinstance(obj, PercolationSample):
        raise TypeError(f"cannot render {type(obj).__name__}")
    lo, hi = _extent(obj.region, front)
    if size is None:
        w = int(math.ceil((hi[0] - lo[0]) * pixels_per_unit))
        h = int(math.ceil((hi[1] - lo[1]) * pixels_per_unit))
    else:
        w, h = size
    scale = np.array([(hi[0] - lo[0]) / w, (hi[1] - lo[1]) / h])
    px, py = np.meshgrid(np.arange(w) + 0.5, np.arange(h) + 0.5)
    x = lo[0] + px * scale[0]
    y = hi[1] - py * scale[1]          # top row is the largest y
    A, B = _nearest_site(x, y)
    occ = obj.occupied
    i = A - obj.region.a0
    j = B - obj.region.b0
    ok = (i >= 0) & (i < occ.shape[0]) & (j >= 0) & (j < occ.shape[1])
    dark = np.zeros((h, w), dtype=bool)
    dark[ok] = occ[i[ok], j[ok]]
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    img[dark] = OCCUPIED
    if front is not None:
        _draw_polyline(img, front.vertices, lo, hi, scale)
    return img


def _draw_polyline(img, xy, lo, hi, scale):
    h, w, _ = img.shape
    step = 0.5 * float(scale.min())
    seg = np.diff(xy, axis=0)
    k = np.maximum(1, np.ceil(np.hypot(seg[:, 0], seg[:, 1]) / step).astype(int))
    idx = np.repeat(np.arange(len(seg)), k)
    frac = np.concatenate([np.arange(m) / m for m in k])
    pts = xy[:-1][idx] + frac[:, None] * seg[idx]
    col = np.floor((pts[:, 0] - lo[0]) / scale[0]).astype(int)
    row = np.floor((hi[1] - pts[:, 1]) / scale[1]).astype(int)
    ok = (col >= 0) & (col < w) & (row >= 0) & (row < h)
    img[row[ok], col[ok]] = FRONT


def ppm_bytes(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode() + np.ascontiguousarray(img, np.uint8).tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def render_snapshot(obj, path, front: FrontCurve | None = None, pixels_per_unit=3.0,
                    size=None) -> Path:
    """Write a PPM of ``obj`` (field, sample or front) with an optional front overlay."""
    path = Path(path)
    data = ppm_bytes(snapshot_pixels(obj, front, pixels_per_unit, size))
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc
    return path

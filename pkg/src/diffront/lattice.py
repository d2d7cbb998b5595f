"""Triangular lattice geometry in axial coordinates.

A site ``(a, b)`` sits at the complex point ``a + b * exp(i*pi/3)``.  Regions
are stored as a boolean mask over a bounding parallelogram whose array index
``[i, j]`` corresponds to the site ``(a0 + i, b0 + j)``; C-order traversal of
the mask is therefore lexicographic in ``(a, b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

SQRT3 = math.sqrt(3.0)

# counterclockwise, starting from the +a axis
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

# 3x3 connectivity element for scipy.ndimage in [a, b] index order
STRUCTURE = np.array([[0, 1, 1],
                      [1, 1, 1],
                      [1, 1, 0]], dtype=bool)


class SitePos(NamedTuple):
    a: int
    b: int

    def __add__(self, other):
        return SitePos(self.a + other[0], self.b + other[1])


def neighbors(z) -> list[SitePos]:
    a, b = z
    return [SitePos(a + da, b + db) for da, db in NEIGHBOR_OFFSETS]


def norm_sq(a, b):
    """Squared Euclidean norm; works elementwise on integer arrays."""
    return a * a + a * b + b * b


def norm(z) -> float:
    a, b = z
    return math.sqrt(norm_sq(a, b))


def embed(a, b):
    """Euclidean coordinates ``(x, y)`` of axial positions (scalars or arrays)."""
    return a + 0.5 * b, b * (SQRT3 / 2.0)


def rotate60(z) -> SitePos:
    """Rotation by -60 degrees, ``(a, b) -> (a + b, -a)``."""
    a, b = z
    return SitePos(a + b, -a)


def symmetry_images(z) -> list[SitePos]:
    """The 12 images of ``z`` under the dihedral group of the lattice."""
    out = []
    w = SitePos(*z)
    for _ in range(6):
        out.append(w)
        out.append(SitePos(w.b, w.a))  # reflection across the 30 degree axis
        w = rotate60(w)
    return out


def _disk_half_width(r: float) -> int:
    return int(math.floor(2.0 * r / SQRT3)) + 1


@dataclass(frozen=True, eq=False)
class Region:
    """Finite set of sites backed by a mask over a bounding parallelogram."""

    kind: str
    params: dict
    a0: int
    b0: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.ascontiguousarray(self.mask, dtype=bool)
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    # construction -------------------------------------------------------

    @classmethod
    def parallelogram(cls, a1, a2, b1, b2, kind="parallelogram"):
        if a2 < a1 or b2 < b1:
            raise ValueError(f"empty parallelogram [{a1},{a2}]x[{b1},{b2}]")
        mask = np.ones((a2 - a1 + 1, b2 - b1 + 1), dtype=bool)
        params = dict(a1=a1, a2=a2, b1=b1, b2=b2)
        return cls(kind, params, a1, b1, mask)

    @classmethod
    def strip(cls, ell, N):
        """The strip ``[0, ell] x [0, N]`` used by gradient percolation."""
        reg = cls.parallelogram(0, ell, 0, N, kind="strip")
        return cls("strip", dict(ell=ell, N=N), reg.a0, reg.b0, reg.mask)

    @classmethod
    def disk(cls, r):
        if r < 0:
            raise ValueError(f"negative radius {r}")
        h = _disk_half_width(r)
        A, B = np.mgrid[-h:h + 1, -h:h + 1]
        mask = norm_sq(A, B) <= r * r + 1e-9
        return cls("disk", dict(r=r), -h, -h, mask)

    @classmethod
    def annulus(cls, r, r_out):
        """Sites with ``r <= |z| <= r_out``."""
        if r < 0 or r_out < 0:
            raise ValueError("negative radius")
        if not r < r_out:
            raise ValueError(f"annulus needs r < r', got {r} >= {r_out}")
        h = _disk_half_width(r_out)
        A, B = np.mgrid[-h:h + 1, -h:h + 1]
        n2 = norm_sq(A, B)
        mask = (n2 <= r_out * r_out + 1e-9) & (n2 >= r * r - 1e-9)
        return cls("annulus", dict(r=r, r_out=r_out), -h, -h, mask)

    @classmethod
    def from_mask(cls, a0, b0, mask, kind="custom", params=None):
        return cls(kind, dict(params or {}), int(a0), int(b0), np.asarray(mask, bool))

    def union(self, *others) -> "Region":
        regs = (self,) + others
        a0 = min(r.a0 for r in regs)
        b0 = min(r.b0 for r in regs)
        a1 = max(r.a0 + r.mask.shape[0] for r in regs)
        b1 = max(r.b0 + r.mask.shape[1] for r in regs)
        mask = np.zeros((a1 - a0, b1 - b0), dtype=bool)
        for r in regs:
            i, j = r.a0 - a0, r.b0 - b0
            mask[i:i + r.mask.shape[0], j:j + r.mask.shape[1]] |= r.mask
        return Region.from_mask(a0, b0, mask, kind="union",
                                params=dict(parts=[r.descriptor() for r in regs]))

    # queries --------------------------------------------------------------

    @property
    def shape(self):
        return self.mask.shape

    @property
    def bounds(self):
        """Inclusive ``(a_min, a_max, b_min, b_max)`` of the bounding box."""
        return (self.a0, self.a0 + self.shape[0] - 1,
                self.b0, self.b0 + self.shape[1] - 1)

    def __len__(self):
        return int(self.mask.sum())

    def __contains__(self, z):
        i, j = z[0] - self.a0, z[1] - self.b0
        if 0 <= i < self.shape[0] and 0 <= j < self.shape[1]:
            return bool(self.mask[i, j])
        return False

    def __iter__(self) -> Iterator[SitePos]:
        for a, b in self.sites():
            yield SitePos(int(a), int(b))

    def contains_array(self, a, b):
        """Vectorised membership test for integer coordinate arrays."""
        a = np.asarray(a)
        b = np.asarray(b)
        i = a - self.a0
        j = b - self.b0
        ok = (i >= 0) & (i < self.shape[0]) & (j >= 0) & (j < self.shape[1])
        out = np.zeros(np.broadcast(a, b).shape, dtype=bool)
        out[ok] = self.mask[i[ok], j[ok]]
        return out

    def sites(self) -> np.ndarray:
        """``(K, 2)`` array of member sites in lexicographic order."""
        i, j = np.nonzero(self.mask)
        return np.stack([i + self.a0, j + self.b0], axis=1)

    def coords(self):
        """Axial coordinate grids ``(A, B)`` over the bounding box."""
        A, B = np.meshgrid(np.arange(self.shape[0]) + self.a0,
                           np.arange(self.shape[1]) + self.b0, indexing="ij")
        return A, B

    def norms(self):
        A, B = self.coords()
        return np.sqrt(norm_sq(A, B).astype(float))

    def descriptor(self) -> dict:
        return dict(kind=self.kind, **self.params)


def build_region(desc: dict) -> Region:
    """Build a region from a descriptor such as ``{"kind": "disk", "r": 5}``."""
    desc = dict(desc)
    kind = desc.pop("kind")
    if kind == "parallelogram":
        return Region.parallelogram(desc["a1"], desc["a2"], desc["b1"], desc["b2"])
    if kind == "disk":
        return Region.disk(desc["r"])
    if kind == "annulus":
        return Region.annulus(desc["r"], desc["r_out"])
    if kind == "strip":
        return Region.strip(desc["ell"], desc["N"])
    if kind == "union":
        parts = [build_region(p) for p in desc["parts"]]
        return parts[0].union(*parts[1:])
    raise ValueError(f"unknown region kind {kind!r}")

"""Dual hexagonal lattice: boundary edges between site sets and hull walks.

Dual vertices are the triangular faces.  ``up(a, b)`` has corners
``(a,b), (a+1,b), (a,b+1)`` and ``down(a, b)`` has corners
``(a+1,b), (a,b+1), (a+1,b+1)``.  A dual edge is named by the primal edge it
crosses, ``(a, b, k)``:

    k = 0   (a, b) -- (a+1, b)      joins up(a, b) and down(a, b-1)
    k = 1   (a, b) -- (a, b+1)      joins up(a, b) and down(a-1, b)
    k = 2   (a+1, b) -- (a, b+1)    joins up(a, b) and down(a, b)
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import embed

# primal endpoints of edge k relative to (a, b)
EDGE_ENDPOINTS = {0: ((0, 0), (1, 0)), 1: ((0, 0), (0, 1)), 2: ((1, 0), (0, 1))}
# the down-triangle of edge k, as an offset from (a, b); the up-triangle is always up(a, b)
EDGE_DOWN_OFFSET = {0: (0, -1), 1: (-1, 0), 2: (0, 0)}


def triangle_centroid(a, b, kind):
    """Axial centroid of up (kind 0) or down (kind 1) triangles."""
    off = np.where(np.asarray(kind) == 0, 1.0 / 3.0, 2.0 / 3.0)
    return np.asarray(a) + off, np.asarray(b) + off


def boundary_edges(inside: np.ndarray, outside: np.ndarray, a0: int, b0: int):
    """All primal edges with one endpoint in ``inside`` and the other in ``outside``.

    Both masks share the index convention ``[a - a0, b - b0]``.  Returns
    ``edges`` (``(K, 3)`` array of ``(a, b, k)``), and the inside and outside
    endpoint sites as ``(K, 2)`` arrays.
    """
    X = np.asarray(inside, bool)
    Y = np.asarray(outside, bool)
    E, U, V = [], [], []
    for k, ((da1, db1), (da2, db2)) in EDGE_ENDPOINTS.items():
        na = X.shape[0] - 1 if (da1 or da2) else X.shape[0]
        nb = X.shape[1] - 1 if (db1 or db2) else X.shape[1]
        p = (slice(da1, da1 + na), slice(db1, db1 + nb))
        q = (slice(da2, da2 + na), slice(db2, db2 + nb))
        for first_in, sel in ((True, X[p] & Y[q]), (False, Y[p] & X[q])):
            i, j = np.nonzero(sel)
            a = i + a0
            b = j + b0
            E.append(np.stack([a, b, np.full_like(a, k)], axis=1))
            e1 = np.stack([a + da1, b + db1], axis=1)
            e2 = np.stack([a + da2, b + db2], axis=1)
            U.append(e1 if first_in else e2)
            V.append(e2 if first_in else e1)
    return (np.concatenate(E).astype(np.int64), np.concatenate(U).astype(np.int64),
            np.concatenate(V).astype(np.int64))


def _edge_triangles(edges):
    a, b, k = edges[:, 0], edges[:, 1], edges[:, 2]
    up = np.stack([a, b, np.zeros_like(a)], axis=1)
    da = np.select([k == 0, k == 1], [0, -1], 0)
    db = np.select([k == 0, k == 1], [-1, 0], 0)
    down = np.stack([a + da, b + db, np.ones_like(a)], axis=1)
    return up, down


def orient_edges(edges, inside_sites):
    """``(from_tri, to_tri)`` so that walking from -> to keeps ``inside`` on the right."""
    up, down = _edge_triangles(edges)
    ux, uy = embed(*triangle_centroid(up[:, 0], up[:, 1], 0))
    dx, dy = embed(*triangle_centroid(down[:, 0], down[:, 1], 1))
    sx, sy = embed(inside_sites[:, 0].astype(float), inside_sites[:, 1].astype(float))
    mx, my = 0.5 * (ux + dx), 0.5 * (uy + dy)
    # cross((down - up), (site - mid)) < 0  <=> site on the right of up -> down
    cross = (dx - ux) * (sy - my) - (dy - uy) * (sx - mx)
    up_first = cross < 0
    frm = np.where(up_first[:, None], up, down)
    to = np.where(up_first[:, None], down, up)
    return frm, to


def trace_paths(edges, inside_sites):
    """Chain oriented boundary edges into walks.

    Returns a list of ``(order, closed)`` where ``order`` indexes ``edges`` in
    walking order.  Every dual vertex met must have at most one outgoing and
    one incoming edge, which holds whenever the inside set is bordered only
    by outside sites; otherwise ``ValueError`` is raised.
    """
    frm, to = orient_edges(edges, inside_sites)
    frm_keys = [tuple(r) for r in frm.tolist()]
    to_keys = [tuple(r) for r in to.tolist()]
    out_of = {}
    for idx, key in enumerate(frm_keys):
        if key in out_of:
            raise ValueError(f"dual vertex {key} has two outgoing boundary edges")
        out_of[key] = idx
    has_pred = set(to_keys)
    if len(has_pred) != len(to_keys):
        raise ValueError("dual vertex with two incoming boundary edges")
    used = np.zeros(len(edges), dtype=bool)
    paths = []
    # open paths first, from their unique start edge, in lexicographic order of edges
    starts = [i for i, key in enumerate(frm_keys) if key not in has_pred]
    for s in sorted(starts, key=lambda i: tuple(edges[i])):
        order = [s]
        used[s] = True
        nxt = out_of.get(to_keys[s])
        while nxt is not None:
            order.append(nxt)
            used[nxt] = True
            nxt = out_of.get(to_keys[nxt])
        paths.append((order, False))
    for s in np.lexsort((edges[:, 2], edges[:, 1], edges[:, 0])):
        if used[s]:
            continue
        order = [int(s)]
        used[s] = True
        nxt = out_of[to_keys[s]]
        while nxt != s:
            order.append(nxt)
            used[nxt] = True
            nxt = out_of[to_keys[nxt]]
        paths.append((order, True))
    return paths


@dataclass(frozen=True, eq=False)
class FrontCurve:
    """Oriented walk of dual edges with occupied sites on the right.

    ``vertices`` holds the Euclidean positions of the dual vertices visited;
    for a closed loop the first vertex is repeated at the end.
    """

    edges: np.ndarray = field(repr=False)          # (K, 3) (a, b, k) in walking order
    occupied: np.ndarray = field(repr=False)       # (K, 2) occupied endpoint of each edge
    vacant: np.ndarray = field(repr=False)         # (K, 2) vacant endpoint
    vertices: np.ndarray = field(repr=False)       # (K+1, 2) Euclidean dual vertices
    vertex_axial: np.ndarray = field(repr=False)   # (K+1, 2) axial dual vertices
    closed: bool = True

    @classmethod
    def from_path(cls, edges, inside_sites, outside_sites, order, closed):
        order = np.asarray(order)
        e = edges[order]
        u = inside_sites[order]
        v = outside_sites[order]
        frm, to = orient_edges(e, u)
        tri = np.concatenate([frm, to[-1:]], axis=0)
        ax = np.stack(triangle_centroid(tri[:, 0], tri[:, 1], tri[:, 2]), axis=1)
        xy = np.stack(embed(ax[:, 0], ax[:, 1]), axis=1)
        return cls(e, u, v, xy, ax, closed)

    @property
    def length(self) -> int:
        return len(self.edges)

    def __len__(self):
        return self.length

    def radii(self) -> np.ndarray:
        return np.hypot(self.vertices[:, 0], self.vertices[:, 1])

    def winding_number(self, center=(0.0, 0.0)) -> int:
        x = self.vertices[:, 0] - center[0]
        y = self.vertices[:, 1] - center[1]
        ang = np.unwrap(np.arctan2(y, x))
        return int(round((ang[-1] - ang[0]) / (2 * math.pi)))

    def edge_midpoint_radii(self) -> np.ndarray:
        mid = 0.5 * (self.vertices[:-1] + self.vertices[1:])
        return np.hypot(mid[:, 0], mid[:, 1])

    def edge_set(self) -> set:
        return set(map(tuple, self.edges.tolist()))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"])
            for x, y in self.vertices.tolist():
                w.writerow([repr(x), repr(y)])

    def stats_json(self, **extra) -> str:
        r = self.radii()
        d = dict(length=self.length, closed=self.closed, min_radius=float(r.min()),
                 max_radius=float(r.max()), mean_radius=float(r.mean()))
        d.update(extra)
        return json.dumps(d, sort_keys=True)

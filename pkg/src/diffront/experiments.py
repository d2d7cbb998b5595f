"""Experiment drivers: one row per (time, replica), merged in replica order.

Every replica gets its own derived seed, so rows do not depend on the number
of worker processes.  Module errors inside a row are recorded in its
``error`` column and do not stop the run.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import constants
from .config import ExperimentConfig
from .constants import TWO_ARM_EXPONENT
from .errors import FrontError
from .geometry import (classify_phase, connected_clusters, edges_in_annulus, extract_front,
                       front_statistics, two_arm_edges)
from .occupation import critical_radius, source_critical_radius
from .percolation import estimate_characteristic_length, strip_gradient_sample, strip_front
from .rng import replica_seed
from .sampler import (occupancy_to_percolation, radial_sample, simulate_particles,
                      simulate_source)

log = logging.getLogger(__name__)

THREADS_ENV = "DIFFRONT_THREADS"
INNER_EXPONENT = 0.05     # front must surround disk(t^0.05)
LOCAL_EPS = 0.01          # localization half-width 2 t^(2/7 + eps)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_replicas(fn, jobs, threads=1):
    """``[fn(job) for job in jobs]``, optionally on a process pool, in job order."""
    jobs = list(jobs)
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def expected_length_decomposition(t):
    """``t^(2/7) * sqrt(t) * (t^(2/7))^(-alpha_2)`` with ``alpha_2 = 1/4``.

    Width of the front, times the circumference, times the probability that a
    boundary edge of the width-sized annulus carries two arms.  The exponent
    is ``2/7 + 1/2 - 1/14 = 5/7``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    w = t ** (2.0 / 7.0)
    return w * math.sqrt(t) * w ** (-TWO_ARM_EXPONENT)


def _nan(x):
    return float("nan") if x is None else x


# dense fronts --------------------------------------------------------------

def front_row(sample, t, r_star, seed, keep_front=False, eps=LOCAL_EPS):
    """Front statistics, localization and the two-arm check for one radial sample."""
    row = dict(t=t, seed=seed, r_star=r_star, ok=False, winding=0, L=float("nan"),
               max_in=float("nan"), max_out=float("nan"), mean_radius=float("nan"),
               localized=False, two_arm_match=None, unique_flag=False, error="")
    try:
        front = extract_front(sample, t ** INNER_EXPONENT)
    except FrontError as exc:
        row["error"] = str(exc)
        return (row, None) if keep_front else row
    st = front_statistics(front, r_star)
    w = t ** (2.0 / 7.0 + eps)
    localized = st.min_radius > r_star - 2 * w and st.max_radius < r_star + 2 * w
    row.update(ok=True, winding=front.winding_number(), L=st.length, max_in=st.max_inward,
               max_out=st.max_outward, mean_radius=st.mean_radius, localized=localized)
    if localized and r_star - 2 * w > 0:
        arms = two_arm_edges(sample, (r_star - w, r_star + w), r_star - 2 * w, r_star + 2 * w)
        match = arms == edges_in_annulus(front.edges, r_star - w, r_star + w)
        row.update(two_arm_match=match, unique_flag=match)
    return (row, front) if keep_front else row


def dense_front_job(job):
    n, t, seed, engine, keep_front = job
    r_star = critical_radius(n, t)
    if engine == "poisson-field":
        sample = radial_sample(n, t, seed)
    else:
        sample = occupancy_to_percolation(simulate_particles(n, [t], seed)[0])
    out = front_row(sample, t, r_star, seed, keep_front)
    (out[0] if keep_front else out)["n"] = n
    return out


def run_dense_front(times, replicas, seed, n=None, lam=None, engine="poisson-field",
                    threads=1, keep_front=False):
    """Dense-phase fronts at each time; ``n`` fixed, or ``n = t / lam`` per time."""
    jobs = []
    for t in times:
        nn = n if n is not None else t / lam
        for i in range(replicas):
            jobs.append((nn, int(t), replica_seed(seed, i), engine, keep_front))
    out = run_replicas(dense_front_job, jobs, threads)
    rows = [o[0] for o in out] if keep_front else out
    for k, r in enumerate(rows):
        r["replica"] = k % replicas
    if keep_front:
        return rows, [o[1] for o in out]
    return rows


# regime sweep ----------------------------------------------------------------

def sweep_job(job):
    n, times, seed, c, render_dir, replica = job
    fields = simulate_particles(n, times, seed)
    rows = []
    for t, f in zip(times, fields):
        sample = occupancy_to_percolation(f)
        rep = connected_clusters(sample)
        ph = classify_phase(n, t, sample, c, report=rep)
        r_star = critical_radius(n, t) if t > 0 else None
        row = dict(t=t, replica=replica, seed=seed, verdict=ph.verdict,
                   max_diameter=ph.max_diameter, origin_diameter=ph.origin_diameter,
                   threshold=ph.threshold, r_star=_nan(r_star), L=float("nan"),
                   max_in=float("nan"), max_out=float("nan"), error="")
        front = None
        if r_star is not None and t > 0:
            try:
                front = extract_front(sample, t ** INNER_EXPONENT)
                st = front_statistics(front, r_star)
                row.update(L=st.length, max_in=st.max_inward, max_out=st.max_outward)
            except FrontError as exc:
                row["error"] = str(exc)
        else:
            row["error"] = "past t_c: no critical radius"
        if render_dir is not None:
            from .render import render_snapshot
            render_snapshot(sample, Path(render_dir) / f"sweep_t{t}_r{replica}.ppm", front=front)
        rows.append(row)
    return rows


def run_regime_sweep(n, times, replicas, seed, c=None, render_dir=None, threads=1):
    if c is None:
        c = constants.get("geometry", "dilute_c")
    times = [int(t) for t in times]
    if times != sorted(times):
        raise ValueError("times must be sorted")
    jobs = [(n, times, replica_seed(seed, i), c, render_dir if i == 0 else None, i)
            for i in range(replicas)]
    per_rep = run_replicas(sweep_job, jobs, threads)
    # order rows by time, then replica
    return [per_rep[i][k] for k in range(len(times)) for i in range(replicas)]


# dilute check ---------------------------------------------------------------------

def dilute_job(job):
    n, t, seed, c = job
    sample = occupancy_to_percolation(simulate_particles(n, [t], seed)[0])
    ph = classify_phase(n, t, sample, c)
    return dict(t=t, n=n, seed=seed, verdict=ph.verdict, max_diameter=ph.max_diameter,
                threshold=ph.threshold, c=c)


def run_dilute_check(n, times, replicas, seed, c=None, threads=1):
    if c is None:
        c = constants.get("geometry", "dilute_c")
    jobs = [(n, int(t), replica_seed(seed, i), c) for t in times for i in range(replicas)]
    rows = run_replicas(dilute_job, jobs, threads)
    for k, r in enumerate(rows):
        r["replica"] = k % replicas
    return rows


# strip ----------------------------------------------------------------------------

def default_ell(N):
    return int(round(2 * N ** (4.0 / 7.0)))


def strip_job(job):
    N, ell, seed = job
    row = dict(N=N, ell=ell, seed=seed, L=float("nan"), L_over_ell=float("nan"),
               max_dev=float("nan"), unique=False, error="")
    try:
        sf = strip_front(strip_gradient_sample(N, ell, seed))
        row.update(L=sf.length, L_over_ell=sf.length / ell, max_dev=sf.max_deviation,
                   unique=sf.unique)
    except FrontError as exc:
        row["error"] = str(exc)
    return row


def run_strip(N, replicas, seed, ell=None, threads=1):
    ell = default_ell(N) if ell is None else ell
    rows = run_replicas(strip_job, [(N, ell, replica_seed(seed, i)) for i in range(replicas)],
                        threads)
    for i, r in enumerate(rows):
        r["replica"] = i
    return rows


# characteristic length --------------------------------------------------------------

def charlen_job(job):
    p, samples, seed = job
    est = estimate_characteristic_length(p, samples_per_size=samples, seed=seed)
    return dict(p=p, L=est.L, samples=samples, seed=seed,
                model=abs(p - 0.5) ** (-4.0 / 3.0) if p != 0.5 else float("inf"))


def run_char_length(ps, samples, seed, threads=1):
    """Characteristic length for each ``p``; all ``p`` share the run seed (matched draws)."""
    return run_replicas(charlen_job, [(p, samples, seed) for p in ps], threads)


# source ----------------------------------------------------------------------------

def source_job(job):
    mu, times, seed, replica, keep_front = job
    fields = simulate_source(mu, times, seed)
    rows, fronts = [], []
    for t, f in zip(times, fields):
        r_pred = source_critical_radius(mu, t) if t > 0 else 0.0
        row = dict(t=t, replica=replica, seed=seed, mu=mu, particles=f.total(),
                   r_star=r_pred, ok=False, L=float("nan"), mean_radius=float("nan"),
                   radius_ratio=float("nan"), max_in=float("nan"), max_out=float("nan"),
                   error="")
        front = None
        try:
            front = extract_front(occupancy_to_percolation(f), max(t, 1) ** INNER_EXPONENT)
            st = front_statistics(front, r_pred)
            row.update(ok=True, L=st.length, mean_radius=st.mean_radius,
                       radius_ratio=st.mean_radius / r_pred if r_pred else float("nan"),
                       max_in=st.max_inward, max_out=st.max_outward)
        except FrontError as exc:
            row["error"] = str(exc)
        rows.append(row)
        fronts.append(front)
    return (rows, fronts) if keep_front else rows


def run_source_growth(mu, times, replicas, seed, threads=1):
    times = [int(t) for t in times]
    jobs = [(mu, times, replica_seed(seed, i), i, False) for i in range(replicas)]
    per_rep = run_replicas(source_job, jobs, threads)
    return [per_rep[i][k] for k in range(len(times)) for i in range(replicas)]


# dispatch and output -------------------------------------------------------------------

COLUMNS = {
    "dense-front": ["seed", "L", "max_in", "max_out", "r_star", "unique_flag",
                    "t", "n", "replica", "ok", "winding", "mean_radius", "localized", "error"],
    "regime-sweep": ["t", "replica", "seed", "verdict", "max_diameter", "origin_diameter",
                     "threshold", "r_star", "L", "max_in", "max_out", "error"],
    "dilute-check": ["t", "n", "replica", "seed", "verdict", "max_diameter", "threshold", "c"],
    "strip": ["replica", "seed", "N", "ell", "L", "L_over_ell", "max_dev", "unique", "error"],
    "char-length": ["p", "L", "model", "samples", "seed"],
    "source-growth": ["t", "replica", "seed", "mu", "particles", "r_star", "ok", "L",
                      "mean_radius", "radius_ratio", "max_in", "max_out", "error"],
}


def run_experiment(cfg: ExperimentConfig, threads=1):
    """Run ``cfg`` and return its rows (each carrying the config hash)."""
    s = cfg.scale
    times = [int(round(t * s)) for t in cfg.times]
    n = int(round(cfg.n * s)) if cfg.n is not None else None
    render_dir = cfg.out if cfg.render else None
    if render_dir is not None:
        Path(render_dir).mkdir(parents=True, exist_ok=True)
    k = cfg.kind
    if k == "dense-front":
        rows = run_dense_front(times, cfg.replicas, cfg.seed, n=n, lam=cfg.lam,
                               engine=cfg.engine or "poisson-field", threads=threads)
    elif k == "regime-sweep":
        rows = run_regime_sweep(n, times, cfg.replicas, cfg.seed, c=cfg.c,
                                render_dir=render_dir, threads=threads)
    elif k == "dilute-check":
        rows = run_dilute_check(n, times, cfg.replicas, cfg.seed, c=cfg.c, threads=threads)
    elif k == "strip":
        rows = run_strip(int(round(cfg.N * s)), cfg.replicas, cfg.seed, ell=cfg.ell,
                         threads=threads)
    elif k == "char-length":
        rows = run_char_length(cfg.p, cfg.samples or 1000, cfg.seed, threads=threads)
    else:
        rows = run_source_growth(cfg.mu, times, cfg.replicas, cfg.seed, threads=threads)
    h = cfg.hash()
    for r in rows:
        r["config_hash"] = h
    return rows


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_rows(rows, columns, fmt="csv", meta=None) -> str:
    columns = list(columns) + ["config_hash"]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
        return buf.getvalue()
    clean = [{c: (None if isinstance(r.get(c), float) and math.isnan(r[c]) else r.get(c))
              for c in columns} for r in rows]
    doc = dict(meta or {}, rows=clean)
    return json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def write_rows(rows, path, columns, fmt="csv", meta=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_rows(rows, columns, fmt, meta))
    return path


__all__ = [
    "run_replicas", "expected_length_decomposition", "front_row", "run_dense_front",
    "run_regime_sweep", "run_dilute_check", "run_strip", "run_char_length",
    "run_source_growth", "run_experiment", "format_rows", "write_rows", "COLUMNS",
    "default_threads", "default_ell", "source_job", "dense_front_job",
]

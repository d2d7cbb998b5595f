"""Log-log power-law regression."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class ScalingFit:
    points: tuple          # ((x, y), ...) with x strictly increasing
    slope: float
    intercept: float       # of ln y against ln x
    stderr: float
    r_squared: float

    def predict(self, x):
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope

    def to_json(self) -> str:
        return json.dumps(dict(points=[list(p) for p in self.points], slope=self.slope,
                               intercept=self.intercept, stderr=self.stderr,
                               r_squared=self.r_squared))


def fit_scaling(points) -> ScalingFit:
    """Ordinary least squares of ``ln y`` on ``ln x``.

    Points are sorted by ``x``; repeated ``x`` values are rejected.
    """
    pts = sorted((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if not (np.all(x > 0) and np.all(y > 0)):
        raise ValueError("scaling fit needs positive x and y")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x values must be distinct")
    res = stats.linregress(np.log(x), np.log(y))
    stderr = float(res.stderr)
    if not np.isfinite(stderr):
        stderr = 0.0
    return ScalingFit(tuple(pts), float(res.slope), float(res.intercept),
                      max(stderr, 0.0), float(res.rvalue ** 2))

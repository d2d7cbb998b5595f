"""Experiment configuration: TOML on disk, with an equivalent JSON form.

Schema (all keys optional except ``kind``)::

    kind      regime-sweep | dense-front | dilute-check | strip | char-length | source-growth
    seed      run seed (u64)
    replicas  number of independent replicas (>= 1)
    out       output directory
    render    write PPM snapshots where the experiment supports it
    format    csv | json
    engine    exact-n | poisson-field
    n         particle count
    lam       time-per-particle ratio; with ``times`` it fixes n = t / lam per time
    times     list of times t
    mu        source rate
    N, ell    strip height and width
    p         list of occupation parameters (char-length)
    samples   Monte Carlo samples per size (char-length)
    c         dilute constant override (defaults to the calibrated value)
    scale     multiplier applied to n, times and N
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import tomli
import tomli_w

from . import constants

KINDS = ("regime-sweep", "dense-front", "dilute-check", "strip", "char-length", "source-growth")
ENGINES = ("exact-n", "poisson-field")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    replicas: int = 1
    out: str = "out"
    render: bool = False
    format: str = "csv"
    engine: str | None = None
    n: int | None = None
    lam: float | None = None
    times: list = field(default_factory=list)
    mu: float | None = None
    N: int | None = None
    ell: int | None = None
    p: list = field(default_factory=list)
    samples: int | None = None
    c: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not isinstance(self.replicas, int) or self.replicas < 1:
            raise ConfigError("replicas must be an integer >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a u64")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.engine is not None and self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if not self.scale > 0:
            raise ConfigError("scale must be positive")
        if any(t < 0 for t in self.times) or list(self.times) != sorted(self.times):
            raise ConfigError("times must be sorted and non-negative")
        need = {"regime-sweep": ("n", "times"), "dilute-check": ("n", "times"),
                "strip": ("N",), "char-length": ("p",), "source-growth": ("mu", "times"),
                "dense-front": ("times",)}[self.kind]
        for key in need:
            if getattr(self, key) in (None, []):
                raise ConfigError(f"{self.kind} needs {key!r}")
        if self.kind == "dense-front" and self.n is None and self.lam is None:
            raise ConfigError("dense-front needs n or lam")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError("lam must be positive")
        if self.mu is not None and not self.mu > 0:
            raise ConfigError("mu must be positive")
        if self.n is not None:
            if self.n < 1:
                raise ConfigError("n must be >= 1")
            if self.n * self.scale > constants.get("sampler", "max_particles") \
                    and (self.engine or "exact-n") == "exact-n" and self.kind != "dense-front":
                raise ConfigError("n exceeds the particle cap")
        if self.N is not None and round(self.N * self.scale) < 4:
            raise ConfigError("N must be >= 4")
        if self.ell is not None and self.ell < 1:
            raise ConfigError("ell must be >= 1")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if any(not 0 < q < 1 for q in self.p):
            raise ConfigError("p values must lie in (0, 1)")

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(tomli.loads(text))
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if path.suffix == ".json":
            return cls.from_json(text)
        return cls.from_toml(text)

    def save(self, path):
        path = Path(path)
        path.write_text(self.to_json() if path.suffix == ".json" else self.to_toml())

    def hash(self) -> str:
        """Hash of the canonical JSON form; independent of ``out`` and ``format``."""
        d = self.to_dict()
        d.pop("out", None)
        d.pop("format", None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

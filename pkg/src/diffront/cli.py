"""Command line entry point ``diffront``.

Exit codes: 0 success, 2 usage or configuration error, 3 resource cap exceeded.
Rows go to ``<out>/<kind>.<format>`` when ``--out`` is given (or set in the
config file), otherwise to standard output.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import constants
from .config import ConfigError, ExperimentConfig
from .errors import DomainError, FrontError, ResourceCapError
from .experiments import COLUMNS, default_threads, format_rows, run_experiment

log = logging.getLogger("diffront")

SUBCOMMANDS = {
    "sweep": "regime-sweep",
    "front": "dense-front",
    "dilute": "dilute-check",
    "strip": "strip",
    "charlen": "char-length",
    "source": "source-growth",
}

DEFAULTS = {
    "regime-sweep": dict(n=10_000, times=[10, 100, 500, 1000, 1463, 2500, 3977, 5000, 10_000]),
    "dense-front": dict(lam=0.25, times=[10_000]),
    "dilute-check": dict(n=10_000, times=[10_000]),
    "strip": dict(N=512),
    "char-length": dict(p=[0.52, 0.54, 0.56, 0.58, 0.60], samples=1000),
    "source-growth": dict(mu=50.0, times=[10, 100, 1000]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _global_flags():
    g = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g.add_argument("--config", help="TOML or JSON experiment config")
    g.add_argument("--seed", type=int, help="run seed (u64)")
    g.add_argument("--replicas", type=int, help="number of replicas")
    g.add_argument("--out", help="output directory")
    g.add_argument("--threads", type=int, help="worker processes (default $DIFFRONT_THREADS or 1)")
    g.add_argument("--format", choices=["csv", "json"], help="output format")
    g.add_argument("--scale", type=float, help="multiplier on n, times and N")
    g.add_argument("-v", "--verbose", action="store_true")
    return g


def build_parser():
    g = _global_flags()
    ap = _Parser(prog="diffront", description="Diffusion fronts and gradient percolation.",
                 parents=[g])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sp = sub.add_parser("sweep", parents=[g], help="phase and front along a time sweep")
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=int, nargs="+", dest="times")
    sp.add_argument("--render", action="store_true", help="write PPM snapshots")
    sp.add_argument("--c", type=float)
    sp = sub.add_parser("front", parents=[g], help="dense-phase front statistics")
    sp.add_argument("--n", type=int)
    sp.add_argument("--lam", type=float)
    sp.add_argument("--t", type=int, nargs="+", dest="times")
    sp.add_argument("--engine", choices=["poisson-field", "exact-n"])
    sp = sub.add_parser("dilute", parents=[g], help="cluster diameters in the dilute phase")
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=int, nargs="+", dest="times")
    sp.add_argument("--c", type=float)
    sp = sub.add_parser("strip", parents=[g], help="gradient percolation in a strip")
    sp.add_argument("--N", type=int)
    sp.add_argument("--ell", type=int)
    sp = sub.add_parser("charlen", parents=[g], help="characteristic length L(p)")
    sp.add_argument("--p", type=float, nargs="+")
    sp.add_argument("--samples", type=int)
    sp = sub.add_parser("source", parents=[g], help="fronts of the source model")
    sp.add_argument("--mu", type=float)
    sp.add_argument("--t", type=int, nargs="+", dest="times")
    sp = sub.add_parser("render", parents=[g], help="render a saved occupancy field as PPM")
    sp.add_argument("input", help="binary occupancy field file")
    sp.add_argument("--front", action="store_true", help="overlay the extracted front")
    sp.add_argument("--pixels", type=float, default=3.0, help="pixels per lattice unit")
    sub.add_parser("constants", parents=[g], help="print critical and calibrated constants")
    return ap


def constants_table() -> dict:
    lc, lm = constants.LAMBDA_C, constants.LAMBDA_MAX
    d = dict(lambda_c=lc, lambda_max=lm, ratio=lm / lc, inv_e=math.exp(-1.0),
             t_c_n10000=math.floor(lc * 1e4), t_max_n10000=math.floor(lm * 1e4))
    for sec, vals in constants.calibrated().items():
        for k, v in vals.items():
            d[f"{sec}.{k}"] = v
    return d


def _cmd_constants(args):
    d = constants_table()
    if args.format == "json":
        print(json.dumps(d, indent=1))
    else:
        for k, v in d.items():
            print(f"{k},{v!r}")
    return 0


def _cmd_render(args):
    from .geometry import extract_front
    from .render import render_snapshot
    from .sampler import OccupancyField, occupancy_to_percolation

    try:
        field = OccupancyField.load(args.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read field {args.input}: {exc}") from exc
    sample = occupancy_to_percolation(field)
    front = None
    if args.front:
        try:
            front = extract_front(sample, max(field.t, 1) ** 0.05)
        except FrontError as exc:
            log.warning("no front overlay: %s", exc)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = render_snapshot(sample, out / (Path(args.input).stem + ".ppm"), front=front,
                           pixels_per_unit=args.pixels)
    print(path)
    return 0


def _config_from_args(args, kind) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if cfg.kind != kind:
            raise ConfigError(f"config kind {cfg.kind!r} does not match subcommand ({kind})")
        d = cfg.to_dict()
        explicit_out = "out" in _read_keys(args.config)
    else:
        d = dict(kind=kind, **DEFAULTS[kind])
        explicit_out = False
    for key in ("seed", "replicas", "format", "scale", "n", "lam", "times", "engine", "N",
                "ell", "p", "samples", "mu", "c"):
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
            if key == "n" and kind == "dense-front":
                d.pop("lam", None)
            if key == "lam":
                d.pop("n", None)
    if getattr(args, "render", False):
        d["render"] = True
    if args.out is not None:
        d["out"] = args.out
        explicit_out = True
    cfg = ExperimentConfig.from_dict(d)
    cfg._explicit_out = explicit_out or cfg.render
    return cfg


def _read_keys(path):
    p = Path(path)
    if p.suffix == ".json":
        return set(json.loads(p.read_text()))
    import tomli
    return set(tomli.loads(p.read_text()))


def _cmd_experiment(args, kind):
    cfg = _config_from_args(args, kind)
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    rows = run_experiment(cfg, threads=threads)
    text = format_rows(rows, COLUMNS[kind], cfg.format,
                       meta=dict(config_hash=cfg.hash(), seed=cfg.seed, kind=kind,
                                 config=cfg.to_dict()))
    if cfg._explicit_out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{kind}.{cfg.format}"
        path.write_text(text)
        print(path)
    else:
        sys.stdout.write(text)
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for key in ("config", "seed", "replicas", "out", "threads", "format", "scale", "verbose"):
            if not hasattr(args, key):
                setattr(args, key, False if key == "verbose" else None)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        if args.command == "constants":
            return _cmd_constants(args)
        if args.command == "render":
            return _cmd_render(args)
        return _cmd_experiment(args, SUBCOMMANDS[args.command])
    except ResourceCapError as exc:
        print(f"diffront: resource cap: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, DomainError) as exc:
        print(f"diffront: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:   # --help
        return int(exc.code or 0)


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

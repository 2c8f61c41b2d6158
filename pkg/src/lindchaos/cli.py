"""Command-line entry point: ``lindchaos simulate|sweep|verify``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import BudgetError, ConfigError, InadmissibleError, LindchaosError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("lindchaos")


def _n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("n-list is empty")
    return values


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindchaos", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lindchaos {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one N and write trajectory_N<k>.csv and summary.json")
    sim.add_argument("--config", required=True, help="JSON config path, or the builtin name 'qubit'")
    sim.add_argument("--out", type=Path, help="output directory (overrides out_dir)")
    sim.add_argument("--record-stride", type=_positive_int, help="record every k integrator steps")
    sim.add_argument("--n", type=_positive_int, help="particle number (overrides n; default: first of n_list)")

    sw = sub.add_parser("sweep", help="simulate every N and fit log H_N(T) against log N")
    sw.add_argument("--config", required=True, help="JSON config path, or the builtin name 'qubit'")
    sw.add_argument("--n-list", type=_n_list, help="comma-separated particle numbers, e.g. 2,3,4")
    sw.add_argument("--out", type=Path, help="output directory (overrides out_dir)")
    sw.add_argument("--record-stride", type=_positive_int, help="record every k integrator steps")
    sw.add_argument("--workers", type=_positive_int, default=1, help="concurrent N runs (default 1)")

    ver = sub.add_parser("verify", help="run seeded invariant suites")
    ver.add_argument("--suite", default="all", choices=["all", "preliminaries", "dynamics", "meanfield", "bounds", "combinatorics"])
    ver.add_argument("--seed", type=int, default=0)
    return parser


def _load(args):
    cfg = load_config(args.config)
    if getattr(args, "record_stride", None):
        cfg = dataclasses.replace(cfg, record_stride=args.record_stride)
    return cfg


def _simulate(args) -> int:
    from .simulate import run_simulation

    cfg = _load(args)
    n = args.n or cfg.n or (cfg.n_list[0] if cfg.n_list else None)
    if n is None:
        raise ConfigError("no particle number: set n in the config or pass --n")
    res = run_simulation(cfg, n, out_dir=args.out)
    last = res.records[-1]
    print(f"N={n} t={last.t:.6g} h_n={last.h_n:.12g} -> {res.csv_path}")
    for v in res.violations:
        print(f"violation: {v}", file=sys.stderr)
    return EXIT_OK if res.ok else EXIT_VERIFY


def _sweep(args) -> int:
    from .simulate import run_sweep

    cfg = _load(args)
    sw = run_sweep(cfg, args.n_list, out_dir=args.out, workers=args.workers)
    for n, h in sw.final_entropy.items():
        print(f"N={n} h_n(T)={h:.12g}")
    slope = "null" if sw.slope is None else f"{sw.slope:.6f}"
    print(f"slope={slope}")
    for run in sw.runs.values():
        for v in run.violations:
            print(f"violation N={run.n}: {v}", file=sys.stderr)
    return EXIT_OK if sw.ok else EXIT_VERIFY


def _verify(args) -> int:
    from .verify import run_verify

    report = run_verify(args.suite, args.seed)
    sys.stdout.write(report.text())
    return EXIT_OK if report.passed else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    handler = {"simulate": _simulate, "sweep": _sweep, "verify": _verify}[args.command]
    try:
        return handler(args)
    except (ConfigError, InadmissibleError, BudgetError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, LindchaosError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

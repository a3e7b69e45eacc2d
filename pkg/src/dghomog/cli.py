"""``dghomog`` command line.

Exit codes: 0 success, 1 internal failure or failed verification,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import oracle
from .mcmc import ChainConfig, DEFAULT_REJECTION_CAP
from .panel import PanelError, discretize_capacity, load_panel, write_panel
from .simgen import SimConfig, simulate_panel
from .stats import STATISTICS
from .study import Cell, StudySpec, results_csv, results_table, run_study
from .testing import run_test

log = logging.getLogger("dghomog")

SEED_ENV = "DGHOMOG_SEED"


class InputError(Exception):
    pass


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return args.seed


def _write(path, data: bytes | str):
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_run(args) -> int:
    if not 0 < args.alpha < 1:
        raise InputError("--alpha must lie in (0, 1)")
    if args.K < 1:
        raise InputError("--K must be >= 1")
    try:
        with open(args.input, "rb") as fh:
            panel = load_panel(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from None
    config = ChainConfig(K=args.K, seed=_seed(args), rejection_cap=args.rejection_cap)
    result = run_test(panel, config, args.stat, args.alpha)
    _write(args.output, result.to_json() + "\n")
    return 0


def cmd_simulate(args) -> int:
    if not 0.0 <= args.lam <= 1.0:
        raise InputError("--lambda must lie in [0, 1]")
    if args.n < 1 or args.T < 2 or args.burn_in < 0:
        raise InputError("need --n >= 1, --T >= 2 and --burn-in >= 0")
    panel = simulate_panel(SimConfig(args.n, args.T, args.lam, args.burn_in, _seed(args)))
    _write(args.output, write_panel(panel))
    return 0


def _study_spec(args) -> StudySpec:
    if args.spec:
        try:
            return StudySpec.load(args.spec)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"bad study spec {args.spec}: {exc}") from None
    if not (args.n and args.T and args.lam):
        raise InputError("give --spec or all of --n, --T and --lambda")
    cells = tuple(Cell(n, T, lam) for n in args.n for T in args.T for lam in args.lam)
    return StudySpec(
        cells=cells, replications=args.replications, K=args.K, alpha=args.alpha,
        stats=tuple(args.stat), master_seed=_seed(args), burn_in=args.burn_in,
    )


def cmd_study(args) -> int:
    spec = _study_spec(args)
    start = time.perf_counter()
    results = run_study(spec, jobs=args.jobs)
    _write(args.output, results_csv(results))
    print(results_table(results), file=sys.stderr)
    print(f"total wall time {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    names = args.preset or sorted(oracle.PRESETS)
    kernel = oracle.corrupted_kernel if args.mutate else oracle.kernel_prob
    ok = True
    for name in names:
        report = oracle.run_report(
            name, oracle.preset(name), steps=args.steps, seed=_seed(args), kernel=kernel
        )
        print("\n".join(report.lines()))
        ok &= report.ok
    return 0 if ok else 1


def cmd_discretize(args) -> int:
    values = list(args.values)
    if args.input:
        with open(args.input) as fh:
            values += [float(line) for line in fh if line.strip()]
    bins = discretize_capacity(values, args.bin_width, args.num_bins)
    _write(None, "".join(f"{b}\n" for b in bins))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dghomog",
        description="Homogeneity tests for panels of dynamic discrete games.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="test a panel CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--stat", choices=sorted(STATISTICS), default="tau1")
    p.add_argument("--K", type=int, default=10_000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rejection-cap", type=int, default=DEFAULT_REJECTION_CAP)
    p.add_argument("--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="simulate a panel from the two-equilibrium design")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("study", help="rejection rates over simulation designs")
    p.add_argument("--spec", help="study JSON; overrides the inline flags")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--T", type=int, nargs="+")
    p.add_argument("--lambda", dest="lam", type=float, nargs="+")
    p.add_argument("--replications", type=int, default=100)
    p.add_argument("--K", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--stat", nargs="+", choices=sorted(STATISTICS), default=["tau1", "tau2"])
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--output", help="CSV path; stdout when omitted")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("verify", help="exact oracle checks on tiny presets")
    p.add_argument("--preset", action="append", choices=sorted(oracle.PRESETS))
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate", action="store_true", help="use a deliberately broken kernel")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("discretize", help="bin capacities into equal-width bins")
    p.add_argument("values", type=float, nargs="*")
    p.add_argument("--input", help="file with one value per line")
    p.add_argument("--bin-width", type=float, default=250.0)
    p.add_argument("--num-bins", type=int, default=50)
    p.set_defaults(func=cmd_discretize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, PanelError, ValueError) as exc:
        print(f"dghomog: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"dghomog: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

Subcommands: ``simulate``, ``validate``, ``formula``, ``oracle`` and
``sweep-report``.  Exit codes: 0 on success, 1 on usage or configuration
errors, 2 when a validation check fails.
"""
from __future__ import annotations

import argparse
import inspect
import json
import logging
import os
import sys
from pathlib import Path

from . import exact
from .acceptance import MarkovParams, Operator
from .exact import ExactChain, exact_hitting_time
from .experiments import (
    SWEEP_SCHEMA,
    ConfigError,
    SweepSpec,
    build_function,
    expand_cells,
    format_csv,
    read_csv,
    run_sweep,
    sweep_report,
)
from .stats import MODELS
from .validation import SUITES

log = logging.getLogger("mmahh_lab")

SEED_ENV = "MMAHH_LAB_SEED"

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

FORMULAS = {
    "pkh": exact.pkh_closed_form,
    "pkh_ow": exact.pkh_ow_symmetric,
    "p0n": exact.p0n_at,
    "drift_am": exact.drift_am,
    "drift_oi": exact.drift_oi,
    "drift_am_oi": exact.drift_am_oi,
    "am_success_bound": exact.am_phase_success_lower_bound,
    "potential": exact.potential_d,
    "gap_drift_bound": exact.gap_drift_lower_bound,
    "bound_jump_oi_am": exact.bound_jump_oi_am,
    "bound_seqopt": exact.bound_seqopt,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    if "," in text:
        return tuple(int(v) for v in text.split(",") if v)
    return float(text)


def _load_spec(args) -> SweepSpec:
    if args.config is None:
        raise UsageError("--config is required")
    data = json.loads(Path(args.config).read_text()) if Path(args.config).exists() else None
    if data is None:
        raise ConfigError(f"config file {args.config} not found")
    seed = os.environ.get(SEED_ENV)
    if seed is not None:
        try:
            data["seed"] = int(seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {seed!r}") from None
    if args.seed is not None:
        data["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        data["trials"] = args.trials
    return SweepSpec.from_dict(data)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    rows = run_sweep(spec, parallel=args.parallel)
    out = args.out or spec.out
    _write(format_csv(rows), out)
    if out:
        for row in rows:
            print(f"{row['family']} n={row['n']} {row['params']} {row['algo']}: "
                  f"{row['successes']}/{row['trials']} hits, mean_T={row['mean_T']!r}")
    return EXIT_OK


def cmd_validate(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    lines = []
    failed = 0
    for name in names:
        fn = SUITES[name]
        kwargs = {}
        if "seed" in inspect.signature(fn).parameters:
            kwargs["seed"] = _effective_seed(args)
        if name == "drifts" and args.mc:
            kwargs["mc_phases"] = args.mc
        for check in fn(**kwargs):
            lines.append(f"[{name}] {check.line()}")
            failed += not check.passed
    lines.append(f"{len(lines) - failed} passed, {failed} failed")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_FAIL if failed else EXIT_OK


def _effective_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, 0))


def cmd_formula(args) -> int:
    if args.name not in FORMULAS:
        raise UsageError(f"unknown formula {args.name!r}; choose from {sorted(FORMULAS)}")
    fn = FORMULAS[args.name]
    kwargs = {}
    for item in args.args:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        kwargs[key] = _number(value)
    if args.name == "potential" and "ones" in kwargs:
        kwargs["x_ones"] = kwargs.pop("ones")
    if "op" in kwargs:
        kwargs["op"] = Operator[str(kwargs["op"]).upper()]
    try:
        inspect.signature(fn).bind(**kwargs)
    except TypeError as exc:
        raise UsageError(f"{args.name}{inspect.signature(fn)}: {exc}") from None
    value = fn(**kwargs)
    result = value.to_dict() if hasattr(value, "to_dict") else {"value": value}
    _write(json.dumps({"formula": args.name, "args": {k: str(v) for k, v in kwargs.items()}, **result}) + "\n",
           args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = _load_spec(args)
    lines = ["family,n,params,algo,p,q,initial,exact_T"]
    for cell, reason in expand_cells(spec):
        if reason is not None:
            log.warning("skipping n=%d %s: %s", cell.n, cell.label, reason)
            continue
        f = build_function(cell.family, cell.n, cell.function_params, spec.seed)
        if cell.algo == "mahh":
            chain = ExactChain.mahh(f, cell.p)
        else:
            partner = Operator.OW if cell.algo == "mmahh_oi_ow" else Operator.AM
            chain = ExactChain.mmahh(f, MarkovParams(cell.p, cell.q, partner))
        start = spec.initial if spec.initial == "uniform" else (spec.initial, Operator.OI)
        if cell.algo == "mahh" and spec.initial != "uniform":
            start = spec.initial
        value = exact_hitting_time(chain, start)
        q = "" if cell.q is None else repr(cell.q)
        lines.append(f"{cell.family},{cell.n},{cell.label},{cell.algo},{cell.p!r},{q},{spec.initial},{value!r}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep_report(args) -> int:
    rows = read_csv(args.csv)
    grouping = tuple(g for g in args.group_by.split(",") if g)
    report = sweep_report(rows, grouping, args.model, args.min_success)
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mmahh-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--print-schema", action="store_true", help="print the sweep config JSON schema and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, config=True):
        if config:
            p.add_argument("--config", metavar="PATH", help="sweep config (JSON)")
        p.add_argument("--seed", type=int, help=f"base seed (overrides config and ${SEED_ENV})")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    p = sub.add_parser("simulate", help="run a parameter sweep and emit CSV")
    common(p)
    p.add_argument("--parallel", type=int, default=os.cpu_count() or 1, metavar="N", help="trial-level threads")
    p.add_argument("--trials", type=int, help="override trials per cell")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run a validation suite")
    p.add_argument("suite", choices=[*SUITES, "all"])
    common(p, config=False)
    p.add_argument("--mc", type=int, default=0, metavar="PHASES", help="Monte Carlo phases for the drifts suite")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("formula", help="evaluate a closed form, e.g. drift_am n=10 q=0.5 i=7")
    p.add_argument("name", help=f"one of {', '.join(sorted(FORMULAS))}")
    p.add_argument("args", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("oracle", help="exact expected runtimes for the cells of a sweep config")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep-report", help="fit exponents to a simulate CSV")
    p.add_argument("csv", help="CSV written by simulate")
    p.add_argument("--group-by", default="family,params,algo")
    p.add_argument("--model", choices=MODELS, default="pure-power")
    p.add_argument("--min-success", type=float, default=0.95)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_sweep_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.print_schema:
        print(json.dumps(SWEEP_SCHEMA, indent=2))
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError, KeyError) as exc:
        print(f"mmahh-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

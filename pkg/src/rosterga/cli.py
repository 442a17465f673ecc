"""Command line harness.

Subcommands: ``solve`` (one GA run, CSV row on stdout), ``generate``
(synthetic instance to a file), ``oracle`` (exhaustive optimum) and
``ablate`` (feature-ladder experiment to a CSV file).

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .engine import EngineConfig, KPoint, Mix, GradeBased, Static, Uniform
from .evaluation import PenaltyShape
from .fileformat import parse_instance, serialize_instance
from .generator import GenSpec, HourType, generate_instance
from .harness import (
    AblationSpec,
    DEFAULT_ALPHA,
    DEFAULT_V,
    OracleInfeasible,
    OracleOptimal,
    OracleTooLarge,
    experiment_csv,
    oracle_solve,
    parse_features,
    run_with_features,
)
from .model import InstanceError
from .reporting import CSV_COLUMNS, render_csv
from .subpops import CoopConfig


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the harness contract reserves 2 for
    # data errors, so remap.
    def error(self, message):
        raise _UsageError(message)


def _parse_crossover(text: str):
    if text == "1point":
        return KPoint(1)
    if text == "2point":
        return KPoint(2)
    if text.startswith("kpoint:"):
        return KPoint(int(text.split(":", 1)[1]))
    if text == "uniform":
        return Uniform()
    if text == "grade":
        return GradeBased()
    if text.startswith("mix"):
        frac = float(text.split(":", 1)[1]) if ":" in text else 0.5
        return Mix(frac)
    raise ValueError(f"unknown crossover {text!r}")


def _parse_hours(text: str) -> tuple[HourType, ...]:
    parts = [tok for tok in text.split(",") if tok]
    pairs = []
    weights = []
    for tok in parts:
        fields = tok.split(":")
        if len(fields) == 2:
            d, t = fields
            w = None
        elif len(fields) == 3:
            d, t, w = fields
        else:
            raise ValueError(f"hour type {tok!r} wants DAYS:NIGHTS[:WEIGHT]")
        pairs.append((int(d), int(t)))
        weights.append(None if w is None else float(w))
    if all(w is None for w in weights):
        weights = [1.0 / len(pairs)] * len(pairs)
    elif any(w is None for w in weights):
        raise ValueError("give weights for all hour types or none")
    return tuple(HourType(d, t, w) for (d, t), w in zip(pairs, weights))


def _engine_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--pop", type=int, default=None, help="population size")
    sub.add_argument("--gens", type=int, default=None, help="generations")
    sub.add_argument("--crossover", default=None,
                     help="1point|2point|kpoint:K|uniform|grade|mix:F")
    sub.add_argument("--mutation", type=float, default=None, help="mutation rate")
    sub.add_argument("--elite", type=float, default=None, help="elite fraction")
    sub.add_argument("--penalty", choices=("linear", "quadratic"), default=None)
    sub.add_argument("--weight", type=float, default=None,
                     help="static penalty weight (ignored with the dynamic feature)")
    sub.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                     help="dynamic weight severity")
    sub.add_argument("--vweight", type=float, default=DEFAULT_V,
                     help="dynamic weight once feasible")
    sub.add_argument("--pressure", type=float, default=None, help="selection pressure")
    sub.add_argument("--niche-size", type=int, default=None)
    sub.add_argument("--main-size", type=int, default=None)
    sub.add_argument("--migration-period", type=int, default=None)


def _num(x: float) -> int | float:
    return int(x) if float(x).is_integer() else float(x)


def _build_config(args, seed: int) -> EngineConfig:
    cfg = EngineConfig(seed=seed)
    if args.pop is not None:
        cfg = replace(cfg, pop_size=args.pop)
    if args.gens is not None:
        cfg = replace(cfg, generations=args.gens)
    if args.crossover is not None:
        cfg = replace(cfg, crossover=_parse_crossover(args.crossover))
    if args.mutation is not None:
        cfg = replace(cfg, mutation_rate=args.mutation)
    if args.elite is not None:
        cfg = replace(cfg, elite_fraction=args.elite)
    if args.penalty is not None:
        cfg = replace(cfg, penalty_shape=PenaltyShape(args.penalty))
    if args.weight is not None:
        cfg = replace(cfg, weight_mode=Static(_num(args.weight)))
    if args.pressure is not None:
        cfg = replace(cfg, selection_pressure=args.pressure)
    return cfg


def _build_coop(args) -> CoopConfig:
    coop = CoopConfig()
    if args.niche_size is not None:
        coop = replace(coop, niche_size=args.niche_size)
    if args.main_size is not None:
        coop = replace(coop, main_size=args.main_size)
    if args.migration_period is not None:
        coop = replace(coop, migration_period=args.migration_period)
    return coop


def _cmd_solve(args) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    features = parse_features(args.features)
    cfg = _build_config(args, args.seed)
    report = run_with_features(
        inst, cfg, features, coop=_build_coop(args),
        alpha=_num(args.alpha), v=_num(args.vweight))
    sys.stdout.write(render_csv([report.csv_row()]))
    return 0


def _cmd_generate(args) -> int:
    spec = GenSpec(
        n=args.nurses,
        p=args.grades,
        hour_types=_parse_hours(args.hours),
        tightness=args.tightness,
        pref_spread=args.prefspread,
        seed=args.seed,
        max_feasible=args.max_feasible,
    )
    inst = generate_instance(spec)
    Path(args.out).write_text(serialize_instance(inst))
    print(f"wrote {inst.name}: {inst.n} nurses, {inst.p} grades, {inst.m} patterns -> {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    result = oracle_solve(inst, limit=args.limit)
    if isinstance(result, OracleOptimal):
        assign = " ".join(str(j) for j in result.assign)
        print(f"OPTIMAL total={result.total} assign={assign}")
    elif isinstance(result, OracleInfeasible):
        print("INFEASIBLE")
    else:
        print(f"TOO_LARGE product={result.product} limit={args.limit}")
    return 0


def _cmd_ablate(args) -> int:
    spec = AblationSpec(
        instances_dir=args.instances,
        seeds=args.seeds,
        base_config=_build_config(args, seed=0),
        coop=_build_coop(args),
        alpha=_num(args.alpha),
        v=_num(args.vweight),
        timing=args.timing,
    )
    csv_text = experiment_csv(spec)
    Path(args.out).write_text(csv_text)
    print(f"wrote {csv_text.count(chr(10)) - 1} rows -> {args.out}")
    return 0


def _make_parser() -> _Parser:
    parser = _Parser(prog="rosterga", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    solve = subs.add_parser("solve", help="run the GA on one instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--seed", type=int, required=True)
    solve.add_argument("--features", default="",
                       help="comma list: " + ",".join(f for f in
                            ("dynamic", "subpops", "migration", "incentive",
                             "disincentive", "local_search", "swaps",
                             "special_swaps", "delta")))
    _engine_flags(solve)

    gen = subs.add_parser("generate", help="write a synthetic instance")
    gen.add_argument("--out", required=True)
    gen.add_argument("--nurses", type=int, required=True)
    gen.add_argument("--grades", type=int, required=True)
    gen.add_argument("--hours", default="4:3,3:3",
                     help="comma list of DAYS:NIGHTS[:WEIGHT]")
    gen.add_argument("--tightness", type=float, default=1.0)
    gen.add_argument("--prefspread", type=int, default=10)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--max-feasible", type=int, default=None,
                     help="subsample each feasible set to at most this size")

    oracle = subs.add_parser("oracle", help="exhaustively solve an instance")
    oracle.add_argument("--instance", required=True)
    oracle.add_argument("--limit", type=int, default=10_000_000)

    ablate = subs.add_parser("ablate", help="run the feature-ladder experiment")
    ablate.add_argument("--instances", required=True, help="directory of instance files")
    ablate.add_argument("--seeds", type=int, required=True)
    ablate.add_argument("--out", required=True)
    ablate.add_argument("--timing", action="store_true",
                        help="record wall times (output no longer byte-reproducible)")
    _engine_flags(ablate)

    return parser


_COMMANDS = {
    "solve": _cmd_solve,
    "generate": _cmd_generate,
    "oracle": _cmd_oracle,
    "ablate": _cmd_ablate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (InstanceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

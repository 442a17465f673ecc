"""Exhaustive oracle, feature toggles and the ablation experiment runner."""

from __future__ import annotations

import math
import itertools
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from .engine import (
    Dynamic,
    EngineConfig,
    RunOutcome,
    run,
    run_delta_phase,
)
from .evaluation import Evaluation, Schedule, evaluate
from .fileformat import parse_instance
from .improvement import IncentiveConfig
from .model import Instance, InstanceError
from .reporting import RunReport, aggregate_row, render_csv
from .subpops import CoopConfig, run_coop_outcome

# Individual feature switches; rungs of the ablation ladder stack them.
FEATURES = (
    "dynamic", "subpops", "migration", "incentive", "disincentive",
    "local_search", "swaps", "special_swaps", "delta",
)

DEFAULT_ALPHA = 4
DEFAULT_V = 1


# ---------------------------------------------------------------- oracle

@dataclass(frozen=True)
class OracleOptimal:
    total: int
    assign: Schedule
    evaluation: Evaluation


@dataclass(frozen=True)
class OracleInfeasible:
    pass


@dataclass(frozen=True)
class OracleTooLarge:
    product: int


OracleResult = OracleOptimal | OracleInfeasible | OracleTooLarge


def oracle_solve(inst: Instance, limit: int = 10_000_000) -> OracleResult:
    """Enumerate every schedule (if the count fits in ``limit``) and return
    the minimum-total feasible one, ties broken by lexicographically
    smallest assignment vector."""
    product = math.prod(len(nur.feasible) for nur in inst.nurses)
    if product > limit:
        return OracleTooLarge(product)
    ordered = [tuple(sorted(nur.feasible)) for nur in inst.nurses]
    best: tuple[Schedule, Evaluation] | None = None
    for assign in itertools.product(*ordered):
        ev = evaluate(inst, assign, 0)
        if ev.q == 0 and (best is None or ev.total < best[1].total):
            best = (assign, ev)
    if best is None:
        return OracleInfeasible()
    return OracleOptimal(best[1].total, best[0], best[1])


# ------------------------------------------------------------- features

def parse_features(text: str) -> frozenset[str]:
    if not text or text == "none":
        return frozenset()
    names = frozenset(tok.strip() for tok in text.split(",") if tok.strip())
    unknown = names - set(FEATURES)
    if unknown:
        raise ValueError(f"unknown features: {', '.join(sorted(unknown))}")
    return names


def apply_features(
    cfg: EngineConfig,
    features: frozenset[str],
    alpha: int | float = DEFAULT_ALPHA,
    v: int | float = DEFAULT_V,
) -> EngineConfig:
    """Resolve feature switches into a concrete engine configuration."""
    if "dynamic" in features and not isinstance(cfg.weight_mode, Dynamic):
        cfg = replace(cfg, weight_mode=Dynamic(alpha, v))
    incentives = IncentiveConfig(
        incentive="incentive" in features,
        disincentive="disincentive" in features,
        local_search="local_search" in features,
        swaps="swaps" in features,
        special_swaps="special_swaps" in features,
    )
    return replace(cfg, incentives=incentives)


def _merge_delta(main: RunOutcome, delta: RunOutcome) -> RunReport:
    a, b = main.report, delta.report
    if a.feasible and b.feasible:
        best_feasible = min(a.best_feasible_total, b.best_feasible_total)
    else:
        best_feasible = a.best_feasible_total if a.feasible else b.best_feasible_total
    if a.gen_to_feasible is not None:
        gen_to_feasible = a.gen_to_feasible
    elif b.gen_to_feasible is not None:
        gen_to_feasible = a.generations + b.gen_to_feasible
    else:
        gen_to_feasible = None
    return RunReport(
        instance=a.instance,
        seed=a.seed,
        features=a.features,
        feasible=a.feasible or b.feasible,
        best_feasible_total=best_feasible,
        gen_to_feasible=gen_to_feasible,
        best_total=min(a.best_total, b.best_total),
        generations=a.generations + b.generations,
        final_weight=b.final_weight,
        wall_ms=(a.wall_ms or 0.0) + (b.wall_ms or 0.0),
    )


def run_with_features(
    inst: Instance,
    cfg: EngineConfig,
    features: frozenset[str] = frozenset(),
    coop: CoopConfig | None = None,
    label: str | None = None,
    alpha: int | float = DEFAULT_ALPHA,
    v: int | float = DEFAULT_V,
) -> RunReport:
    """Run the solver with a feature set: cooperative sub-populations when
    ``subpops`` is enabled (migration switchable), otherwise the basic
    engine; an optional delta-coding restart follows the main run."""
    cfg = apply_features(cfg, features, alpha, v)
    label = label if label is not None else (",".join(sorted(features)) or "basic")
    if "subpops" in features:
        coop = coop or CoopConfig()
        if "migration" not in features:
            coop = replace(coop, migration_period=None)
        outcome = run_coop_outcome(inst, cfg, coop, features_label=label)
    else:
        outcome = run(inst, cfg, features_label=label)
    if "delta" in features:
        delta_rng = random.Random(f"{cfg.seed}:delta")
        delta_outcome = run_delta_phase(inst, cfg, outcome.best[0], delta_rng)
        return _merge_delta(outcome, delta_outcome)
    return outcome.report


# ---------------------------------------------------------------- ablate

@dataclass(frozen=True)
class Rung:
    label: str
    features: frozenset[str]


def _ladder() -> tuple[Rung, ...]:
    stack: list[str] = []

    def rung(label: str, *extra: str) -> Rung:
        stack.extend(extra)
        return Rung(label, frozenset(stack))

    return (
        rung("BASIC"),
        rung("+DYNAMIC_WEIGHTS", "dynamic"),
        rung("+SUBPOPS", "subpops", "migration"),
        rung("+INCENTIVES", "incentive", "disincentive", "local_search"),
        rung("+SWAPS", "swaps", "special_swaps"),
        rung("+DELTA", "delta"),
    )


DEFAULT_LADDER = _ladder()


@dataclass(frozen=True)
class AblationSpec:
    """A full ablation experiment: every instance in ``instances_dir`` is
    solved with ``seeds`` seeds at every rung of the cumulative feature
    ladder.  ``timing=False`` leaves wall_ms empty so the CSV is
    byte-identical across repeated invocations."""

    instances_dir: str | Path
    seeds: int
    ladder: tuple[Rung, ...] = DEFAULT_LADDER
    base_config: EngineConfig = field(default_factory=EngineConfig)
    coop: CoopConfig = field(default_factory=CoopConfig)
    alpha: int | float = DEFAULT_ALPHA
    v: int | float = DEFAULT_V
    timing: bool = False


def load_instance_dir(path: str | Path) -> list[Instance]:
    files = sorted(
        p for p in Path(path).iterdir()
        if p.is_file() and not p.name.startswith(".")
    )
    if not files:
        raise InstanceError(f"no instance files in {path}")
    instances = []
    for file in files:
        try:
            instances.append(parse_instance(file.read_text()))
        except InstanceError as exc:
            raise InstanceError(f"unreadable instance {file}: {exc}") from exc
    return instances


def run_experiment(spec: AblationSpec) -> list[RunReport]:
    """One report per (instance, seed, rung), deterministically ordered."""
    instances = load_instance_dir(spec.instances_dir)
    reports = []
    for inst in instances:
        for seed in range(1, spec.seeds + 1):
            for rung in spec.ladder:
                cfg = replace(spec.base_config, seed=seed)
                rep = run_with_features(
                    inst, cfg, rung.features, coop=spec.coop,
                    label=rung.label, alpha=spec.alpha, v=spec.v)
                if not spec.timing:
                    rep = replace(rep, wall_ms=None)
                reports.append(rep)
    return reports


def experiment_csv(spec: AblationSpec) -> str:
    """The full ablation CSV: per-run rows followed by one aggregate row per
    rung (feasibility rate, mean best feasible total over feasible runs)."""
    reports = run_experiment(spec)
    rows = [rep.csv_row() for rep in reports]
    for rung in spec.ladder:
        rows.append(aggregate_row(
            rung.label, [r for r in reports if r.features == rung.label]))
    return render_csv(rows)

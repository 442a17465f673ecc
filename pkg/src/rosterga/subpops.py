"""Cooperative grade-based sub-populations.

One niche per grade and per grade combination plus a larger main
population.  All niches hold complete schedules; they differ only in the
fitness they optimise: a niche scores the preference cost of its own
grades plus the weighted shortfall of its own demand rows.  The main
population scores the full original objective and is what a cooperative
run reports.

Singleton niches breed uniformly from themselves; every other niche mixes
uniform self-crossover with grade-based assembly whose donors come from
lower niches (one donor per block of a randomly chosen partition of the
niche's grade set).  Migration periodically pushes each niche's best
member to every niche with a strictly larger grade set, where it replaces
the worst member if it re-scores strictly better.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import ceil

from .engine import (
    Dynamic,
    EngineConfig,
    GradeBased,
    Mix,
    Population,
    RunOutcome,
    Uniform,
    _select_index,
    _Tracker,
    dynamic_weight,
    grade_boundaries,
    initial_weight,
    mutate,
    replace_elitist,
    crossover,
    _improve_top,
)
from .evaluation import (
    Evaluation,
    PenaltyShape,
    Schedule,
    _evaluate_filtered,
    evaluate,
    random_schedule,
    reweight,
)
from .improvement import Member, rank_members
from .model import Instance
from .reporting import RunReport


@dataclass(frozen=True)
class SubPopSpec:
    id: int
    grade_set: frozenset[int]
    size: int
    crossover: Uniform | Mix
    main: bool = False


@dataclass(frozen=True)
class CoopConfig:
    """Niche sizing and migration cadence (None = never migrate)."""

    niche_size: int = 100
    main_size: int = 300
    migration_period: int | None = 10


@dataclass
class PopulationSet:
    specs: tuple[SubPopSpec, ...]
    pops: list[Population]
    inst: Instance
    migration_period: int | None


def niche_grade_sets(p: int) -> list[frozenset[int]]:
    """Grade sets of the non-main niches: all singletons, then every larger
    combination up to the full set (7 niches for p = 3)."""
    sets = []
    for size in range(1, p + 1):
        for combo in itertools.combinations(range(1, p + 1), size):
            sets.append(frozenset(combo))
    return sets


def make_specs(p: int, coop: CoopConfig) -> tuple[SubPopSpec, ...]:
    specs = []
    for idx, gs in enumerate(niche_grade_sets(p), start=1):
        policy = Uniform() if len(gs) == 1 else Mix(0.5)
        specs.append(SubPopSpec(idx, gs, coop.niche_size, policy))
    specs.append(SubPopSpec(
        len(specs) + 1, frozenset(range(1, p + 1)), coop.main_size, Mix(0.5), main=True))
    return tuple(specs)


def evaluate_niche(
    spec: SubPopSpec,
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape,
) -> Evaluation:
    """Evaluation restricted to the niche's grades (the main population
    uses the unrestricted objective)."""
    grades = None if spec.main else spec.grade_set
    return _evaluate_filtered(inst, schedule, weight, shape, grades)


def sub_fitness(
    spec: SubPopSpec,
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape = PenaltyShape.LINEAR,
) -> int | float:
    """The niche's fitness value for a schedule."""
    return evaluate_niche(spec, inst, schedule, weight, shape).total


def partitions_for(spec: SubPopSpec, specs: tuple[SubPopSpec, ...]) -> list[tuple[int, ...]]:
    """Ways to split the niche's grade set into blocks, each block being the
    grade set of some lower-id niche; returned as tuples of donor niche ids.

    The main population may also take its full set in one piece from the
    full-set niche below it; a plain niche only sees strictly smaller ids.
    """
    donor_sets = {
        s.grade_set: s.id for s in specs if s.id < spec.id and not s.main
    }
    target = sorted(spec.grade_set)
    results: list[tuple[int, ...]] = []

    def split(remaining: frozenset[int], chosen: tuple[int, ...]) -> None:
        if not remaining:
            results.append(chosen)
            return
        lowest = min(remaining)
        rest = sorted(remaining - {lowest})
        for size in range(0, len(rest) + 1):
            for extra in itertools.combinations(rest, size):
                block = frozenset((lowest, *extra))
                donor = donor_sets.get(block)
                if donor is not None:
                    split(remaining - block, chosen + (donor,))

    split(frozenset(target), ())
    return sorted(results)


@dataclass(frozen=True)
class ParentPick:
    """Parent material for one offspring: either a plain pair from the
    niche itself, or a base member plus per-block donors from lower
    niches."""

    pair: tuple[Member, Member] | None = None
    base: Member | None = None
    blocks: tuple[tuple[int, Member], ...] = ()


def pick_parents(
    spec: SubPopSpec,
    popset: PopulationSet,
    mode: Uniform | GradeBased,
    rng: random.Random,
    pressure: float,
    partitions: list[tuple[int, ...]],
) -> ParentPick:
    own = popset.pops[spec.id - 1].members
    if isinstance(mode, Uniform) or not partitions:
        a = own[_select_index(len(own), pressure, rng)]
        b = own[_select_index(len(own), pressure, rng)]
        return ParentPick(pair=(a, b))
    base = own[_select_index(len(own), pressure, rng)]
    partition = partitions[rng.randrange(len(partitions))]
    blocks = []
    for niche_id in partition:
        donors = popset.pops[niche_id - 1].members
        blocks.append((niche_id, donors[_select_index(len(donors), pressure, rng)]))
    return ParentPick(base=base, blocks=tuple(blocks))


def _assemble(
    pick: ParentPick,
    specs: tuple[SubPopSpec, ...],
    grade0: tuple[int, ...],
) -> Schedule:
    """Grade-based assembly: start from the base member and overwrite each
    block's grades with the donor's genes."""
    genes = list(pick.base[0])
    for niche_id, donor in pick.blocks:
        grades = specs[niche_id - 1].grade_set
        donor_genes = donor[0]
        for i, g in enumerate(grade0):
            if g + 1 in grades:
                genes[i] = donor_genes[i]
    return tuple(genes)


def build_population_set(
    inst: Instance,
    cfg: EngineConfig,
    coop: CoopConfig,
    rng: random.Random,
) -> PopulationSet:
    specs = make_specs(inst.p, coop)
    weight = initial_weight(cfg.weight_mode)
    pops = []
    for spec in specs:
        members = []
        for _ in range(spec.size):
            s = random_schedule(inst, rng)
            members.append((s, evaluate_niche(spec, inst, s, weight, cfg.penalty_shape)))
        pops.append(Population(rank_members(members, cfg.incentives), 0, weight))
    return PopulationSet(specs, pops, inst, coop.migration_period)


def step_popset(
    popset: PopulationSet,
    cfg: EngineConfig,
    rng: random.Random,
    partitions: dict[int, list[tuple[int, ...]]],
) -> PopulationSet:
    """Advance every niche one generation.  All parent material is drawn
    from the pre-step state, so niches could step concurrently; they are
    processed in id order for determinism."""
    inst = popset.inst
    boundaries = grade_boundaries(inst)
    pressure = cfg.selection_pressure
    new_pops: list[Population] = []
    for spec in popset.specs:
        pop = popset.pops[spec.id - 1]
        members = pop.members
        weight = pop.current_weight
        if isinstance(cfg.weight_mode, Dynamic):
            new_weight = dynamic_weight(
                members[0][1].q, cfg.weight_mode.alpha, cfg.weight_mode.v)
            if new_weight != weight:
                weight = new_weight
                members = [(s, reweight(ev, weight, cfg.penalty_shape))
                           for s, ev in members]
        members = rank_members(members, cfg.incentives)

        size = len(members)
        need = size - ceil(cfg.elite_fraction * size)
        offspring: list[Member] = []
        for _ in range(need):
            if isinstance(spec.crossover, Mix) and rng.random() < spec.crossover.grade_fraction:
                pick = pick_parents(
                    spec, popset, GradeBased(), rng, pressure, partitions[spec.id])
                if pick.pair is not None:
                    a, b = pick.pair
                    child = crossover(a[0], b[0], Uniform(), boundaries, rng)
                else:
                    child = _assemble(pick, popset.specs, inst._tables.grade0)
            else:
                pick = pick_parents(spec, popset, Uniform(), rng, pressure, [])
                a, b = pick.pair
                child = crossover(a[0], b[0], Uniform(), boundaries, rng)
            child = mutate(child, inst, cfg.mutation_rate, rng)
            offspring.append(
                (child, evaluate_niche(spec, inst, child, weight, cfg.penalty_shape)))

        inc = cfg.incentives
        if spec.main and (inc.local_search or inc.swaps or inc.special_swaps):
            offspring = _improve_top(offspring, inst, weight, cfg.penalty_shape, inc)

        nxt = replace_elitist(
            Population(members, pop.generation, weight), offspring,
            cfg.elite_fraction, cfg.incentives)
        nxt.generation = pop.generation + 1
        new_pops.append(nxt)
    return PopulationSet(popset.specs, new_pops, inst, popset.migration_period)


def migrate(popset: PopulationSet, rng: random.Random,
            cfg: EngineConfig | None = None) -> PopulationSet:
    """Each niche offers a copy of its best member to every niche whose
    grade set is a strict superset; the receiver re-scores it under its own
    fitness and swaps out its worst member when the migrant is strictly
    better.  Population sizes never change."""
    shape = cfg.penalty_shape if cfg else PenaltyShape.LINEAR
    incentives = cfg.incentives if cfg else None
    pops = list(popset.pops)
    for sender in popset.specs:
        if sender.main:
            continue
        best_s = pops[sender.id - 1].members[0][0]
        for receiver in popset.specs:
            if not sender.grade_set < receiver.grade_set:
                continue
            rpop = pops[receiver.id - 1]
            ev = evaluate_niche(receiver, popset.inst, best_s, rpop.current_weight, shape)
            if ev.total < rpop.members[-1][1].total:
                members = rpop.members[:-1] + [(best_s, ev)]
                pops[receiver.id - 1] = Population(
                    rank_members(members, incentives), rpop.generation, rpop.current_weight)
    return PopulationSet(popset.specs, pops, popset.inst, popset.migration_period)


def run_coop_outcome(
    inst: Instance,
    cfg: EngineConfig,
    coop: CoopConfig | None = None,
    features_label: str = "subpops",
) -> RunOutcome:
    """Run the cooperative architecture; the report tracks the main
    population's best under the original objective."""
    coop = coop or CoopConfig()
    start = time.perf_counter()
    rng = random.Random(cfg.seed)
    popset = build_population_set(inst, cfg, coop, rng)
    partitions = {spec.id: partitions_for(spec, popset.specs) for spec in popset.specs}
    main_idx = len(popset.specs) - 1
    tracker = _Tracker()
    tracker.observe(popset.pops[main_idx])
    for gen in range(1, cfg.generations + 1):
        popset = step_popset(popset, cfg, rng, partitions)
        if popset.migration_period and gen % popset.migration_period == 0:
            popset = migrate(popset, rng, cfg)
        tracker.observe(popset.pops[main_idx])
    wall_ms = (time.perf_counter() - start) * 1000.0
    main_pop = popset.pops[main_idx]
    best = main_pop.members[0]
    bf = tracker.best_feasible
    report = RunReport(
        instance=inst.name,
        seed=cfg.seed,
        features=features_label,
        feasible=bf is not None,
        best_feasible_total=bf[1].total if bf else None,
        best_total=best[1].total,
        gen_to_feasible=tracker.gen_to_feasible,
        generations=main_pop.generation,
        final_weight=main_pop.current_weight,
        wall_ms=wall_ms,
    )
    return RunOutcome(report, main_pop, best, bf)


def run_coop(inst: Instance, cfg: EngineConfig, coop: CoopConfig | None = None) -> RunReport:
    """Cooperative run: 2^p - 1 grade niches plus a larger main population."""
    return run_coop_outcome(inst, cfg, coop).report

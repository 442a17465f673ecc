"""Single-population genetic algorithm.

Rank-based selection, k-point / uniform / grade-based crossover over the
pattern-index coding, single-gene mutation, elitist replacement, static or
dynamic penalty weights, and the delta-coding restart.  Every operator is
closed over the feasible sets, so constraint 1 (one pattern per nurse)
holds for every individual ever created.
"""

from __future__ import annotations

import bisect
import random
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import ceil

from .evaluation import (
    Evaluation,
    PenaltyShape,
    Schedule,
    evaluate,
    random_schedule,
    reweight,
)
from .improvement import (
    Balance,
    IncentiveConfig,
    Member,
    local_search_firstfit,
    rank_members,
    shift_swap_best,
    special_swap,
)
from .model import Instance
from .reporting import RunReport


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class KPoint:
    k: int


@dataclass(frozen=True)
class Uniform:
    pass


@dataclass(frozen=True)
class GradeBased:
    pass


@dataclass(frozen=True)
class Mix:
    """Grade-based crossover with probability ``grade_fraction``, uniform
    otherwise."""

    grade_fraction: float = 0.5


CrossoverMode = KPoint | Uniform | GradeBased | Mix


@dataclass(frozen=True)
class Static:
    value: int | float


@dataclass(frozen=True)
class Dynamic:
    """Penalty weight ``alpha * q`` while the best solution violates ``q``
    constraints, dropping to the low value ``v`` once it is feasible."""

    alpha: int | float
    v: int | float


WeightMode = Static | Dynamic


@dataclass(frozen=True)
class DeltaConfig:
    """Delta-coding restart: reseed inside a hypercube of ``radius``
    feasible-set positions around the best solution, with a reduced
    population and generation budget."""

    radius: int = 1
    pop_size: int | None = None
    generations: int | None = None


@dataclass(frozen=True)
class EngineConfig:
    pop_size: int = 1000
    generations: int = 200
    crossover: CrossoverMode = Uniform()
    mutation_rate: float = 0.05
    elite_fraction: float = 0.1
    penalty_shape: PenaltyShape = PenaltyShape.LINEAR
    weight_mode: WeightMode = Static(10)
    selection_pressure: float = 1.8
    seed: int = 0
    incentives: IncentiveConfig = field(default_factory=IncentiveConfig)
    delta: DeltaConfig | None = None

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if not 0.0 <= self.elite_fraction < 1.0:
            raise ValueError("elite_fraction must lie in [0, 1)")
        if not 1.0 <= self.selection_pressure <= 2.0:
            raise ValueError("selection_pressure must lie in [1, 2]")
        if isinstance(self.weight_mode, Dynamic):
            if self.weight_mode.alpha <= 0 or self.weight_mode.v <= 0:
                raise ValueError("dynamic weight needs alpha > 0 and v > 0")


@dataclass
class Population:
    """Members sorted best-first by ranking score; constant size."""

    members: list[Member]
    generation: int
    current_weight: int | float


@dataclass(frozen=True)
class GradeBoundaries:
    """Nurse order sorted by grade and the cut positions between grades."""

    order: tuple[int, ...]
    cuts: tuple[int, ...]

    @property
    def segments(self) -> tuple[tuple[int, ...], ...]:
        bounds = (0, *self.cuts, len(self.order))
        return tuple(self.order[a:b] for a, b in zip(bounds, bounds[1:]))


def grade_boundaries(inst: Instance) -> GradeBoundaries:
    order = tuple(sorted(range(inst.n), key=lambda i: (inst.nurses[i].grade, i)))
    cuts = tuple(
        pos for pos in range(1, inst.n)
        if inst.nurses[order[pos]].grade != inst.nurses[order[pos - 1]].grade
    )
    return GradeBoundaries(order, cuts)


# ------------------------------------------------------------- operators

@lru_cache(maxsize=None)
def _rank_cdf(size: int, pressure: float) -> tuple[float, ...]:
    # Linear ranking: P(rank r) = (1/N) * (pressure - (2*pressure-2)*(r-1)/(N-1))
    step = (2 * pressure - 2) / (size - 1)
    acc = 0.0
    cdf = []
    for r in range(size):
        acc += (pressure - step * r) / size
        cdf.append(acc)
    return tuple(cdf)


def _select_index(size: int, pressure: float, rng: random.Random) -> int:
    if size == 1:
        return 0
    cdf = _rank_cdf(size, pressure)
    return min(bisect.bisect_right(cdf, rng.random()), size - 1)


def rank_select(pop: Population, pressure: float, rng: random.Random) -> Member:
    """Pick a member by linear ranking; rank 1 (the best) is the likeliest,
    with ``pressure`` in [1, 2] controlling the slope."""
    if not pop.members:
        raise ValueError("cannot select from an empty population")
    return pop.members[_select_index(len(pop.members), pressure, rng)]


def crossover(
    p1: Schedule,
    p2: Schedule,
    mode: CrossoverMode,
    boundaries: GradeBoundaries,
    rng: random.Random,
) -> Schedule:
    """Recombine two parent schedules; genes are whole pattern assignments,
    so any child is again a valid schedule."""
    n = len(p1)
    if isinstance(mode, Mix):
        mode = GradeBased() if rng.random() < mode.grade_fraction else Uniform()
    if isinstance(mode, KPoint):
        if mode.k >= n:
            raise ValueError(f"{mode.k}-point crossover needs at least {mode.k + 1} genes")
        cuts = sorted(rng.sample(range(1, n), mode.k))
        child = []
        source = (p1, p2)
        for idx, (a, b) in enumerate(zip((0, *cuts), (*cuts, n))):
            child.extend(source[idx % 2][a:b])
        return tuple(child)
    if isinstance(mode, Uniform):
        return tuple(a if rng.random() < 0.5 else b for a, b in zip(p1, p2))
    if isinstance(mode, GradeBased):
        genes = list(p1)
        for segment in boundaries.segments:
            if rng.random() < 0.5:
                continue
            for i in segment:
                genes[i] = p2[i]
        return tuple(genes)
    raise TypeError(f"unknown crossover mode {mode!r}")


def mutate(schedule: Schedule, inst: Instance, rate: float, rng: random.Random) -> Schedule:
    """With probability ``rate``, redraw one uniformly chosen nurse's gene
    from her feasible set (the redraw may repeat the old value)."""
    if rate <= 0.0 or rng.random() >= rate:
        return schedule
    i = rng.randrange(len(schedule))
    j = rng.choice(inst.nurses[i].feasible)
    return schedule[:i] + (j,) + schedule[i + 1:]


def dynamic_weight(q_best: int, alpha: int | float, v: int | float) -> int | float:
    """Penalty weight for the next generation given the violated-constraint
    count of the current best solution."""
    return alpha * q_best if q_best > 0 else v


def replace_elitist(
    old: Population,
    offspring: list[Member],
    elite_fraction: float,
    incentives: IncentiveConfig | None = None,
) -> Population:
    """Keep the top ceil(elite_fraction * N) old members verbatim and fill
    the rest with the best offspring; the result is re-sorted."""
    size = len(old.members)
    elites = ceil(elite_fraction * size)
    need = size - elites
    if len(offspring) < need:
        raise ValueError(f"need {need} offspring to refill, got {len(offspring)}")
    survivors = old.members[:elites]
    brood = rank_members(offspring, incentives)[:need]
    members = rank_members(survivors + brood, incentives)
    return Population(members, old.generation, old.current_weight)


def _improve_top(
    offspring: list[Member],
    inst: Instance,
    weight: int | float,
    shape: PenaltyShape,
    inc: IncentiveConfig,
) -> list[Member]:
    """Apply the enabled improvement hooks to the generation's top
    offspring (local search only when it classifies as balanced)."""
    offspring = rank_members(offspring, inc)
    schedule, ev = offspring[0]
    improved = schedule
    if inc.local_search and ev.balance is Balance.BALANCED:
        improved = local_search_firstfit(inst, improved, weight, shape)
    if inc.swaps:
        improved = shift_swap_best(inst, improved)
    if inc.special_swaps:
        improved = special_swap(inst, improved, weight, shape)
    if improved != schedule:
        offspring[0] = (improved, evaluate(inst, improved, weight, shape))
    return offspring


def step_generation(
    pop: Population,
    inst: Instance,
    cfg: EngineConfig,
    rng: random.Random,
) -> Population:
    """Advance one generation: refresh the dynamic weight from the current
    best member, re-rank, breed, improve the top offspring, then replace
    with elitism."""
    members = pop.members
    weight = pop.current_weight
    if isinstance(cfg.weight_mode, Dynamic):
        new_weight = dynamic_weight(
            members[0][1].q, cfg.weight_mode.alpha, cfg.weight_mode.v)
        if new_weight != weight:
            weight = new_weight
            members = [(s, reweight(ev, weight, cfg.penalty_shape)) for s, ev in members]
    members = rank_members(members, cfg.incentives)

    boundaries = grade_boundaries(inst)
    size = len(members)
    need = size - ceil(cfg.elite_fraction * size)
    pressure = cfg.selection_pressure
    offspring: list[Member] = []
    for _ in range(need):
        parent1 = members[_select_index(size, pressure, rng)][0]
        parent2 = members[_select_index(size, pressure, rng)][0]
        child = crossover(parent1, parent2, cfg.crossover, boundaries, rng)
        child = mutate(child, inst, cfg.mutation_rate, rng)
        offspring.append((child, evaluate(inst, child, weight, cfg.penalty_shape)))

    inc = cfg.incentives
    if inc.local_search or inc.swaps or inc.special_swaps:
        offspring = _improve_top(offspring, inst, weight, cfg.penalty_shape, inc)

    nxt = replace_elitist(
        Population(members, pop.generation, weight), offspring,
        cfg.elite_fraction, cfg.incentives)
    nxt.generation = pop.generation + 1
    return nxt


# ------------------------------------------------------------------ runs

@dataclass
class RunOutcome:
    report: RunReport
    population: Population
    best: Member
    best_feasible: Member | None


class _Tracker:
    def __init__(self):
        self.best_feasible: Member | None = None
        self.gen_to_feasible: int | None = None

    def observe(self, pop: Population) -> None:
        for member in pop.members:
            ev = member[1]
            if ev.q == 0:
                if self.gen_to_feasible is None:
                    self.gen_to_feasible = pop.generation
                if self.best_feasible is None or ev.total < self.best_feasible[1].total:
                    self.best_feasible = member


def initial_weight(mode: WeightMode) -> int | float:
    # A dynamic run starts at the low value; the first step recomputes it
    # from the initial best member before any breeding happens.
    return mode.value if isinstance(mode, Static) else mode.v


def seed_population(
    inst: Instance,
    cfg: EngineConfig,
    rng: random.Random,
    size: int | None = None,
) -> Population:
    weight = initial_weight(cfg.weight_mode)
    members = []
    for _ in range(size or cfg.pop_size):
        s = random_schedule(inst, rng)
        members.append((s, evaluate(inst, s, weight, cfg.penalty_shape)))
    return Population(rank_members(members, cfg.incentives), 0, weight)


def _evolve(
    pop: Population,
    inst: Instance,
    cfg: EngineConfig,
    rng: random.Random,
    generations: int,
    tracker: _Tracker,
) -> Population:
    tracker.observe(pop)
    for _ in range(generations):
        pop = step_generation(pop, inst, cfg, rng)
        tracker.observe(pop)
    return pop


def run(inst: Instance, cfg: EngineConfig, features_label: str = "basic") -> RunOutcome:
    """Run the basic GA from a random population and return the outcome
    (report plus final population and best members)."""
    start = time.perf_counter()
    rng = random.Random(cfg.seed)
    tracker = _Tracker()
    pop = seed_population(inst, cfg, rng)
    pop = _evolve(pop, inst, cfg, rng, cfg.generations, tracker)
    wall_ms = (time.perf_counter() - start) * 1000.0
    best = pop.members[0]
    bf = tracker.best_feasible
    report = RunReport(
        instance=inst.name,
        seed=cfg.seed,
        features=features_label,
        feasible=bf is not None,
        best_feasible_total=bf[1].total if bf else None,
        best_total=best[1].total,
        gen_to_feasible=tracker.gen_to_feasible,
        generations=pop.generation,
        final_weight=pop.current_weight,
        wall_ms=wall_ms,
    )
    return RunOutcome(report, pop, best, bf)


def run_basic(inst: Instance, cfg: EngineConfig) -> RunReport:
    """Run the basic GA and report feasibility, best totals, the first
    feasible generation, the final weight and the wall time."""
    return run(inst, cfg).report


def delta_restart(
    inst: Instance,
    best: Schedule,
    radius: int,
    pop_size: int,
    rng: random.Random,
    weight: int | float,
    shape: PenaltyShape = PenaltyShape.LINEAR,
) -> Population:
    """Seed a fresh population inside the hypercube around ``best``: each
    gene is drawn uniformly from the feasible-set positions within
    ``radius`` of the position of the corresponding best gene."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    members = []
    positions = [nur.feasible.index(best[i]) for i, nur in enumerate(inst.nurses)]
    for _ in range(pop_size):
        genes = []
        for i, nur in enumerate(inst.nurses):
            lo = max(0, positions[i] - radius)
            hi = min(len(nur.feasible) - 1, positions[i] + radius)
            genes.append(nur.feasible[rng.randint(lo, hi)])
        s = tuple(genes)
        members.append((s, evaluate(inst, s, weight, shape)))
    return Population(rank_members(members), 0, weight)


def run_delta_phase(
    inst: Instance,
    cfg: EngineConfig,
    best: Schedule,
    rng: random.Random,
) -> RunOutcome:
    """Restart around ``best`` per ``cfg.delta`` and evolve the reduced
    population; the caller merges this report with the main phase's."""
    delta = cfg.delta or DeltaConfig()
    pop_size = delta.pop_size or max(4, cfg.pop_size // 2)
    generations = delta.generations or max(1, cfg.generations // 2)
    dcfg = replace(cfg, pop_size=pop_size, generations=generations)
    tracker = _Tracker()
    start = time.perf_counter()
    pop = delta_restart(
        inst, best, delta.radius, pop_size, rng,
        initial_weight(cfg.weight_mode), cfg.penalty_shape)
    pop = _evolve(pop, inst, dcfg, rng, generations, tracker)
    wall_ms = (time.perf_counter() - start) * 1000.0
    best_member = pop.members[0]
    bf = tracker.best_feasible
    report = RunReport(
        instance=inst.name,
        seed=cfg.seed,
        features="delta",
        feasible=bf is not None,
        best_feasible_total=bf[1].total if bf else None,
        best_total=best_member[1].total,
        gen_to_feasible=tracker.gen_to_feasible,
        generations=generations,
        final_weight=pop.current_weight,
        wall_ms=wall_ms,
    )
    return RunOutcome(report, pop, best_member, bf)

"""Synthetic instance generator.

Builds instances at the real-world dimensions (tens of nurses, a few
grade bands, a pattern universe of pure day / pure night weekly
combinations) with a demand table derived from a hidden reference
assignment, so a feasible solution is guaranteed to exist whenever
``tightness <= 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace

from .evaluation import Schedule, coverage_of
from .model import NUM_SLOTS, Instance, Nurse, ShiftPattern


@dataclass(frozen=True)
class HourType:
    """A weekly contract: work ``days`` day shifts or ``nights`` night
    shifts, drawn with probability ``weight``."""

    days: int
    nights: int
    weight: float


@dataclass(frozen=True)
class GenSpec:
    """Parameters for :func:`generate_instance`.

    ``tightness`` scales the hidden reference coverage into the demand
    table; at 1.0 the demand equals the reference coverage exactly.
    ``max_feasible`` optionally subsamples each nurse's feasible set (the
    reference pattern always survives), which keeps tiny instances small
    enough for exhaustive solving.
    """

    n: int
    p: int
    hour_types: tuple[HourType, ...]
    tightness: float
    pref_spread: int
    seed: int
    max_feasible: int | None = None


def even_hours(pairs: list[tuple[int, int]]) -> tuple[HourType, ...]:
    """Equal-weight hour types from (days, nights) pairs."""
    w = 1.0 / len(pairs)
    return tuple(HourType(d, t, w) for d, t in pairs)


def _check_spec(spec: GenSpec) -> None:
    if spec.n < 1:
        raise ValueError("need at least one nurse")
    if spec.p < 1:
        raise ValueError("need at least one grade")
    if not spec.hour_types:
        raise ValueError("need at least one hour type")
    for ht in spec.hour_types:
        if not (1 <= ht.days <= 7 and 1 <= ht.nights <= 7):
            raise ValueError(f"hour type {ht.days}/{ht.nights} outside 1..7")
    if abs(sum(ht.weight for ht in spec.hour_types) - 1.0) > 1e-9:
        raise ValueError("hour type weights must sum to 1")
    if not 0.0 <= spec.tightness <= 1.0:
        raise ValueError("tightness must lie in [0, 1]")
    if spec.pref_spread < 0:
        raise ValueError("pref_spread must be >= 0")
    if spec.max_feasible is not None and spec.max_feasible < 1:
        raise ValueError("max_feasible must be >= 1")


def _pattern_universe(spec: GenSpec) -> list[ShiftPattern]:
    """All pure day-shift combinations of each distinct contract day count,
    then all pure night-shift combinations of each night count."""
    patterns: list[ShiftPattern] = []
    day_sizes = sorted({ht.days for ht in spec.hour_types})
    night_sizes = sorted({ht.nights for ht in spec.hour_types})
    pid = 1
    for size in day_sizes:
        for combo in itertools.combinations(range(7), size):
            cover = [0] * NUM_SLOTS
            for k0 in combo:
                cover[k0] = 1
            patterns.append(ShiftPattern(pid, tuple(cover)))
            pid += 1
    for size in night_sizes:
        for combo in itertools.combinations(range(7, NUM_SLOTS), size):
            cover = [0] * NUM_SLOTS
            for k0 in combo:
                cover[k0] = 1
            patterns.append(ShiftPattern(pid, tuple(cover)))
            pid += 1
    return patterns


def _weighted_choice(rng: random.Random, options: tuple[HourType, ...]) -> HourType:
    u = rng.random()
    acc = 0.0
    for ht in options:
        acc += ht.weight
        if u < acc:
            return ht
    return options[-1]


def generate_with_reference(spec: GenSpec) -> tuple[Instance, Schedule]:
    """Generate an instance plus the hidden reference assignment its demand
    table was derived from (feasible by construction for tightness <= 1)."""
    _check_spec(spec)
    rng = random.Random(spec.seed)
    patterns = _pattern_universe(spec)

    day_ids: dict[int, list[int]] = {}
    night_ids: dict[int, list[int]] = {}
    for pat in patterns:
        if pat.night_count == 0:
            day_ids.setdefault(pat.day_count, []).append(pat.id)
        else:
            night_ids.setdefault(pat.night_count, []).append(pat.id)

    grades = [i + 1 for i in range(min(spec.n, spec.p))]
    grades += [rng.randint(1, spec.p) for _ in range(spec.n - len(grades))]

    contracts = [_weighted_choice(rng, spec.hour_types) for _ in range(spec.n)]

    nurses: list[Nurse] = []
    reference: list[int] = []
    for i in range(spec.n):
        ht = contracts[i]
        pool = day_ids[ht.days] + night_ids[ht.nights]
        if spec.max_feasible is not None and len(pool) > spec.max_feasible:
            pool = sorted(rng.sample(pool, spec.max_feasible))
        nurses.append(Nurse(i + 1, grades[i], ht.days, ht.nights, tuple(pool)))
        reference.append(rng.choice(pool))

    pref = {
        (nur.id, j): rng.randint(0, spec.pref_spread)
        for nur in nurses
        for j in nur.feasible
    }

    zero_demand = tuple(tuple(0 for _ in range(spec.p)) for _ in range(NUM_SLOTS))
    inst = Instance(
        name=f"synth-n{spec.n}-p{spec.p}-s{spec.seed}",
        n=spec.n, p=spec.p, m=len(patterns),
        nurses=tuple(nurses), patterns=tuple(patterns),
        pref=pref, demand=zero_demand,
    )
    ref = tuple(reference)
    cov = coverage_of(inst, ref)
    demand = tuple(
        tuple(round(spec.tightness * cov.cover(k, s)) for s in range(1, spec.p + 1))
        for k in range(1, NUM_SLOTS + 1)
    )
    return replace(inst, demand=demand), ref


def generate_instance(spec: GenSpec) -> Instance:
    """Generate a synthetic instance; deterministic in ``spec.seed``."""
    return generate_with_reference(spec)[0]

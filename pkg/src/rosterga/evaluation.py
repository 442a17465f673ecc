"""Schedule evaluation against the rostering model.

A schedule assigns every nurse exactly one pattern from her feasible set
(a tuple of pattern ids, one per nurse).  Evaluation decomposes into the
preference cost, the per-(slot, grade) coverage shortfalls, a weighted
shortfall penalty, the violated-constraint count and a day/night balance
classification.  Overstaffing is never penalised.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .model import NUM_SLOTS, Instance

Schedule = tuple[int, ...]


class PenaltyShape(Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


class Balance(Enum):
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"
    NEITHER = "neither"


@dataclass(frozen=True)
class CoverageTable:
    """Per-slot, per-grade nurse counts: ``rows[k-1][s-1]`` counts nurses of
    grade ``s`` or more senior working slot ``k``."""

    rows: tuple[tuple[int, ...], ...]

    def cover(self, k: int, s: int) -> int:
        return self.rows[k - 1][s - 1]


@dataclass(frozen=True)
class Evaluation:
    """Decomposed fitness of one schedule at a given penalty weight.

    ``shortfalls`` maps (slot, grade) to the uncovered demand, holding only
    the positive entries; ``q`` is the number of violated (slot, grade)
    cells and ``total = pref_cost + penalty``.
    """

    pref_cost: int
    shortfalls: dict[tuple[int, int], int]
    q: int
    penalty: int | float
    total: int | float
    feasible: bool
    balance: Balance


def _cover_flat(inst: Instance, schedule: Schedule) -> list[int]:
    """Coverage counts as a flat 14*p list indexed ``slot0 * p + grade0``."""
    t = inst._tables
    cover = [0] * (NUM_SLOTS * inst.p)
    grade0 = t.grade0
    cover_idx = t.cover_idx
    for i, j in enumerate(schedule):
        for idx in cover_idx[j - 1][grade0[i]]:
            cover[idx] += 1
    return cover


def _shortfall_units(shortfalls: Iterable[int], shape: PenaltyShape) -> int:
    if shape is PenaltyShape.LINEAR:
        return sum(shortfalls)
    return sum(v * v for v in shortfalls)


def balance_from_surplus(surplus: Sequence[int]) -> Balance:
    """Classify a 14-slot surplus vector (coverage minus demand, slots 1-7
    days and 8-14 nights, over the all-nurses grade row).

    Balanced means a surplus and a shortage coexist within the days or
    within the nights; unbalanced means a day surplus meets a night
    shortage or vice versa.  A vector showing both phenomena (or neither)
    classifies as NEITHER.
    """
    day_pos = any(v > 0 for v in surplus[:7])
    day_neg = any(v < 0 for v in surplus[:7])
    night_pos = any(v > 0 for v in surplus[7:])
    night_neg = any(v < 0 for v in surplus[7:])
    balanced = (day_pos and day_neg) or (night_pos and night_neg)
    unbalanced = (day_pos and night_neg) or (day_neg and night_pos)
    if balanced and not unbalanced:
        return Balance.BALANCED
    if unbalanced and not balanced:
        return Balance.UNBALANCED
    return Balance.NEITHER


def _balance_of(inst: Instance, cover: list[int]) -> Balance:
    p = inst.p
    row = inst._tables.all_grades_row
    surplus = tuple(cover[k0 * p + p - 1] - row[k0] for k0 in range(NUM_SLOTS))
    return balance_from_surplus(surplus)


def coverage_of(inst: Instance, schedule: Schedule) -> CoverageTable:
    """Count, per slot and grade row, the qualified nurses on duty."""
    cover = _cover_flat(inst, schedule)
    p = inst.p
    rows = tuple(tuple(cover[k0 * p: (k0 + 1) * p]) for k0 in range(NUM_SLOTS))
    return CoverageTable(rows)


def _evaluate_filtered(
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape,
    grades: frozenset[int] | None,
) -> Evaluation:
    """Evaluate, optionally restricting the preference term to nurses whose
    grade is in ``grades`` and the shortfall term to demand rows in it.

    ``grades=None`` is the full objective.  The balance class is always
    computed from the all-nurses coverage row.
    """
    t = inst._tables
    p = inst.p
    cover = _cover_flat(inst, schedule)

    pref = 0
    prefs = t.pref_by_nurse
    if grades is None:
        for i, j in enumerate(schedule):
            pref += prefs[i][j]
    else:
        grade0 = t.grade0
        for i, j in enumerate(schedule):
            if grade0[i] + 1 in grades:
                pref += prefs[i][j]

    shortfalls: dict[tuple[int, int], int] = {}
    for k0, s0, req in t.demand_cells:
        if grades is not None and s0 + 1 not in grades:
            continue
        miss = req - cover[k0 * p + s0]
        if miss > 0:
            shortfalls[(k0 + 1, s0 + 1)] = miss

    q = len(shortfalls)
    units = _shortfall_units(shortfalls.values(), shape)
    penalty = weight * units if units else 0
    total = pref + penalty
    return Evaluation(
        pref_cost=pref,
        shortfalls=shortfalls,
        q=q,
        penalty=penalty,
        total=total,
        feasible=q == 0,
        balance=_balance_of(inst, cover),
    )


def evaluate(
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape = PenaltyShape.LINEAR,
) -> Evaluation:
    """Evaluate a schedule: preference cost plus ``weight`` times the summed
    coverage shortfall (squared per cell for the quadratic shape)."""
    return _evaluate_filtered(inst, schedule, weight, shape, None)


def reweight(ev: Evaluation, weight: int | float, shape: PenaltyShape) -> Evaluation:
    """Re-derive penalty and total at a new weight without re-counting
    coverage; everything else in the evaluation is weight-independent."""
    units = _shortfall_units(ev.shortfalls.values(), shape)
    penalty = weight * units if units else 0
    return Evaluation(
        pref_cost=ev.pref_cost,
        shortfalls=ev.shortfalls,
        q=ev.q,
        penalty=penalty,
        total=ev.pref_cost + penalty,
        feasible=ev.feasible,
        balance=ev.balance,
    )


def classify_balance(inst: Instance, schedule: Schedule) -> Balance:
    """Day/night balance class of a schedule (all-nurses coverage row)."""
    return _balance_of(inst, _cover_flat(inst, schedule))


def random_schedule(inst: Instance, rng: random.Random) -> Schedule:
    """Draw each nurse's pattern uniformly from her feasible set."""
    return tuple(rng.choice(nur.feasible) for nur in inst.nurses)


def validate_schedule(inst: Instance, schedule: Schedule) -> None:
    """Raise ValueError unless the schedule is well-formed for the instance."""
    if len(schedule) != inst.n:
        raise ValueError(f"schedule has {len(schedule)} genes, instance has {inst.n} nurses")
    feas = inst._tables.feasible_sets
    for i, j in enumerate(schedule):
        if j not in feas[i]:
            raise ValueError(f"nurse {i + 1} assigned pattern {j} outside her feasible set")

"""Fitness shaping and local improvement operators.

Balance incentives/disincentives shape only the ranking used for
selection; reported objective values stay unshaped.  The local search and
the swap operators are pure schedule transformations intended for the top
solution of a generation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evaluation import (
    Balance,
    Evaluation,
    PenaltyShape,
    Schedule,
    evaluate,
    _cover_flat,
)
from .model import Instance, PatternKind


@dataclass(frozen=True)
class IncentiveConfig:
    incentive: bool = False
    disincentive: bool = False
    local_search: bool = False
    swaps: bool = False
    special_swaps: bool = False
    swap_scope: str = "top_only"


def ranking_score(ev: Evaluation, pop_spread: int | float,
                  cfg: IncentiveConfig) -> int | float:
    """Selection score: the total, minus a bonus for balanced solutions
    and/or plus a malus for unbalanced ones.

    The bonus magnitude ``pop_spread + 1`` exceeds the population's total
    spread, so with both flags on every balanced member outranks every
    unbalanced one regardless of raw fitness.
    """
    score = ev.total
    bonus = pop_spread + 1
    if cfg.incentive and ev.balance is Balance.BALANCED:
        score -= bonus
    if cfg.disincentive and ev.balance is Balance.UNBALANCED:
        score += bonus
    return score


Member = tuple[Schedule, Evaluation]


def rank_members(members: list[Member], cfg: IncentiveConfig | None = None) -> list[Member]:
    """Sort members best-first by ranking score.

    Ties break deterministically: feasible first, then lower preference
    cost, then current list position.
    """
    if not members:
        return []
    if cfg is None or not (cfg.incentive or cfg.disincentive):
        key = lambda m: (m[1].total, not m[1].feasible, m[1].pref_cost)
        return sorted(members, key=key)
    totals = [ev.total for _, ev in members]
    spread = max(totals) - min(totals)
    return sorted(
        members,
        key=lambda m: (ranking_score(m[1], spread, cfg), not m[1].feasible, m[1].pref_cost),
    )


class _MoveState:
    """Incremental coverage bookkeeping for single-gene moves.

    Keeps the flat coverage grid in sync with the working assignment so a
    candidate move costs O(slots * grades) instead of a full evaluation.
    """

    def __init__(self, inst: Instance, schedule: Schedule,
                 weight: int | float, shape: PenaltyShape):
        self.inst = inst
        self.weight = weight
        self.quadratic = shape is PenaltyShape.QUADRATIC
        self.assign = list(schedule)
        self.cover = _cover_flat(inst, schedule)
        self.t = inst._tables
        self.p = inst.p

    def penalty_delta(self, i: int, new_j: int) -> int | float:
        """Penalty change if nurse ``i`` (0-based) switched to ``new_j``."""
        old_j = self.assign[i]
        if new_j == old_j:
            return 0
        t = self.t
        p = self.p
        g = t.grade0[i]
        old_slots = t.slot_sets0[old_j - 1]
        new_slots = t.slot_sets0[new_j - 1]
        cover = self.cover
        demand = t.demand_flat
        units = 0
        for k0 in old_slots - new_slots:
            base = k0 * p
            for s0 in range(g, p):
                req = demand[base + s0]
                if req:
                    c = cover[base + s0]
                    old_miss = req - c if req > c else 0
                    new_miss = req - c + 1 if req > c - 1 else 0
                    if self.quadratic:
                        units += new_miss * new_miss - old_miss * old_miss
                    else:
                        units += new_miss - old_miss
        for k0 in new_slots - old_slots:
            base = k0 * p
            for s0 in range(g, p):
                req = demand[base + s0]
                if req:
                    c = cover[base + s0]
                    old_miss = req - c if req > c else 0
                    new_miss = req - c - 1 if req > c + 1 else 0
                    if self.quadratic:
                        units += new_miss * new_miss - old_miss * old_miss
                    else:
                        units += new_miss - old_miss
        return self.weight * units if units else 0

    def move_delta(self, i: int, new_j: int) -> int | float:
        prefs = self.t.pref_by_nurse[i]
        return prefs[new_j] - prefs[self.assign[i]] + self.penalty_delta(i, new_j)

    def apply(self, i: int, new_j: int) -> None:
        old_j = self.assign[i]
        if new_j == old_j:
            return
        t = self.t
        p = self.p
        g = t.grade0[i]
        cover = self.cover
        for k0 in t.slot_sets0[old_j - 1] - t.slot_sets0[new_j - 1]:
            base = k0 * p
            for s0 in range(g, p):
                cover[base + s0] -= 1
        for k0 in t.slot_sets0[new_j - 1] - t.slot_sets0[old_j - 1]:
            base = k0 * p
            for s0 in range(g, p):
                cover[base + s0] += 1
        self.assign[i] = new_j


def local_search_firstfit(
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape = PenaltyShape.LINEAR,
) -> Schedule:
    """First-fit-descending single-gene improvement.

    Each pass visits nurses in descending order of individual cost
    contribution (current preference cost plus the penalty reduction the
    nurse could achieve alone, ties by id); a nurse's candidate patterns
    are scanned in ascending preference order and the first strictly
    improving move is applied immediately.  Passes repeat until one makes
    no change, so the result never evaluates worse than the input.
    """
    state = _MoveState(inst, schedule, weight, shape)
    t = inst._tables
    candidates = [
        sorted(nur.feasible, key=lambda j, i=i: (t.pref_by_nurse[i][j], j))
        for i, nur in enumerate(inst.nurses)
    ]
    while True:
        contributions = []
        for i in range(inst.n):
            removable = max(
                (-state.penalty_delta(i, j) for j in candidates[i]), default=0)
            own_pref = t.pref_by_nurse[i][state.assign[i]]
            contributions.append((-(own_pref + max(removable, 0)), i))
        changed = False
        for _, i in sorted(contributions):
            for j in candidates[i]:
                if j == state.assign[i]:
                    continue
                if state.move_delta(i, j) < 0:
                    state.apply(i, j)
                    changed = True
                    break
        if not changed:
            return tuple(state.assign)


def shift_swap_best(inst: Instance, schedule: Schedule) -> Schedule:
    """Exchange patterns between nurses of equal grade and contract while
    the pair's summed preference cost strictly improves.

    Coverage is invariant under every accepted swap (equal grades mean
    identical qualification rows), so only the preference term moves.
    Pairs are scanned greedily in index order until a full pass accepts
    nothing.
    """
    t = inst._tables
    groups: dict[tuple[int, int, int], list[int]] = {}
    for i, nur in enumerate(inst.nurses):
        groups.setdefault((nur.grade, nur.days_required, nur.nights_required), []).append(i)
    pairs = [
        (a, b)
        for members in groups.values()
        for pos, a in enumerate(members)
        for b in members[pos + 1:]
    ]
    pairs.sort()

    assign = list(schedule)
    prefs = t.pref_by_nurse
    feas = t.feasible_sets
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            ja, jb = assign[a], assign[b]
            if ja == jb or jb not in feas[a] or ja not in feas[b]:
                continue
            if prefs[a][jb] + prefs[b][ja] < prefs[a][ja] + prefs[b][jb]:
                assign[a], assign[b] = jb, ja
                changed = True
    return tuple(assign)


def special_swap(
    inst: Instance,
    schedule: Schedule,
    weight: int | float,
    shape: PenaltyShape = PenaltyShape.LINEAR,
) -> Schedule:
    """Repair the deceptive 4/3-on-nights vs 3/3-on-days configuration.

    For each equal-grade pair of a 4-days/3-nights nurse working a night
    pattern and a 3-days/3-nights nurse working a day pattern, the 3/3
    nurse takes over the night pattern and the 4/3 nurse moves to her
    cheapest feasible day pattern.  A swap is kept only if the overall
    total does not increase; pairs are scanned once in index order.
    """
    assign = list(schedule)
    t = inst._tables
    kinds = {pat.id: pat.kind for pat in inst.patterns}
    best_day: list[int | None] = []
    for i, nur in enumerate(inst.nurses):
        days = [j for j in nur.feasible if kinds[j] is PatternKind.DAY]
        days.sort(key=lambda j, i=i: (t.pref_by_nurse[i][j], j))
        best_day.append(days[0] if days else None)

    fours = [i for i, nur in enumerate(inst.nurses)
             if (nur.days_required, nur.nights_required) == (4, 3)]
    threes = [i for i, nur in enumerate(inst.nurses)
              if (nur.days_required, nur.nights_required) == (3, 3)]
    if not fours or not threes:
        return schedule

    total = evaluate(inst, tuple(assign), weight, shape).total
    grade0 = t.grade0
    for a in fours:
        if best_day[a] is None or kinds[assign[a]] is not PatternKind.NIGHT:
            continue
        for b in threes:
            if grade0[b] != grade0[a] or kinds[assign[b]] is not PatternKind.DAY:
                continue
            if assign[a] not in t.feasible_sets[b]:
                continue
            trial = list(assign)
            trial[b] = assign[a]
            trial[a] = best_day[a]
            new_total = evaluate(inst, tuple(trial), weight, shape).total
            if new_total <= total:
                assign = trial
                total = new_total
                break
    return tuple(assign)

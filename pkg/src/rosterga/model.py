"""Core data model for the weekly nurse rostering problem.

A problem instance consists of nurses (each with a seniority grade, a
weekly contract and a set of shift patterns they may work), the shift
patterns themselves (binary 14-slot week vectors: slots 1-7 are the day
shifts Mon-Sun, slots 8-14 the night shifts Mon-Sun), per-nurse pattern
preference costs and a per-slot, per-grade minimum staffing demand.

All types are immutable after construction and safe to share between
concurrent solver runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

NUM_SLOTS = 14
DAY_SLOTS = tuple(range(1, 8))
NIGHT_SLOTS = tuple(range(8, 15))


class PatternKind(Enum):
    DAY = "day"
    NIGHT = "night"
    MIXED = "mixed"


class InstanceError(ValueError):
    """Malformed instance data (bad file syntax, dangling references, ...)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class ShiftPattern:
    """One weekly shift pattern: which of the 14 day/night slots it covers."""

    id: int
    cover: tuple[int, ...]

    @cached_property
    def slots(self) -> tuple[int, ...]:
        """Covered slot numbers, 1-based."""
        return tuple(k for k, c in enumerate(self.cover, start=1) if c)

    @cached_property
    def day_count(self) -> int:
        return sum(self.cover[:7])

    @cached_property
    def night_count(self) -> int:
        return sum(self.cover[7:])

    @property
    def kind(self) -> PatternKind:
        if self.night_count == 0:
            return PatternKind.DAY
        if self.day_count == 0:
            return PatternKind.NIGHT
        return PatternKind.MIXED


@dataclass(frozen=True)
class Nurse:
    """A nurse: grade 1 is the most senior band.

    ``feasible`` is the ordered set of pattern ids the nurse may work; the
    order is meaningful (delta-coding restarts index into it).
    """

    id: int
    grade: int
    days_required: int
    nights_required: int
    feasible: tuple[int, ...]


@dataclass(frozen=True, eq=True)
class Instance:
    """A full weekly rostering problem.

    ``pref[(i, j)]`` is the preference penalty of nurse ``i`` working
    pattern ``j`` and is defined exactly for ``j`` in nurse ``i``'s
    feasible set.  ``demand[k-1][s-1]`` is the minimum number of nurses of
    grade ``s`` or more senior required in slot ``k``; a nurse of grade
    ``g`` counts toward every row ``s >= g``.
    """

    name: str
    n: int
    p: int
    m: int
    nurses: tuple[Nurse, ...]
    patterns: tuple[ShiftPattern, ...]
    pref: dict[tuple[int, int], int]
    demand: tuple[tuple[int, ...], ...]

    @cached_property
    def pattern_by_id(self) -> dict[int, ShiftPattern]:
        return {pat.id: pat for pat in self.patterns}

    @cached_property
    def nurse_by_id(self) -> dict[int, Nurse]:
        return {nur.id: nur for nur in self.nurses}

    @cached_property
    def _tables(self) -> _EvalTables:
        """Index-friendly views used by the evaluation hot path."""
        grade0 = tuple(nur.grade - 1 for nur in self.nurses)
        slots0 = tuple(tuple(k - 1 for k in pat.slots) for pat in self.patterns)
        slot_sets0 = tuple(frozenset(s) for s in slots0)
        pref_by_nurse = tuple(
            {j: self.pref[(nur.id, j)] for j in nur.feasible} for nur in self.nurses
        )
        feasible_sets = tuple(frozenset(nur.feasible) for nur in self.nurses)
        cells = tuple(
            (k0, s0, req)
            for k0, row in enumerate(self.demand)
            for s0, req in enumerate(row)
            if req > 0
        )
        demand_flat = tuple(req for row in self.demand for req in row)
        all_grades_row = tuple(row[self.p - 1] for row in self.demand)
        # cover_idx[j-1][g0]: flat (slot, grade-row) cells pattern j bumps
        # when worked by a grade g0+1 nurse; one flat loop per gene in the
        # evaluation hot path.
        cover_idx = tuple(
            tuple(
                tuple(k0 * self.p + s0 for k0 in slots for s0 in range(g0, self.p))
                for g0 in range(self.p)
            )
            for slots in slots0
        )
        return _EvalTables(
            grade0, slots0, slot_sets0, pref_by_nurse, feasible_sets,
            cells, demand_flat, all_grades_row, cover_idx,
        )


@dataclass(frozen=True)
class _EvalTables:
    grade0: tuple[int, ...]
    slots0: tuple[tuple[int, ...], ...]
    slot_sets0: tuple[frozenset[int], ...]
    pref_by_nurse: tuple[dict[int, int], ...]
    feasible_sets: tuple[frozenset[int], ...]
    demand_cells: tuple[tuple[int, int, int], ...]
    demand_flat: tuple[int, ...]
    all_grades_row: tuple[int, ...]
    cover_idx: tuple[tuple[tuple[int, ...], ...], ...]


def validate_instance(inst: Instance) -> list[str]:
    """Check every structural invariant; return one message per violation.

    An empty list means the instance is well-formed.  Satisfiability of the
    demand is deliberately not checked here.
    """
    bad: list[str] = []

    if inst.n != len(inst.nurses):
        bad.append(f"header NURSES {inst.n} != {len(inst.nurses)} nurse records")
    if inst.m != len(inst.patterns):
        bad.append(f"header PATTERNS {inst.m} != {len(inst.patterns)} pattern records")
    if inst.p < 1:
        bad.append(f"grade count {inst.p} must be >= 1")

    seen_pat: set[int] = set()
    for pat in inst.patterns:
        label = f"pattern {pat.id}"
        if pat.id in seen_pat:
            bad.append(f"{label}: duplicate id")
        seen_pat.add(pat.id)
        if len(pat.cover) != NUM_SLOTS:
            bad.append(f"{label}: cover has {len(pat.cover)} slots, expected {NUM_SLOTS}")
            continue
        if any(c not in (0, 1) for c in pat.cover):
            bad.append(f"{label}: cover flags must be 0 or 1")
        elif not any(pat.cover):
            bad.append(f"{label}: covers no slot")
    if seen_pat and seen_pat != set(range(1, len(inst.patterns) + 1)):
        bad.append("pattern ids must be exactly 1..m")

    seen_nur: set[int] = set()
    for nur in inst.nurses:
        label = f"nurse {nur.id}"
        if nur.id in seen_nur:
            bad.append(f"{label}: duplicate id")
        seen_nur.add(nur.id)
        if not 1 <= nur.grade <= inst.p:
            bad.append(f"{label}: grade {nur.grade} outside 1..{inst.p}")
        if nur.days_required < 1:
            bad.append(f"{label}: days_required must be >= 1")
        if nur.nights_required < 1:
            bad.append(f"{label}: nights_required must be >= 1")
        if not nur.feasible:
            bad.append(f"{label}: empty feasible set")
        if len(set(nur.feasible)) != len(nur.feasible):
            bad.append(f"{label}: duplicate pattern ids in feasible set")
        for j in nur.feasible:
            pat = inst.pattern_by_id.get(j)
            if pat is None:
                bad.append(f"{label}: feasible references undefined pattern {j}")
                continue
            if pat.kind is PatternKind.DAY and pat.day_count != nur.days_required:
                bad.append(
                    f"{label}: day pattern {j} covers {pat.day_count} days, "
                    f"contract requires {nur.days_required}"
                )
            elif pat.kind is PatternKind.NIGHT and pat.night_count != nur.nights_required:
                bad.append(
                    f"{label}: night pattern {j} covers {pat.night_count} nights, "
                    f"contract requires {nur.nights_required}"
                )
    if seen_nur and seen_nur != set(range(1, len(inst.nurses) + 1)):
        bad.append("nurse ids must be exactly 1..n")

    expected_pref = {
        (nur.id, j)
        for nur in inst.nurses
        for j in nur.feasible
        if j in inst.pattern_by_id
    }
    for key in sorted(expected_pref - inst.pref.keys()):
        bad.append(f"missing preference cost for nurse {key[0]} pattern {key[1]}")
    for key in sorted(inst.pref.keys() - expected_pref):
        bad.append(f"preference cost for nurse {key[0]} pattern {key[1]} outside feasible set")
    for key, cost in inst.pref.items():
        if cost < 0:
            bad.append(f"preference cost for nurse {key[0]} pattern {key[1]} is negative")

    if len(inst.demand) != NUM_SLOTS:
        bad.append(f"demand table has {len(inst.demand)} slot rows, expected {NUM_SLOTS}")
    else:
        for k0, row in enumerate(inst.demand):
            if len(row) != inst.p:
                bad.append(f"demand row for slot {k0 + 1} has {len(row)} grades, expected {inst.p}")
            elif any(req < 0 for req in row):
                bad.append(f"demand row for slot {k0 + 1} has a negative entry")

    return bad

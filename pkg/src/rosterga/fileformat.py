"""Line-oriented text format for problem instances.

Sections appear in a fixed order; ``#`` starts a comment, tokens are
whitespace separated::

    PROBLEM <name>
    NURSES <n>
    GRADES <p>
    PATTERNS <m>
    PATTERN <j> <c1> ... <c14>
    NURSE <i> GRADE <g> DAYS <d> NIGHTS <t> FEASIBLE <j1> <j2> ...
    PREF <i> <j> <cost>
    DEMAND <k> <s> <R>
    END

A PREF line is required for every (nurse, feasible pattern) pair; DEMAND
lines are sparse and omitted entries mean zero.
"""

from __future__ import annotations

from .model import (
    NUM_SLOTS,
    Instance,
    InstanceError,
    Nurse,
    ShiftPattern,
    validate_instance,
)

_SECTION_ORDER = ("PROBLEM", "NURSES", "GRADES", "PATTERNS", "PATTERN",
                  "NURSE", "PREF", "DEMAND", "END")


def _tokenize(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((ln, body.split()))
    return out


def _int(token: str, what: str, ln: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceError(f"{what} must be an integer, got {token!r}", ln) from None


def parse_instance(text: str) -> Instance:
    """Parse instance-format text into a validated :class:`Instance`.

    Raises :class:`InstanceError` (with a line number where one applies)
    on syntax errors, missing sections, dangling references, duplicate
    PREF/DEMAND entries or any structural invariant violation.
    """
    lines = _tokenize(text)
    pos = 0

    def expect_header(keyword: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise InstanceError(f"missing {keyword} section")
        ln, toks = lines[pos]
        if toks[0] != keyword:
            raise InstanceError(f"expected {keyword}, got {toks[0]!r}", ln)
        pos += 1
        return ln, toks

    ln, toks = expect_header("PROBLEM")
    if len(toks) != 2:
        raise InstanceError("PROBLEM wants exactly one name token", ln)
    name = toks[1]

    counts = {}
    for key in ("NURSES", "GRADES", "PATTERNS"):
        ln, toks = expect_header(key)
        if len(toks) != 2:
            raise InstanceError(f"{key} wants exactly one count", ln)
        counts[key] = _int(toks[1], key, ln)
    n, p, m = counts["NURSES"], counts["GRADES"], counts["PATTERNS"]

    patterns: list[ShiftPattern] = []
    while pos < len(lines) and lines[pos][1][0] == "PATTERN":
        ln, toks = lines[pos]
        pos += 1
        if len(toks) != 2 + NUM_SLOTS:
            raise InstanceError(
                f"PATTERN line wants an id and {NUM_SLOTS} cover flags, got "
                f"{len(toks) - 2} values", ln)
        pid = _int(toks[1], "pattern id", ln)
        cover = tuple(_int(t, "cover flag", ln) for t in toks[2:])
        if any(c not in (0, 1) for c in cover):
            raise InstanceError("cover flags must be 0 or 1", ln)
        patterns.append(ShiftPattern(pid, cover))
    if len(patterns) != m:
        raise InstanceError(f"expected {m} PATTERN lines, found {len(patterns)}")
    known_patterns = {pat.id for pat in patterns}

    nurses: list[Nurse] = []
    while pos < len(lines) and lines[pos][1][0] == "NURSE":
        ln, toks = lines[pos]
        pos += 1
        if (len(toks) < 10 or toks[2] != "GRADE" or toks[4] != "DAYS"
                or toks[6] != "NIGHTS" or toks[8] != "FEASIBLE"):
            raise InstanceError(
                "NURSE line wants: NURSE <i> GRADE <g> DAYS <d> NIGHTS <t> "
                "FEASIBLE <j...>", ln)
        nid = _int(toks[1], "nurse id", ln)
        grade = _int(toks[3], "grade", ln)
        days = _int(toks[5], "days", ln)
        nights = _int(toks[7], "nights", ln)
        feas = tuple(_int(t, "feasible pattern id", ln) for t in toks[9:])
        for j in feas:
            if j not in known_patterns:
                raise InstanceError(f"nurse {nid} references undefined pattern {j}", ln)
        nurses.append(Nurse(nid, grade, days, nights, feas))
    if len(nurses) != n:
        raise InstanceError(f"expected {n} NURSE lines, found {len(nurses)}")
    known_nurses = {nur.id for nur in nurses}

    pref: dict[tuple[int, int], int] = {}
    while pos < len(lines) and lines[pos][1][0] == "PREF":
        ln, toks = lines[pos]
        pos += 1
        if len(toks) != 4:
            raise InstanceError("PREF line wants: PREF <i> <j> <cost>", ln)
        i = _int(toks[1], "nurse id", ln)
        j = _int(toks[2], "pattern id", ln)
        cost = _int(toks[3], "cost", ln)
        if i not in known_nurses:
            raise InstanceError(f"PREF references undefined nurse {i}", ln)
        if j not in known_patterns:
            raise InstanceError(f"PREF references undefined pattern {j}", ln)
        if (i, j) in pref:
            raise InstanceError(f"duplicate PREF entry for nurse {i} pattern {j}", ln)
        pref[(i, j)] = cost

    demand_rows = [[0] * p for _ in range(NUM_SLOTS)]
    seen_demand: set[tuple[int, int]] = set()
    while pos < len(lines) and lines[pos][1][0] == "DEMAND":
        ln, toks = lines[pos]
        pos += 1
        if len(toks) != 4:
            raise InstanceError("DEMAND line wants: DEMAND <k> <s> <R>", ln)
        k = _int(toks[1], "slot", ln)
        s = _int(toks[2], "grade", ln)
        req = _int(toks[3], "demand", ln)
        if not 1 <= k <= NUM_SLOTS:
            raise InstanceError(f"slot {k} outside 1..{NUM_SLOTS}", ln)
        if not 1 <= s <= p:
            raise InstanceError(f"grade {s} outside 1..{p}", ln)
        if (k, s) in seen_demand:
            raise InstanceError(f"duplicate DEMAND entry for slot {k} grade {s}", ln)
        seen_demand.add((k, s))
        demand_rows[k - 1][s - 1] = req

    if pos >= len(lines):
        raise InstanceError("missing END section")
    ln, toks = lines[pos]
    if toks[0] != "END":
        raise InstanceError(f"unexpected {toks[0]!r} (sections out of order?)", ln)
    if pos + 1 != len(lines):
        raise InstanceError("content after END", lines[pos + 1][0])

    inst = Instance(
        name=name, n=n, p=p, m=m,
        nurses=tuple(nurses), patterns=tuple(patterns),
        pref=pref, demand=tuple(tuple(row) for row in demand_rows),
    )
    violations = validate_instance(inst)
    if violations:
        raise InstanceError("invalid instance: " + "; ".join(violations))
    return inst


def serialize_instance(inst: Instance) -> str:
    """Render an instance back to the text format; round-trips exactly."""
    out = [f"PROBLEM {inst.name}",
           f"NURSES {inst.n}",
           f"GRADES {inst.p}",
           f"PATTERNS {inst.m}"]
    for pat in inst.patterns:
        out.append(f"PATTERN {pat.id} " + " ".join(str(c) for c in pat.cover))
    for nur in inst.nurses:
        feas = " ".join(str(j) for j in nur.feasible)
        out.append(
            f"NURSE {nur.id} GRADE {nur.grade} DAYS {nur.days_required} "
            f"NIGHTS {nur.nights_required} FEASIBLE {feas}")
    for (i, j) in sorted(inst.pref):
        out.append(f"PREF {i} {j} {inst.pref[(i, j)]}")
    for k0, row in enumerate(inst.demand):
        for s0, req in enumerate(row):
            if req:
                out.append(f"DEMAND {k0 + 1} {s0 + 1} {req}")
    out.append("END")
    return "\n".join(out) + "\n"

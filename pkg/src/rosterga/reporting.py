"""Run reports and CSV output."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

CSV_COLUMNS = (
    "instance", "seed", "features", "feasible", "best_feasible_total",
    "best_total", "gen_to_feasible", "generations", "final_weight", "wall_ms",
)


@dataclass(frozen=True)
class RunReport:
    """Outcome record of one solver run.

    ``best_feasible_total`` is present iff any feasible schedule was seen;
    ``wall_ms`` is None when timing was disabled for reproducible output.
    """

    instance: str
    seed: int
    features: str
    feasible: bool
    best_feasible_total: int | float | None
    best_total: int | float
    gen_to_feasible: int | None
    generations: int
    final_weight: int | float
    wall_ms: float | None

    def csv_row(self) -> list[str]:
        return [_cell(getattr(self, col)) for col in CSV_COLUMNS]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def aggregate_row(label: str, reports: list[RunReport]) -> list[str]:
    """Per-rung aggregate: feasibility rate and the mean best feasible total
    over the feasible runs only."""
    rate = sum(r.feasible for r in reports) / len(reports)
    feas_totals = [r.best_feasible_total for r in reports if r.feasible]
    mean = sum(feas_totals) / len(feas_totals) if feas_totals else None
    row = [""] * len(CSV_COLUMNS)
    row[0] = "AGGREGATE"
    row[2] = label
    row[3] = f"{rate:.4f}"
    row[4] = "" if mean is None else f"{mean:.4f}"
    return row


def render_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()

"""Run reports and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

CSV_COLUMNS = (
    "method", "n", "m", "q", "seed", "iteration", "queries_cumulative",
    "p_success", "overlap_omega", "fidelity", "wall_ms",
)


@dataclass
class IterationRecord:
    iteration: int
    queries_cumulative: int
    p_success: float
    overlap_omega: float
    fidelity: float


@dataclass
class RunReport:
    method: str
    n: int
    m: int
    q: int
    iterations: int
    total_queries: int
    queries_per_iteration: int
    records: list[IterationRecord] = field(default_factory=list)
    wall_ms: float = 0.0
    extras: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    @property
    def p_success(self) -> float:
        return self.final.p_success

    @property
    def fidelity(self) -> float:
        return self.final.fidelity

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_success"] = self.p_success
        d["fidelity"] = self.fidelity
        return _json_safe(d)


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def fmt(x) -> str:
    """12 significant digits for floats, plain text otherwise."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return "" if x is None else str(x)


def csv_rows(report: RunReport, seed, timing: bool = False, final_only: bool = False):
    records = [report.final] if final_only else report.records
    for r in records:
        yield {
            "method": report.method,
            "n": report.n,
            "m": report.m,
            "q": report.q,
            "seed": seed,
            "iteration": r.iteration,
            "queries_cumulative": r.queries_cumulative,
            "p_success": r.p_success,
            "overlap_omega": r.overlap_omega,
            "fidelity": r.fidelity,
            "wall_ms": report.wall_ms if timing else None,
        }


def write_csv(rows, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def dumps_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"

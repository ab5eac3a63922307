"""Experiment configs, random oracles, and the run/compare/sweep drivers."""
from __future__ import annotations

import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ampprep.baseline import run_baseline
from ampprep.errors import ConfigurationError
from ampprep.fastprep import FastMethod, run_exact_prakash, run_fast
from ampprep.oracle import OracleTable, load_table, make_table
from ampprep.report import RunReport, csv_rows, dumps_json, write_csv
from ampprep.simcore import DEFAULT_WIDTH_CAP
from ampprep.structsim import reduced_run, reduced_run_baseline

log = logging.getLogger(__name__)

METHODS = ("baseline", "fast-rz", "fast-kickback")
EXACTNESS = ("none", "prakash", "scaled")
ENGINES = ("dense", "structured", "both")
SOURCES = ("random", "file", "inline")
SWEEP_KEYS = ("iterations", "n")
AGREEMENT_TOL = 1e-9

COMPARE_COLUMNS = (
    "method", "exactness", "iterations", "total_queries", "queries_per_iteration",
    "p_success", "fidelity", "query_ratio_vs_baseline", "per_iteration_ratio_vs_baseline",
)


@dataclass
class ExperimentConfig:
    method: str = "fast-rz"
    exactness: str = "none"
    n: int = 2
    m: int = 3
    q: int | None = None
    oracle_source: str = "random"
    values: list[int] | None = None
    oracle_path: str | None = None
    seed: int = 0
    iterations: int | str = "auto"
    engine: str = "dense"
    out: str | None = None
    realization: str = "qft-direction"
    workers: int = 1
    timing: bool = False
    max_width: int = DEFAULT_WIDTH_CAP
    methods: list[str] | None = None
    sweep: dict | None = None
    seeds: list[int] | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _choice("method", self.method, METHODS)
        _choice("exactness", self.exactness, EXACTNESS)
        _choice("engine", self.engine, ENGINES)
        _choice("oracle_source", self.oracle_source, SOURCES)
        if self.exactness == "prakash" and self.method != "baseline":
            raise ConfigurationError("exactness: 'prakash' requires method 'baseline'")
        if self.exactness == "scaled" and self.method == "baseline":
            raise ConfigurationError("exactness: 'scaled' requires a fast method")
        if self.exactness != "none" and self.iterations != "auto":
            raise ConfigurationError("iterations: exact variants fix their own count, use 'auto'")
        if self.iterations != "auto":
            if isinstance(self.iterations, bool) or not isinstance(self.iterations, int) \
                    or self.iterations < 0:
                raise ConfigurationError("iterations: must be 'auto' or a non-negative integer")
        if self.oracle_source == "inline" and not self.values:
            raise ConfigurationError("values: inline oracle needs a list of integers")
        if self.oracle_source == "file" and not self.oracle_path:
            raise ConfigurationError("oracle_path: file oracle needs a path")
        if self.q is not None and self.q < 1:
            raise ConfigurationError("q: must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers: must be at least 1")
        for name in self.methods or ():
            _choice("methods", name, METHODS)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"{unknown[0]}: unknown config field")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def fast_method(self) -> FastMethod:
        route = self.method.split("-", 1)[1]
        return FastMethod(route, self.exactness, self.q, self.realization)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _choice(name, value, allowed):
    if value not in allowed:
        raise ConfigurationError(f"{name}: {value!r} is not one of {list(allowed)}")


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config: invalid JSON ({exc})") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def random_oracle(n: int, m: int, seed: int) -> OracleTable:
    """Uniform signed m-bit table, redrawn until it is not all zeros."""
    if n < 1 or m < 2:
        raise ConfigurationError("random oracle needs n >= 1 and m >= 2")
    rng = np.random.default_rng(seed)
    limit = (1 << (m - 1)) - 1
    while True:
        values = rng.integers(-limit, limit + 1, size=1 << n)
        if values.any():
            return make_table(n, m, values.tolist())


def build_table(config: ExperimentConfig) -> OracleTable:
    if config.oracle_source == "random":
        return random_oracle(config.n, config.m, config.seed)
    if config.oracle_source == "inline":
        count = len(config.values)
        if count & (count - 1):
            raise ConfigurationError(f"values: {count} entries is not a power of two")
        return make_table(count.bit_length() - 1, config.m, config.values)
    return load_table(config.oracle_path, config.m)


def dense_width(config: ExperimentConfig, table: OracleTable) -> int:
    n, m = table.index_width, table.value_width
    if config.method == "fast-kickback":
        return n + 1 + (config.q or m + 4)
    return n + m + (2 if config.exactness == "prakash" else 1)


def _dense(config: ExperimentConfig, table: OracleTable):
    if config.method == "baseline":
        if config.exactness == "prakash":
            return run_exact_prakash(table)
        return run_baseline(table, config.iterations)
    return run_fast(table, config.fast_method(), config.iterations)


def _structured(config: ExperimentConfig, table: OracleTable):
    if config.method == "baseline":
        return reduced_run_baseline(table, config.iterations, config.exactness == "prakash")
    return reduced_run(table, config.fast_method(), config.iterations)


def trace_deviation(a: RunReport, b: RunReport) -> float:
    """Largest difference over the emitted numeric columns of two traces."""
    if len(a.records) != len(b.records):
        return float("inf")
    worst = 0.0
    for x, y in zip(a.records, b.records):
        if x.queries_cumulative != y.queries_cumulative:
            return float("inf")
        for name in ("p_success", "overlap_omega", "fidelity"):
            u, v = getattr(x, name), getattr(y, name)
            if np.isnan(u) and np.isnan(v):
                continue
            worst = max(worst, abs(u - v))
    return worst


def run_experiment(config: ExperimentConfig, table: OracleTable | None = None) -> RunReport:
    table = table or build_table(config)
    if config.engine in ("dense", "both"):
        width = dense_width(config, table)
        if width > config.max_width:
            raise ConfigurationError(
                f"engine: dense run needs {width} qubits, cap is {config.max_width}"
            )
    if config.engine == "structured":
        report, _ = _structured(config, table)
    else:
        report, _ = _dense(config, table)
        if config.engine == "both":
            other, _ = _structured(config, table)
            dev = trace_deviation(report, other)
            report.extras["engine_deviation"] = dev
            if not dev <= AGREEMENT_TOL:
                raise RuntimeError(
                    f"dense and structured traces disagree by {dev:.3e}"
                )
    report.config = config.to_dict()
    report.extras["table"] = list(table.values)
    return report


def _write(path: str | None, csv_text: str, payload) -> str:
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(csv_text)
        target.with_suffix(".json").write_text(dumps_json(payload))
        log.info("wrote %s", target)
    return csv_text


def cli_run(config: ExperimentConfig) -> RunReport:
    report = run_experiment(config)
    text = write_csv(csv_rows(report, config.seed, config.timing))
    _write(config.out, text, report.to_dict())
    report.extras["csv"] = text
    return report


def compare_rows(reports: list[RunReport], reference: RunReport) -> list[dict]:
    rows = []
    for r in reports:
        rows.append({
            "method": r.method.split("+")[0],
            "exactness": r.config.get("exactness", "none"),
            "iterations": r.iterations,
            "total_queries": r.total_queries,
            "queries_per_iteration": r.queries_per_iteration,
            "p_success": r.p_success,
            "fidelity": r.fidelity,
            "query_ratio_vs_baseline": reference.total_queries / r.total_queries,
            "per_iteration_ratio_vs_baseline":
                reference.queries_per_iteration / r.queries_per_iteration,
        })
    return rows


def cli_compare(configs: list[ExperimentConfig], out: str | None = None):
    """Run every config on one shared oracle; returns (rows, csv text)."""
    if not configs:
        raise ConfigurationError("methods: nothing to compare")
    tables = [build_table(c) for c in configs]
    if any(t != tables[0] for t in tables[1:]):
        raise ConfigurationError("oracle: compared configs use different oracle tables")
    reports = [run_experiment(c, tables[0]) for c in configs]
    reference = next((r for r in reports if r.method == "baseline"), None)
    if reference is None:
        base_cfg = configs[0].replace(method="baseline", exactness="none")
        reference = run_experiment(base_cfg, tables[0])
    rows = compare_rows(reports, reference)
    text = write_csv(rows, COMPARE_COLUMNS)
    _write(out, text, {"rows": rows, "reports": [r.to_dict() for r in reports]})
    return rows, text


def compare_configs(config: ExperimentConfig) -> list[ExperimentConfig]:
    methods = config.methods or list(METHODS)
    return [config.replace(method=m, methods=None) for m in methods]


def sweep_points(config: ExperimentConfig) -> list[ExperimentConfig]:
    spec = config.sweep or {}
    key = spec.get("key", "iterations")
    _choice("sweep.key", key, SWEEP_KEYS)
    if "values" in spec:
        values = [int(v) for v in spec["values"]]
    else:
        lo, hi = spec.get("range", [0, -1])
        values = list(range(int(lo), int(hi) + 1))
    seeds = config.seeds or [config.seed]
    points = []
    for v in sorted(values):
        for s in sorted(seeds):
            points.append(config.replace(seed=s, sweep=None, seeds=None, **{key: v}))
    return points


def _run_point(config: ExperimentConfig):
    report = run_experiment(config)
    return list(csv_rows(report, config.seed, config.timing, final_only=True)), report.to_dict()


def cli_sweep(config: ExperimentConfig):
    """One CSV row per (sweep value, seed) point, sorted by that key."""
    points = sweep_points(config)
    if config.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_point, points))
    else:
        results = [_run_point(p) for p in points]
    rows = [row for point_rows, _ in results for row in point_rows]
    text = write_csv(rows)
    _write(config.out, text, [payload for _, payload in results])
    return rows, text

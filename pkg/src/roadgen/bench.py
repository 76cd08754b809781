"""Method x seed experiment matrix, summary statistics and ordinal claim checks."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .estimators import make_generator
from .evo import descriptor_spread
from .fitness import DEFAULT_WEIGHTS, FitnessWeights
from .grid import from_dict, to_dict
from .metrics import MetricReport
from .wfc import WfcFailure

logger = logging.getLogger(__name__)

METHODS = ("wfc", "pso", "gwo", "ea", "map-elites")
LABELS = {"wfc": "WFC", "pso": "PSO", "gwo": "GWO", "ea": "EA", "map-elites": "MAP-E"}

# column groups: topology, validity, road shape, extras
TABLE_GROUPS = (
    (("connected_components", "CO"), ("dead_ends", "DE"), ("cyclomatic_complexity", "CY")),
    (("boundary_violations", "BV"), ("adjacent_crossing_violation_score", "ACV"), ("coverage", "CV")),
    (("crossings", "CR"), ("straight_run_score", "SR"), ("adjacent_turns", "AT")),
    (("bridges", "BR"), ("fitness", "FIT"), ("wall_time", "TIME")),
)
STAT_METRICS = tuple(MetricReport.field_names()) + ("fitness", "wall_time")
RECOMMENDED_RUNS = 10


@dataclass
class ExperimentSpec:
    methods: list = field(default_factory=lambda: list(METHODS))
    sizes: list = field(default_factory=lambda: [(12, 12)])
    runs: int = 4
    weights: FitnessWeights = DEFAULT_WEIGHTS
    method_params: dict = field(default_factory=dict)
    master_seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {list(METHODS)}")


def derive_seed(master_seed: int, method: str, size, run: int) -> int:
    """Stable per-run seed from the master seed, method name, grid size and run index."""
    key = [int(master_seed), zlib.crc32(method.encode()), int(size[0]), int(size[1]), int(run)]
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


@dataclass
class RunRecord:
    method: str
    size: tuple
    run: int
    seed: int
    success: bool
    grid: Optional[np.ndarray] = None
    report: Optional[MetricReport] = None
    fitness: Optional[float] = None
    wall_time: float = 0.0
    spread: Optional[dict] = None
    error: Optional[str] = None

    def value(self, metric: str) -> float:
        if metric == "fitness":
            return float(self.fitness)
        if metric == "wall_time":
            return float(self.wall_time)
        return float(getattr(self.report, metric))

    def to_dict(self) -> dict:
        return {
            "method": self.method, "size": list(self.size), "run": self.run, "seed": self.seed,
            "success": self.success,
            "grid": None if self.grid is None else to_dict(self.grid),
            "metrics": None if self.report is None else self.report.to_dict(),
            "fitness": self.fitness, "wall_time": self.wall_time,
            "spread": self.spread, "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            method=d["method"], size=tuple(d["size"]), run=int(d["run"]), seed=int(d["seed"]),
            success=bool(d["success"]),
            grid=None if d.get("grid") is None else from_dict(d["grid"]),
            report=None if d.get("metrics") is None else MetricReport.from_dict(d["metrics"]),
            fitness=d.get("fitness"), wall_time=float(d.get("wall_time", 0.0)),
            spread=d.get("spread"), error=d.get("error"),
        )


def _record_path(out_dir: Path, rec: RunRecord) -> Path:
    h, w = rec.size
    return out_dir / "records" / f"{rec.method}_{h}x{w}_run{rec.run:03d}.json"


def run_one(method: str, size, run: int, seed: int, weights: FitnessWeights,
            params: dict | None = None) -> RunRecord:
    gen = make_generator(method, height=size[0], width=size[1], weights=weights,
                         random_state=seed, **(params or {}))
    t0 = time.perf_counter()
    try:
        gen.fit()
    except WfcFailure as exc:
        return RunRecord(method, tuple(size), run, seed, False,
                         wall_time=time.perf_counter() - t0, error=str(exc))
    elapsed = time.perf_counter() - t0
    spread = None
    if method == "map-elites" and len(gen.archive_):
        spread = descriptor_spread(gen.archive_.values()).to_dict()
    elif method == "ea":
        spread = descriptor_spread(gen.population_).to_dict()
    return RunRecord(method, tuple(size), run, seed, True, grid=gen.best_grid_,
                     report=gen.report_, fitness=gen.best_fitness_, wall_time=elapsed,
                     spread=spread)


def run_experiment(spec: ExperimentSpec, out_dir=None,
                   progress: Callable[[RunRecord], None] | None = None) -> list[RunRecord]:
    """Run every (size, method, run) cell; records are written as they complete."""
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "records").mkdir(parents=True, exist_ok=True)
    records = []
    for size in spec.sizes:
        for method in spec.methods:
            for run in range(spec.runs):
                seed = derive_seed(spec.master_seed, method, size, run)
                rec = run_one(method, size, run, seed, spec.weights,
                              spec.method_params.get(method))
                records.append(rec)
                if out is not None:
                    with open(_record_path(out, rec), "w") as fh:
                        json.dump(rec.to_dict(), fh)
                if progress is not None:
                    progress(rec)
    return records


def load_records(directory) -> list[RunRecord]:
    root = Path(directory)
    if (root / "records").is_dir():
        root = root / "records"
    out = []
    for path in sorted(root.glob("*.json")):
        with open(path) as fh:
            out.append(RunRecord.from_dict(json.load(fh)))
    return out


# --- statistics --------------------------------------------------------------

@dataclass
class Stat:
    n: int
    mean: float
    std: float
    q1: Optional[float] = None
    median: Optional[float] = None
    q3: Optional[float] = None

    @property
    def iqr(self) -> Optional[float]:
        if self.q1 is None or self.q3 is None:
            return None
        return self.q3 - self.q1

    @classmethod
    def of(cls, values) -> "Stat":
        v = np.asarray(values, dtype=float)
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        std = float(v.std(ddof=1)) if v.size > 1 else 0.0
        return cls(int(v.size), float(v.mean()), std, float(q1), float(med), float(q3))


@dataclass
class StatTable:
    stats: dict  # method -> metric -> Stat
    attempted: dict = field(default_factory=dict)  # method -> runs attempted

    @property
    def methods(self) -> list[str]:
        return [m for m in METHODS if m in self.stats] + \
               sorted(m for m in self.stats if m not in METHODS)

    def get(self, method: str, metric: str) -> Stat:
        return self.stats[method][metric]

    def success_rate(self, method: str) -> float:
        n_ok = next(iter(self.stats[method].values())).n if self.stats[method] else 0
        total = self.attempted.get(method, n_ok)
        return n_ok / total if total else 0.0

    @classmethod
    def from_means(cls, means: dict, stds: dict | None = None, n: int = 4) -> "StatTable":
        """Build a table from known means, e.g. reference results (no quartiles)."""
        stats = {}
        for method, row in means.items():
            stats[method] = {k: Stat(n, float(v), float((stds or {}).get(method, {}).get(k, 0.0)))
                             for k, v in row.items()}
        return cls(stats)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "metric", "n", "mean", "std", "q1", "median", "q3", "success_rate"])
        for m in self.methods:
            for metric, s in self.stats[m].items():
                w.writerow([m, metric, s.n, _fmt(s.mean), _fmt(s.std), _fmt(s.q1),
                            _fmt(s.median), _fmt(s.q3), _fmt(self.success_rate(m))])
        return buf.getvalue()

    def to_markdown(self) -> str:
        parts = []
        for group in TABLE_GROUPS:
            header = "| Method | " + " | ".join(f"{abbr} μ | {abbr} σ" for _, abbr in group) + " |"
            rule = "|---|" + "---:|---:|" * len(group)
            lines = [header, rule]
            for m in self.methods:
                cells = []
                for metric, _ in group:
                    s = self.stats[m].get(metric)
                    if s is None:
                        cells += ["", ""]
                    else:
                        sd = _fmt(s.std, 3) + (" (n=1)" if s.n == 1 else "")
                        cells += [_fmt(s.mean, 3), sd]
                lines.append(f"| {LABELS.get(m, m)} | " + " | ".join(cells) + " |")
            parts.append("\n".join(lines))
        legend = ("CO connected components; DE dead ends; CY cyclomatic complexity; "
                  "BV boundary violations; ACV adjacent crossing violations (degree-scaled); "
                  "CV coverage; CR crossings; SR straight-run score; AT adjacent turns; "
                  "BR bridges; FIT fitness; TIME wall time [s]")
        rates = ", ".join(f"{LABELS.get(m, m)} {self.success_rate(m):.0%}" for m in self.methods)
        return "\n\n".join(parts) + f"\n\n{legend}\n\nSuccess rate: {rates}\n"


def _fmt(v, digits=6):
    if v is None:
        return ""
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return f"{v:.{digits}g}"


def summarize(records: list[RunRecord]) -> StatTable:
    if not records:
        raise ValueError("no records to summarise")
    attempted: dict[str, int] = {}
    values: dict[str, dict[str, list]] = {}
    for rec in records:
        attempted[rec.method] = attempted.get(rec.method, 0) + 1
        if not rec.success:
            continue
        row = values.setdefault(rec.method, {k: [] for k in STAT_METRICS})
        for k in STAT_METRICS:
            row[k].append(rec.value(k))
    if not values:
        raise ValueError("no successful records to summarise")
    stats = {m: {k: Stat.of(v) for k, v in row.items()} for m, row in values.items()}
    for m in attempted:
        stats.setdefault(m, {})
    return StatTable(stats, attempted)


# --- ordinal claims ------------------------------------------------------------

@dataclass
class Verdict:
    claim: str
    status: str  # "pass", "fail", "expected-fail" or "n/a"
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __str__(self):
        return f"[{self.status.upper()}] {self.claim}: {self.detail}"


def _mean(table, m, metric):
    return table.get(m, metric).mean


def rank_check(table: StatTable, *, wfc_hard_boundary: bool = False) -> list[Verdict]:
    """Check the five reference ordinal findings against a summary table."""
    missing = [m for m in METHODS if not table.stats.get(m)]
    if missing:
        raise ValueError(f"rank_check needs all five methods; missing {missing}")
    out = []
    others = ("ea", "map-elites", "pso", "gwo")

    bv = {m: _mean(table, m, "boundary_violations") for m in METHODS}
    detail = ", ".join(f"{LABELS[m]}={bv[m]:g}" for m in METHODS)
    ok = all(bv[m] == 0 for m in others) and bv["wfc"] > 0
    if not ok and wfc_hard_boundary and all(bv[m] == 0 for m in others) and bv["wfc"] == 0:
        out.append(Verdict("(i) boundary violations only in WFC", "expected-fail",
                           detail + "; WFC ran with a hard boundary, so it cannot violate it"))
    else:
        out.append(Verdict("(i) boundary violations only in WFC", "pass" if ok else "fail", detail))

    cv = {m: _mean(table, m, "coverage") for m in METHODS}
    out.append(Verdict("(ii) full coverage for all methods",
                       "pass" if all(v == 1.0 for v in cv.values()) else "fail",
                       ", ".join(f"{LABELS[m]}={cv[m]:g}" for m in METHODS)))

    de = {m: _mean(table, m, "dead_ends") for m in METHODS}
    ok = all(de["wfc"] > de[m] for m in others)
    out.append(Verdict("(iii) WFC has the most dead ends", "pass" if ok else "fail",
                       ", ".join(f"{LABELS[m]}={de[m]:g}" for m in METHODS)))

    acv = {m: _mean(table, m, "adjacent_crossing_violation_score") for m in ("ea", "pso", "gwo")}
    ok = acv["ea"] < acv["pso"] and acv["ea"] < acv["gwo"]
    out.append(Verdict("(iv) EA adjacent-crossing score below PSO and GWO",
                       "pass" if ok else "fail",
                       ", ".join(f"{LABELS[m]}={v:g}" for m, v in acv.items())))

    iqr = {m: table.get(m, "cyclomatic_complexity").iqr
           if "cyclomatic_complexity" in table.stats[m] else None for m in METHODS}
    if any(v is None for v in iqr.values()):
        out.append(Verdict("(v) MAP-Elites has the widest cyclomatic IQR", "n/a",
                           "quartiles not available"))
    else:
        ok = all(iqr["map-elites"] >= iqr[m] for m in METHODS)
        out.append(Verdict("(v) MAP-Elites has the widest cyclomatic IQR",
                           "pass" if ok else "fail",
                           ", ".join(f"{LABELS[m]}={iqr[m]:g}" for m in METHODS)))
    return out


def format_verdicts(verdicts: list[Verdict], table: StatTable | None = None) -> str:
    lines = [str(v) for v in verdicts]
    if table is not None:
        n = min((s.n for row in table.stats.values() for s in row.values()), default=0)
        if n < RECOMMENDED_RUNS:
            lines.append(f"WARNING: only {n} successful runs per method; at least "
                         f"{RECOMMENDED_RUNS} are recommended for the IQR and ordering claims")
    return "\n".join(lines) + "\n"


def write_outputs(records: list[RunRecord], out_dir, *, wfc_hard_boundary=False) -> StatTable:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = summarize(records)
    (out / "summary.csv").write_text(table.to_csv())
    (out / "summary.md").write_text(table.to_markdown())
    try:
        verdicts = format_verdicts(rank_check(table, wfc_hard_boundary=wfc_hard_boundary), table)
    except ValueError as exc:
        verdicts = f"rank check skipped: {exc}\n"
    (out / "verdicts.txt").write_text(verdicts)
    return table

"""Benchmark harness: paired baseline / region-restricted runs over a manifest."""

from __future__ import annotations

import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .circuit import compute_metrics
from .evaluator import (SimulationError, analytic_fidelity, hellinger_fidelity, simulate,
                        simulate_solution)
from .fusion import FusionConfig, average_internal_fidelity
from .resources import resolve_circuit, resolve_device
from .solver import Infeasible, SolveTimeout, solve, solve_with_haqa, validate

log = logging.getLogger(__name__)

MODES = ("baseline", "haqa")
FIDELITY_KINDS = ("analytic", "simulated", "both")


@dataclass(frozen=True)
class RunOptions:
    time_limit: float = 3600
    omega: float = 0.5
    k: int = 1
    policy: str = "depth-then-swaps"
    backend: str = "embedded"
    fidelity: str = "analytic"
    shots: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.fidelity not in FIDELITY_KINDS:
            raise ValueError(f"fidelity must be one of {', '.join(FIDELITY_KINDS)}")


@dataclass
class RunRecord:
    circuit: str
    device: str
    mode: str
    outcome: str  # solved | timeout | infeasible | error
    wall_time: float
    n_q: int = 0
    n_G: int = 0
    depth: int | None = None
    swap_count: int | None = None
    T: int | None = None
    optimal: bool | None = None
    fidelity_analytic: float | None = None
    fidelity_simulated: float | None = None
    stats: dict = field(default_factory=dict)
    region: dict | None = None
    message: str = ""

    def to_document(self, timings: bool = True) -> dict:
        doc = asdict(self)
        if not timings:
            doc.pop("wall_time")
            for key in ("encode_time", "solve_time"):
                doc["stats"].pop(key, None)
        return doc


def run_one(circuit_ref: str, device_ref: str, mode: str, options: RunOptions, base: Path | None = None) -> RunRecord:
    """Solve one instance; failures become records instead of exceptions."""
    t0 = time.perf_counter()
    try:
        circuit = resolve_circuit(circuit_ref, base)
        device = resolve_device(device_ref, base)
    except Exception as exc:  # noqa: BLE001 - captured into the record
        return RunRecord(circuit_ref, device_ref, mode, "error", 0.0, message=str(exc))
    rec = RunRecord(circuit.name, device.name, mode, "error", 0.0,
                    n_q=circuit.n_qubits, n_G=circuit.n_two_qubit)
    try:
        if mode == "baseline":
            sol = solve(circuit, device, options.policy, options.time_limit, options.backend)
        elif mode == "haqa":
            sol = solve_with_haqa(circuit, device, FusionConfig(omega=options.omega), options.k,
                                  options.policy, options.time_limit, options.backend)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except SolveTimeout as exc:
        rec.outcome, rec.message = "timeout", str(exc)
        rec.stats = exc.stats.to_document() if exc.stats else {}
        rec.wall_time = time.perf_counter() - t0
        return rec
    except Infeasible as exc:
        rec.outcome, rec.message = "infeasible", str(exc)
        rec.wall_time = time.perf_counter() - t0
        return rec
    except Exception as exc:  # noqa: BLE001
        rec.message = f"{type(exc).__name__}: {exc}"
        rec.wall_time = time.perf_counter() - t0
        return rec
    rec.wall_time = time.perf_counter() - t0
    try:
        validate(circuit, device, sol)
    except Exception as exc:  # noqa: BLE001
        rec.message = f"solution failed validation: {exc}"
        return rec
    rec.outcome = "solved"
    rec.depth, rec.swap_count, rec.T, rec.optimal = sol.depth, sol.swap_count, sol.T, sol.optimal
    rec.stats = sol.stats.to_document()
    if sol.region is not None:
        region = sol.region
        rec.region = {"size": region.size, "n_edges": len(region.edges), "k": sol.device_stats.get("k"),
                      "mean_error": 1.0 - average_internal_fidelity(device, region.qubits)}
    if options.fidelity in ("analytic", "both"):
        rec.fidelity_analytic = analytic_fidelity(sol.routed_circuit, device)
    if options.fidelity in ("simulated", "both"):
        try:
            ideal = simulate(circuit, None, options.shots, options.seed)
            noisy = simulate_solution(sol, circuit.n_qubits, device, options.shots, options.seed)
            rec.fidelity_simulated = hellinger_fidelity(noisy, ideal)
        except SimulationError as exc:
            rec.message = f"simulation skipped: {exc}"
    return rec


@dataclass
class PairRow:
    circuit: str
    device: str
    acc_ratio: float | None
    flag: str  # "", ">" lower bound, "<" upper bound
    fidelity_change: float | None
    depth_delta: int | None
    swap_delta: int | None


def percent_change(old: float, new: float) -> float:
    return (new - old) / old * 100.0


def _fidelity(rec: RunRecord) -> float | None:
    return rec.fidelity_simulated if rec.fidelity_simulated is not None else rec.fidelity_analytic


def pair_row(base: RunRecord, haqa: RunRecord, limit: float) -> PairRow:
    """Acceleration counts a timed-out run at the limit and flags the ratio as a bound."""
    b_to, h_to = base.outcome == "timeout", haqa.outcome == "timeout"
    ratio, flag = None, ""
    if base.outcome in ("solved", "timeout") and haqa.outcome in ("solved", "timeout") and not (b_to and h_to):
        num = min(base.wall_time, limit) if b_to else base.wall_time
        den = min(haqa.wall_time, limit) if h_to else haqa.wall_time
        if den > 0:
            ratio = num / den
        flag = ">" if b_to else "<" if h_to else ""
    fb, fh = _fidelity(base), _fidelity(haqa)
    fid = percent_change(fb, fh) if fb and fh is not None else None
    both = base.outcome == haqa.outcome == "solved"
    return PairRow(base.circuit, base.device, ratio, flag, fid,
                   haqa.depth - base.depth if both else None,
                   haqa.swap_count - base.swap_count if both else None)


@dataclass
class SuiteReport:
    records: list[RunRecord]
    options: RunOptions
    pairs: list[PairRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_document(self, timings: bool = True) -> dict:
        doc = {
            "options": asdict(self.options),
            "records": [r.to_document(timings) for r in self.records],
            "pairs": [asdict(p) for p in self.pairs],
            "summary": compare_modes(self),
            "warnings": list(self.warnings),
        }
        if not timings:
            for p in doc["pairs"]:
                p.pop("acc_ratio")
            doc["summary"].pop("mean_acc_ratio", None)
        return doc

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_document(timings), indent=2, sort_keys=True) + "\n"


def _pairs(records: list[RunRecord], limit: float, warnings: list[str]) -> list[PairRow]:
    by_key: dict[tuple[str, str], dict[str, RunRecord]] = {}
    for r in records:
        by_key.setdefault((r.circuit, r.device), {})[r.mode] = r
    rows = []
    for key, modes in by_key.items():
        if "baseline" in modes and "haqa" in modes:
            rows.append(pair_row(modes["baseline"], modes["haqa"], limit))
        else:
            warnings.append(f"unpaired record for circuit {key[0]!r} on {key[1]!r}; skipped in comparison")
    return rows


def compare_modes(report: SuiteReport) -> dict:
    """Means over paired rows: acceleration, fidelity change, depth and swap deltas."""
    rows = report.pairs

    def mean(values):
        vals = [v for v in values if v is not None]
        return statistics.fmean(vals) if vals else None

    return {
        "pairs": len(rows),
        "mean_acc_ratio": mean(r.acc_ratio for r in rows),
        "acc_ratio_is_bound": any(r.flag for r in rows),
        "mean_fidelity_change_percent": mean(r.fidelity_change for r in rows),
        "mean_depth_delta": mean(r.depth_delta for r in rows),
        "mean_swap_delta": mean(r.swap_delta for r in rows),
    }


def load_manifest(path) -> tuple[dict, Path]:
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: manifest must be an object")
    for key in ("circuits", "devices"):
        if not isinstance(doc.get(key, []), list):
            raise ValueError(f"{path}: {key!r} must be an array")
    return doc, path.parent


def options_from_manifest(doc: dict, **overrides) -> RunOptions:
    fields = {k: doc[k] for k in RunOptions.__dataclass_fields__ if k in doc}
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return RunOptions(**fields)


def _task(args):
    return run_one(*args)


def run_suite(manifest: dict, options: RunOptions, base: Path | None = None, jobs: int = 1) -> SuiteReport:
    """Run every circuit on every device in every listed mode.

    Records come back in manifest order whatever ``jobs`` is.
    """
    modes = manifest.get("modes", list(MODES))
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r} in manifest")
    tasks = [(c, d, m, options, base) for d in manifest.get("devices", [])
             for c in manifest.get("circuits", []) for m in modes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_task, tasks))
    else:
        records = [_task(t) for t in tasks]
    warnings: list[str] = []
    report = SuiteReport(records, options, _pairs(records, options.time_limit, warnings), warnings)
    for w in warnings:
        log.warning(w)
    return report


def _fmt(x, spec="{:.3f}") -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return spec.format(x)


def render_table(report: SuiteReport) -> str:
    """Plain-text side-by-side table of the paired runs."""
    recs = {(r.circuit, r.device, r.mode): r for r in report.records}
    header = ["circuit", "device", "n_q", "n_G", "t_base", "t_haqa", "acc", "depth", "swaps", "fid_base",
              "fid_haqa", "fid_%"]
    rows = [header]
    for p in report.pairs:
        b, h = recs[(p.circuit, p.device, "baseline")], recs[(p.circuit, p.device, "haqa")]

        def t(r):
            return f">{r.wall_time:.2f}" if r.outcome == "timeout" else (
                _fmt(r.wall_time, "{:.2f}") if r.outcome == "solved" else r.outcome)

        rows.append([p.circuit, p.device, str(b.n_q), str(b.n_G), t(b), t(h),
                     (p.flag + _fmt(p.acc_ratio, "{:.2f}")) if p.acc_ratio is not None else "-",
                     f"{_fmt(b.depth, '{}')}/{_fmt(h.depth, '{}')}",
                     f"{_fmt(b.swap_count, '{}')}/{_fmt(h.swap_count, '{}')}",
                     _fmt(_fidelity(b), "{:.4f}"), _fmt(_fidelity(h), "{:.4f}"),
                     _fmt(p.fidelity_change, "{:+.2f}")])
    s = compare_modes(report)
    rows.append(["average", "", "", "", "", "", _fmt(s["mean_acc_ratio"], "{:.2f}"), "", "", "", "",
                 _fmt(s["mean_fidelity_change_percent"], "{:+.2f}")])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"

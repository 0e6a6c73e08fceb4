"""Command-line entry point: ``regionmap {map,regions,bench,estimate,simulate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import FIDELITY_KINDS, RunOptions, load_manifest, options_from_manifest, render_table, run_suite
from .circuit import QasmError, build_dependencies, compute_metrics
from .evaluator import (SimulationError, analytic_fidelity, complexity_estimates, hellinger_fidelity,
                        pruning_ratios, simulate, simulate_solution)
from .expansion import select_and_expand
from .fusion import FusionConfig, FusionError, recursive_community_fusion
from .hardware import DeviceError
from .resources import resolve_circuit, resolve_device
from .solver import Infeasible, SolveTimeout, solve, solve_with_haqa, validate
from .solver.backends import BackendError

log = logging.getLogger("regionmap")


class UsageError(Exception):
    pass


def _write_json(doc, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _add_device(p, required=True):
    p.add_argument("--device", required=required,
                   help="device JSON path or builtin:NAME (qx2, eagle, grid:RxC, heavy-hex:D, path:N)")


def _add_circuit(p):
    p.add_argument("--circuit", required=True, help="OpenQASM 2.0 file or builtin:NAME")


def _add_region(p):
    p.add_argument("--omega", type=float, default=0.5, help="fidelity weight in the fusion reward (default 0.5)")
    p.add_argument("--expand-k", type=int, default=1, help="neighbour-absorption rounds (default 1)")
    p.add_argument("--dump-triples", metavar="PATH", help="write the recorded region triples as JSON")
    p.add_argument("--dump-region", metavar="PATH", help="write the expanded mapping region as JSON")


def _add_solver(p):
    p.add_argument("--time-limit", type=float, default=3600, help="seconds per solve (default 3600)")
    p.add_argument("--backend", default="embedded", help="embedded | dimacs:<command>")
    p.add_argument("--emit-cnf", metavar="PATH", help="write the final CNF in DIMACS form")
    p.add_argument("--policy", default="depth-then-swaps", choices=["depth-then-swaps", "swaps"],
                   help="search order (default depth-then-swaps)")
    p.add_argument("--mode", default="haqa", choices=["haqa", "baseline"],
                   help="solve inside the fused region (haqa) or on the whole device")


def _add_fidelity(p, default="analytic"):
    p.add_argument("--fidelity", default=default, choices=FIDELITY_KINDS)
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regionmap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="map one circuit onto a device")
    _add_device(p)
    _add_circuit(p)
    _add_region(p)
    _add_solver(p)
    _add_fidelity(p)
    p.add_argument("-o", "--output", help="solution JSON path (default stdout)")
    p.add_argument("--qasm-out", metavar="PATH", help="write the routed circuit as OpenQASM")

    p = sub.add_parser("regions", help="run community fusion and dump candidate regions")
    _add_device(p)
    _add_region(p)
    p.add_argument("--n-q", type=int, help="also select and expand the region for this many qubits")
    p.add_argument("-o", "--output", help="JSON path (default stdout)")

    p = sub.add_parser("bench", help="run a manifest of paired baseline/haqa solves")
    p.add_argument("manifest", help="JSON manifest with circuits, devices and optional modes/options")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--expand-k", type=int)
    p.add_argument("--policy", choices=["depth-then-swaps", "swaps"])
    p.add_argument("--backend")
    p.add_argument("--fidelity", choices=FIDELITY_KINDS)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", help="report JSON path (default stdout)")
    p.add_argument("--table", metavar="PATH", help="also write the plain-text table ('-' for stdout)")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock fields for reproducible reports")

    p = sub.add_parser("estimate", help="complexity estimates and pruning ratios")
    _add_device(p)
    _add_circuit(p)
    p.add_argument("--T", type=int, help="time bound (default: two-qubit ASAP depth)")
    p.add_argument("--S", type=int, default=0, help="swap bound recorded in the report")
    p.add_argument("-o", "--output")

    p = sub.add_parser("simulate", help="map a circuit and report its fidelity")
    _add_device(p)
    _add_circuit(p)
    _add_region(p)
    _add_solver(p)
    _add_fidelity(p, default="both")
    p.add_argument("-o", "--output")
    return parser


def _fusion(args, device):
    triples = recursive_community_fusion(device, FusionConfig(omega=args.omega))
    if args.dump_triples:
        _write_json(triples.to_document(), args.dump_triples)
    return triples


def _map(args):
    device = resolve_device(args.device)
    circuit = resolve_circuit(args.circuit)
    for w in circuit.warnings:
        log.info("%s: %s", circuit.name, w)
    try:
        if args.mode == "haqa":
            triples = _fusion(args, device)
            if args.dump_region:
                region = select_and_expand(device, triples, max(circuit.n_qubits, 1), args.expand_k)
                _write_json(region.to_document(), args.dump_region)
            sol = solve_with_haqa(circuit, device, FusionConfig(omega=args.omega), args.expand_k, args.policy,
                                  args.time_limit, args.backend, emit_cnf=args.emit_cnf, triples=triples)
        else:
            sol = solve(circuit, device, args.policy, args.time_limit, args.backend, emit_cnf=args.emit_cnf)
    except SolveTimeout as exc:
        return {"outcome": "timeout", "message": str(exc),
                "stats": exc.stats.to_document() if exc.stats else None}, None, None, None
    except Infeasible as exc:
        return {"outcome": "infeasible", "message": str(exc)}, None, None, None
    validate(circuit, device, sol)
    doc = {"outcome": "solved", "circuit": circuit.name, "device": device.name, "mode": args.mode}
    doc.update(sol.to_document())
    return doc, sol, circuit, device


def _fidelity_fields(args, sol, circuit, device) -> dict:
    out = {}
    if args.fidelity in ("analytic", "both"):
        out["fidelity_analytic"] = analytic_fidelity(sol.routed_circuit, device)
    if args.fidelity in ("simulated", "both"):
        try:
            ideal = simulate(circuit, None, args.shots, args.seed)
            noisy = simulate_solution(sol, circuit.n_qubits, device, args.shots, args.seed)
            out["fidelity_simulated"] = hellinger_fidelity(noisy, ideal)
            out["shots"], out["seed"] = args.shots, args.seed
        except SimulationError as exc:
            out["simulation_error"] = str(exc)
    return out


def cmd_map(args) -> int:
    doc, sol, circuit, device = _map(args)
    if sol is not None:
        doc.update(_fidelity_fields(args, sol, circuit, device))
        if args.qasm_out:
            Path(args.qasm_out).write_text(sol.routed_circuit.to_qasm(), encoding="utf-8")
    _write_json(doc, args.output)
    return 0


def cmd_simulate(args) -> int:
    doc, sol, circuit, device = _map(args)
    out = {"outcome": doc["outcome"], "circuit": doc.get("circuit"), "device": doc.get("device"),
           "mode": args.mode}
    if sol is not None:
        out.update({"swap_count": sol.swap_count, "depth": sol.depth})
        out.update(_fidelity_fields(args, sol, circuit, device))
    else:
        out["message"] = doc.get("message")
    _write_json(out, args.output)
    return 0


def cmd_regions(args) -> int:
    device = resolve_device(args.device)
    triples = _fusion(args, device)
    doc = {"device": device.name, "omega": args.omega, **triples.to_document()}
    if args.n_q is not None:
        region = select_and_expand(device, triples, args.n_q, args.expand_k)
        doc["region"] = region.to_document()
        if args.dump_region:
            _write_json(region.to_document(), args.dump_region)
    _write_json(doc, args.output)
    return 0


def cmd_bench(args) -> int:
    manifest, base = load_manifest(args.manifest)
    options = options_from_manifest(
        manifest, time_limit=args.time_limit, omega=args.omega, k=args.expand_k, policy=args.policy,
        backend=args.backend, fidelity=args.fidelity, shots=args.shots, seed=args.seed)
    report = run_suite(manifest, options, base, jobs=args.jobs)
    text = report.to_json(timings=not args.no_timings)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    if args.table:
        table = render_table(report)
        if args.table == "-":
            sys.stdout.write(table)
        else:
            Path(args.table).write_text(table, encoding="utf-8")
    return 0


def cmd_estimate(args) -> int:
    device = resolve_device(args.device)
    circuit = resolve_circuit(args.circuit)
    two_q = circuit.two_qubit_gates
    level = [0] * circuit.n_qubits
    for g in two_q:
        top = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = top
    T = args.T if args.T is not None else max(1, max(level, default=0))
    ratios = pruning_ratios(device, max(circuit.n_qubits, 1))
    metrics = compute_metrics(circuit)
    report = complexity_estimates(
        device.n_qubits, device.n_edges, circuit.n_qubits, circuit.n_two_qubit,
        metrics.logical_interaction_edges, build_dependencies(circuit, two_qubit_only=True).B,
        T, device.d_max, device.d_min, args.S, ratios.r_aq, ratios.r_ae)
    _write_json({"circuit": circuit.name, "device": device.name, "pruning": ratios.to_document(),
                 "estimates": report.to_document()}, args.output)
    return 0


COMMANDS = {"map": cmd_map, "regions": cmd_regions, "bench": cmd_bench, "estimate": cmd_estimate,
            "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    for name in ("time_limit", "shots", "expand_k", "jobs"):
        val = getattr(args, name, None)
        if val is not None and val < (1 if name in ("shots", "jobs") else 0):
            parser.error(f"--{name.replace('_', '-')} must be {'positive' if name in ('shots', 'jobs') else 'nonnegative'}")
    try:
        return COMMANDS[args.command](args)
    except (OSError, QasmError, DeviceError, FusionError, BackendError, ValueError) as exc:
        print(f"regionmap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Bound search over the transition model, decoding, and the region pipeline."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..circuit import Gate, LogicalCircuit, compute_metrics, expand_swaps
from ..expansion import MappingRegion, restrict_graph, select_and_expand
from ..fusion import FusionConfig, recursive_community_fusion
from ..hardware import CouplingGraph
from .backends import make_backend
from .cdcl import SolverTimeout
from .encoding import Encoding, EncodingBounds, EncodingStats, InfeasibleError, encode

log = logging.getLogger(__name__)

POLICIES = ("depth-then-swaps", "swaps")


class SolveTimeout(Exception):
    """No solution within the time limit; ``stats`` holds the last encoding's counts."""

    def __init__(self, message: str, stats: EncodingStats | None = None):
        super().__init__(message)
        self.stats = stats


class BoundCapReached(SolveTimeout):
    pass


class Infeasible(Exception):
    pass


@dataclass
class MappingSolution:
    initial_mapping: tuple[int, ...]
    mapping_trace: tuple[tuple[int, ...], ...]
    swap_schedule: tuple[tuple[int, tuple[int, int]], ...]
    gate_schedule: dict[int, int]
    routed_circuit: LogicalCircuit
    stats: EncodingStats
    optimal: bool = True
    region: MappingRegion | None = None
    device_stats: dict = field(default_factory=dict)

    @property
    def swap_count(self) -> int:
        return len(self.swap_schedule)

    @property
    def T(self) -> int:
        return len(self.mapping_trace)

    @property
    def final_mapping(self) -> tuple[int, ...]:
        return self.mapping_trace[-1]

    @property
    def depth(self) -> int:
        return compute_metrics(self.routed_circuit).depth

    def translate(self, to_device, n_device: int) -> "MappingSolution":
        """Re-express physical ids through ``to_device`` on a device of ``n_device`` qubits."""
        f = lambda p: to_device[p]  # noqa: E731
        routed = LogicalCircuit.from_gates(
            n_device, [Gate(g.name, tuple(f(p) for p in g.qubits), g.params) for g in self.routed_circuit.gates],
            name=self.routed_circuit.name)
        return replace(
            self,
            initial_mapping=tuple(f(p) for p in self.initial_mapping),
            mapping_trace=tuple(tuple(f(p) for p in m) for m in self.mapping_trace),
            swap_schedule=tuple((t, tuple(sorted((f(u), f(v))))) for t, (u, v) in self.swap_schedule),
            routed_circuit=routed)

    def to_document(self) -> dict:
        doc = {
            "initial_mapping": list(self.initial_mapping),
            "final_mapping": list(self.final_mapping),
            "mapping_trace": [list(m) for m in self.mapping_trace],
            "swap_schedule": [[t, list(e)] for t, e in self.swap_schedule],
            "gate_schedule": {str(k): v for k, v in sorted(self.gate_schedule.items())},
            "swap_count": self.swap_count,
            "T": self.T,
            "depth": self.depth,
            "optimal": self.optimal,
            "stats": self.stats.to_document(),
        }
        if self.region is not None:
            doc["region"] = self.region.to_document()
        if self.device_stats:
            doc["device"] = dict(self.device_stats)
        return doc


def depth_lower_bound(circuit: LogicalCircuit) -> int:
    # a block may hold any number of dependent gates, so one step can always suffice
    return 1


def step_cap(circuit: LogicalCircuit, graph: CouplingGraph) -> int:
    """Steps that always suffice on a connected graph: one swap-layer burst per gate."""
    n_g = len(circuit.two_qubit_gates)
    if n_g == 0 or graph.n_qubits < 2:
        return 1
    reach = max(1, math.ceil((graph.diameter() - 1) / 2))
    return depth_lower_bound(circuit) + n_g * reach


def decode(enc: Encoding, model, circuit: LogicalCircuit, graph: CouplingGraph) -> MappingSolution:
    d = enc.directory
    T = enc.bounds.T
    n_q, n_P = circuit.n_qubits, graph.n_qubits
    trace = []
    for t in range(T):
        row = []
        for q in range(n_q):
            ps = [p for p in range(n_P) if model[d.x[q][t][p]]]
            if len(ps) != 1:
                raise RuntimeError(f"model places qubit {q} on {len(ps)} positions at step {t}")
            row.append(ps[0])
        trace.append(tuple(row))
    gate_step = {}
    for g, gate in enumerate(d.gates):
        ts = [t for t in range(T) if model[d.y[g][t]]]
        gate_step[gate.index] = ts[0]
    swaps = tuple((t, d.edges[e]) for t in range(T) for e in range(len(d.edges)) if model[d.sigma[e][t]])

    # single-qubit gates join the block of the last two-qubit gate on their wire
    last = [0] * n_q
    order = []
    for g in circuit.gates:
        if g.is_two_qubit:
            t = gate_step[g.index]
            for q in g.qubits:
                last[q] = t
        else:
            t = last[g.qubits[0]]
            gate_step[g.index] = t
        order.append((t, g.index, g))
    order.sort(key=lambda item: (item[0], item[1]))
    routed = []
    pos = 0
    for t in range(T):
        while pos < len(order) and order[pos][0] == t:
            g = order[pos][2]
            routed.append(Gate(g.name, tuple(trace[t][q] for q in g.qubits), g.params))
            pos += 1
        routed += [Gate("swap", e) for s, e in swaps if s == t]
    routed_circuit = LogicalCircuit.from_gates(n_P, routed, name=f"{circuit.name}_routed")
    return MappingSolution(trace[0], tuple(trace), swaps, gate_step, routed_circuit, enc.stats)


def _count_swaps(enc: Encoding, model) -> int:
    return sum(1 for row in enc.directory.sigma for s in row if model[s])


def solve(circuit: LogicalCircuit, graph: CouplingGraph, policy: str = "depth-then-swaps",
          time_limit: float | None = 3600, backend: str = "embedded",
          position_encoding: str = "onehot", emit_cnf=None) -> MappingSolution:
    """Find a mapping with the fewest steps, then the fewest swaps at that step count.

    With ``policy="swaps"`` the search continues at larger step counts until
    the swap count is globally minimal. On timeout during minimisation the
    best solution so far is returned with ``optimal=False``.

    Raises:
        Infeasible: more logical qubits than physical ones.
        SolveTimeout: no solution found in time (``BoundCapReached`` when the
            step cap is exhausted).
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown search policy {policy!r}; choose from {', '.join(POLICIES)}")
    circuit = expand_swaps(circuit)
    if circuit.n_qubits > graph.n_qubits:
        raise Infeasible(f"{circuit.n_qubits} logical qubits > {graph.n_qubits} physical qubits")
    deadline = None if time_limit is None else time.monotonic() + time_limit
    cap = step_cap(circuit, graph) if graph.is_connected() else None
    T = depth_lower_bound(circuit)
    state: dict = {"solve_time": 0.0}

    def run(be, clauses, n_vars) -> bool:
        be.add_clauses(clauses, n_vars)
        t0 = time.perf_counter()
        try:
            return be.solve(deadline=deadline)
        finally:
            state["solve_time"] += time.perf_counter() - t0

    enc = None
    while True:
        if cap is not None and T > cap:
            raise BoundCapReached(f"bound cap reached at T={cap}", enc.stats if enc else None)
        try:
            enc = encode(circuit, graph, EncodingBounds(T), position_encoding)
        except InfeasibleError as exc:
            raise Infeasible(str(exc)) from exc
        be = make_backend(backend)
        try:
            sat = run(be, enc.cnf.clauses, enc.cnf.n_vars)
        except SolverTimeout:
            enc.stats.solve_time = state["solve_time"]
            raise SolveTimeout(f"time limit reached while searching T={T}", enc.stats) from None
        if sat:
            break
        if cap is None and T >= 4 * max(1, len(circuit.two_qubit_gates)) + 1:
            # disconnected graphs only: give up once far past any useful depth
            raise BoundCapReached(f"no mapping up to T={T}", enc.stats)
        T += 1

    best_enc, model = enc, be.model()
    best_S = _count_swaps(enc, model)
    sat_len = len(enc.cnf.clauses)  # formula size at the last satisfiable call
    optimal = True
    try:
        while best_S > 0:
            clauses = enc.tighten(best_S - 1)
            if not run(be, clauses, enc.cnf.n_vars):
                break
            model = be.model()
            best_S = _count_swaps(enc, model)
            sat_len = len(enc.cnf.clauses)
        if policy == "swaps" and best_S > T:
            # more swaps than layers: a longer schedule may serialise fewer swaps
            T2 = best_S
            enc2 = encode(circuit, graph, EncodingBounds(T2, best_S - 1), position_encoding)
            be2 = make_backend(backend)
            clauses = enc2.cnf.clauses
            while run(be2, clauses, enc2.cnf.n_vars):
                model2 = be2.model()
                best_enc, model, best_S = enc2, model2, _count_swaps(enc2, model2)
                sat_len = len(enc2.cnf.clauses)
                if best_S == 0:
                    break
                clauses = enc2.tighten(best_S - 1)
    except SolverTimeout:
        optimal = False
        log.warning("time limit reached during swap minimisation; returning best found")

    solution = decode(best_enc, model, circuit, graph)
    solution.optimal = optimal
    solution.stats.solve_time = state["solve_time"]
    if emit_cnf is not None:
        best_enc.cnf.write_dimacs(Path(emit_cnf), limit=sat_len)
    return solution


def solve_with_haqa(circuit: LogicalCircuit, device: CouplingGraph, fusion_config: FusionConfig | None = None,
                    k: int = 1, policy: str = "depth-then-swaps", time_limit: float | None = 3600,
                    backend: str = "embedded", position_encoding: str = "onehot",
                    emit_cnf=None, triples=None) -> MappingSolution:
    """Solve inside the best fused region grown by ``k``; ids in the result are device ids.

    An infeasible region (or exhausted step cap) is retried once with
    ``k + 1``. ``triples`` may carry a precomputed fusion result.
    """
    circuit = expand_swaps(circuit)
    if circuit.n_qubits > device.n_qubits:
        raise Infeasible(f"{circuit.n_qubits} logical qubits > {device.n_qubits} physical qubits")
    deadline = None if time_limit is None else time.monotonic() + time_limit
    if triples is None:
        triples = recursive_community_fusion(device, fusion_config or FusionConfig())
    attempts = [k, k + 1]
    for i, kk in enumerate(attempts):
        region = select_and_expand(device, triples, max(circuit.n_qubits, 1), kk)
        sub = restrict_graph(device, region)
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        try:
            sol = solve(circuit, sub.graph, policy, remaining, backend, position_encoding, emit_cnf)
        except (Infeasible, BoundCapReached) as exc:
            if i + 1 < len(attempts):
                log.warning("region infeasible with k=%d (%s); retrying with k=%d", kk, exc, kk + 1)
                continue
            raise Infeasible(f"region infeasible: {exc}") from exc
        out = sol.translate(sub.to_device, device.n_qubits)
        out.region = region
        out.device_stats = {"n_P": device.n_qubits, "n_E": device.n_edges, "d_max": device.d_max,
                            "d_min": device.d_min, "k": kk}
        return out
    raise AssertionError("unreachable")

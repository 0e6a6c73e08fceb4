"""Independent checks of a mapping solution against the circuit and graph.

Nothing here reads solver variables: the checks work from the decoded
trace, schedules and routed circuit only.
"""

from __future__ import annotations

from collections import deque

from ..circuit import LogicalCircuit, build_dependencies, expand_swaps
from ..hardware import CouplingGraph


class ValidationError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems[:5]) + (f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""))


def find_problems(circuit: LogicalCircuit, graph: CouplingGraph, solution) -> list[str]:
    circuit = expand_swaps(circuit)
    problems = []
    trace = solution.mapping_trace
    n_q = circuit.n_qubits
    if not trace:
        return ["empty mapping trace"]
    if tuple(trace[0]) != tuple(solution.initial_mapping):
        problems.append("initial mapping differs from trace step 0")

    # (a) injective and in range
    for t, m in enumerate(trace):
        if len(m) != n_q:
            problems.append(f"step {t}: mapping covers {len(m)} of {n_q} qubits")
        if len(set(m)) != len(m):
            problems.append(f"step {t}: mapping not injective")
        if any(not 0 <= p < graph.n_qubits for p in m):
            problems.append(f"step {t}: physical qubit out of range")

    # (b) operands adjacent at the scheduled step
    two_q = [g for g in circuit.gates if g.is_two_qubit]
    for g in two_q:
        t = solution.gate_schedule.get(g.index)
        if t is None or not 0 <= t < len(trace):
            problems.append(f"gate {g.index} not scheduled")
            continue
        a, b = g.qubits
        if not graph.has_edge(trace[t][a], trace[t][b]):
            problems.append(f"gate {g.index} on non-adjacent qubits at step {t}")

    # (c) transitions are exactly the scheduled transpositions; (d) disjoint per step
    by_step: dict[int, list[tuple[int, int]]] = {}
    for t, (u, v) in solution.swap_schedule:
        by_step.setdefault(t, []).append((u, v))
        if not graph.has_edge(u, v):
            problems.append(f"swap ({u},{v}) at step {t} is not a coupling edge")
        if not 0 <= t < len(trace) - 1:
            problems.append(f"swap ({u},{v}) scheduled after the last step")
    for t, swaps in by_step.items():
        touched = [p for e in swaps for p in e]
        if len(set(touched)) != len(touched):
            problems.append(f"overlapping swaps at step {t}")
    for t in range(len(trace) - 1):
        where = {p: q for q, p in enumerate(trace[t])}
        for u, v in by_step.get(t, ()):
            qu, qv = where.pop(u, None), where.pop(v, None)
            if qu is not None:
                where[v] = qu
            if qv is not None:
                where[u] = qv
        expected = [None] * n_q
        for p, q in where.items():
            expected[q] = p
        if expected != list(trace[t + 1]):
            problems.append(f"step {t + 1} does not follow from step {t} and its swaps")

    # (e) dependency order
    for g1, g2 in build_dependencies(circuit, two_qubit_only=True).edges:
        a, b = two_q[g1].index, two_q[g2].index
        ta, tb = solution.gate_schedule.get(a), solution.gate_schedule.get(b)
        if ta is not None and tb is not None and ta > tb:
            problems.append(f"gate {b} scheduled before its predecessor {a}")

    problems.extend(check_routed(circuit, graph, solution))
    return problems


def check_routed(circuit: LogicalCircuit, graph: CouplingGraph, solution) -> list[str]:
    """Replay the routed circuit from the initial mapping.

    Every routed gate must be the next pending logical gate on each of its
    wires, so the routed order is any linear extension of the circuit's.
    """
    problems = []
    where = {p: q for q, p in enumerate(solution.initial_mapping)}
    pending = [deque() for _ in range(circuit.n_qubits)]
    for g in circuit.gates:
        for q in g.qubits:
            pending[q].append(g)
    for pg in solution.routed_circuit.gates:
        if pg.is_two_qubit and not graph.has_edge(*pg.qubits):
            problems.append(f"routed {pg.name}{pg.qubits} off the coupling graph")
        if pg.name == "swap":
            u, v = pg.qubits
            qu, qv = where.pop(u, None), where.pop(v, None)
            if qu is not None:
                where[v] = qu
            if qv is not None:
                where[u] = qv
            continue
        got = tuple(where.get(p) for p in pg.qubits)
        if None in got:
            problems.append(f"routed {pg.name}{pg.qubits} acts on an unmapped qubit")
            continue
        heads = {id(pending[q][0]) if pending[q] else None for q in got}
        lg = pending[got[0]][0] if pending[got[0]] else None
        if lg is None or len(heads) != 1 or lg.name != pg.name or lg.qubits != got \
                or tuple(lg.params) != tuple(pg.params):
            problems.append(f"routed {pg.name}{pg.qubits} does not realise the next logical gate")
            continue
        for q in got:
            pending[q].popleft()
    if any(pending):
        problems.append("routed circuit is missing gates")
    return problems


def validate(circuit: LogicalCircuit, graph: CouplingGraph, solution) -> None:
    problems = find_problems(circuit, graph, solution)
    if problems:
        raise ValidationError(problems)

"""Transition-based propositional model of the layout problem.

Time is coarse: step ``t`` is a block of two-qubit gates executed under a
fixed mapping, followed by a layer of disjoint swaps that produces the
mapping of step ``t + 1``. Gates sharing a qubit may sit in the same block
as long as their order follows the circuit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from ..circuit import LogicalCircuit, build_dependencies
from ..hardware import CouplingGraph
from .cnf import CNF, SequentialCounter

FAMILIES = ("injective", "consistency", "dependency", "swap", "transformation")
POSITION_ENCODINGS = ("onehot", "binary")


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class EncodingBounds:
    T: int
    S: int | None = None  # None leaves the swap count unconstrained

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"infeasible bounds: T must be >= 1, got {self.T}")
        if self.S is not None and self.S < 0:
            raise ValueError(f"infeasible bounds: S must be >= 0, got {self.S}")


@dataclass
class EncodingStats:
    n_var: int
    n_clause: int
    n_constraint_by_family: dict[str, int]
    n_var_groups: int = 0
    T: int = 0
    n_P: int = 0
    n_E: int = 0
    encode_time: float = 0.0
    solve_time: float = 0.0

    def to_document(self) -> dict:
        return {
            "n_var": self.n_var, "n_clause": self.n_clause, "n_var_groups": self.n_var_groups,
            "n_constraint_by_family": dict(self.n_constraint_by_family),
            "T": self.T, "n_P": self.n_P, "n_E": self.n_E,
            "encode_time": round(self.encode_time, 6), "solve_time": round(self.solve_time, 6),
        }


@dataclass
class VariableDirectory:
    """``x[q][t][p]`` position literals, ``y[g][t]`` gate-time, ``sigma[e][t]`` swap indicators.

    ``gates`` lists the two-qubit gates in circuit order; ``g`` indexes that
    list. ``edges`` are the solve graph's edge keys, indexed by ``e``.
    """

    x: list[list[list[int]]]
    y: list[list[int]]
    sigma: list[list[int]]
    gates: list
    edges: list[tuple[int, int]]

    def value(self, model, lit: int) -> bool:
        return model[lit] if lit > 0 else not model[-lit]


@dataclass
class Encoding:
    cnf: CNF
    directory: VariableDirectory
    bounds: EncodingBounds
    stats: EncodingStats
    counter: SequentialCounter | None = field(default=None, repr=False)

    def tighten(self, S: int) -> list[tuple[int, ...]]:
        """Add ``sum(sigma) <= S`` and return the clauses appended to the CNF."""
        start = len(self.cnf.clauses)
        lits = [s for row in self.directory.sigma for s in row[:-1]]
        if self.counter is None:
            self.counter = SequentialCounter(self.cnf, lits, max(S + 1, 1), "swap")
        if S >= self.counter.capacity:
            raise ValueError(f"bound {S} is looser than the counter built for {self.counter.capacity - 1}")
        unit = self.counter.bound_clause(S)
        if unit is not None:
            self.cnf.add(unit, "swap")
        self.stats.n_var = self.cnf.n_vars
        self.stats.n_clause = len(self.cnf.clauses)
        self.stats.n_constraint_by_family = {f: self.cnf.families[f] for f in FAMILIES}
        return self.cnf.clauses[start:]


def _positions(cnf: CNF, n_q: int, T: int, n_P: int, mode: str) -> list[list[list[int]]]:
    x = [[cnf.new_vars(n_P) for _ in range(T)] for _ in range(n_q)]
    if mode == "onehot":
        for q in range(n_q):
            for t in range(T):
                cnf.exactly_one(x[q][t], "injective")
        return x
    # log-width code per (q, t); position literals are channelled to it
    width = max(1, math.ceil(math.log2(n_P)))
    for q in range(n_q):
        for t in range(T):
            bits = cnf.new_vars(width)
            for code in range(2 ** width):
                pattern = [bits[i] if code >> i & 1 else -bits[i] for i in range(width)]
                if code < n_P:
                    p = x[q][t][code]
                    for lit in pattern:
                        cnf.add((-p, lit), "injective")
                    cnf.add([p] + [-lit for lit in pattern], "injective")
                else:
                    cnf.add([-lit for lit in pattern], "injective")
    return x


def encode(circuit: LogicalCircuit, graph: CouplingGraph, bounds: EncodingBounds,
           position_encoding: str = "onehot") -> Encoding:
    """Build the CNF for ``circuit`` on ``graph`` with at most ``bounds.T`` steps.

    Returns:
        An :class:`Encoding` holding the formula, its variable directory and
        clause counts per constraint family.
    """
    if position_encoding not in POSITION_ENCODINGS:
        raise ValueError(f"unknown position encoding {position_encoding!r}")
    n_q, n_P = circuit.n_qubits, graph.n_qubits
    if n_q > n_P:
        raise InfeasibleError(f"infeasible bounds: {n_q} logical qubits > {n_P} physical qubits")
    t0 = time.perf_counter()
    T = bounds.T
    cnf = CNF()
    gates = circuit.two_qubit_gates
    edges = list(graph.edge_keys())
    nbrs = [sorted(graph.neighbors(p)) for p in range(n_P)]

    x = _positions(cnf, n_q, T, n_P, position_encoding)
    y = [cnf.new_vars(T) for _ in gates]
    sigma = [cnf.new_vars(T) for _ in edges]

    # injective: no two logical qubits share a physical qubit
    for t in range(T):
        for p in range(n_P):
            cnf.at_most_one([x[q][t][p] for q in range(n_q)], "injective")

    # consistency: each gate runs in one step, on adjacent qubits
    for g, gate in enumerate(gates):
        cnf.exactly_one(y[g], "consistency")
        a, b = gate.qubits
        for t in range(T):
            for p in range(n_P):
                cnf.add([-y[g][t], -x[a][t][p]] + [x[b][t][r] for r in nbrs[p]], "consistency")

    # dependency: a gate never runs in an earlier block than its predecessor
    for g1, g2 in build_dependencies(circuit, two_qubit_only=True).edges:
        for t in range(T):
            cnf.add([-y[g2][t]] + [y[g1][s] for s in range(t + 1)], "dependency")

    # swap: disjoint swaps per layer, none after the final block
    incident: list[list[int]] = [[] for _ in range(n_P)]
    for e, (u, v) in enumerate(edges):
        incident[u].append(e)
        incident[v].append(e)
        cnf.add((-sigma[e][T - 1],), "swap")
    for t in range(T - 1):
        for e, (u, v) in enumerate(edges):
            for f in incident[u] + incident[v]:
                if f > e:
                    cnf.add((-sigma[e][t], -sigma[f][t]), "swap")

    # transformation: a qubit stays put unless a swap on its position moves it
    for t in range(T - 1):
        for q in range(n_q):
            xt, xn = x[q][t], x[q][t + 1]
            for p in range(n_P):
                cnf.add([-xt[p], xn[p]] + [sigma[e][t] for e in incident[p]], "transformation")
            for e, (u, v) in enumerate(edges):
                s = sigma[e][t]
                cnf.add((-s, -xt[u], xn[v]), "transformation")
                cnf.add((-s, -xt[v], xn[u]), "transformation")

    directory = VariableDirectory(x, y, sigma, gates, edges)
    stats = EncodingStats(
        n_var=cnf.n_vars, n_clause=len(cnf.clauses),
        n_constraint_by_family={f: cnf.families[f] for f in FAMILIES},
        n_var_groups=T * (n_q + len(edges)) + len(gates),
        T=T, n_P=n_P, n_E=len(edges))
    cnf.comments.append(f"layout T={T} n_q={n_q} n_P={n_P} n_E={len(edges)} n_G={len(gates)}")
    enc = Encoding(cnf, directory, bounds, stats)
    if bounds.S is not None:
        enc.tighten(bounds.S)
    stats.encode_time = time.perf_counter() - t0
    return enc

"""Output-quality and complexity metrics.

Simulation is a dense statevector with a stochastic two-qubit Pauli channel
sampled per shot. Every shot draws from its own generator seeded by
``(seed, shot)``, so results do not depend on how shots are batched.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from typing import Mapping

import numpy as np

from .circuit import SWAP_WEIGHT, Gate, LogicalCircuit
from .hardware import CouplingGraph
from .solver.validate import ValidationError

SIM_QUBIT_CAP = 12


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class OutcomeDistribution:
    probabilities: dict[str, float]
    shots: int = 0

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "OutcomeDistribution":
        shots = sum(counts.values())
        if shots <= 0:
            raise ValueError("no shots recorded")
        return cls({k: v / shots for k, v in sorted(counts.items()) if v}, shots)

    def __getitem__(self, key: str) -> float:
        return self.probabilities.get(key, 0.0)

    def to_document(self) -> dict:
        return {"shots": self.shots, "probabilities": dict(sorted(self.probabilities.items()))}


def _probs(d) -> Mapping[str, float]:
    return d.probabilities if isinstance(d, OutcomeDistribution) else d


def hellinger_fidelity(o_p, o_n) -> float:
    """``(1 - 1/2 * sum_i (sqrt(p_i) - sqrt(n_i))**2)**2`` over the union of supports.

    Evaluated in 40-digit decimal arithmetic and rounded once, so closed-form
    cases such as 0.5 come out exact.
    """
    p, n = _probs(o_p), _probs(o_n)
    with localcontext() as ctx:
        ctx.prec = 40
        total = Decimal(0)
        for key in set(p) | set(n):
            a, b = Decimal(p.get(key, 0.0)), Decimal(n.get(key, 0.0))
            if a < 0 or b < 0:
                raise ValueError("negative probability")
            total += (a.sqrt() - b.sqrt()) ** 2
        hf = (1 - total / 2) ** 2
    return min(1.0, max(0.0, float(hf)))


# gate tables --------------------------------------------------------------

_S2 = 1 / math.sqrt(2)
_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (_I2, _X, _Y, _Z)


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -cmath.exp(1j * lam) * s],
                     [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c]], dtype=complex)


def _phase(lam):
    return np.diag([1, cmath.exp(1j * lam)]).astype(complex)


def _rz(t):
    return np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t)])


_FIXED_1Q = {
    "id": _I2, "x": _X, "y": _Y, "z": _Z,
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "s": _phase(math.pi / 2), "sdg": _phase(-math.pi / 2),
    "t": _phase(math.pi / 4), "tdg": _phase(-math.pi / 4),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "sxdg": 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]),
}
_PARAM_1Q = {
    "rx": lambda t: _u3(t, -math.pi / 2, math.pi / 2),
    "ry": lambda t: _u3(t, 0, 0),
    "rz": _rz,
    "u1": _phase, "p": _phase,
    "u2": lambda phi, lam: _u3(math.pi / 2, phi, lam),
    "u3": _u3, "u": _u3,
}


def _controlled(u):
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


def _two_qubit_matrix(g: Gate) -> np.ndarray:
    """4x4 unitary with the first operand as the high-order bit."""
    name, ps = g.name, g.params
    if name == "cx":
        return _controlled(_X)
    if name == "cy":
        return _controlled(_Y)
    if name == "cz":
        return _controlled(_Z)
    if name == "ch":
        return _controlled(_FIXED_1Q["h"])
    if name in ("cp", "cu1"):
        return _controlled(_phase(ps[0]))
    if name == "crz":
        return _controlled(_rz(ps[0]))
    if name == "rzz":
        t = ps[0]
        return np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t), cmath.exp(0.5j * t), cmath.exp(-0.5j * t)])
    if name == "swap":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    raise SimulationError(f"no matrix for two-qubit gate '{name}'")


def gate_matrix(g: Gate) -> np.ndarray:
    if g.is_two_qubit:
        return _two_qubit_matrix(g)
    if g.name in _FIXED_1Q:
        return _FIXED_1Q[g.name]
    if g.name in _PARAM_1Q:
        try:
            return np.asarray(_PARAM_1Q[g.name](*g.params), dtype=complex)
        except TypeError as exc:
            raise SimulationError(f"gate '{g.name}' got {len(g.params)} parameters") from exc
    raise SimulationError(f"no matrix for gate '{g.name}'")


def _apply(state: np.ndarray, u: np.ndarray, qubits) -> np.ndarray:
    k = len(qubits)
    t = np.tensordot(u.reshape([2] * (2 * k)), state, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(t, list(range(k)), list(qubits))


def final_state(circuit: LogicalCircuit) -> np.ndarray:
    """Noiseless statevector; axis ``i`` of the reshaped tensor is qubit ``i``."""
    n = circuit.n_qubits
    if n > SIM_QUBIT_CAP:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {SIM_QUBIT_CAP}")
    state = np.zeros([2] * n, dtype=complex)
    state[(0,) * n] = 1
    for g in circuit.gates:
        state = _apply(state, gate_matrix(g), g.qubits)
    return state.reshape(-1)


def _edge_error(noise, u: int, v: int) -> float:
    if noise is None:
        return 0.0
    if isinstance(noise, CouplingGraph):
        return noise.error(u, v) if noise.has_edge(u, v) else 0.0
    return float(noise.get((min(u, v), max(u, v)), 0.0))


def _marginal(probs: np.ndarray, n: int, measure) -> np.ndarray:
    t = probs.reshape([2] * n)
    rest = tuple(i for i in range(n) if i not in measure)
    if rest:
        t = t.sum(axis=rest)
    kept = sorted(measure)
    # reorder the surviving axes into the requested readout order
    t = np.transpose(t, [kept.index(q) for q in measure])
    return t.reshape(-1)


def simulate(circuit: LogicalCircuit, noise=None, shots: int = 1024, seed: int = 0,
             measure=None) -> OutcomeDistribution:
    """Sample computational-basis outcomes of ``circuit``.

    Args:
        noise: None, a CouplingGraph, or a ``{(u, v): error}`` map keyed by
            sorted pairs. After each two-qubit gate on such a pair a uniformly
            random non-identity Pauli pair hits its operands with that
            probability (three independent trials for a swap).
        measure: qubits to read out; character ``i`` of each outcome string
            is qubit ``measure[i]``. Defaults to every qubit in order.
    """
    n = circuit.n_qubits
    if n > SIM_QUBIT_CAP:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {SIM_QUBIT_CAP}")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    measure = list(range(n)) if measure is None else list(measure)
    mats = [gate_matrix(g) for g in circuit.gates]
    errs = [(_edge_error(noise, *g.qubits) if g.is_two_qubit else 0.0) for g in circuit.gates]
    trials = [SWAP_WEIGHT if g.name == "swap" else 1 for g in circuit.gates]

    def run(faults: dict[int, list[int]]) -> np.ndarray:
        state = np.zeros([2] * n, dtype=complex)
        state[(0,) * n] = 1
        for i, g in enumerate(circuit.gates):
            state = _apply(state, mats[i], g.qubits)
            for code in faults.get(i, ()):
                a, b = divmod(code, 4)
                state = _apply(state, _PAULIS[a], (g.qubits[0],))
                state = _apply(state, _PAULIS[b], (g.qubits[1],))
        p = np.abs(state.reshape(-1)) ** 2
        return _marginal(p / p.sum(), n, measure)

    ideal = run({})
    counts: dict[int, int] = {}
    noisy = [i for i, e in enumerate(errs) if e > 0]
    for shot in range(shots):
        fault_rng = np.random.default_rng([seed, shot, 0])
        faults: dict[int, list[int]] = {}
        for i in noisy:
            for _ in range(trials[i]):
                if fault_rng.random() < errs[i]:
                    faults.setdefault(i, []).append(int(fault_rng.integers(1, 16)))
        probs = run(faults) if faults else ideal
        outcome = int(np.random.default_rng([seed, shot, 1]).choice(len(probs), p=probs))
        counts[outcome] = counts.get(outcome, 0) + 1
    width = len(measure)
    return OutcomeDistribution.from_counts({format(k, f"0{width}b") if width else "": v for k, v in counts.items()})


def exact_distribution(circuit: LogicalCircuit, measure=None) -> OutcomeDistribution:
    n = circuit.n_qubits
    measure = list(range(n)) if measure is None else list(measure)
    p = _marginal(np.abs(final_state(circuit)) ** 2, n, measure)
    width = len(measure)
    return OutcomeDistribution({format(i, f"0{width}b"): float(v) for i, v in enumerate(p) if v > 1e-15}, 0)


def compress_routed(solution, n_logical: int) -> tuple[LogicalCircuit, list[int], list[int]]:
    """Drop untouched physical qubits.

    Returns:
        The compressed circuit, ``readout`` where ``readout[q]`` is the
        compressed index holding logical qubit ``q`` at the end, and the
        physical id of every compressed index.
    """
    used = set(solution.final_mapping) | set(solution.initial_mapping)
    for g in solution.routed_circuit.gates:
        used.update(g.qubits)
    physical = sorted(used)
    local = {p: i for i, p in enumerate(physical)}
    small = solution.routed_circuit.relabeled(local, n_qubits=len(local))
    return small, [local[solution.final_mapping[q]] for q in range(n_logical)], physical


def simulate_solution(solution, n_logical: int, noise=None, shots: int = 1024,
                      seed: int = 0) -> OutcomeDistribution:
    """Simulate a routed circuit and report outcomes indexed by logical qubit.

    ``noise`` is keyed by the routed circuit's physical ids.
    """
    small, readout, physical = compress_routed(solution, n_logical)
    if noise is not None:
        noise = {(a, b): _edge_error(noise, physical[a], physical[b])
                 for a in range(small.n_qubits) for b in range(a + 1, small.n_qubits)}
    return simulate(small, noise, shots, seed, measure=readout)


def analytic_fidelity(routed: LogicalCircuit, graph: CouplingGraph) -> float:
    """Product of ``1 - e`` over two-qubit gates; a swap counts three times."""
    f = 1.0
    for g in routed.gates:
        if not g.is_two_qubit:
            continue
        u, v = g.qubits
        if not graph.has_edge(u, v):
            raise ValidationError([f"gate {g.name}({u},{v}) is not on a coupling edge"])
        f *= (1.0 - graph.error(u, v)) ** g.weight
    return f


# complexity ---------------------------------------------------------------

@dataclass(frozen=True)
class PruningRatios:
    n_P: int
    n_E: int | None
    n_q: int
    d_max: int
    n_P_b: float
    n_P_w: float
    n_E_b: float
    n_E_w: float
    n_P_avg: float
    n_E_avg: float
    r_aq: float
    r_ae: float | None

    def to_document(self) -> dict:
        return asdict(self)


def pruning_ratios(device, n_q: int, d_max: int | None = None, n_E: int | None = None) -> PruningRatios:
    """Predicted region sizes after expansion and the device-to-region ratios.

    ``device`` is a CouplingGraph or a physical qubit count (then ``d_max``
    is required and ``n_E`` optional). Bounds larger than the device are
    clamped to it before averaging.
    """
    if isinstance(device, CouplingGraph):
        n_P, n_E, d_max = device.n_qubits, device.n_edges, device.d_max
    else:
        n_P = int(device)
        if d_max is None:
            raise ValueError("d_max is required when the device is given as a qubit count")
    if not 0 < n_q <= n_P:
        raise ValueError(f"need 0 < n_q <= n_P, got n_q={n_q}, n_P={n_P}")
    p_b = min(n_q + 1, n_P)
    p_w = min(n_q * d_max + 1, n_P)
    e_b = n_q * d_max / 2 + 1
    e_w = d_max / 2 * (n_q * d_max + 1)
    if n_E is not None:
        e_b, e_w = min(e_b, n_E), min(e_w, n_E)
    p_avg = (p_b + p_w) / 2
    e_avg = (e_b + e_w) / 2
    r_ae = n_E / e_avg if n_E is not None and e_avg > 0 else None
    return PruningRatios(n_P, n_E, n_q, d_max, p_b, p_w, e_b, e_w, p_avg, e_avg, n_P / p_avg, r_ae)


@dataclass(frozen=True)
class ComplexityReport:
    n_P: int
    n_E: int
    n_q: int
    n_G: int
    n_El: int
    B: int
    T: int
    S: int
    d_max: int
    d_min: int
    r_aq: float
    r_ae: float
    baseline: dict
    haqa: dict
    best_case: dict
    worst_case: dict

    def to_document(self) -> dict:
        return asdict(self)


def complexity_estimates(n_P, n_E, n_q, n_G, n_El, B, T, d_max, d_min=0, S=0,
                         r_aq=None, r_ae=None) -> ComplexityReport:
    """Evaluate the variable/clause/constraint growth formulas with unit constants.

    Missing ratios are taken from :func:`pruning_ratios`.
    """
    if r_aq is None or r_ae is None:
        pr = pruning_ratios(n_P, n_q, d_max=d_max, n_E=n_E)
        r_aq = pr.r_aq if r_aq is None else r_aq
        r_ae = pr.r_ae if r_ae is None else r_ae

    def estimates(nP, nE, nP_sq):
        return {
            "var_qs_v2": T * (n_q * nP + n_El + n_G),
            "clause_qs_v2": T * (n_q * nP + n_q * nE + n_El * nP_sq + n_G),
            "var_tbolsq2": T * (n_q + nE) + n_G,
            "cons_tbolsq2": T * (n_q ** 2 + (n_G + d_max + n_q) * nE + n_q * nP) + B,
        }

    baseline = estimates(n_P, n_E, n_P ** 2)
    haqa = estimates(n_P / r_aq, n_E / r_ae, n_P ** 2 / r_aq ** 2)

    def bounded(nP, nE):
        return {
            "var_qs_v2": T * (n_q * nP + n_El + n_G),
            "clause_qs_v2": T * (n_q * nP + n_q * nE + n_El * nP ** 2 + n_G),
            "var_tbolsq2": T * (nE + n_q) + n_G,
            "cons_tbolsq2": T * (n_q ** 2 + (n_G + d_max + n_q) * nE + n_q * nP) + B,
        }

    best = bounded(n_q + 1, n_q * d_max / 2 + 1)
    worst = bounded(n_q * d_max + 1, d_max / 2 * (n_q * d_max + 1))
    return ComplexityReport(n_P, n_E, n_q, n_G, n_El, B, T, S, d_max, d_min, r_aq, r_ae,
                            baseline, haqa, best, worst)

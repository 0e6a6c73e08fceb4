import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionmap.circuit import (Gate, LogicalCircuit, QasmError, build_dependencies, compute_metrics,
                               emit_qasm, expand_swaps, parse_qasm)
from regionmap.resources import resolve_circuit

HEAD = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_qaoa5_profile_from_text():
    body = "".join(f"cx q[{a}],q[{b}];\n" for a, b in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 3), (2, 4), (0, 4)])
    c = parse_qasm(HEAD + "qreg q[5];\n" + body)
    assert c.n_qubits == 5 and c.n_two_qubit == 8


def test_empty_body():
    c = parse_qasm(HEAD + "qreg q[3];\n")
    assert c.gates == () and compute_metrics(c).depth == 0


def test_repeated_operand():
    with pytest.raises(QasmError, match="repeated operand"):
        parse_qasm(HEAD + "qreg q[2];\ncx q[0],q[0];\n")


@pytest.mark.parametrize("text,match", [
    ("qreg q[2];\ncx q[0],q[5];\n", "out of range"),
    ("qreg q[3];\nccx q[0],q[1],q[2];\n", "three-qubit"),
    ("qreg q[2];\ncx q[0];\n", "expects 2 operands"),
    ("qreg q[2];\nh q[0]\n", "terminating"),
    ("qreg q[2];\nqreg r[2];\n", "single quantum register"),
    ("qreg q[2];\ncx q,q[1];\n", "broadcast"),
    ("qreg q[2];\nh r[0];\n", "unknown register"),
    ("qreg q[2];\nif(c==1) x q[0];\n", "unsupported"),
])
def test_parse_errors(text, match):
    with pytest.raises(QasmError, match=match):
        parse_qasm(HEAD + text)


def test_error_carries_line_number():
    with pytest.raises(QasmError) as info:
        parse_qasm(HEAD + "qreg q[2];\nh q[0];\ncx q[1],q[1];\n")
    assert info.value.line == 5


def test_measure_barrier_dropped_swap_expanded():
    c = parse_qasm(HEAD + "qreg q[2];\ncreg c[2];\nbarrier q;\nswap q[0],q[1];\nmeasure q[0] -> c[0];\n")
    assert [g.name for g in c.gates] == ["cx", "cx", "cx"]
    assert len(c.warnings) == 3


def test_params_and_broadcast():
    c = parse_qasm(HEAD + "qreg q[3];\nrz(pi/2) q[1];\nu3(0.1, -pi, 2*pi) q[0];\nh q;\n")
    assert c.gates[0].params == pytest.approx((1.5707963267948966,))
    assert c.gates[1].params[1] == pytest.approx(-3.141592653589793)
    assert [g.qubits for g in c.gates[2:]] == [(0,), (1,), (2,)]


def test_metrics_examples():
    single = LogicalCircuit.from_gates(2, [("cx", (0, 1))])
    m = compute_metrics(single)
    assert (m.depth, m.two_qubit_count) == (1, 1)
    chain = LogicalCircuit.from_gates(4, [("cx", (0, 1)), ("cx", (0, 2)), ("cx", (3, 0))])
    assert compute_metrics(chain).depth == 3


# depth / n_q / n_G of the bundled benchmarks, as listed in the published tables
BENCHMARKS = {"or": (8, 3, 6), "qaoa5": (14, 5, 8), "4mod5-v1_22": (12, 5, 11), "adder": (11, 4, 10),
              "mod5mils_65": (21, 5, 16), "4gt13_92": (38, 5, 30), "tof_4": (46, 7, 22),
              "barenco_tof_4": (68, 7, 34)}


@pytest.mark.parametrize("name", sorted(BENCHMARKS))
def test_benchmark_profiles(name):
    c = resolve_circuit(f"builtin:{name}")
    m = compute_metrics(c)
    assert (m.depth, c.n_qubits, m.two_qubit_count) == BENCHMARKS[name]


def test_dependency_examples():
    shared = LogicalCircuit.from_gates(3, [("cx", (0, 1)), ("cx", (1, 2))])
    assert build_dependencies(shared).B == 1
    disjoint = LogicalCircuit.from_gates(4, [("cx", (0, 1)), ("cx", (2, 3))])
    assert build_dependencies(disjoint).B == 0
    # gates sharing both qubits contribute two chain links but one DAG edge
    twice = LogicalCircuit.from_gates(2, [("cx", (0, 1)), ("cz", (1, 0))])
    deps = build_dependencies(twice)
    assert deps.B == 2 and deps.edges == ((0, 1),)


def _naive_B(circuit):
    total = 0
    for q in range(circuit.n_qubits):
        on_q = [g for g in circuit.gates if q in g.qubits]
        total += max(0, len(on_q) - 1)
    return total


def test_ten_gate_example_B():
    rng = random.Random(10)
    gates = [("cx", tuple(rng.sample(range(5), 2))) for _ in range(10)]
    c = LogicalCircuit.from_gates(5, gates)
    assert build_dependencies(c).B == _naive_B(c)


gate_lists = st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.one_of(
        st.tuples(st.sampled_from(["h", "t", "x", "rz"]), st.integers(0, n - 1)),
        st.tuples(st.sampled_from(["cx", "cz"]), st.integers(0, n - 1), st.integers(0, n - 1)),
    ), max_size=200)))


def _build(n, items):
    gates = []
    for it in items:
        if len(it) == 2:
            gates.append((it[0], (it[1],), (0.25,) if it[0] == "rz" else ()))
        elif it[1] != it[2]:
            gates.append((it[0], (it[1], it[2])))
    return LogicalCircuit.from_gates(n, gates)


@given(gate_lists)
@settings(max_examples=80, deadline=None)
def test_roundtrip_and_invariants(data):
    n, items = data
    c = _build(n, items)
    again = parse_qasm(emit_qasm(c))
    assert [(g.name, g.qubits, g.params) for g in again.gates] == [(g.name, g.qubits, g.params) for g in c.gates]
    m = compute_metrics(c)
    assert m.depth <= m.gate_count
    assert m.two_qubit_count <= m.gate_count
    assert build_dependencies(c).B == _naive_B(c)
    perm = list(range(n))
    random.Random(n).shuffle(perm)
    assert compute_metrics(c.relabeled(perm)).depth == m.depth
    for a, b in build_dependencies(c).edges:
        assert a < b and set(c.gates[a].qubits) & set(c.gates[b].qubits)


def test_expand_swaps():
    c = LogicalCircuit.from_gates(2, [Gate("swap", (0, 1)), Gate("h", (0,))])
    assert compute_metrics(c).depth == 4
    e = expand_swaps(c)
    assert [g.name for g in e.gates] == ["cx", "cx", "cx", "h"]

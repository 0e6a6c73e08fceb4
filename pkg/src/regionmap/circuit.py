"""Logical circuits: an OpenQASM 2.0 subset parser, dependency chains, metrics."""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

TWO_QUBIT_GATES = frozenset({"cx", "cz", "cy", "ch", "swap", "cp", "cu1", "crz", "rzz"})
# a routed SWAP is three CNOTs in depth and gate counts
SWAP_WEIGHT = 3


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    index: int = 0

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    @property
    def weight(self) -> int:
        return SWAP_WEIGHT if self.name == "swap" else 1


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    gate_count: int
    two_qubit_count: int
    logical_interaction_edges: int


@dataclass(frozen=True)
class Dependencies:
    """Per-qubit chains: ``links`` keeps one entry per shared qubit, ``edges`` is the deduplicated DAG."""

    links: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def B(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class LogicalCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    name: str = "circuit"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def from_gates(cls, n_qubits: int, gates: Iterable, name: str = "circuit") -> "LogicalCircuit":
        """Build from ``Gate`` objects or ``(name, qubits[, params])`` tuples, re-indexing in order."""
        built = []
        for i, g in enumerate(gates):
            if isinstance(g, Gate):
                name_, qubits, params = g.name, g.qubits, g.params
            else:
                name_, qubits, *rest = g
                params = tuple(rest[0]) if rest else ()
            qubits = tuple(int(q) for q in qubits)
            _check_operands(name_, qubits, n_qubits, None)
            built.append(Gate(name_, qubits, tuple(params), i))
        return cls(n_qubits, tuple(built), name)

    @property
    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_two_qubit]

    @property
    def n_two_qubit(self) -> int:
        return sum(g.weight for g in self.gates if g.is_two_qubit)

    def interaction_edges(self) -> set[tuple[int, int]]:
        return {tuple(sorted(g.qubits)) for g in self.gates if g.is_two_qubit}

    def relabeled(self, mapping: Sequence[int] | dict, n_qubits: int | None = None) -> "LogicalCircuit":
        return LogicalCircuit.from_gates(
            n_qubits if n_qubits is not None else self.n_qubits,
            [Gate(g.name, tuple(mapping[q] for q in g.qubits), g.params) for g in self.gates],
            name=self.name)

    def to_qasm(self) -> str:
        return emit_qasm(self)


def _check_operands(name: str, qubits: tuple[int, ...], n_qubits: int, line: int | None) -> None:
    if len(qubits) > 2:
        raise QasmError(f"unsupported three-qubit gate '{name}'", line)
    if name in TWO_QUBIT_GATES and len(qubits) != 2:
        raise QasmError(f"gate '{name}' expects 2 operands, got {len(qubits)}", line)
    if len(qubits) == 2 and qubits[0] == qubits[1]:
        raise QasmError(f"gate '{name}' has repeated operand q[{qubits[0]}]", line)
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise QasmError(f"qubit index {q} out of range for register of size {n_qubits}", line)


# parameter expressions ---------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
          "ln": math.log, "sqrt": math.sqrt}


def _eval_param(text: str, line: int) -> float:
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise QasmError(f"bad parameter expression {text!r}", line) from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise QasmError(f"bad parameter expression {text!r}", line)

    return ev(tree)


# parser ------------------------------------------------------------------

_STMT = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?:\((?P<params>[^)]*)\))?\s*(?P<args>.*)$", re.S)
_ARG = re.compile(r"^(?P<reg>[A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(?P<idx>\d+)\s*\])?$")


def _statements(text: str):
    """Yield ``(line_number, statement)`` pairs split on ``;`` with comments removed."""
    buf = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield start, stmt
                buf = []
                start = None
            else:
                if start is None and not ch.isspace():
                    start = lineno
                buf.append(ch)
        buf.append(" ")
    rest = "".join(buf).strip()
    if rest:
        raise QasmError("statement missing terminating ';'", start)


def parse_qasm(text: str, name: str = "circuit") -> LogicalCircuit:
    """Parse the supported OpenQASM 2.0 subset.

    ``swap`` is expanded to three ``cx`` gates, ``measure`` and ``barrier``
    are dropped; both leave a note in ``warnings``. Single-qubit gates are
    kept as opaque labels with their evaluated parameters.
    """
    qreg: tuple[str, int] | None = None
    gates: list[Gate] = []
    warnings: list[str] = []

    def add(gname, qubits, params=()):
        gates.append(Gate(gname, qubits, params, len(gates)))

    for lineno, stmt in _statements(text):
        if not stmt:
            continue
        lead = re.match(r"[A-Za-z_]\w*", stmt)
        head = lead.group(0) if lead else stmt.split(None, 1)[0]
        if head == "OPENQASM" or head == "include":
            continue
        if head in ("qreg", "creg"):
            m = re.fullmatch(r"(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]", stmt)
            if not m:
                raise QasmError(f"malformed register declaration {stmt!r}", lineno)
            if head == "qreg":
                if qreg is not None:
                    raise QasmError("only a single quantum register is supported", lineno)
                qreg = (m.group(2), int(m.group(3)))
            continue
        if head in ("measure", "barrier"):
            warnings.append(f"line {lineno}: dropped '{head}'")
            continue
        if head in ("gate", "opaque", "if", "reset"):
            raise QasmError(f"unsupported statement '{head}'", lineno)
        m = _STMT.match(stmt)
        if not m:
            raise QasmError(f"syntax error in {stmt!r}", lineno)
        if qreg is None:
            raise QasmError("gate applied before any qreg declaration", lineno)
        gname = m.group("name").lower()
        params = ()
        if m.group("params") is not None and m.group("params").strip():
            params = tuple(_eval_param(p, lineno) for p in m.group("params").split(","))
        args = [a.strip() for a in m.group("args").split(",")] if m.group("args").strip() else []
        if not args:
            raise QasmError(f"gate '{gname}' has no operands", lineno)
        operands: list[int | None] = []
        for a in args:
            am = _ARG.match(a)
            if not am:
                raise QasmError(f"syntax error in operand {a!r}", lineno)
            if am.group("reg") != qreg[0]:
                raise QasmError(f"unknown register '{am.group('reg')}'", lineno)
            operands.append(int(am.group("idx")) if am.group("idx") is not None else None)

        if None in operands:
            # whole-register broadcast, only meaningful for single-qubit gates
            if len(operands) != 1 or gname in TWO_QUBIT_GATES:
                raise QasmError(f"register broadcast not supported for '{gname}'", lineno)
            for q in range(qreg[1]):
                add(gname, (q,), params)
            continue
        qubits = tuple(operands)
        _check_operands(gname, qubits, qreg[1], lineno)
        if gname == "swap":
            a, b = qubits
            add("cx", (a, b))
            add("cx", (b, a))
            add("cx", (a, b))
            warnings.append(f"line {lineno}: swap expanded to 3 cx")
        else:
            add(gname, qubits, params)

    if qreg is None:
        raise QasmError("no qreg declaration")
    return LogicalCircuit(qreg[1], tuple(gates), name, tuple(warnings))


def load_qasm(path) -> LogicalCircuit:
    path = Path(path)
    return parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)


def _fmt_param(x: float) -> str:
    return repr(float(x))


def emit_qasm(circuit: LogicalCircuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    for g in circuit.gates:
        ps = f"({','.join(_fmt_param(p) for p in g.params)})" if g.params else ""
        ops = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{g.name}{ps} {ops};")
    return "\n".join(lines) + "\n"


# structure ---------------------------------------------------------------

def expand_swaps(circuit: LogicalCircuit) -> LogicalCircuit:
    """Replace logical ``swap`` gates by three ``cx`` so inserted swaps stay unambiguous."""
    if not any(g.name == "swap" for g in circuit.gates):
        return circuit
    out = []
    for g in circuit.gates:
        if g.name == "swap":
            a, b = g.qubits
            out += [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
        else:
            out.append(g)
    return LogicalCircuit.from_gates(circuit.n_qubits, out, name=circuit.name)


def build_dependencies(circuit: LogicalCircuit, two_qubit_only: bool = False) -> Dependencies:
    """Chain consecutive gates on each qubit.

    With ``two_qubit_only`` the chain skips single-qubit gates and indices
    refer to positions in ``circuit.two_qubit_gates``.
    """
    gates = circuit.two_qubit_gates if two_qubit_only else list(circuit.gates)
    last = [-1] * circuit.n_qubits
    links = []
    for i, g in enumerate(gates):
        for q in g.qubits:
            if last[q] >= 0:
                links.append((last[q], i))
            last[q] = i
    edges = tuple(dict.fromkeys(links))
    return Dependencies(tuple(links), edges)


def compute_metrics(circuit: LogicalCircuit) -> CircuitMetrics:
    """ASAP layering over all gates; a ``swap`` occupies three layers."""
    level = [0] * circuit.n_qubits
    for g in circuit.gates:
        top = max(level[q] for q in g.qubits) + g.weight
        for q in g.qubits:
            level[q] = top
    return CircuitMetrics(
        depth=max(level, default=0),
        gate_count=sum(g.weight for g in circuit.gates),
        two_qubit_count=circuit.n_two_qubit,
        logical_interaction_edges=len(circuit.interaction_edges()),
    )

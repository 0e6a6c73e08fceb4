"""CNF container with per-family clause accounting and DIMACS I/O."""

from __future__ import annotations

import itertools
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence


class CNF:
    def __init__(self):
        self.n_vars = 0
        self.clauses: list[tuple[int, ...]] = []
        self.families: Counter = Counter()
        self.comments: list[str] = []

    def new_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def new_vars(self, n: int) -> list[int]:
        start = self.n_vars + 1
        self.n_vars += n
        return list(range(start, start + n))

    def add(self, clause: Iterable[int], family: str) -> None:
        c = tuple(clause)
        if not c:
            raise ValueError("empty clause")
        self.clauses.append(c)
        self.families[family] += 1

    def at_most_one(self, lits: Sequence[int], family: str) -> None:
        for a, b in itertools.combinations(lits, 2):
            self.add((-a, -b), family)

    def exactly_one(self, lits: Sequence[int], family: str) -> None:
        self.add(lits, family)
        self.at_most_one(lits, family)

    def __len__(self) -> int:
        return len(self.clauses)

    def to_dimacs(self, limit: int | None = None) -> str:
        """DIMACS text of the first ``limit`` clauses (all by default)."""
        clauses = self.clauses if limit is None else self.clauses[:limit]
        out = [f"c {line}" for line in self.comments]
        out.append(f"p cnf {self.n_vars} {len(clauses)}")
        out.extend(" ".join(map(str, c)) + " 0" for c in clauses)
        return "\n".join(out) + "\n"

    def write_dimacs(self, path, limit: int | None = None) -> None:
        Path(path).write_text(self.to_dimacs(limit), encoding="ascii")


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Return ``(n_vars, clauses)``; clauses may span lines as the format allows."""
    n_vars = None
    clauses = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line {line!r}")
            n_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if n_vars is None:
        n_vars = max((abs(l) for c in clauses for l in c), default=0)
    return n_vars, clauses


def parse_solver_output(text: str, returncode: int | None = None) -> tuple[bool | None, list[int]]:
    """Read SAT-competition style output: an ``s`` status line and ``v`` value lines.

    Falls back to the conventional exit codes 10 (SAT) and 20 (UNSAT) when
    no status line is printed. Returns ``(status, true_or_false_literals)``
    with ``status`` None when undetermined.
    """
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
        elif line.startswith("v "):
            lits.extend(int(t) for t in line[2:].split() if t != "0")
    if status is None and returncode in (10, 20):
        status = returncode == 10
    return status, lits


class SequentialCounter:
    """Unary counter over ``lits`` supporting bounds ``sum <= k`` for ``k < capacity``.

    Register ``s[i][j]`` is forced true whenever at least ``j + 1`` of the
    first ``i + 1`` literals are true. Only the upward implications are
    encoded, so asserting ``not s[n-1][k]`` caps the sum at ``k`` and a
    tighter cap is just one more unit clause.
    """

    def __init__(self, cnf: CNF, lits: Sequence[int], capacity: int, family: str):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.lits = list(lits)
        self.registers: list[list[int]] = []
        prev = None
        for i, x in enumerate(self.lits):
            width = min(i + 1, capacity)
            row = cnf.new_vars(width)
            cnf.add((-x, row[0]), family)
            for j in range(width):
                if prev is not None and j < len(prev):
                    cnf.add((-prev[j], row[j]), family)
                if prev is not None and 0 < j <= len(prev):
                    cnf.add((-x, -prev[j - 1], row[j]), family)
            self.registers.append(row)
            prev = row

    def bound_clause(self, k: int) -> tuple[int, ...] | None:
        """Unit clause enforcing ``sum <= k``; None when the bound is vacuous."""
        if k < 0:
            raise ValueError("bound must be >= 0")
        if not self.lits or k >= len(self.lits):
            return None
        if k >= self.capacity:
            raise ValueError(f"counter capacity {self.capacity} cannot express bound {k}")
        return (-self.registers[-1][k],)

"""SAT back-ends: the in-process engine and an external DIMACS command."""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from typing import Iterable, Sequence

from .cdcl import CDCLSolver, SolverTimeout
from .cnf import parse_solver_output


class BackendError(RuntimeError):
    pass


class EmbeddedBackend:
    """Incremental: clauses added between calls are kept along with learnt ones."""

    name = "embedded"

    def __init__(self):
        self._solver = CDCLSolver()
        self._n_vars = 0

    def add_clauses(self, clauses: Iterable[Sequence[int]], n_vars: int = 0) -> None:
        self._solver.ensure_vars(n_vars)
        self._solver.add_clauses(clauses)

    def solve(self, deadline: float | None = None) -> bool:
        return self._solver.solve(deadline=deadline)

    def model(self) -> list[bool]:
        return self._solver.model()

    @property
    def stats(self) -> dict:
        s = self._solver
        return {"conflicts": s.conflicts, "decisions": s.decisions, "propagations": s.propagations}


class DimacsBackend:
    """Runs ``command <file.cnf>`` on the accumulated formula for every solve."""

    def __init__(self, command: str):
        self.argv = shlex.split(command)
        if not self.argv:
            raise BackendError("empty solver command")
        self.name = f"dimacs:{command}"
        self._clauses: list[Sequence[int]] = []
        self._n_vars = 0
        self._model: list[bool] | None = None
        self.stats: dict = {"calls": 0}

    def add_clauses(self, clauses: Iterable[Sequence[int]], n_vars: int = 0) -> None:
        for c in clauses:
            self._clauses.append(tuple(c))
            for lit in c:
                n_vars = max(n_vars, abs(lit))
        self._n_vars = max(self._n_vars, n_vars)

    def solve(self, deadline: float | None = None) -> bool:
        timeout = None
        if deadline is not None:
            timeout = deadline - time.monotonic()
            if timeout <= 0:
                raise SolverTimeout()
        fd, path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write(f"p cnf {self._n_vars} {len(self._clauses)}\n")
                for c in self._clauses:
                    fh.write(" ".join(map(str, c)) + " 0\n")
            try:
                proc = subprocess.run(self.argv + [path], capture_output=True, text=True, timeout=timeout)
            except subprocess.TimeoutExpired as exc:
                raise SolverTimeout() from exc
            except OSError as exc:
                raise BackendError(f"cannot run {self.argv[0]!r}: {exc}") from exc
        finally:
            os.unlink(path)
        self.stats["calls"] += 1
        status, lits = parse_solver_output(proc.stdout, proc.returncode)
        if status is None:
            raise BackendError(f"solver {self.argv[0]!r} gave no verdict (exit {proc.returncode}): "
                               f"{proc.stderr.strip()[:200]}")
        if status:
            model = [False] * (self._n_vars + 1)
            for lit in lits:
                if abs(lit) <= self._n_vars:
                    model[abs(lit)] = lit > 0
            self._model = model
        else:
            self._model = None
        return status

    def model(self) -> list[bool]:
        if self._model is None:
            raise BackendError("no model available")
        return self._model


def make_backend(spec: str = "embedded"):
    """``"embedded"`` or ``"dimacs:<command>"``."""
    if spec == "embedded":
        return EmbeddedBackend()
    if spec.startswith("dimacs:"):
        return DimacsBackend(spec[len("dimacs:"):])
    raise BackendError(f"unknown backend {spec!r}; use 'embedded' or 'dimacs:<cmd>'")

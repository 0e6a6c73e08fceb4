from .backends import BackendError, DimacsBackend, EmbeddedBackend, make_backend
from .cdcl import CDCLSolver, SolverTimeout
from .cnf import CNF, SequentialCounter, parse_dimacs
from .encoding import FAMILIES, Encoding, EncodingBounds, EncodingStats, InfeasibleError, encode
from .search import (BoundCapReached, Infeasible, MappingSolution, SolveTimeout, decode, solve,
                     solve_with_haqa, step_cap)
from .validate import ValidationError, find_problems, validate


def export_dimacs(cnf: CNF, path) -> None:
    cnf.write_dimacs(path)


__all__ = [
    "BackendError", "BoundCapReached", "CDCLSolver", "CNF", "DimacsBackend", "EmbeddedBackend",
    "Encoding", "EncodingBounds", "EncodingStats", "FAMILIES", "Infeasible", "InfeasibleError",
    "MappingSolution", "SequentialCounter", "SolveTimeout", "SolverTimeout", "ValidationError",
    "decode", "encode", "export_dimacs", "find_problems", "make_backend", "parse_dimacs", "solve",
    "solve_with_haqa", "step_cap", "validate",
]

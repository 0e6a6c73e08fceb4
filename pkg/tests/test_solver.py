import itertools
import random
import sys
import time

import pytest

from oracles import min_layers_then_swaps, min_swaps
from regionmap.circuit import LogicalCircuit
from regionmap.hardware import CouplingGraph, generate_grid, generate_path, ibm_eagle_like, ibm_qx2
from regionmap.resources import resolve_circuit
from regionmap.solver import (CDCLSolver, CNF, BackendError, EncodingBounds, FAMILIES, Infeasible, SolveTimeout,
                              SolverTimeout, ValidationError, encode, find_problems, make_backend, parse_dimacs,
                              solve, solve_with_haqa, validate)
from regionmap.solver.cnf import SequentialCounter, parse_solver_output


def cx_circuit(n, pairs):
    return LogicalCircuit.from_gates(n, [("cx", p) for p in pairs])


def random_cnf(rng, n, m, k=3):
    return [tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), k)) for _ in range(m)]


def satisfies(model, clauses):
    return all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


# --- CDCL core -------------------------------------------------------------

def test_cdcl_agrees_with_reference_solver():
    from pysat.solvers import Minisat22
    rng = random.Random(1)
    for _ in range(150):
        n = rng.randint(3, 40)
        clauses = random_cnf(rng, n, int(n * rng.uniform(3.5, 5.0)))
        s = CDCLSolver(n)
        s.add_clauses(clauses)
        got = s.solve()
        with Minisat22(bootstrap_with=[list(c) for c in clauses]) as ref:
            assert got == ref.solve()
        if got:
            assert satisfies(s.model(), clauses)


def test_cdcl_incremental_units():
    s = CDCLSolver(3)
    s.add_clauses([(1, 2), (-1, 3)])
    assert s.solve()
    s.add_clause((-3,))
    assert s.solve() and s.model()[2] and not s.model()[1]
    s.add_clause((-2,))
    assert not s.solve()


def test_cdcl_times_out_on_pigeonhole():
    n = 11  # 11 pigeons, 10 holes
    var = lambda i, j: i * (n - 1) + j + 1  # noqa: E731
    clauses = [tuple(var(i, j) for j in range(n - 1)) for i in range(n)]
    for j in range(n - 1):
        for a, b in itertools.combinations(range(n), 2):
            clauses.append((-var(a, j), -var(b, j)))
    s = CDCLSolver(n * (n - 1))
    s.add_clauses(clauses)
    t0 = time.monotonic()
    with pytest.raises(SolverTimeout):
        s.solve(time_limit=0.3)
    assert time.monotonic() - t0 < 2.0


# --- CNF / counter / DIMACS -------------------------------------------------

def test_empty_formula_header():
    assert CNF().to_dimacs().strip() == "p cnf 0 0"
    c = CNF()
    c.new_vars(3)
    assert c.to_dimacs().strip() == "p cnf 3 0"


def test_dimacs_roundtrip_and_multiline():
    c = CNF()
    a, b, d = c.new_vars(3)
    c.add((a, -b), "x")
    c.add((d,), "y")
    c.comments.append("hello")
    assert parse_dimacs(c.to_dimacs()) == (3, [(1, -2), (3,)])
    assert parse_dimacs("p cnf 2 1\n1\n-2 0\n") == (2, [(1, -2)])


def test_solver_output_parsing():
    assert parse_solver_output("s SATISFIABLE\nv 1 -2\nv 3 0\n") == (True, [1, -2, 3])
    assert parse_solver_output("s UNSATISFIABLE\n")[0] is False
    assert parse_solver_output("", 20)[0] is False
    assert parse_solver_output("garbage", 1)[0] is None


@pytest.mark.parametrize("n,k", [(5, 0), (5, 2), (6, 5), (4, 1)])
def test_sequential_counter_exact(n, k):
    for bits in itertools.product([False, True], repeat=n):
        cnf = CNF()
        xs = cnf.new_vars(n)
        ctr = SequentialCounter(cnf, xs, k + 1, "swap")
        unit = ctr.bound_clause(k)
        if unit:
            cnf.add(unit, "swap")
        for x, b in zip(xs, bits):
            cnf.add((x if b else -x,), "fix")
        s = CDCLSolver(cnf.n_vars)
        s.add_clauses(cnf.clauses)
        assert s.solve() == (sum(bits) <= k)


# --- encoding ---------------------------------------------------------------

def test_single_gate_two_nodes():
    enc = encode(cx_circuit(2, [(0, 1)]), generate_path(2), EncodingBounds(1, 0))
    assert enc.stats.n_var == enc.cnf.n_vars
    sol = solve(cx_circuit(2, [(0, 1)]), generate_path(2))
    assert sol.swap_count == 0 and sol.T == 1


def test_variable_group_count():
    c = cx_circuit(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    g = generate_grid(2, 3)
    for T in (1, 3):
        enc = encode(c, g, EncodingBounds(T))
        assert enc.stats.n_var_groups == T * (4 + g.n_edges) + 4
        assert set(enc.stats.n_constraint_by_family) == set(FAMILIES)


def test_too_many_logical_qubits():
    with pytest.raises(Infeasible):
        solve(cx_circuit(3, [(0, 1), (1, 2), (0, 2)]), generate_path(2))


def test_bad_bounds():
    with pytest.raises(ValueError, match="infeasible bounds"):
        EncodingBounds(0)
    with pytest.raises(ValueError, match="infeasible bounds"):
        EncodingBounds(2, -1)


def test_encoding_grows_with_T():
    c = resolve_circuit("builtin:qaoa5")
    sizes = [encode(c, ibm_qx2(), EncodingBounds(T)).stats for T in (1, 2, 3, 4)]
    assert all(a.n_var < b.n_var and a.n_clause < b.n_clause for a, b in zip(sizes, sizes[1:]))


def _sat(enc):
    s = CDCLSolver(enc.cnf.n_vars)
    s.add_clauses(enc.cnf.clauses)
    return s.solve()


def test_satisfiability_monotone_in_bounds():
    c = cx_circuit(3, [(0, 1), (1, 2), (0, 2), (0, 1)])
    g = generate_path(3)
    for T in range(1, 4):
        results = [_sat(encode(c, g, EncodingBounds(T, S))) for S in range(0, 3)]
        assert results == sorted(results)  # once SAT, stays SAT as S grows
    assert _sat(encode(c, g, EncodingBounds(2, 1))) <= _sat(encode(c, g, EncodingBounds(3, 1)))


# --- search -----------------------------------------------------------------

def test_triangle_on_path_needs_one_swap():
    sol = solve(cx_circuit(3, [(0, 1), (1, 2), (0, 2)]), generate_path(3))
    assert sol.swap_count == 1
    validate(cx_circuit(3, [(0, 1), (1, 2), (0, 2)]), generate_path(3), sol)


def test_embeddable_circuit_needs_no_swaps():
    c = cx_circuit(4, [(0, 1), (1, 2), (2, 3), (0, 1)])
    assert solve(c, generate_grid(2, 2)).swap_count == 0


def test_4mod5_on_qx2_matches_brute_force():
    c = resolve_circuit("builtin:4mod5-v1_22")
    g = ibm_qx2()
    sol = solve(c, g, policy="swaps")
    validate(c, g, sol)
    pairs = [gt.qubits for gt in c.two_qubit_gates]
    assert sol.swap_count == min_swaps(5, g.edge_keys(), 5, pairs) == 1


def test_unknown_policy():
    with pytest.raises(ValueError, match="unknown search policy"):
        solve(cx_circuit(2, [(0, 1)]), generate_path(2), policy="fast")


def _random_instance(rng):
    n_p = rng.randint(2, 5)
    edges = [(i, i + 1) for i in range(n_p - 1)]  # spanning path keeps it connected
    edges += [(u, v) for u in range(n_p) for v in range(u + 2, n_p) if rng.random() < 0.3]
    n_q = rng.randint(2, n_p)
    pairs = [tuple(rng.sample(range(n_q), 2)) for _ in range(rng.randint(1, 6))]
    return n_p, edges, n_q, pairs


def test_search_matches_oracles_on_small_instances():
    rng = random.Random(7)
    for _ in range(40):
        n_p, edges, n_q, pairs = _random_instance(rng)
        g = CouplingGraph.from_edges(n_p, [(u, v, 0.01) for u, v in edges])
        c = cx_circuit(n_q, pairs)
        sol = solve(c, g, policy="swaps")
        validate(c, g, sol)
        assert sol.swap_count == min_swaps(n_p, edges, n_q, pairs)
        dts = solve(c, g)
        layers, swaps = min_layers_then_swaps(n_p, edges, n_q, pairs)
        assert (dts.T, dts.swap_count) == (layers + 1, swaps)


def test_binary_positions_agree_with_onehot():
    rng = random.Random(11)
    for _ in range(15):
        n_p, edges, n_q, pairs = _random_instance(rng)
        g = CouplingGraph.from_edges(n_p, [(u, v, 0.01) for u, v in edges])
        c = cx_circuit(n_q, pairs)
        a, b = solve(c, g), solve(c, g, position_encoding="binary")
        validate(c, g, b)
        assert (a.T, a.swap_count) == (b.T, b.swap_count)


def test_emit_cnf_is_satisfiable(tmp_path):
    c = cx_circuit(3, [(0, 1), (1, 2), (0, 2)])
    path = tmp_path / "f.cnf"
    solve(c, generate_path(3), emit_cnf=path)
    n, clauses = parse_dimacs(path.read_text())
    s = CDCLSolver(n)
    s.add_clauses(clauses)
    assert s.solve()


def test_timeout_raises():
    c = resolve_circuit("builtin:mod5mils_65")
    with pytest.raises(SolveTimeout) as info:
        solve(c, ibm_eagle_like(), time_limit=1e-6)
    assert info.value.stats is not None


# --- external backend -------------------------------------------------------

REF_SCRIPT = """
import sys
from pysat.formula import CNF
from pysat.solvers import Minisat22
f = CNF(from_file=sys.argv[1])
with Minisat22(bootstrap_with=f.clauses) as s:
    if s.solve():
        print("s SATISFIABLE")
        print("v " + " ".join(map(str, s.get_model() or [])) + " 0")
        sys.exit(10)
    print("s UNSATISFIABLE")
    sys.exit(20)
"""


@pytest.fixture
def ref_backend(tmp_path):
    script = tmp_path / "ref_solver.py"
    script.write_text(REF_SCRIPT)
    return f"dimacs:{sys.executable} {script}"


def test_dimacs_backend_agrees_with_embedded(ref_backend):
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(3, 25)
        clauses = random_cnf(rng, n, int(n * rng.uniform(3.5, 5.0)))
        ext, emb = make_backend(ref_backend), make_backend("embedded")
        ext.add_clauses(clauses, n)
        emb.add_clauses(clauses, n)
        got = ext.solve()
        assert got == emb.solve()
        if got:
            assert satisfies(ext.model(), clauses)


def test_search_through_external_backend(ref_backend):
    c = cx_circuit(3, [(0, 1), (1, 2), (0, 2)])
    g = generate_path(3)
    sol = solve(c, g, backend=ref_backend)
    validate(c, g, sol)
    assert sol.swap_count == 1


def test_backend_errors():
    with pytest.raises(BackendError, match="unknown backend"):
        make_backend("kissat")
    be = make_backend("dimacs:/nonexistent/solver")
    be.add_clauses([(1,)], 1)
    with pytest.raises(BackendError, match="cannot run"):
        be.solve()


# --- validator --------------------------------------------------------------

def _good():
    c = cx_circuit(3, [(0, 1), (1, 2), (0, 2)])
    g = generate_path(3)
    return c, g, solve(c, g)


def test_validator_accepts_solver_output():
    c, g, sol = _good()
    assert find_problems(c, g, sol) == []


def test_validator_rejects_non_injective():
    from dataclasses import replace
    c, g, sol = _good()
    bad = replace(sol, mapping_trace=((0, 0, 1),) + sol.mapping_trace[1:], initial_mapping=(0, 0, 1))
    with pytest.raises(ValidationError, match="not injective"):
        validate(c, g, bad)


def test_validator_rejects_missing_swap():
    from dataclasses import replace
    c, g, sol = _good()
    bad = replace(sol, swap_schedule=())
    assert any("does not follow" in p for p in find_problems(c, g, bad))


def test_validator_rejects_off_edge_swap_and_bad_order():
    from dataclasses import replace
    c, g, sol = _good()
    bad = replace(sol, swap_schedule=((0, (0, 2)),))
    assert any("not a coupling edge" in p for p in find_problems(c, g, bad))
    order = dict(sol.gate_schedule)
    order[0], order[2] = sol.T - 1, 0
    assert any("before its predecessor" in p or "non-adjacent" in p
               for p in find_problems(c, g, replace(sol, gate_schedule=order)))


# --- region pipeline --------------------------------------------------------

def test_haqa_uses_smaller_formula_and_stays_in_region():
    c = resolve_circuit("builtin:qaoa5")
    dev = generate_grid(5, 5, "random", seed=2)
    full_enc = encode(c, dev, EncodingBounds(2))
    sol = solve_with_haqa(c, dev, k=1)
    validate(c, dev, sol)
    assert sol.stats.n_var < full_enc.stats.n_var
    used = {p for m in sol.mapping_trace for p in m}
    assert used <= sol.region.qubits
    assert sol.device_stats["n_P"] == 25


def test_haqa_swaps_match_full_graph_on_small_devices():
    rng = random.Random(5)
    for _ in range(10):
        dev = generate_grid(rng.choice([2, 3]), rng.choice([3, 4]), "random", seed=rng.randrange(1000))
        n_q = rng.randint(2, 4)
        c = cx_circuit(n_q, [tuple(rng.sample(range(n_q), 2)) for _ in range(rng.randint(2, 6))])
        full = solve(c, dev, policy="swaps")
        whole = solve_with_haqa(c, dev, k=dev.n_qubits, policy="swaps")
        assert whole.swap_count == full.swap_count
        assert solve_with_haqa(c, dev, k=1, policy="swaps").swap_count >= full.swap_count


def test_haqa_retry_with_larger_k(monkeypatch):
    import regionmap.solver.search as search
    real, calls = search.solve, []

    def flaky(circuit, graph, *args, **kw):
        calls.append(graph.n_qubits)
        if len(calls) == 1:
            raise Infeasible("forced")
        return real(circuit, graph, *args, **kw)

    monkeypatch.setattr(search, "solve", flaky)
    dev = generate_grid(3, 3)
    sol = solve_with_haqa(cx_circuit(2, [(0, 1)]), dev, k=0)
    assert sol.device_stats["k"] == 1 and calls[0] < calls[1]
    monkeypatch.setattr(search, "solve", lambda *a, **kw: (_ for _ in ()).throw(Infeasible("forced")))
    with pytest.raises(Infeasible, match="region infeasible"):
        solve_with_haqa(cx_circuit(2, [(0, 1)]), dev, k=0)

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionmap.hardware import (CouplingGraph, DeviceError, generate_grid, generate_heavy_hex,
                                ibm_eagle_like, ibm_qx2, load_device, parse_device, save_device)

QX2_DOC = {"name": "qx2", "qubits": 5, "edges": [
    {"u": u, "v": v, "error": 0.02} for u, v in [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]]}


def test_qx2_document():
    g = parse_device(json.dumps(QX2_DOC))
    assert (g.n_qubits, g.n_edges, g.d_max, g.d_min) == (5, 6, 4, 2)
    assert g.neighbors(2) == {0, 1, 3, 4}


def test_no_qubits():
    with pytest.raises(DeviceError, match="no qubits"):
        parse_device(json.dumps({"qubits": 0, "edges": []}))


def test_dangling_endpoint():
    doc = dict(QX2_DOC, edges=QX2_DOC["edges"] + [{"u": 9, "v": 0, "error": 0.01}])
    with pytest.raises(DeviceError, match="dangling"):
        parse_device(json.dumps(doc))


def test_duplicate_edge_either_orientation():
    doc = dict(QX2_DOC, edges=QX2_DOC["edges"] + [{"u": 1, "v": 0, "error": 0.01}])
    with pytest.raises(DeviceError, match="duplicate"):
        parse_device(json.dumps(doc))


@pytest.mark.parametrize("err", [1.0, -0.1, float("nan")])
def test_error_range(err):
    with pytest.raises(DeviceError):
        CouplingGraph.from_edges(2, [(0, 1, err)])


def test_bad_json_reports_position():
    with pytest.raises(DeviceError, match=r"dev.json:2:"):
        parse_device('{"qubits": 2,\n "edges": [}', source="dev.json")


def test_field_context_in_errors():
    with pytest.raises(DeviceError, match=r"edges\[0\]\.error"):
        parse_device(json.dumps({"qubits": 2, "edges": [{"u": 0, "v": 1, "error": "x"}]}))


def test_unknown_fields_ignored_and_roundtrip(tmp_path):
    doc = dict(QX2_DOC, vendor="acme")
    g = parse_device(json.dumps(doc))
    path = tmp_path / "d.json"
    save_device(g, path)
    h = load_device(path)
    assert h.edges == g.edges and h.name == g.name


def test_disconnected_accepted():
    g = CouplingGraph.from_edges(4, [(0, 1, 0.01), (2, 3, 0.01)])
    assert not g.is_connected()
    with pytest.raises(ValueError):
        g.diameter()


def test_grid_counts():
    g = generate_grid(5, 5, 0.01)
    assert (g.n_qubits, g.n_edges) == (25, 40)
    single = generate_grid(1, 1, 0.0)
    assert (single.n_qubits, single.n_edges) == (1, 0)


def test_grid_seeded_random_is_deterministic():
    a = generate_grid(2, 2, "random", seed=7)
    b = generate_grid(2, 2, "random", seed=7)
    c = generate_grid(2, 2, "random", seed=8)
    assert a.edges == b.edges
    assert a.edges != c.edges


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_heavy_hex_structure(d):
    g = generate_heavy_hex(d)
    assert g.d_max == 3
    assert g.is_connected()
    assert generate_heavy_hex(d, "random", seed=3).edges == generate_heavy_hex(d, "random", seed=3).edges


def test_eagle_like_counts():
    g = ibm_eagle_like()
    assert (g.n_qubits, g.n_edges, g.d_max) == (127, 144, 3)
    assert g.is_connected()


def _random_graph(rng, n):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3]
    return CouplingGraph.from_edges(n, [(u, v, rng.uniform(0, 0.1)) for u, v in pairs])


@given(st.integers(1, 50), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_degree_and_adjacency_invariants(n, seed):
    g = _random_graph(random.Random(seed), n)
    assert sum(g.degree(p) for p in g.qubits) == 2 * g.n_edges
    keys = set(g.edge_keys())
    for u in range(n):
        assert g.d_min <= g.degree(u) <= g.d_max
        for v in range(n):
            assert g.has_edge(u, v) == ((min(u, v), max(u, v)) in keys)


def test_generated_families_degree_sum():
    for g in (generate_grid(4, 6), generate_heavy_hex(2), ibm_eagle_like(), ibm_qx2()):
        assert sum(g.degree(p) for p in g.qubits) == 2 * g.n_edges

"""Coupling graphs with per-edge two-qubit error rates.

A device is an undirected graph over dense, zero-based physical qubit ids.
Every edge carries the error rate of the two-qubit gate it supports.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class DeviceError(ValueError):
    """Raised when a device description is malformed."""


@dataclass(frozen=True)
class CouplingEdge:
    u: int
    v: int
    error: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


def _uniform(value: float):
    def model(_edge_index: int, _rng: random.Random) -> float:
        return value
    return model


def _resolve_error_model(error_model, seed):
    """Turn the public ``error_model`` argument into a per-edge callable.

    A float gives a uniform error. ``None`` or ``"random"`` draws each edge
    error uniformly from [0.001, 0.05) with ``seed``. A ``(lo, hi)`` tuple
    sets the sampling range.
    """
    if error_model is None or error_model == "random":
        lo, hi = 0.001, 0.05
    elif isinstance(error_model, tuple):
        lo, hi = error_model
    elif callable(error_model):
        return error_model
    else:
        return _uniform(float(error_model))

    def model(_edge_index: int, rng: random.Random) -> float:
        return rng.uniform(lo, hi)
    return model


@dataclass(frozen=True, eq=False)
class CouplingGraph:
    """Immutable coupling graph ``G = (P, E)`` with edge error rates.

    Build with :meth:`from_edges`; the constructor is considered private.
    """

    n_qubits: int
    edges: tuple[CouplingEdge, ...]
    name: str = "device"
    _adj: tuple[frozenset[int], ...] = field(repr=False, default=())
    _errors: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_edges(cls, n_qubits: int, edges: Iterable, name: str = "device") -> "CouplingGraph":
        """Validate and build a graph.

        ``edges`` holds ``(u, v, error)`` triples or :class:`CouplingEdge`.
        """
        if n_qubits < 1:
            raise DeviceError("no qubits")
        adj: list[set[int]] = [set() for _ in range(n_qubits)]
        errors: dict[tuple[int, int], float] = {}
        built = []
        for item in edges:
            if isinstance(item, CouplingEdge):
                u, v, err = item.u, item.v, item.error
            else:
                u, v, err = item
            u, v, err = int(u), int(v), float(err)
            if u == v:
                raise DeviceError(f"self-loop on qubit {u}")
            for p in (u, v):
                if not 0 <= p < n_qubits:
                    raise DeviceError(f"dangling endpoint: edge ({u}, {v}) references qubit {p} "
                                      f"but device has {n_qubits} qubits")
            if not math.isfinite(err) or not 0.0 <= err < 1.0:
                raise DeviceError(f"edge ({u}, {v}) error {err!r} outside [0, 1)")
            key = (min(u, v), max(u, v))
            if key in errors:
                raise DeviceError(f"duplicate edge {key}")
            errors[key] = err
            adj[u].add(v)
            adj[v].add(u)
            built.append(CouplingEdge(key[0], key[1], err))
        return cls(n_qubits=n_qubits, edges=tuple(built), name=name,
                   _adj=tuple(frozenset(a) for a in adj), _errors=errors)

    # basic counts -------------------------------------------------------
    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def qubits(self) -> range:
        return range(self.n_qubits)

    def neighbors(self, p: int) -> frozenset[int]:
        return self._adj[p]

    def degree(self, p: int) -> int:
        return len(self._adj[p])

    @property
    def d_max(self) -> int:
        return max(len(a) for a in self._adj)

    @property
    def d_min(self) -> int:
        return min(len(a) for a in self._adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def error(self, u: int, v: int) -> float:
        return self._errors[(u, v) if u < v else (v, u)]

    def edge_keys(self) -> list[tuple[int, int]]:
        return [e.key for e in self.edges]

    def mean_error(self) -> float:
        if not self.edges:
            return 0.0
        return math.fsum(e.error for e in self.edges) / len(self.edges)

    def is_connected(self) -> bool:
        return len(self.component_of(0)) == self.n_qubits

    def component_of(self, start: int, within: set[int] | None = None) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for q in self._adj[p]:
                if q not in seen and (within is None or q in within):
                    seen.add(q)
                    stack.append(q)
        return seen

    def distances_from(self, source: int) -> list[int]:
        """BFS hop distances; unreachable qubits get -1."""
        dist = [-1] * self.n_qubits
        dist[source] = 0
        frontier = [source]
        while frontier:
            nxt = []
            for p in frontier:
                for q in self._adj[p]:
                    if dist[q] < 0:
                        dist[q] = dist[p] + 1
                        nxt.append(q)
            frontier = nxt
        return dist

    def diameter(self) -> int:
        """Longest shortest path; raises on disconnected graphs."""
        best = 0
        for p in self.qubits:
            d = self.distances_from(p)
            if min(d) < 0:
                raise DeviceError("diameter undefined on a disconnected graph")
            best = max(best, max(d))
        return best

    def induced_edges(self, members: Iterable[int]) -> list[CouplingEdge]:
        s = set(members)
        return [e for e in self.edges if e.u in s and e.v in s]

    def with_errors(self, errors: Sequence[float]) -> "CouplingGraph":
        """Same topology with replaced per-edge errors (in edge order)."""
        return CouplingGraph.from_edges(
            self.n_qubits, [(e.u, e.v, err) for e, err in zip(self.edges, errors, strict=True)],
            name=self.name)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.qubits)
        for e in self.edges:
            g.add_edge(e.u, e.v, error=e.error)
        return g

    def to_document(self) -> dict:
        return {
            "name": self.name,
            "qubits": self.n_qubits,
            "edges": [{"u": e.u, "v": e.v, "error": e.error} for e in self.edges],
        }


# ingestion ---------------------------------------------------------------

def parse_device(text: str, source: str = "<string>") -> CouplingGraph:
    """Parse a JSON device document: ``{"name", "qubits", "edges": [{u, v, error}]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeviceError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DeviceError(f"{source}: top level must be an object")
    n = doc.get("qubits")
    if isinstance(n, bool) or not isinstance(n, int):
        raise DeviceError(f"{source}: field 'qubits' must be an integer count, got {n!r}")
    if n < 1:
        raise DeviceError("no qubits")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise DeviceError(f"{source}: field 'edges' must be an array")
    triples = []
    for i, item in enumerate(raw_edges):
        if not isinstance(item, dict):
            raise DeviceError(f"{source}: edges[{i}] must be an object")
        for fld in ("u", "v"):
            val = item.get(fld)
            if isinstance(val, bool) or not isinstance(val, int):
                raise DeviceError(f"{source}: edges[{i}].{fld} must be an integer, got {val!r}")
        err = item.get("error")
        if isinstance(err, bool) or not isinstance(err, (int, float)):
            raise DeviceError(f"{source}: edges[{i}].error must be a number, got {err!r}")
        triples.append((item["u"], item["v"], err))
    try:
        return CouplingGraph.from_edges(n, triples, name=str(doc.get("name", "device")))
    except DeviceError as exc:
        raise DeviceError(f"{source}: {exc}") from exc


def load_device(path) -> CouplingGraph:
    path = Path(path)
    return parse_device(path.read_text(encoding="utf-8"), source=str(path))


def save_device(graph: CouplingGraph, path) -> None:
    Path(path).write_text(json.dumps(graph.to_document(), indent=2) + "\n", encoding="utf-8")


# synthetic topologies ----------------------------------------------------

def _assign(n: int, pairs: list[tuple[int, int]], error_model, seed, name: str) -> CouplingGraph:
    model = _resolve_error_model(error_model, seed)
    rng = random.Random(seed)
    return CouplingGraph.from_edges(
        n, [(u, v, model(i, rng)) for i, (u, v) in enumerate(pairs)], name=name)


def generate_grid(rows: int, cols: int, error_model=0.01, seed: int | None = 0) -> CouplingGraph:
    """Row-major ``rows x cols`` grid; qubit ``r*cols + c``."""
    if rows < 1 or cols < 1:
        raise ValueError("grid needs rows >= 1 and cols >= 1")
    pairs = []
    for r in range(rows):
        for c in range(cols):
            p = r * cols + c
            if c + 1 < cols:
                pairs.append((p, p + 1))
            if r + 1 < rows:
                pairs.append((p, p + cols))
    return _assign(rows * cols, pairs, error_model, seed, f"grid{rows}x{cols}")


def heavy_hex_pairs(lines: int, cells: int, trim: bool = False) -> tuple[int, list[tuple[int, int]]]:
    """Edge list of an IBM-style heavy-hex lattice.

    ``lines`` horizontal qubit chains of length ``4*cells + 3`` are joined by
    bridge qubits every fourth column, the bridge columns alternating between
    offsets 0 and 2 from one gap to the next. ``trim`` drops the last qubit
    of the first chain and the first qubit of the last chain, which is the
    Eagle layout (``lines=7, cells=3, trim=True`` gives 127 qubits).
    """
    if lines < 2 or cells < 1:
        raise ValueError("heavy-hex needs lines >= 2 and cells >= 1")
    width = 4 * cells + 3
    chain: dict[tuple[int, int], int] = {}
    bridge: dict[tuple[int, int], int] = {}
    pairs: list[tuple[int, int]] = []
    nxt = 0
    for row in range(lines):
        cols = range(width)
        if trim and row == 0:
            cols = range(width - 1)
        elif trim and row == lines - 1:
            cols = range(1, width)
        prev = None
        for c in cols:
            chain[(row, c)] = nxt
            if prev is not None:
                pairs.append((prev, nxt))
            prev = nxt
            nxt += 1
        if row + 1 < lines:
            # bridges are numbered after their upper chain, as on IBM devices
            for c in range(0 if row % 2 == 0 else 2, width, 4):
                bridge[(row, c)] = nxt
                nxt += 1
    for (row, c), b in bridge.items():
        for end in (chain.get((row, c)), chain.get((row + 1, c))):
            if end is not None:
                pairs.append((end, b) if end < b else (b, end))
    # drop bridge qubits orphaned by trimming (never happens for the Eagle layout)
    used = {p for pair in pairs for p in pair}
    if len(used) != nxt:
        remap = {old: new for new, old in enumerate(sorted(used))}
        pairs = [(remap[a], remap[b]) for a, b in pairs]
        nxt = len(used)
    return nxt, pairs


def generate_heavy_hex(distance: int, error_model=0.01, seed: int | None = 0,
                       cells: int | None = None, trim: bool = False) -> CouplingGraph:
    """Heavy-hex lattice with ``distance + 1`` chains of ``distance`` cells each.

    ``cells`` overrides the chain width; maximum degree is always 3.
    """
    if distance < 1:
        raise ValueError("distance must be positive")
    n, pairs = heavy_hex_pairs(distance + 1, cells if cells is not None else distance, trim=trim)
    return _assign(n, pairs, error_model, seed, f"heavyhex{distance}")


def ibm_eagle_like(error_model=None, seed: int | None = 0) -> CouplingGraph:
    """127-qubit heavy-hex layout with the Eagle qubit count and edge count (144)."""
    n, pairs = heavy_hex_pairs(7, 3, trim=True)
    return _assign(n, pairs, error_model, seed, "eagle127")


def generate_path(n: int, error_model=0.01, seed: int | None = 0) -> CouplingGraph:
    return _assign(n, [(i, i + 1) for i in range(n - 1)], error_model, seed, f"path{n}")


def ibm_qx2(error_model=0.01, seed: int | None = 0) -> CouplingGraph:
    """5-qubit bow-tie QX2 topology."""
    pairs = [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]
    return _assign(5, pairs, error_model, seed, "ibmqx2")

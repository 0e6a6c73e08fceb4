"""Grow a selected region by rounds of neighbour absorption and cut it out of the device."""

from __future__ import annotations

from dataclasses import dataclass

from .fusion import RegionTriple, TripleSet, best_region_for
from .hardware import CouplingGraph


@dataclass(frozen=True)
class MappingRegion:
    qubits: frozenset[int]
    edges: tuple[tuple[int, int], ...]
    origin: RegionTriple
    k_applied: int

    @property
    def size(self) -> int:
        return len(self.qubits)

    def to_document(self) -> dict:
        return {
            "qubits": sorted(self.qubits),
            "edges": [list(e) for e in self.edges],
            "origin": self.origin.to_document(),
            "k": self.k_applied,
        }


def expand(graph: CouplingGraph, region: RegionTriple, k: int) -> MappingRegion:
    """Absorb every neighbour of the current qubit set, ``k`` times.

    The edge set is the closure over the final qubit set: every coupling
    edge with both endpoints inside it.
    """
    if k < 0:
        raise ValueError("expansion factor k must be >= 0")
    if k == 0:
        return MappingRegion(region.members, tuple(region.edges), region, 0)
    current = set(region.members)
    for _ in range(k):
        frontier = {q for p in current for q in graph.neighbors(p)} - current
        if not frontier:
            break
        current |= frontier
    edges = tuple(e.key for e in graph.induced_edges(current))
    return MappingRegion(frozenset(current), edges, region, k)


def select_and_expand(graph: CouplingGraph, triples: TripleSet, n_q: int, k: int = 1) -> MappingRegion:
    return expand(graph, best_region_for(triples, n_q), k)


@dataclass(frozen=True)
class RestrictedGraph:
    """A region re-indexed to ``[0, n)`` with the translation back to device ids."""

    graph: CouplingGraph
    to_device: tuple[int, ...]

    @property
    def to_local(self) -> dict[int, int]:
        return {d: i for i, d in enumerate(self.to_device)}


def restrict_graph(graph: CouplingGraph, region: MappingRegion) -> RestrictedGraph:
    order = tuple(sorted(region.qubits))
    local = {d: i for i, d in enumerate(order)}
    edges = [(local[u], local[v], graph.error(u, v)) for u, v in region.edges]
    sub = CouplingGraph.from_edges(len(order), edges, name=f"{graph.name}[region{len(order)}]")
    return RestrictedGraph(sub, order)

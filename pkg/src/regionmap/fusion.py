"""Agglomerative community fusion over a coupling graph.

Starting from singleton communities, each step merges the pair of
communities that maximises ``F = Q + omega * E`` where ``Q`` is the
Newman modularity of the resulting partition and ``E`` the mean two-qubit
fidelity inside the merged community. Every merged community is recorded
as a candidate mapping region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .hardware import CouplingGraph


class FusionError(ValueError):
    pass


@dataclass(frozen=True)
class FusionConfig:
    omega: float = 0.5
    tie_break: str = "lexicographic"
    adjacency_only: bool = True

    def __post_init__(self):
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be a finite nonnegative number, got {self.omega!r}")
        if self.tie_break != "lexicographic":
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")


@dataclass(frozen=True)
class RegionTriple:
    size: int
    members: frozenset[int]
    edges: tuple[tuple[int, int], ...]
    step: int = 0

    def to_document(self) -> dict:
        return {"size": self.size, "members": sorted(self.members),
                "edges": [list(e) for e in self.edges], "step": self.step}


@dataclass(frozen=True)
class Merge:
    left: frozenset[int]
    right: frozenset[int]
    reward: float


@dataclass(frozen=True)
class TripleSet:
    triples: tuple[RegionTriple, ...]
    merges: tuple[Merge, ...] = field(default=(), compare=False)

    def __iter__(self) -> Iterator[RegionTriple]:
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __getitem__(self, i) -> RegionTriple:
        return self.triples[i]

    @property
    def sizes(self) -> list[int]:
        return [t.size for t in self.triples]

    def to_document(self) -> dict:
        return {"triples": [t.to_document() for t in self.triples]}


def make_triple(graph: CouplingGraph, members: Iterable[int], step: int = 0) -> RegionTriple:
    s = frozenset(members)
    return RegionTriple(len(s), s, tuple(e.key for e in graph.induced_edges(s)), step)


def _check_partition(graph: CouplingGraph, partition: Sequence) -> list[frozenset[int]]:
    comms = [frozenset(c) for c in partition]
    seen: set[int] = set()
    for c in comms:
        if not c:
            raise ValueError("empty community in partition")
        if seen & c:
            raise ValueError("communities overlap")
        seen |= c
    if seen != set(graph.qubits):
        raise ValueError("partition does not cover every qubit")
    return comms


def _numerator(four_m: int, internal: int, degree_sum: int) -> int:
    return four_m * internal - degree_sum * degree_sum


def modularity(graph: CouplingGraph, partition: Sequence) -> float:
    """Newman modularity ``sum_c (L_c/m - (D_c/2m)^2)``.

    ``L_c`` counts edges inside community ``c`` and ``D_c`` its degree sum.
    The sum is formed over integers and divided once, so the result is the
    correctly rounded value of the exact rational.
    """
    comms = _check_partition(graph, partition)
    m = graph.n_edges
    if m == 0:
        raise FusionError("modularity undefined: graph has no edges")
    owner = {}
    for i, c in enumerate(comms):
        for p in c:
            owner[p] = i
    internal = [0] * len(comms)
    for e in graph.edges:
        if owner[e.u] == owner[e.v]:
            internal[owner[e.u]] += 1
    total = 0
    for i, c in enumerate(comms):
        total += _numerator(4 * m, internal[i], sum(graph.degree(p) for p in c))
    return total / (4 * m * m)


def average_internal_fidelity(graph: CouplingGraph, community: Iterable[int]) -> float:
    """``1 - mean(error)`` over edges inside ``community``; 1.0 when it has none."""
    errs = [e.error for e in graph.induced_edges(community)]
    if not errs:
        return 1.0
    return 1.0 - math.fsum(errs) / len(errs)


def reward(graph: CouplingGraph, partition_after_merge: Sequence, merged: Iterable[int],
           config: FusionConfig) -> float:
    return modularity(graph, partition_after_merge) + config.omega * average_internal_fidelity(graph, merged)


def recursive_community_fusion(graph: CouplingGraph, config: FusionConfig | None = None) -> TripleSet:
    """Merge communities greedily until one remains; return recorded regions.

    Only communities joined by at least one coupling edge may merge when
    ``config.adjacency_only`` is set. Ties on ``F`` go to the pair whose
    smallest member ids, sorted, are lexicographically smallest.
    """
    config = config or FusionConfig()
    n = graph.n_qubits
    if n == 1:
        return TripleSet((make_triple(graph, [0], 0),))
    m = graph.n_edges
    if m == 0:
        if config.adjacency_only:
            raise FusionError("graph disconnected: no admissible merge")
        raise FusionError("modularity undefined: graph has no edges")
    four_m = 4 * m

    members: dict[int, frozenset[int]] = {p: frozenset([p]) for p in graph.qubits}
    internal_errs: dict[int, list[float]] = {p: [] for p in graph.qubits}
    degree_sum: dict[int, int] = {p: graph.degree(p) for p in graph.qubits}
    between: dict[int, dict[int, list[float]]] = {p: {} for p in graph.qubits}
    for e in graph.edges:
        between[e.u].setdefault(e.v, []).append(e.error)
        between[e.v].setdefault(e.u, []).append(e.error)
    # community ids are the smallest member, which is also the tie-break key
    numerator = sum(_numerator(four_m, 0, d) for d in degree_sum.values())

    triples: list[RegionTriple] = []
    recorded: set[frozenset[int]] = set()
    merges: list[Merge] = []
    step = 0
    while len(members) > 1:
        step += 1
        best = None
        ids = sorted(members)
        for a in ids:
            partners = sorted(b for b in between[a] if b > a) if config.adjacency_only \
                else [b for b in ids if b > a]
            for b in partners:
                cut = between[a].get(b, ())
                new_num = numerator + four_m * len(cut) - 2 * degree_sum[a] * degree_sum[b]
                inside = internal_errs[a] + internal_errs[b] + list(cut)
                fid = 1.0 - math.fsum(inside) / len(inside) if inside else 1.0
                f = new_num / (four_m * m) + config.omega * fid
                # ids ascend, so the first maximum seen already has the smallest key
                if best is None or f > best[0]:
                    best = (f, a, b, new_num)
        if best is None:
            raise FusionError("graph disconnected: no admissible merge")
        f, a, b, numerator = best
        cut = between[a].pop(b, [])
        between[b].pop(a, None)
        merged = members[a] | members[b]
        merges.append(Merge(members[a], members[b], f))
        internal_errs[a] = internal_errs[a] + internal_errs[b] + cut
        degree_sum[a] += degree_sum[b]
        members[a] = merged
        for c, errs in between.pop(b).items():
            between[c].pop(b)
            between[a].setdefault(c, []).extend(errs)
            between[c].setdefault(a, []).extend(errs)
        del members[b], internal_errs[b], degree_sum[b]
        if merged not in recorded:
            recorded.add(merged)
            triples.append(make_triple(graph, merged, step))
    return TripleSet(tuple(triples), tuple(merges))


def best_region_for(triples: TripleSet | Sequence[RegionTriple], n_q: int) -> RegionTriple:
    """Smallest recorded region with at least ``n_q`` qubits; earliest wins ties."""
    best = None
    for t in triples:
        if t.size >= n_q and (best is None or t.size < best.size):
            best = t
    if best is None:
        raise FusionError(f"no region large enough for {n_q} logical qubits")
    return best

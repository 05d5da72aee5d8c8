"""Digraph procedures: smooth parts, bipartiteness, CSP classification of
graphs and smooth digraphs, and the CSP solver for unions of directed cycles."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .hom import Core, core_of, is_homomorphism
from .structcore import (
    BudgetExceeded,
    Extensional,
    FiniteStructure,
    Homomorphism,
    StructureError,
)

EDGE = "E"
CAVEAT = "classification assumes P != NP"


@dataclass(frozen=True)
class Digraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise StructureError(f"edge {(u, v)} leaves the vertex set")
        if list(self.edges) != sorted(set(self.edges)):
            raise StructureError("edges must be sorted and duplicate-free")

    @classmethod
    def of(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        return cls(vertex_count, tuple(sorted({(int(u), int(v)) for u, v in edges})))

    @classmethod
    def from_structure(cls, S: FiniteStructure) -> "Digraph":
        if [s for s, _ in S.relations] != [EDGE] or S.relation(EDGE).arity != 2:
            raise StructureError("a digraph structure has exactly one binary relation E")
        return cls.of(S.domain_size, S.relation(EDGE))

    def to_structure(self, name: str = "G") -> FiniteStructure:
        return FiniteStructure(self.vertex_count, ((EDGE, Extensional(2, self.edges)),), name)

    @property
    def loops(self) -> list[int]:
        return [u for u, v in self.edges if u == v]

    @property
    def is_symmetric(self) -> bool:
        es = set(self.edges)
        return all((v, u) in es for u, v in es)

    def out_neighbors(self) -> list[list[int]]:
        out = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            out[u].append(v)
        return out

    def in_neighbors(self) -> list[list[int]]:
        inn = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            inn[v].append(u)
        return inn

    def induced(self, vertices) -> "Digraph":
        pos = {v: i for i, v in enumerate(vertices)}
        return Digraph.of(
            len(pos), ((pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos)
        )


def directed_cycle(length: int) -> Digraph:
    return Digraph.of(length, ((i, (i + 1) % length) for i in range(length)))


def symmetric_cycle(length: int) -> Digraph:
    es = [(i, (i + 1) % length) for i in range(length)]
    return Digraph.of(length, es + [(v, u) for u, v in es])


def complete_graph(k: int) -> Digraph:
    return Digraph.of(k, ((u, v) for u in range(k) for v in range(k) if u != v))


def petersen_graph() -> Digraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    es = outer + spokes + inner
    return Digraph.of(10, es + [(v, u) for u, v in es])


def disjoint_union(*graphs: Digraph) -> Digraph:
    edges, offset = [], 0
    for G in graphs:
        edges.extend((u + offset, v + offset) for u, v in G.edges)
        offset += G.vertex_count
    return Digraph.of(offset, edges)


# ---------------------------------------------------------------------------
# Smooth part


def smooth_vertices(G: Digraph) -> list[int]:
    """Vertices surviving repeated deletion of sources and sinks."""
    alive = [True] * G.vertex_count
    indeg = [0] * G.vertex_count
    outdeg = [0] * G.vertex_count
    for u, v in G.edges:
        outdeg[u] += 1
        indeg[v] += 1
    outs, ins = G.out_neighbors(), G.in_neighbors()
    queue = deque(v for v in range(G.vertex_count) if indeg[v] == 0 or outdeg[v] == 0)
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        for w in outs[v]:
            if alive[w]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        for w in ins[v]:
            if alive[w]:
                outdeg[w] -= 1
                if outdeg[w] == 0:
                    queue.append(w)
    return [v for v in range(G.vertex_count) if alive[v]]


def smooth_part(G: Digraph) -> tuple[Digraph, list[int]]:
    """Largest smooth induced subgraph, with the kept original vertex labels."""
    kept = smooth_vertices(G)
    return G.induced(kept), kept


def is_smooth(G: Digraph) -> bool:
    return len(smooth_vertices(G)) == G.vertex_count


def path_characterized_vertices(G: Digraph) -> list[int]:
    """Vertices with a directed walk of length ``|G|`` ending and one starting there."""
    n = G.vertex_count
    outs, ins = G.out_neighbors(), G.in_neighbors()

    def reach_len(adj):
        # ok[v]: a walk of the current length leaves v along adj
        ok = [True] * n
        for _ in range(n):
            ok = [any(ok[w] for w in adj[v]) for v in range(n)]
        return ok

    fwd, back = reach_len(outs), reach_len(ins)
    return [v for v in range(n) if fwd[v] and back[v]]


# ---------------------------------------------------------------------------
# Bipartiteness and classification


@dataclass(frozen=True)
class BipartiteResult:
    bipartite: bool
    coloring: tuple[int, ...] | None = None
    odd_cycle: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.bipartite


def is_bipartite(G: Digraph) -> BipartiteResult:
    """2-colour by BFS; otherwise return an odd closed walk as evidence."""
    if not G.is_symmetric:
        raise StructureError("is_bipartite needs a symmetric edge relation")
    adj = G.out_neighbors()
    color = [-1] * G.vertex_count
    parent = [-1] * G.vertex_count
    for root in range(G.vertex_count):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    return BipartiteResult(False, None, _odd_cycle(parent, u, w))
    return BipartiteResult(True, tuple(color))


def _odd_cycle(parent, u, w) -> tuple[int, ...]:
    def chain(v):
        out = [v]
        while parent[v] >= 0:
            v = parent[v]
            out.append(v)
        return out

    cu, cw = chain(u), chain(w)
    common = set(cu) & set(cw)
    i = next(k for k, v in enumerate(cu) if v in common)
    j = cw.index(cu[i])
    return tuple(cu[: i + 1] + cw[:j][::-1])


def is_closed_walk(G: Digraph, walk) -> bool:
    es = set(G.edges)
    return all((walk[i], walk[(i + 1) % len(walk)]) in es for i in range(len(walk)))


@dataclass(frozen=True)
class CspClassification:
    verdict: str  # "InP" | "NPComplete" | "Unknown"
    reason: str
    evidence: dict = field(default_factory=dict)
    caveat: str = CAVEAT

    def machine_line(self) -> str:
        return f"verdict={self.verdict} reason={self.reason}"


def classify_graph_csp(G: Digraph) -> CspClassification:
    if not G.is_symmetric:
        raise StructureError("classify_graph_csp needs a symmetric graph")
    if G.loops:
        return CspClassification("InP", "Loop", {"loop": G.loops[0]})
    res = is_bipartite(G)
    if res.bipartite:
        return CspClassification("InP", "Bipartite", {"coloring": res.coloring})
    return CspClassification("NPComplete", "HellNesetrilNonbipartite", {"odd_cycle": res.odd_cycle})


@dataclass(frozen=True)
class CycleDecomposition:
    is_union: bool
    lengths: tuple[int, ...] = ()
    cycles: tuple[tuple[int, ...], ...] = ()

    def __bool__(self) -> bool:
        return self.is_union


def is_disjoint_union_of_cycles(G: Digraph) -> CycleDecomposition:
    """Every vertex has in- and out-degree 1; cycles listed from their least vertex."""
    outs, ins = G.out_neighbors(), G.in_neighbors()
    if any(len(outs[v]) != 1 or len(ins[v]) != 1 for v in range(G.vertex_count)):
        return CycleDecomposition(False)
    seen = [False] * G.vertex_count
    cycles = []
    for start in range(G.vertex_count):
        if seen[start]:
            continue
        cyc, v = [], start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = outs[v][0]
        cycles.append(tuple(cyc))
    return CycleDecomposition(True, tuple(sorted(len(c) for c in cycles)), tuple(cycles))


def classify_smooth_digraph_csp(G: Digraph, max_core_size: int = 10) -> CspClassification:
    if not is_smooth(G):
        raise StructureError("classify_smooth_digraph_csp needs a smooth digraph")
    if G.loops:
        return CspClassification("InP", "Loop", {"loop": G.loops[0]})
    try:
        core: Core = core_of(G.to_structure(), max_size=max_core_size)
    except BudgetExceeded as exc:
        return CspClassification("Unknown", "CoreBudget", {"detail": str(exc)})
    H = Digraph.from_structure(core.structure)
    dec = is_disjoint_union_of_cycles(H)
    evidence = {"core_vertices": core.vertices, "core": H, "retraction": core.retraction}
    if dec:
        evidence["cycle_lengths"] = dec.lengths
        return CspClassification("InP", "CycleUnionCore", evidence)
    return CspClassification("NPComplete", "SmoothNonCycleCore", evidence)


# ---------------------------------------------------------------------------
# CSP over unions of directed cycles


def _weak_components(X: Digraph) -> list[list[int]]:
    adj = [[] for _ in range(X.vertex_count)]
    for u, v in X.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * X.vertex_count
    comps = []
    for s in range(X.vertex_count):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def cycle_potentials(X: Digraph, component: list[int]) -> tuple[dict[int, int], int]:
    """Integer levels along a spanning tree (+1 forward, -1 backward) and the gcd
    of the net lengths of all fundamental cycles."""
    members = set(component)
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in component}
    for u, v in X.edges:
        if u in members:
            adj[u].append((v, 1))
            adj[v].append((u, -1))
    root = component[0]
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w, step in adj[u]:
            if w not in level:
                level[w] = level[u] + step
                queue.append(w)
    g = 0
    for u, v in X.edges:
        if u in members:
            g = math.gcd(g, abs(level[u] + 1 - level[v]))
    return level, g


def solve_cycle_union_csp(T: Digraph, X: Digraph) -> Homomorphism | None:
    """Homomorphism ``X -> T`` for ``T`` a disjoint union of directed cycles, or None.

    A weakly connected component maps onto a cycle of length ``l`` exactly
    when ``l`` divides the gcd of its fundamental-cycle net lengths.
    """
    dec = is_disjoint_union_of_cycles(T)
    if not dec:
        raise StructureError("target is not a disjoint union of directed cycles")
    image = [0] * X.vertex_count
    for comp in _weak_components(X):
        level, g = cycle_potentials(X, comp)
        cyc = next((c for c in dec.cycles if g % len(c) == 0), None)
        if cyc is None:
            return None
        for v in comp:
            image[v] = cyc[level[v] % len(cyc)]
    h = Homomorphism(X.vertex_count, T.vertex_count, tuple(image))
    assert is_homomorphism(h, X.to_structure(), T.to_structure())
    return h

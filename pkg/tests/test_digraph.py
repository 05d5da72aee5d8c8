import itertools
import random

import pytest

from pcsp_sandwich.digraph import (
    Digraph,
    classify_graph_csp,
    classify_smooth_digraph_csp,
    complete_graph,
    directed_cycle,
    disjoint_union,
    is_bipartite,
    is_closed_walk,
    is_disjoint_union_of_cycles,
    is_smooth,
    path_characterized_vertices,
    petersen_graph,
    smooth_part,
    solve_cycle_union_csp,
    symmetric_cycle,
)
from pcsp_sandwich.hom import (
    are_isomorphic,
    brute_force_homomorphisms,
    find_homomorphism,
    is_homomorphism,
)
from pcsp_sandwich.structcore import StructureError


def random_digraph(rng, max_vertices, max_edges):
    k = rng.randint(0, max_vertices)
    if k == 0:
        return Digraph(0, ())
    return Digraph.of(k, {(rng.randrange(k), rng.randrange(k)) for _ in range(rng.randint(0, max_edges))})


def test_smooth_part_examples():
    C3 = directed_cycle(3)
    assert smooth_part(C3)[0] == C3
    path = Digraph.of(4, [(0, 1), (1, 2), (2, 3)])
    assert smooth_part(path)[0].vertex_count == 0
    pendant = Digraph.of(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    H, kept = smooth_part(pendant)
    assert kept == [0, 1, 2] and H == C3


def test_smooth_part_properties():
    rng = random.Random(17)
    for _ in range(500):
        G = random_digraph(rng, 7, 12)
        H, kept = smooth_part(G)
        assert is_smooth(H)
        assert smooth_part(H)[0] == H
        assert kept == path_characterized_vertices(G)


def test_bipartite_examples():
    assert is_bipartite(symmetric_cycle(4)).bipartite
    k3 = is_bipartite(complete_graph(3))
    assert not k3.bipartite and len(k3.odd_cycle) == 3
    assert is_closed_walk(complete_graph(3), k3.odd_cycle)
    pet = is_bipartite(petersen_graph())
    assert not pet.bipartite and len(pet.odd_cycle) % 2 == 1
    assert is_closed_walk(petersen_graph(), pet.odd_cycle)


def test_bipartite_coloring_is_proper():
    rng = random.Random(4)
    for _ in range(200):
        G = random_digraph(rng, 7, 8)
        sym = Digraph.of(G.vertex_count, G.edges + tuple((v, u) for u, v in G.edges))
        res = is_bipartite(sym)
        if res.bipartite:
            assert all(res.coloring[u] != res.coloring[v] for u, v in sym.edges)
        else:
            assert len(res.odd_cycle) % 2 == 1 and is_closed_walk(sym, res.odd_cycle)


@pytest.mark.parametrize("G,verdict", [
    (complete_graph(2), "InP"),
    (symmetric_cycle(4), "InP"),
    (symmetric_cycle(6), "InP"),
    (complete_graph(3), "NPComplete"),
    (symmetric_cycle(5), "NPComplete"),
    (petersen_graph(), "NPComplete"),
])
def test_graph_classification(G, verdict):
    res = classify_graph_csp(G)
    assert res.verdict == verdict
    assert "P != NP" in res.caveat


def test_graph_with_loop_is_trivial():
    G = Digraph.of(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0), (1, 1)])
    assert classify_graph_csp(G).verdict == "InP"


def test_graph_classifier_rejects_directed_input():
    with pytest.raises(StructureError):
        classify_graph_csp(directed_cycle(3))


def test_cycle_union_examples():
    d = is_disjoint_union_of_cycles(disjoint_union(directed_cycle(3), directed_cycle(6)))
    assert d and sorted(d.lengths) == [3, 6]
    assert not is_disjoint_union_of_cycles(Digraph.of(3, [(0, 1), (0, 2), (1, 0), (2, 0)]))
    empty = is_disjoint_union_of_cycles(Digraph(0, ()))
    assert empty and empty.lengths == ()


def test_smooth_digraph_classification():
    res = classify_smooth_digraph_csp(disjoint_union(directed_cycle(3), directed_cycle(6)))
    assert res.verdict == "InP"
    assert are_isomorphic(res.evidence["core"].to_structure(), directed_cycle(3).to_structure())
    all_arcs = Digraph.of(3, [(a, b) for a in range(3) for b in range(3) if a != b])
    assert classify_smooth_digraph_csp(all_arcs).verdict == "NPComplete"
    assert classify_smooth_digraph_csp(directed_cycle(5)).verdict == "InP"


def test_smooth_classification_core_is_a_core():
    rng = random.Random(8)
    seen = 0
    for _ in range(150):
        H, _ = smooth_part(random_digraph(rng, 6, 10))
        if H.vertex_count == 0:
            continue
        res = classify_smooth_digraph_csp(H)
        if "core" not in res.evidence:
            continue
        seen += 1
        core = res.evidence["core"].to_structure()
        k = core.domain_size
        for m in itertools.product(range(k), repeat=k):
            from pcsp_sandwich.structcore import Homomorphism

            if is_homomorphism(Homomorphism(k, k, m), core, core):
                assert len(set(m)) == k
    assert seen > 10


def test_graph_and_digraph_classifiers_agree_on_symmetric_smooth_graphs():
    rng = random.Random(21)
    for _ in range(150):
        G = random_digraph(rng, 6, 7)
        sym = Digraph.of(G.vertex_count, G.edges + tuple((v, u) for u, v in G.edges))
        H, _ = smooth_part(sym)
        if H.vertex_count == 0:
            continue
        assert classify_graph_csp(H).verdict == classify_smooth_digraph_csp(H).verdict


def test_solve_cycle_union_examples():
    h = solve_cycle_union_csp(directed_cycle(3), directed_cycle(6))
    assert h is not None
    assert solve_cycle_union_csp(directed_cycle(6), directed_cycle(3)) is None
    assert solve_cycle_union_csp(directed_cycle(4), Digraph(1, ())) is not None
    with pytest.raises(StructureError):
        solve_cycle_union_csp(complete_graph(3), directed_cycle(3))


def test_solve_cycle_union_matches_brute_force():
    rng = random.Random(99)
    for _ in range(300):
        T = disjoint_union(*[directed_cycle(rng.randint(1, 4)) for _ in range(rng.randint(1, 3))])
        X = random_digraph(rng, 8, 10)
        h = solve_cycle_union_csp(T, X)
        expected = find_homomorphism(X.to_structure(), T.to_structure())
        assert (h is None) == (expected is None)
        if X.vertex_count <= 5:
            brute = next(brute_force_homomorphisms(X.to_structure(), T.to_structure()), None)
            assert (h is None) == (brute is None)

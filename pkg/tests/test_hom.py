import itertools

import pytest

from conftest import K, graph, random_instance, random_structure
from pcsp_sandwich.constructions import build_thm1, build_thm2
from pcsp_sandwich.digraph import directed_cycle, disjoint_union
from pcsp_sandwich.hom import (
    CspInstance,
    ObstructionWitness,
    Status,
    WitnessMode,
    are_isomorphic,
    brute_force_homomorphisms,
    check_sandwich,
    compose_cyclic,
    core_of,
    find_cyclic_polymorphism,
    find_homomorphism,
    find_majority_polymorphism,
    is_core,
    is_homomorphism,
    polymorphism_violations,
    verify_obstruction_witness,
)
from pcsp_sandwich.structcore import (
    BudgetExceeded,
    FunctionTable,
    Homomorphism,
    StructureError,
    is_cyclic,
    power_structure,
)
from pcsp_sandwich.verify import projection_witness


def C(n):
    return directed_cycle(n).to_structure(f"C{n}")


def test_identity_found_for_structure_as_instance():
    A = K(3)
    h = find_homomorphism(CspInstance.from_structure(A), A)
    assert h is not None and is_homomorphism(h, A, A)
    assert is_homomorphism(Homomorphism.identity(3), A, A)


def test_cycle_homomorphisms():
    h = find_homomorphism(C(6), C(3))
    assert h is not None and is_homomorphism(h, C(6), C(3))
    assert h.map == tuple(i % 3 for i in range(6))
    assert find_homomorphism(K(3), K(2)) is None


def test_is_homomorphism_examples():
    b = build_thm1(2, 3)
    assert is_homomorphism(b.g, b.A, b.C)
    assert not is_homomorphism(Homomorphism(3, 3, (0, 0, 0)), K(3), K(3))


def test_search_is_lexicographically_least(rng):
    for _ in range(50):
        X = random_structure(rng, rng.randint(1, 4))
        A = random_structure(rng, rng.randint(1, 3))
        first = next(brute_force_homomorphisms(X, A), None)
        assert find_homomorphism(X, A) == first


def test_find_homomorphism_agrees_with_brute_force(rng):
    for _ in range(500):
        k = rng.randint(1, 4)
        arity = rng.randint(1, 3)
        A = random_structure(rng, k, arity=arity, max_tuples=8)
        nv = rng.randint(0, 6)
        inst = random_instance(rng, nv, rng.randint(0, 6) if nv else 0, arity)
        h = find_homomorphism(inst, A)
        brute = next(brute_force_homomorphisms(inst, A), None)
        assert (h is None) == (brute is None)
        if h is not None:
            assert is_homomorphism(h, inst, A)


def test_node_budget_raises():
    with pytest.raises(BudgetExceeded):
        find_homomorphism(K(5), K(4), node_budget=3)


def test_instance_signature_checked():
    with pytest.raises(StructureError):
        find_homomorphism(CspInstance(2, (("F", (0, 1)),)), K(2))


def test_core_examples():
    assert core_of(K(2)).structure.domain_size == 2
    core = core_of(disjoint_union(directed_cycle(3), directed_cycle(6)).to_structure())
    assert are_isomorphic(core.structure, C(3))
    path = graph(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    c = core_of(path)
    assert c.vertices == (0, 1)
    assert are_isomorphic(c.structure, K(2))
    assert is_homomorphism(c.retraction, path, c.structure)


def test_core_idempotent_on_small_digraphs(rng):
    for _ in range(40):
        k = rng.randint(1, 6)
        G = graph(k, {(rng.randrange(k), rng.randrange(k)) for _ in range(rng.randint(0, 9))})
        c = core_of(G).structure
        assert is_core(c)
        assert are_isomorphic(core_of(c).structure, c)


def test_cyclic_polymorphism_examples():
    found = find_cyclic_polymorphism(K(2), K(2), 3)
    assert found.status is Status.FOUND
    assert found.certificate.values == (0, 0, 0, 1, 0, 1, 1, 1)
    assert is_cyclic(found.certificate)
    assert list(polymorphism_violations(found.certificate, K(2), K(2))) == []

    refuted = find_cyclic_polymorphism(K(2), K(2), 2)
    assert refuted.status is Status.REFUTED

    b = build_thm1(2, 3)
    out = find_cyclic_polymorphism(b.A, b.B_ext, 3)
    assert out.status is Status.REFUTED
    assert out.stats.candidates == 16
    assert out.describe() == "RefutedExhaustively (16 candidates)"


def test_cyclic_polymorphism_rejects_composite_arity():
    with pytest.raises(ValueError):
        find_cyclic_polymorphism(K(2), K(2), 4)
    out = find_cyclic_polymorphism(K(2), K(2), 4, allow_composite=True)
    assert out.status in (Status.FOUND, Status.REFUTED)


def test_cyclic_polymorphism_unknown_on_tiny_budget():
    out = find_cyclic_polymorphism(K(2), K(3), 5, node_budget=1)
    assert out.status is Status.UNKNOWN
    assert out.describe().startswith("Unknown")


def test_cyclic_search_against_enumeration(rng):
    """Every cyclic table is tried by hand on tiny inputs."""
    for _ in range(30):
        A = random_structure(rng, 2, max_tuples=3)
        B = random_structure(rng, 2, max_tuples=4)
        p = rng.choice([2, 3])
        exists = False
        for values in itertools.product(range(2), repeat=2**p):
            f = FunctionTable(2, p, 2, values)
            if is_cyclic(f) and not list(polymorphism_violations(f, A, B, limit=1)):
                exists = True
                break
        out = find_cyclic_polymorphism(A, B, p)
        assert (out.status is Status.FOUND) == exists


def test_majority_examples():
    assert find_majority_polymorphism(build_thm1(2, 2).A).status is Status.FOUND
    assert find_majority_polymorphism(K(2)).status is Status.FOUND
    out = find_majority_polymorphism(K(3))
    assert out.status is Status.REFUTED
    assert out.stats.candidates == 3**6


def test_compose_cyclic_examples():
    z3 = FunctionTable.from_callable(lambda a, b, c: (a + b + c) % 3, 3, 3, 3)
    ident = Homomorphism.identity(3)
    assert compose_cyclic(ident, z3, ident) == z3
    const = FunctionTable.constant(1, 3, 3, 3)
    f = compose_cyclic(Homomorphism(2, 3, (2, 0)), const, Homomorphism(3, 2, (0, 1, 1)))
    assert set(f.values) == {1}


def test_compose_cyclic_preserves_cyclicity(rng):
    for _ in range(100):
        a, d, b, p = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3), rng.choice([2, 3])
        r = Homomorphism(a, d, tuple(rng.randrange(d) for _ in range(a)))
        s = Homomorphism(d, b, tuple(rng.randrange(b) for _ in range(d)))
        # a random cyclic table: one random value per rotation class
        cache = {}
        def t_fn(*x):
            key = min(x[i:] + x[:i] for i in range(p))
            return cache.setdefault(key, rng.randrange(d))
        t = FunctionTable.from_callable(t_fn, d, p, d)
        assert is_cyclic(t)
        assert is_cyclic(compose_cyclic(r, t, s))


def test_witness_examples():
    b2 = build_thm2(7)
    assert verify_obstruction_witness(b2.A, b2.B, b2.U)
    b1 = build_thm1(2, 3)
    w = projection_witness(b1.A, 2, 3)
    assert w.mode is WitnessMode.EXHAUSTIVE_CYCLIC
    assert verify_obstruction_witness(b1.A, b1.B_ext, w)
    bad = ObstructionWitness(7, ((5, 5, 5),) + b2.U.columns[1:], WitnessMode.CONSTANT_FORCING)
    check = verify_obstruction_witness(b2.A, b2.B, bad)
    assert not check and "not in R^A" in check.reason


def test_valid_witness_implies_refutation(rng):
    """A valid witness must never coexist with a found cyclic polymorphism."""
    checked = 0
    for _ in range(200):
        A = random_structure(rng, 2, arity=2, max_tuples=3)
        B = random_structure(rng, 2, arity=2, max_tuples=3)
        if not A.relation("E").tuples:
            continue
        p = rng.choice([2, 3])
        cols = tuple(rng.choice(A.relation("E").tuples) for _ in range(p))
        for mode in WitnessMode:
            w = ObstructionWitness(p, cols, mode)
            if verify_obstruction_witness(A, B, w):
                checked += 1
                assert find_cyclic_polymorphism(A, B, p).status is Status.REFUTED
    assert checked > 0


def test_check_sandwich_examples():
    b = build_thm1(2, 3)
    s = check_sandwich(b.A, b.C_ext, b.B_ext)
    assert s.ok
    assert is_homomorphism(s.left, b.A, b.C_ext) and is_homomorphism(s.right, b.C_ext, b.B_ext)
    same = check_sandwich(K(3), K(3), K(3))
    assert same.left == Homomorphism.identity(3) and same.right == Homomorphism.identity(3)
    fail = check_sandwich(K(3), K(2), K(3))
    assert not fail.ok and fail.failure == "left"


def test_power_gives_polymorphisms():
    """A homomorphism from A^2 to B is exactly a binary polymorphism."""
    P = power_structure(K(2), 2)
    h = find_homomorphism(P, K(2))
    f = FunctionTable(2, 2, 2, h.map)
    assert list(polymorphism_violations(f, K(2), K(2))) == []

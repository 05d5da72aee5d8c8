import itertools

import pytest

from pcsp_sandwich.constructions import (
    build_thm1,
    build_thm2,
    build_thm2_witness,
    thm1_maps,
)
from pcsp_sandwich.hom import check_sandwich, is_homomorphism, verify_obstruction_witness
from pcsp_sandwich.structcore import FunctionTable, Homomorphism, is_cyclic, linear_table


def test_small_bundle_counts():
    b = build_thm1(2, 3)
    assert len(b.A.relation("R")) == 3
    assert b.B.relation("R").size() == 240
    assert b.C.relation("R").size() == 9
    assert len(b.B_ext.relation("R")) == 240
    assert len(b.C_ext.relation("R")) == 9


def test_binary_bundle_is_xor_shifted():
    b = build_thm1(2, 2)
    # tables over inputs 00, 01, 10, 11
    expected = {t for t in itertools.product(range(2), repeat=4) if t[2] == (t[1] + 1) % 2}
    assert set(b.B_ext.relation("R")) == expected


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5), (4, 2)])
def test_maps_are_homomorphisms(n, p):
    b = build_thm1(n, p)
    assert is_homomorphism(b.g, b.A, b.C)
    for t in b.C.relation("R"):
        assert tuple(b.h(v) for v in t) in b.B.relation("R")


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 3), (4, 4)])
def test_projections_are_not_cyclic(n, p):
    b = build_thm1(n, p)
    for t in b.A.relation("R"):
        assert not is_cyclic(FunctionTable(n, p, n, t))
        assert t in b.B.relation("R")


@pytest.mark.parametrize("n,p", [(n, p) for n in range(2, 5) for p in (2, 3, 5, 7)])
def test_reduced_linear_tables_are_not_cyclic(n, p):
    for a in itertools.product(range(p), repeat=p):
        if sum(a) % p != 1:
            continue
        assert not is_cyclic(FunctionTable(n, p, n, linear_table(a, n, p, n)))
        if p == 7:
            break  # 7^6 members; the exhaustive sweep lives in the verifier


def test_maps_at_seven_via_vectorized_check():
    from pcsp_sandwich.verify import verify_thm31

    reports = verify_thm31(2, 7)
    assert [r.holds for r in reports] == [True, True]
    assert reports[1].cases == 7**6


def test_maps():
    g, h = thm1_maps(2, 3)
    assert g.map == (0, 1) and h.map == (0, 1, 0)
    g, _ = thm1_maps(3, 2)
    assert g.map == (0, 1, 0)


def test_bad_parameters():
    with pytest.raises(ValueError):
        build_thm1(1, 3)
    with pytest.raises(ValueError):
        build_thm2(9)
    with pytest.raises(ValueError):
        build_thm2(5)


def test_ternary_bundle_counts():
    b = build_thm2(7)
    assert len(b.C.relation("R")) == 49
    assert len(b.A.relation("R")) == 31
    assert all(len(set(t)) > 1 for t in b.B.relation("R"))


def test_ternary_sandwich():
    for p in (7, 11, 13):
        b = build_thm2(p)
        assert set(b.A.relation("R")) <= set(b.C.relation("R"))
        ident = Homomorphism(p - 1, p, tuple(range(p - 1)))
        assert is_homomorphism(ident, b.A, b.C)
        assert is_homomorphism(b.h, b.C, b.B)
        assert check_sandwich(b.A, b.C, b.B).ok


def test_witness_vector():
    u, U = build_thm2_witness(7)
    assert u == (2, 4, 0, 4, 2, 1, 1)
    assert U.columns[0] == (2, 4, 0) and (2 - 8 + 0) % 7 == 1
    for j, row in enumerate(U.rows):
        assert row == u[j:] + u[:j]


@pytest.mark.parametrize("p", [7, 11, 13])
def test_witness_valid(p):
    b = build_thm2(p)
    assert verify_obstruction_witness(b.A, b.B, b.U)


@pytest.mark.parametrize("p", [3, 5])
def test_small_primes_fail_constant_check(p):
    b = build_thm2(p, allow_small=True)
    assert b.U is not None
    check = verify_obstruction_witness(b.A, b.B, b.U)
    assert not check and "constant tuple" in check.reason

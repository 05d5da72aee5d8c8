import numpy as np
import pytest

from conftest import K, graph
from pcsp_sandwich import kernels
from pcsp_sandwich.constructions import build_thm1, build_thm2, thm2_h
from pcsp_sandwich.hom import SearchOutcome, SearchStats, Status, find_cyclic_polymorphism
from pcsp_sandwich.structcore import FunctionTable, Homomorphism, is_cyclic, linear_table
from pcsp_sandwich.verify import (
    LINEAR_CLAIMS,
    CertificateError,
    ClaimStatus,
    constant_triples,
    parse_certificate,
    projection_witness,
    recheck_certificate,
    refutation_certificate,
    verify_lemma32,
    verify_lemma41,
    verify_thm2_claims,
    verify_thm31,
)


def _by_claim(reports):
    return {r.claim: r for r in reports}


def test_linear_claims_small():
    reports = _by_claim(verify_lemma32(2, 3))
    assert all(r.status is ClaimStatus.HOLDS for r in reports.values())
    assert reports[LINEAR_CLAIMS[0]].cases > 0


def test_floor_identity_skipped_when_n_divides_p():
    reports = _by_claim(verify_lemma32(2, 4))
    assert reports[LINEAR_CLAIMS[1]].status is ClaimStatus.SKIPPED
    others = [r for c, r in reports.items() if c != LINEAR_CLAIMS[1]]
    assert all(r.holds for r in others)


def test_zero_vector_is_counted_not_a_counterexample():
    # the all-zero coefficient vector gives a constant, hence cyclic, table
    coeffs = np.zeros((1, 3), dtype=np.int64)
    assert kernels.linear_cyclic_mask(coeffs, 2, 3, 2)[0]
    assert all(r.counterexample is None for r in verify_lemma32(2, 3))


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 3), (3, 2), (2, 5), (4, 3)])
def test_enumerated_cyclicity_matches_direct_check(n, p):
    """The kernel's cyclic set equals the set picked out by comparing rotated tables."""
    coeffs = np.indices((p,) * p).reshape(p, -1).T
    mask = kernels.linear_cyclic_mask(coeffs, n, p, n)
    for a, flag in zip(coeffs.tolist(), mask.tolist()):
        assert flag == is_cyclic(FunctionTable(n, p, n, linear_table(a, n, p, n)))


def test_ternary_claims_hold_at_large_primes():
    for p in (7, 11, 13):
        reports = verify_thm2_claims(p)
        assert [r.status for r in reports] == [ClaimStatus.HOLDS] * 4


@pytest.mark.parametrize("p,triple", [(3, (1, 2, 1)), (5, (4, 1, 4))])
def test_ternary_constant_claim_fails_at_small_primes(p, triple):
    last = verify_thm2_claims(p)[-1]
    assert last.claim == "thm2.no-constant-triple"
    assert last.status is ClaimStatus.FAILS
    assert triple in last.counterexample
    h = thm2_h(p)
    for x, y, z in last.counterexample:
        assert (x - 2 * y + z) % p == 1
        assert h(x) == h(y) == h(z)
    assert constant_triples(p) == last.counterexample


@pytest.mark.parametrize("n,p,cases", [(2, 3, 9), (3, 3, 9), (2, 5, 625)])
def test_sandwich_map_claims(n, p, cases):
    reports = verify_thm31(n, p)
    assert all(r.holds for r in reports)
    assert reports[1].cases == cases


def test_symmetric_image_claim():
    inclusion = Homomorphism(2, 3, (0, 1))
    assert verify_lemma41(K(2), K(3), inclusion).holds
    C = graph(3, [(0, 1), (1, 0), (1, 2)], "C")
    assert verify_lemma41(K(2), C, inclusion).holds
    one_way = graph(2, [(0, 1)], "D")
    r = verify_lemma41(K(2), one_way, Homomorphism(2, 2, (0, 1)))
    assert r.status is ClaimStatus.PRECONDITION


def test_non_homomorphism_is_a_precondition_failure():
    C = graph(3, [(0, 1), (1, 0), (1, 2), (2, 1)], "C")
    r = verify_lemma41(K(2), C, Homomorphism(2, 3, (0, 2)))
    assert r.status is ClaimStatus.PRECONDITION


def test_certificates_from_witnesses_round_trip():
    b1 = build_thm1(2, 3)
    cert1 = refutation_certificate(b1.A, b1.B_ext, 3, projection_witness(b1.A, 2, 3))
    b2 = build_thm2(7)
    cert2 = refutation_certificate(b2.A, b2.B, 7, b2.U)
    for cert, p in ((cert1, 3), (cert2, 7)):
        text = cert.text()
        assert f"size={p}" in text
        assert recheck_certificate(text)
        again = parse_certificate(text)
        assert again.text() == text


def test_exhaustive_certificate():
    b = build_thm1(2, 3)
    out = find_cyclic_polymorphism(b.A, b.B_ext, 3)
    cert = refutation_certificate(b.A, b.B_ext, 3, out)
    assert cert.candidates == 16
    assert recheck_certificate(cert.text())


def test_certificate_refuses_unknown_and_found():
    b = build_thm1(2, 3)
    unknown = SearchOutcome(Status.UNKNOWN, None, SearchStats(5, 0.0, 16))
    with pytest.raises(CertificateError, match="no certificate from Unknown"):
        refutation_certificate(b.A, b.B_ext, 3, unknown)
    found = find_cyclic_polymorphism(K(2), K(2), 3)
    with pytest.raises(CertificateError):
        refutation_certificate(K(2), K(2), 3, found)


def test_tampered_certificate_fails_recheck():
    b = build_thm2(7)
    text = refutation_certificate(b.A, b.B, 7, b.U).text()
    # drop a tuple of R^A that a witness column needs
    col = " ".join(map(str, b.U.columns[0]))
    lines = text.splitlines()
    idx = lines.index(col)
    lines.pop(idx)
    head = next(i for i in range(idx, -1, -1) if lines[i].startswith("relation R"))
    lines[head] = "relation R arity 3 size 30"
    assert not recheck_certificate("\n".join(lines) + "\n")

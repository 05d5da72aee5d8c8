"""Exact linear algebra over Z_p and the affine CSP / PCSP deciders."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .hom import CspInstance, SandwichCheck
from .structcore import BudgetExceeded, Extensional, FiniteStructure, StructureError, is_prime


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")


@dataclass(frozen=True)
class ModMatrix:
    p: int
    rows: tuple[tuple[int, ...], ...]
    cols: int

    def __post_init__(self) -> None:
        _require_prime(self.p)
        for r in self.rows:
            if len(r) != self.cols:
                raise StructureError("ragged matrix")
            if any(not 0 <= v < self.p for v in r):
                raise StructureError("matrix entries must be reduced mod p")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> "ModMatrix":
        rows = tuple(tuple(int(v) % p for v in r) for r in rows)
        if cols is None:
            if not rows:
                raise StructureError("column count needed for an empty matrix")
            cols = len(rows[0])
        return cls(p, rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.cols

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, x)) % self.p for r in self.rows)


def rref(rows: Sequence[Sequence[int]], p: int, cols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod ``p``; returns ``(nonzero rows, pivot columns)``."""
    m = [[v % p for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(M: ModMatrix) -> int:
    return len(rref(M.rows, M.p, M.cols)[1])


@dataclass(frozen=True)
class Solution:
    particular: tuple[int, ...]
    nullspace: tuple[tuple[int, ...], ...]


def gauss_solve(M: ModMatrix, b: Sequence[int]) -> Solution | None:
    """Solve ``M x = b`` over Z_p; None when inconsistent.

    The particular solution sets every free variable to 0.  The nullspace
    basis has one vector per free column, equal to 1 there and 0 on the
    other free columns.
    """
    p, n = M.p, M.cols
    if len(b) != len(M.rows):
        raise StructureError("right-hand side length differs from row count")
    aug = [list(r) + [int(v) % p] for r, v in zip(M.rows, b)]
    red, pivots = rref(aug, p, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [0] * n
    for row, c in zip(red, pivots):
        x[c] = row[n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, c in zip(red, pivots):
            v[c] = -row[f] % p
        basis.append(tuple(v))
    return Solution(tuple(x), tuple(basis))


def nullspace(M: ModMatrix) -> tuple[tuple[int, ...], ...]:
    return gauss_solve(M, [0] * len(M.rows)).nullspace


# ---------------------------------------------------------------------------
# Affine relations


@dataclass(frozen=True)
class AffineRelation:
    """A coset ``particular + span(basis)`` in Z_p^arity; ``basis`` is in RREF."""

    p: int
    arity: int
    particular: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    @cached_property
    def equations(self) -> tuple[ModMatrix, tuple[int, ...]]:
        return relation_to_equations(self)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def size(self) -> int:
        return self.p ** len(self.basis)

    def __len__(self) -> int:
        return self.size()

    def __contains__(self, t) -> bool:
        t = tuple(t)
        if len(t) != self.arity or any(not 0 <= v < self.p for v in t):
            return False
        E, rhs = self.equations
        return E.apply(t) == rhs

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        pts = []
        for coeffs in itertools.product(range(self.p), repeat=len(self.basis)):
            v = list(self.particular)
            for c, b in zip(coeffs, self.basis):
                if c:
                    v = [(x + c * y) % self.p for x, y in zip(v, b)]
            pts.append(tuple(v))
        return iter(sorted(pts))

    def to_extensional(self, threshold: int = 10**6) -> Extensional:
        if self.size() > threshold:
            raise BudgetExceeded(f"coset of size {self.size()} exceeds threshold {threshold}")
        return Extensional(self.arity, tuple(iter(self)))


def affine_closure(tuples: Sequence[Sequence[int]], p: int) -> AffineRelation:
    """Smallest coset of Z_p^k containing ``tuples`` (closure under x - y + z)."""
    _require_prime(p)
    tuples = [tuple(int(v) % p for v in t) for t in tuples]
    if not tuples:
        raise ValueError("affine closure of an empty tuple list is undefined")
    k = len(tuples[0])
    base = tuples[0]
    diffs = [[(a - b) % p for a, b in zip(t, base)] for t in tuples[1:]]
    red, _ = rref(diffs, p, k)
    return AffineRelation(p, k, base, tuple(tuple(r) for r in red))


def relation_to_equations(R: AffineRelation) -> tuple[ModMatrix, tuple[int, ...]]:
    """Equation form: rows span the annihilator of the basis, in RREF."""
    p, k = R.p, R.arity
    if R.basis:
        ann = nullspace(ModMatrix(p, R.basis, k))
    else:
        ann = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    red, _ = rref(ann, p, k)
    E = ModMatrix(p, tuple(tuple(r) for r in red), k)
    return E, E.apply(R.particular)


def is_closed_under_maltsev(points, p: int) -> bool:
    """Closure under ``x - y + z`` checked on every triple (test helper)."""
    pts = set(map(tuple, points))
    return all(
        tuple((a - b + c) % p for a, b, c in zip(x, y, z)) in pts
        for x in pts
        for y in pts
        for z in pts
    )


@dataclass(frozen=True)
class AffineStructure:
    p: int
    relations: tuple[tuple[str, AffineRelation], ...]

    def relation(self, symbol: str) -> AffineRelation:
        for s, r in self.relations:
            if s == symbol:
                return r
        raise KeyError(symbol)

    def to_finite_structure(self, name: str = "C", threshold: int = 10**6) -> FiniteStructure:
        return FiniteStructure(
            self.p, tuple((s, r.to_extensional(threshold)) for s, r in self.relations), name
        )


def to_affine_structure(C: FiniteStructure) -> AffineStructure:
    """Read an affine structure on ``[p]`` off ``C``; raises if a relation is not a coset."""
    p = C.domain_size
    _require_prime(p)
    rels = []
    for sym, rel in C.relations:
        tuples = list(iter(rel))
        if not tuples:
            raise StructureError(f"relation {sym} is empty, not a coset")
        aff = affine_closure(tuples, p)
        if aff.size() != len(tuples):
            raise StructureError(f"relation {sym} is not closed under x - y + z mod {p}")
        rels.append((sym, aff))
    return AffineStructure(p, tuple(rels))


# ---------------------------------------------------------------------------
# Solvers


@dataclass(frozen=True)
class AffineAnswer:
    sat: bool
    assignment: tuple[int, ...] | None = None


def solve_affine_csp(C: AffineStructure, inst: CspInstance) -> AffineAnswer:
    """Stack each constraint's equations on its scope and solve the global system."""
    p, nv = C.p, inst.variable_count
    rows: list[list[int]] = []
    rhs: list[int] = []
    for sym, scope in inst.constraints:
        try:
            rel = C.relation(sym)
        except KeyError:
            raise StructureError(f"symbol {sym} has no affine relation") from None
        if rel.p != p:
            raise ValueError("relations over different primes")
        if len(scope) != rel.arity:
            raise StructureError(f"constraint {sym}{scope} has wrong arity")
        E, b = rel.equations
        for erow, bv in zip(E.rows, b):
            row = [0] * nv
            for coef, var in zip(erow, scope):
                row[var] = (row[var] + coef) % p
            rows.append(row)
            rhs.append(bv)
    if nv == 0:
        ok = all(v == 0 for v in rhs)
        return AffineAnswer(ok, () if ok else None)
    sol = gauss_solve(ModMatrix(p, tuple(map(tuple, rows)), nv), rhs)
    if sol is None:
        return AffineAnswer(False)
    x = sol.particular
    for sym, scope in inst.constraints:
        assert tuple(x[v] for v in scope) in C.relation(sym)
    return AffineAnswer(True, x)


class SandwichNotVerified(RuntimeError):
    pass


def pcsp_decide_via_sandwich(
    A: FiniteStructure,
    B: FiniteStructure,
    C: AffineStructure,
    inst: CspInstance,
    sandwich: SandwichCheck | None,
) -> bool:
    """Answer PCSP(A, B) on ``inst`` by solving CSP(C); True means "yes".

    ``sandwich`` must be a successful ``check_sandwich(A, C, B)`` result.
    """
    if sandwich is None or not sandwich.ok:
        raise SandwichNotVerified("PCSP decisions need a verified sandwich A -> C -> B")
    if sandwich.left.source_size != A.domain_size or sandwich.right.target_size != B.domain_size:
        raise SandwichNotVerified("sandwich maps do not match A and B")
    return solve_affine_csp(C, inst).sat

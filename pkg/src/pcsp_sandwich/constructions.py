"""Builders for the two sandwich families and the ternary obstruction witness."""

from __future__ import annotations

from dataclasses import dataclass

from .affine import ModMatrix, gauss_solve
from .hom import ObstructionWitness, WitnessMode
from .structcore import (
    DEFAULT_MATERIALIZE_THRESHOLD,
    Extensional,
    FiniteStructure,
    Homomorphism,
    Intensional,
    is_prime,
)

SYMBOL = "R"


@dataclass(frozen=True)
class Thm1Bundle:
    """Projections ``A``, non-cyclic tables ``B``, coefficient-sum-one linear tables ``C``.

    ``A`` is always extensional; ``B`` and ``C`` are intensional, with
    ``B_ext``/``C_ext`` holding materialized copies when under threshold.
    """

    n: int
    p: int
    A: FiniteStructure
    B: FiniteStructure
    C: FiniteStructure
    g: Homomorphism
    h: Homomorphism
    B_ext: FiniteStructure | None = None
    C_ext: FiniteStructure | None = None


@dataclass(frozen=True)
class Thm2Bundle:
    p: int
    A: FiniteStructure
    B: FiniteStructure
    C: FiniteStructure
    h: Homomorphism
    u: tuple[int, ...]
    U: ObstructionWitness


def thm1_maps(n: int, p: int) -> tuple[Homomorphism, Homomorphism]:
    """``g: x -> x mod p`` on ``[n]`` and ``h: x -> x mod n`` on ``[p]``."""
    g = Homomorphism(n, p, tuple(x % p for x in range(n)))
    h = Homomorphism(p, n, tuple(x % n for x in range(p)))
    return g, h


def build_thm1(n: int, p: int, materialize_threshold: int = DEFAULT_MATERIALIZE_THRESHOLD) -> Thm1Bundle:
    if n < 2 or p < 2:
        raise ValueError("build_thm1 needs n, p >= 2")
    A_rel = Intensional("thm1-A", n, p).materialize()
    A = FiniteStructure(n, ((SYMBOL, A_rel),), f"thm1-A-n{n}-p{p}")
    B = FiniteStructure(n, ((SYMBOL, Intensional("thm1-B", n, p)),), f"thm1-B-n{n}-p{p}")
    C = FiniteStructure(p, ((SYMBOL, Intensional("thm1-C", n, p)),), f"thm1-C-n{n}-p{p}")
    g, h = thm1_maps(n, p)
    B_ext = C_ext = None
    if n ** (n**p) <= materialize_threshold:
        B_ext = B.materialize(materialize_threshold)
    if p ** (p - 1) <= materialize_threshold:
        C_ext = C.materialize(materialize_threshold)
    return Thm1Bundle(n, p, A, B, C, g, h, B_ext, C_ext)


def thm2_relation(p: int) -> Extensional:
    """``{(x, y, z) : x - 2y + z = 1 mod p}``."""
    return Extensional.from_tuples(
        3, ((x, y, (1 - x + 2 * y) % p) for x in range(p) for y in range(p))
    )


def thm2_h(p: int) -> Homomorphism:
    return Homomorphism(p, p - 1, tuple(range(p - 1)) + (1,))


def thm2_matrix(p: int) -> ModMatrix:
    """Circulant system whose row ``i`` reads ``x_i - 2 x_{i+1} + x_{i+2}`` (indices mod p)."""
    rows = []
    for i in range(p):
        row = [0] * p
        row[i] += 1
        row[(i + 1) % p] -= 2
        row[(i + 2) % p] += 1
        rows.append(row)
    return ModMatrix.of(rows, p)


class NoValidShift(RuntimeError):
    pass


def build_thm2_witness(p: int, allow_small: bool = False) -> tuple[tuple[int, ...], ObstructionWitness]:
    """Vector ``u`` over ``[p-1]`` whose rotations give ``p`` columns in ``R^A``."""
    _check_thm2_prime(p, allow_small)
    M = thm2_matrix(p)
    pinned = ModMatrix(p, M.rows + (_unit(p, p - 2), _unit(p, p - 1)), p)
    sol = gauss_solve(pinned, [1] * p + [0, 0])
    if sol is None:
        raise NoValidShift(f"no solution with the last two coordinates zero for p={p}")
    base = sol.particular
    for c in range(p):
        u = tuple((x + c) % p for x in base)
        if p - 1 not in u:
            break
    else:
        raise NoValidShift(f"every shift of {base} hits {p - 1}")
    cols = tuple((u[i], u[(i + 1) % p], u[(i + 2) % p]) for i in range(p))
    return u, ObstructionWitness(p, cols, WitnessMode.CONSTANT_FORCING)


def _unit(p: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(p))


def _check_thm2_prime(p: int, allow_small: bool) -> None:
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p < 7 and not (allow_small and p in (3, 5)):
        raise ValueError(f"p={p} < 7 (p in {{3, 5}} only with allow_small)")


def build_thm2(p: int, allow_small: bool = False) -> Thm2Bundle:
    _check_thm2_prime(p, allow_small)
    RC = thm2_relation(p)
    RA = Extensional.from_tuples(3, (t for t in RC if max(t) < p - 1))
    h = thm2_h(p)
    RB = Extensional.from_tuples(3, (tuple(h(v) for v in t) for t in RC))
    A = FiniteStructure(p - 1, ((SYMBOL, RA),), f"thm2-A-p{p}")
    B = FiniteStructure(p - 1, ((SYMBOL, RB),), f"thm2-B-p{p}")
    C = FiniteStructure(p, ((SYMBOL, RC),), f"thm2-C-p{p}")
    try:
        u, U = build_thm2_witness(p, allow_small)
    except NoValidShift:
        if p >= 7:
            raise
        u, U = (), None
    return Thm2Bundle(p, A, B, C, h, u, U)


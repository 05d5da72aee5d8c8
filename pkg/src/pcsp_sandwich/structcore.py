"""Finite relational structures, function tables and their encodings.

A function ``f: [n]^p -> [m]`` is identified with the tuple of its values
listed in lexicographic order of the inputs (first coordinate most
significant).  This is how relations of arity ``n**p`` whose members are
functions are stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_MATERIALIZE_THRESHOLD = 10**6

INTENSIONAL_TAGS = ("thm1-A", "thm1-B", "thm1-C")


class StructureError(ValueError):
    """Malformed structure or table input."""


class BudgetExceeded(RuntimeError):
    """An exhaustive construction would exceed its configured size budget."""


# ---------------------------------------------------------------------------
# Point and function encodings


def point_index(x: Sequence[int], n: int, p: int | None = None) -> int:
    """Lexicographic rank of ``x`` in ``[n]^p`` with ``x[0]`` most significant."""
    if p is not None and len(x) != p:
        raise StructureError(f"expected a {p}-tuple, got length {len(x)}")
    idx = 0
    for xi in x:
        if not 0 <= xi < n:
            raise StructureError(f"coordinate {xi} outside [{n}]")
        idx = idx * n + xi
    return idx


def point_of_index(index: int, n: int, p: int) -> tuple[int, ...]:
    if not 0 <= index < n**p:
        raise StructureError(f"index {index} outside [{n}^{p}]")
    digits = [0] * p
    for i in range(p - 1, -1, -1):
        index, digits[i] = divmod(index, n)
    return tuple(digits)


def all_points(n: int, p: int) -> np.ndarray:
    """All points of ``[n]^p`` as an ``(n**p, p)`` array in index order."""
    if p == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * p, dtype=np.int64)
    return grids.reshape(p, -1).T.copy()


def rotation_permutation(n: int, p: int) -> np.ndarray:
    """``rot[i]`` is the index of the left rotation of point ``i``.

    Left rotation maps ``(x1, ..., xp)`` to ``(x2, ..., xp, x1)``.
    """
    idx = np.arange(n**p, dtype=np.int64)
    lead, rest = np.divmod(idx, n ** (p - 1))
    return rest * n + lead


def orbit_ids(n: int, p: int) -> tuple[np.ndarray, int]:
    """Label each point of ``[n]^p`` by its orbit under cyclic rotation.

    Orbits are numbered in order of their smallest member, so orbit 0 holds
    the all-zero point.  Returns ``(labels, orbit_count)``.
    """
    size = n**p
    rot = rotation_permutation(n, p)
    labels = np.full(size, -1, dtype=np.int64)
    count = 0
    for start in range(size):
        if labels[start] >= 0:
            continue
        j = start
        while labels[j] < 0:
            labels[j] = count
            j = rot[j]
        count += 1
    return labels, count


@dataclass(frozen=True)
class FunctionTable:
    """A function ``[n]^p -> [m]`` stored as its ``n**p`` values."""

    n: int
    p: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.n**self.p:
            raise StructureError(
                f"table needs {self.n ** self.p} values, got {len(self.values)}"
            )
        if any(not 0 <= v < self.m for v in self.values):
            raise StructureError(f"table value outside [{self.m}]")

    def __call__(self, *x: int) -> int:
        return self.values[point_index(x, self.n, self.p)]

    @classmethod
    def from_callable(cls, fn, n: int, p: int, m: int) -> "FunctionTable":
        return cls(n, p, m, tuple(fn(*x) for x in itertools.product(range(n), repeat=p)))

    @classmethod
    def projection(cls, i: int, n: int, p: int) -> "FunctionTable":
        """The table of ``x -> x_i`` (``i`` counted from 0)."""
        return cls.from_callable(lambda *x: x[i], n, p, n)

    @classmethod
    def constant(cls, c: int, n: int, p: int, m: int) -> "FunctionTable":
        return cls(n, p, m, (c,) * n**p)


def encode_function(f: FunctionTable) -> tuple[int, ...]:
    return f.values


def decode_function(t: Sequence[int], n: int, p: int, m: int) -> FunctionTable:
    return FunctionTable(n, p, m, tuple(int(v) for v in t))


def is_cyclic(f: FunctionTable) -> bool:
    """True iff ``f(x1,...,xp) == f(x2,...,xp,x1)`` for every input."""
    vals = f.values
    for idx, x in enumerate(itertools.product(range(f.n), repeat=f.p)):
        if vals[idx] != vals[point_index(x[1:] + x[:1], f.n)]:
            return False
    return True


def is_projection_table(t: Sequence[int], n: int, p: int) -> bool:
    pts = all_points(n, p)
    arr = np.asarray(t)
    return any(np.array_equal(arr, pts[:, i]) for i in range(p))


def linear_coefficients(t: Sequence[int], n: int, p: int) -> tuple[int, ...] | None:
    """Recover ``a`` with ``t(x) = sum(a_i x_i) mod p`` or None if not linear.

    The coefficient ``a_i`` is read at the unit point ``e_i``; linearity is
    then checked at every point.  Entries of ``t`` must lie in ``[p]``.
    """
    if n < 2:
        return None
    arr = np.asarray(t, dtype=np.int64)
    if arr.shape != (n**p,):
        return None
    coeffs = np.array([arr[n ** (p - 1 - i)] for i in range(p)], dtype=np.int64)
    if not np.array_equal((all_points(n, p) @ coeffs) % p, arr):
        return None
    return tuple(int(a) for a in coeffs)


def linear_table(coeffs: Sequence[int], n: int, p: int, out_mod: int | None = None) -> tuple[int, ...]:
    """Values of ``(sum a_i x_i mod p) mod out_mod`` over ``[n]^p``."""
    vals = (all_points(n, p) @ np.asarray(coeffs, dtype=np.int64)) % p
    if out_mod is not None:
        vals %= out_mod
    return tuple(int(v) for v in vals)


# ---------------------------------------------------------------------------
# Relations


@dataclass(frozen=True)
class RelSignature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise StructureError("duplicate relation symbol")
        if any(a < 1 for _, a in self.symbols):
            raise StructureError("relation arity must be positive")

    def arity(self, name: str) -> int:
        return dict(self.symbols)[name]


@dataclass(frozen=True)
class Extensional:
    """A relation given by its sorted, duplicate-free tuple list."""

    arity: int
    tuples: tuple[tuple[int, ...], ...]

    @classmethod
    def from_tuples(cls, arity: int, tuples: Iterable[Sequence[int]]) -> "Extensional":
        ts = sorted({tuple(int(v) for v in t) for t in tuples})
        for t in ts:
            if len(t) != arity:
                raise StructureError(f"tuple {t} does not have arity {arity}")
        return cls(arity, tuple(ts))

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._members

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def size(self) -> int:
        return len(self.tuples)

    def materialize(self, threshold: int = DEFAULT_MATERIALIZE_THRESHOLD) -> "Extensional":
        return self


@dataclass(frozen=True)
class Intensional:
    """A relation of arity ``n**p`` given by a named membership predicate.

    ``thm1-A``: projection tables over ``[n]``; ``thm1-B``: non-cyclic tables
    over ``[n]``; ``thm1-C``: tables ``sum a_i x_i mod p`` over ``[p]`` with
    ``sum a_i = 1 mod p``.
    """

    tag: str
    n: int
    p: int

    def __post_init__(self) -> None:
        if self.tag not in INTENSIONAL_TAGS:
            raise StructureError(f"unknown intensional tag {self.tag!r}")
        if self.n < 2 or self.p < 2:
            raise StructureError("intensional relations need n, p >= 2")

    @property
    def arity(self) -> int:
        return self.n**self.p

    @property
    def value_range(self) -> int:
        return self.p if self.tag == "thm1-C" else self.n

    def __contains__(self, t) -> bool:
        t = tuple(t)
        if len(t) != self.arity or any(not 0 <= v < self.value_range for v in t):
            return False
        if self.tag == "thm1-A":
            return is_projection_table(t, self.n, self.p)
        if self.tag == "thm1-B":
            return not is_cyclic(FunctionTable(self.n, self.p, self.n, t))
        coeffs = linear_coefficients(t, self.n, self.p)
        return coeffs is not None and sum(coeffs) % self.p == 1

    def size(self) -> int:
        n, p = self.n, self.p
        if self.tag == "thm1-A":
            return p
        if self.tag == "thm1-C":
            return p ** (p - 1)
        _, orbits = orbit_ids(n, p)
        return n ** (n**p) - n**orbits

    def __len__(self) -> int:
        return self.size()

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        n, p = self.n, self.p
        if self.tag == "thm1-A":
            pts = all_points(n, p)
            for i in range(p):
                yield tuple(int(v) for v in pts[:, i])
        elif self.tag == "thm1-C":
            for head in itertools.product(range(p), repeat=p - 1):
                last = (1 - sum(head)) % p
                yield linear_table(head + (last,), n, p)
        else:
            for t in itertools.product(range(n), repeat=n**p):
                if not is_cyclic(FunctionTable(n, p, n, t)):
                    yield t

    def materialize(self, threshold: int = DEFAULT_MATERIALIZE_THRESHOLD) -> Extensional:
        if self.tag == "thm1-B":
            work = self.n ** (self.n**self.p)
        else:
            work = self.size()
        if work > threshold:
            raise BudgetExceeded(
                f"{self.tag}(n={self.n}, p={self.p}) needs {work} candidates, threshold {threshold}"
            )
        if self.tag == "thm1-B":
            return Extensional.from_tuples(self.arity, _nonconstant_cyclic_scan(self.n, self.p))
        return Extensional.from_tuples(self.arity, iter(self))


def _nonconstant_cyclic_scan(n: int, p: int) -> Iterator[tuple[int, ...]]:
    labels, _ = orbit_ids(n, p)
    for t in itertools.product(range(n), repeat=n**p):
        # cyclic iff constant on every orbit
        seen: dict[int, int] = {}
        for v, lab in zip(t, labels):
            if seen.setdefault(int(lab), v) != v:
                yield t
                break


Relation = Extensional | Intensional


@dataclass(frozen=True)
class FiniteStructure:
    """Domain ``[domain_size]`` with one relation per symbol (ordered)."""

    domain_size: int
    relations: tuple[tuple[str, Relation], ...]
    name: str = "S"

    def __post_init__(self) -> None:
        if self.domain_size < 0:
            raise StructureError("domain size must be non-negative")
        RelSignature(tuple((s, r.arity) for s, r in self.relations))
        for sym, rel in self.relations:
            if isinstance(rel, Extensional):
                for t in rel.tuples:
                    if any(not 0 <= v < self.domain_size for v in t):
                        raise StructureError(f"tuple {t} of {sym} leaves the domain")
            else:
                want = rel.p if rel.tag == "thm1-C" else rel.n
                if want != self.domain_size:
                    raise StructureError(
                        f"{rel.tag} with n={rel.n}, p={rel.p} needs domain {want}"
                    )

    @classmethod
    def build(cls, domain_size: int, relations: dict, name: str = "S") -> "FiniteStructure":
        """Build from ``{symbol: relation or (arity, tuples)}``."""
        rels = []
        for sym, rel in relations.items():
            if not isinstance(rel, (Extensional, Intensional)):
                arity, tuples = rel
                rel = Extensional.from_tuples(arity, tuples)
            rels.append((sym, rel))
        return cls(domain_size, tuple(rels), name)

    @property
    def signature(self) -> RelSignature:
        return RelSignature(tuple((s, r.arity) for s, r in self.relations))

    def relation(self, symbol: str) -> Relation:
        for s, r in self.relations:
            if s == symbol:
                return r
        raise KeyError(symbol)

    @property
    def is_extensional(self) -> bool:
        return all(isinstance(r, Extensional) for _, r in self.relations)

    def materialize(self, threshold: int = DEFAULT_MATERIALIZE_THRESHOLD) -> "FiniteStructure":
        return FiniteStructure(
            self.domain_size,
            tuple((s, r.materialize(threshold)) for s, r in self.relations),
            self.name,
        )

    def renamed(self, name: str) -> "FiniteStructure":
        return FiniteStructure(self.domain_size, self.relations, name)

    def induced(self, vertices: Sequence[int], name: str | None = None) -> "FiniteStructure":
        """Induced substructure on ``vertices``, relabelled ``0..len-1`` in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        rels = []
        for s, r in self.relations:
            kept = (tuple(pos[v] for v in t) for t in r if all(v in pos for v in t))
            rels.append((s, Extensional.from_tuples(r.arity, kept)))
        return FiniteStructure(len(vertices), tuple(rels), name or self.name)


def require_same_signature(*structures) -> None:
    sigs = {s.signature for s in structures}
    if len(sigs) > 1:
        raise StructureError("structures have different signatures")


# ---------------------------------------------------------------------------
# Powers and symmetric parts


def power_structure(
    A: FiniteStructure, m: int, budget: int = DEFAULT_MATERIALIZE_THRESHOLD
) -> FiniteStructure:
    """The ``m``-th power ``A^m``; elements are encoded by ``point_index``."""
    if m < 1:
        raise StructureError("power exponent must be positive")
    if not A.is_extensional:
        raise StructureError("power_structure needs extensional relations")
    k = A.domain_size
    if k**m > budget:
        raise BudgetExceeded(f"domain {k}^{m} exceeds budget {budget}")
    weights = np.array([k ** (m - 1 - i) for i in range(m)], dtype=np.int64)
    rels = []
    for sym, rel in A.relations:
        if len(rel) ** m > budget:
            raise BudgetExceeded(f"{len(rel)}^{m} selections of {sym} exceed budget {budget}")
        if len(rel) == 0:
            rels.append((sym, Extensional(rel.arity, ())))
            continue
        T = np.array(rel.tuples, dtype=np.int64)
        # every m-selection of rows, zipped coordinatewise into points of A^m
        sel = np.indices((len(rel),) * m).reshape(m, -1).T
        zipped = np.einsum("sik,i->sk", T[sel], weights)
        rels.append((sym, Extensional.from_tuples(rel.arity, zipped.tolist())))
    return FiniteStructure(k**m, tuple(rels), f"{A.name}^{m}")


def max_symmetric_subset(rel: Extensional, max_arity: int = 8) -> Extensional:
    """Tuples of ``rel`` all of whose coordinate permutations lie in ``rel``."""
    if rel.arity > max_arity:
        raise BudgetExceeded(f"arity {rel.arity} exceeds permutation budget {max_arity}")
    perms = list(itertools.permutations(range(rel.arity)))
    kept = [t for t in rel if all(tuple(t[i] for i in s) in rel for s in perms)]
    return Extensional(rel.arity, tuple(kept))


def symmetric_part(A: FiniteStructure) -> FiniteStructure:
    return FiniteStructure(
        A.domain_size,
        tuple((s, max_symmetric_subset(r.materialize())) for s, r in A.relations),
        A.name,
    )


def is_symmetric(A: FiniteStructure) -> bool:
    return all(
        max_symmetric_subset(r.materialize()).size() == r.size() for _, r in A.relations
    )


# ---------------------------------------------------------------------------
# Homomorphism values


@dataclass(frozen=True)
class Homomorphism:
    """A map ``[source_size] -> [target_size]``; relation preservation is checked elsewhere."""

    source_size: int
    target_size: int
    map: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.map) != self.source_size:
            raise StructureError("map must be total on the source domain")
        if any(not 0 <= v < self.target_size for v in self.map):
            raise StructureError("map leaves the target domain")

    def __call__(self, x: int) -> int:
        return self.map[x]

    @classmethod
    def identity(cls, k: int) -> "Homomorphism":
        return cls(k, k, tuple(range(k)))

    def then(self, other: "Homomorphism") -> "Homomorphism":
        if self.target_size != other.source_size:
            raise StructureError("maps do not compose")
        return Homomorphism(self.source_size, other.target_size, tuple(other.map[v] for v in self.map))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))

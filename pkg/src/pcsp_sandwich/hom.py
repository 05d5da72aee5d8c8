"""Homomorphism and polymorphism search, plus the obstruction witnesses that refute cyclic ones."""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .structcore import (
    BudgetExceeded,
    Extensional,
    FiniteStructure,
    FunctionTable,
    Homomorphism,
    StructureError,
    is_cyclic,
    is_prime,
    orbit_ids,
    point_index,
    require_same_signature,
)

DEFAULT_SELECTION_BUDGET = 10**6


@dataclass(frozen=True)
class CspInstance:
    """Variables ``0..variable_count-1`` and constraints ``(symbol, scope)``."""

    variable_count: int
    constraints: tuple[tuple[str, tuple[int, ...]], ...]
    name: str = "I"

    def __post_init__(self) -> None:
        if self.variable_count < 0:
            raise StructureError("variable count must be non-negative")
        for sym, scope in self.constraints:
            if not scope:
                raise StructureError(f"constraint {sym} has an empty scope")
            if any(not 0 <= v < self.variable_count for v in scope):
                raise StructureError(f"constraint {sym}{scope} uses an unknown variable")

    @classmethod
    def from_structure(cls, X: FiniteStructure) -> "CspInstance":
        cons = tuple((sym, tuple(t)) for sym, rel in X.relations for t in rel)
        return cls(X.domain_size, cons, X.name)

    def check_against(self, A: FiniteStructure) -> None:
        arities = dict(A.signature.symbols)
        for sym, scope in self.constraints:
            if sym not in arities:
                raise StructureError(f"symbol {sym} not in target signature")
            if len(scope) != arities[sym]:
                raise StructureError(f"constraint {sym}{scope} has wrong arity")


# ---------------------------------------------------------------------------
# Backtracking with generalized arc consistency


class _Search:
    """Finds the lexicographically least satisfying assignment.

    Variables are assigned in index order and values in ascending order.
    Extensional constraints are kept arc consistent; other constraints are
    checked once their whole scope is assigned.  Pruning only removes values
    that extend to no solution, so the first solution found is lex least.
    """

    def __init__(self, variable_count, domain_size, constraints, initial=None, node_budget=None):
        self.nvars = variable_count
        self.constraints = [(rel, tuple(scope)) for rel, scope in constraints]
        self.by_var: list[list[int]] = [[] for _ in range(variable_count)]
        for ci, (_, scope) in enumerate(self.constraints):
            for v in set(scope):
                self.by_var[v].append(ci)
        self.initial = initial or [set(range(domain_size)) for _ in range(variable_count)]
        self.node_budget = node_budget
        self.nodes = 0

    def _revise(self, ci, doms):
        """Shrink the scope domains of constraint ``ci``; return changed vars or None on wipe-out."""
        rel, scope = self.constraints[ci]
        if isinstance(rel, Extensional):
            support = [set() for _ in scope]
            for t in rel.tuples:
                ok = True
                bound = {}
                for j, v in enumerate(scope):
                    if t[j] not in doms[v] or bound.setdefault(v, t[j]) != t[j]:
                        ok = False
                        break
                if ok:
                    for j in range(len(scope)):
                        support[j].add(t[j])
            allowed: dict[int, set] = {}
            for j, v in enumerate(scope):
                allowed[v] = allowed[v] & support[j] if v in allowed else support[j]
        else:
            if any(len(doms[v]) != 1 for v in scope):
                return set()
            t = tuple(next(iter(doms[v])) for v in scope)
            if t in rel:
                return set()
            return None
        changed = set()
        for v, vals in allowed.items():
            if not vals:
                return None
            if len(vals) < len(doms[v]):
                doms[v] = vals
                changed.add(v)
        return changed

    def _propagate(self, doms, queue):
        pending = set(queue)
        queue = list(queue)
        while queue:
            ci = queue.pop()
            pending.discard(ci)
            changed = self._revise(ci, doms)
            if changed is None:
                return False
            for v in changed:
                for cj in self.by_var[v]:
                    if cj not in pending:
                        pending.add(cj)
                        queue.append(cj)
        return True

    def solve(self):
        doms = [set(d) for d in self.initial]
        if any(not d for d in doms):
            return None
        if not self._propagate(doms, range(len(self.constraints))):
            return None
        return self._extend(doms, 0)

    def _extend(self, doms, var):
        if var == self.nvars:
            return [next(iter(d)) for d in doms]
        for value in sorted(doms[var]):
            self.nodes += 1
            if self.node_budget is not None and self.nodes > self.node_budget:
                raise BudgetExceeded(f"search exceeded {self.node_budget} nodes")
            trial = list(doms)
            trial[var] = {value}
            if self._propagate(trial, self.by_var[var]):
                found = self._extend(trial, var + 1)
                if found is not None:
                    return found
        return None


def _as_instance(X) -> CspInstance:
    if isinstance(X, CspInstance):
        return X
    return CspInstance.from_structure(X.materialize())


def find_homomorphism(X, A: FiniteStructure, node_budget: int | None = None) -> Homomorphism | None:
    """Lexicographically least homomorphism from ``X`` (instance or structure) to ``A``."""
    if isinstance(X, FiniteStructure):
        require_same_signature(X, A)
    inst = _as_instance(X)
    inst.check_against(A)
    cons = [(A.relation(sym), scope) for sym, scope in inst.constraints]
    found = _Search(inst.variable_count, A.domain_size, cons, node_budget=node_budget).solve()
    if found is None:
        return None
    return Homomorphism(inst.variable_count, A.domain_size, tuple(found))


def is_homomorphism(f: Homomorphism, X, A: FiniteStructure) -> bool:
    inst = _as_instance(X)
    if f.source_size != inst.variable_count or f.target_size != A.domain_size:
        raise StructureError("map domains do not match the structures")
    inst.check_against(A)
    return all(
        tuple(f.map[v] for v in scope) in A.relation(sym) for sym, scope in inst.constraints
    )


# ---------------------------------------------------------------------------
# Cores


@dataclass(frozen=True)
class Core:
    structure: FiniteStructure
    vertices: tuple[int, ...]
    retraction: Homomorphism


def core_of(A: FiniteStructure, max_size: int = 10) -> Core:
    """Core of ``A`` as the induced substructure on the lex least smallest vertex set."""
    if A.domain_size > max_size:
        raise BudgetExceeded(f"core search limited to {max_size} elements")
    A = A.materialize()
    kept = list(range(A.domain_size))
    shrinking = True
    while shrinking:
        shrinking = False
        for v in kept:
            rest = [u for u in kept if u != v]
            if find_homomorphism(A.induced(kept), A.induced(rest)) is not None:
                kept = rest
                shrinking = True
                break
    for subset in itertools.combinations(range(A.domain_size), len(kept)):
        sub = A.induced(subset, name=f"core({A.name})")
        h = find_homomorphism(A, sub)
        if h is not None:
            return Core(sub, subset, h)
    raise AssertionError("unreachable: the shrunken set itself admits a homomorphism")


def is_core(A: FiniteStructure) -> bool:
    """Every endomorphism is bijective, i.e. no homomorphism onto a proper induced substructure."""
    A = A.materialize()
    vs = range(A.domain_size)
    return all(
        find_homomorphism(A, A.induced([u for u in vs if u != v])) is None for v in vs
    )


def are_isomorphic(A: FiniteStructure, B: FiniteStructure) -> bool:
    if A.domain_size != B.domain_size:
        return False
    A, B = A.materialize(), B.materialize()
    if [r.size() for _, r in A.relations] != [r.size() for _, r in B.relations]:
        return False
    # an injective homomorphism between equal-size finite structures with equal tuple counts is an isomorphism
    for perm in itertools.permutations(range(B.domain_size)):
        h = Homomorphism(A.domain_size, B.domain_size, perm)
        if is_homomorphism(h, A, B):
            return True
    return False


# ---------------------------------------------------------------------------
# Polymorphism search


class Status(enum.Enum):
    FOUND = "Found"
    REFUTED = "RefutedExhaustively"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    seconds: float
    candidates: int
    constraints: int = 0
    note: str = ""


@dataclass(frozen=True)
class SearchOutcome:
    status: Status
    certificate: FunctionTable | None = None
    stats: SearchStats = field(default_factory=lambda: SearchStats(0, 0.0, 0))

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    def describe(self) -> str:
        if self.status is Status.REFUTED:
            return f"RefutedExhaustively ({self.stats.candidates} candidates)"
        if self.status is Status.FOUND:
            return f"Found ({self.stats.nodes} nodes)"
        return f"Unknown ({self.stats.nodes} nodes, {self.stats.seconds:.2f}s{'; ' + self.stats.note if self.stats.note else ''})"


def _selection_scopes(tuples, k: int, n: int, p: int, labels: np.ndarray, budget: int) -> np.ndarray:
    """Distinct variable scopes induced by all ``p``-selections of ``tuples``."""
    T = np.ascontiguousarray(np.array(list(tuples), dtype=np.int64).reshape(-1, k))
    total = len(T) ** p
    if total > budget:
        raise BudgetExceeded(f"{len(T)}^{p} = {total} selections exceed budget {budget}")
    if total == 0:
        return np.zeros((0, k), dtype=np.int64)
    chunks = []
    step = 1 << 16
    for lo in range(0, total, step):
        part = kernels.selection_orbit_scopes(T, n, p, labels, lo, min(total, lo + step))
        chunks.append(np.unique(part, axis=0))
    return np.unique(np.concatenate(chunks), axis=0)


def _polymorphism_search(A, B, p, labels, var_count, initial, node_budget, selection_budget):
    """Shared driver: variables are ``var_count`` classes of points of ``A^p``."""
    start = time.perf_counter()
    cons = []
    try:
        for sym, rel in A.relations:
            scopes = _selection_scopes(iter(rel), rel.arity, A.domain_size, p, labels, selection_budget)
            target = B.relation(sym)
            cons.extend((target, tuple(int(v) for v in s)) for s in scopes)
    except BudgetExceeded as exc:
        stats = SearchStats(0, time.perf_counter() - start, 0, 0, str(exc))
        return SearchOutcome(Status.UNKNOWN, None, stats), None
    search = _Search(var_count, B.domain_size, cons, initial=initial, node_budget=node_budget)
    try:
        found = search.solve()
    except BudgetExceeded as exc:
        stats = SearchStats(search.nodes, time.perf_counter() - start, 0, len(cons), str(exc))
        return SearchOutcome(Status.UNKNOWN, None, stats), None
    return (search, found, cons, time.perf_counter() - start), found


def polymorphism_violations(f: FunctionTable, A: FiniteStructure, B: FiniteStructure, limit: int | None = None):
    """Selections of ``A``-tuples whose image under ``f`` leaves ``B`` (full sweep)."""
    bad = []
    for sym, rel in A.relations:
        target = B.relation(sym)
        for sel in itertools.product(list(rel), repeat=f.p):
            image = tuple(f(*col) for col in zip(*sel))
            if image not in target:
                bad.append((sym, sel))
                if limit is not None and len(bad) >= limit:
                    return bad
    return bad


def find_cyclic_polymorphism(
    A: FiniteStructure,
    B: FiniteStructure,
    p: int,
    node_budget: int | None = 10**6,
    selection_budget: int = DEFAULT_SELECTION_BUDGET,
    allow_composite: bool = False,
) -> SearchOutcome:
    """Search for a cyclic ``p``-ary polymorphism ``A^p -> B``.

    One search variable per orbit of ``[|A|]^p`` under rotation; each
    ``p``-selection of tuples of ``R^A`` contributes one constraint on the
    orbits of its zipped columns.
    """
    require_same_signature(A, B)
    if not allow_composite and not is_prime(p):
        raise ValueError(f"p={p} is not prime (pass allow_composite for exploratory runs)")
    k = A.domain_size
    labels, orbit_count = orbit_ids(k, p)
    res, found = _polymorphism_search(A, B, p, labels, orbit_count, None, node_budget, selection_budget)
    if isinstance(res, SearchOutcome):
        return res
    search, _, cons, seconds = res
    candidates = B.domain_size**orbit_count
    if found is None:
        return SearchOutcome(Status.REFUTED, None, SearchStats(search.nodes, seconds, candidates, len(cons)))
    table = FunctionTable(k, p, B.domain_size, tuple(found[int(l)] for l in labels))
    assert is_cyclic(table)
    assert all(tuple(found[v] for v in s) in rel for rel, s in cons)
    return SearchOutcome(Status.FOUND, table, SearchStats(search.nodes, seconds, candidates, len(cons)))


def find_majority_polymorphism(
    A: FiniteStructure,
    node_budget: int | None = 10**6,
    selection_budget: int = DEFAULT_SELECTION_BUDGET,
) -> SearchOutcome:
    """Search for ``m: A^3 -> A`` with ``m(x,x,y) = m(x,y,x) = m(y,x,x) = x``."""
    k = A.domain_size
    labels = np.arange(k**3, dtype=np.int64)
    initial = []
    free = 0
    for x, y, z in itertools.product(range(k), repeat=3):
        if x == y or x == z:
            initial.append({x})
        elif y == z:
            initial.append({y})
        else:
            initial.append(set(range(k)))
            free += 1
    res, found = _polymorphism_search(A, A, 3, labels, k**3, initial, node_budget, selection_budget)
    if isinstance(res, SearchOutcome):
        return res
    search, _, cons, seconds = res
    candidates = k**free
    if found is None:
        return SearchOutcome(Status.REFUTED, None, SearchStats(search.nodes, seconds, candidates, len(cons)))
    table = FunctionTable(k, 3, k, tuple(found))
    return SearchOutcome(Status.FOUND, table, SearchStats(search.nodes, seconds, candidates, len(cons)))


def compose_cyclic(r: Homomorphism, t: FunctionTable, s: Homomorphism) -> FunctionTable:
    """``f(x_1..x_p) = s(t(r(x_1), ..., r(x_p)))``."""
    if r.target_size != t.n or s.source_size != t.m:
        raise StructureError("maps do not compose with the table")
    if not is_cyclic(t):
        raise ValueError("t must be cyclic")
    return FunctionTable.from_callable(
        lambda *x: s(t(*(r(v) for v in x))), r.source_size, t.p, s.target_size
    )


# ---------------------------------------------------------------------------
# Obstruction witnesses


class WitnessMode(enum.Enum):
    CONSTANT_FORCING = "constant-forcing"
    EXHAUSTIVE_CYCLIC = "exhaustive-cyclic"


@dataclass(frozen=True)
class ObstructionWitness:
    """``p`` tuples of ``R^A``, read as the columns of a ``k x p`` matrix."""

    p: int
    columns: tuple[tuple[int, ...], ...]
    mode: WitnessMode

    def __post_init__(self) -> None:
        if len(self.columns) != self.p:
            raise StructureError(f"witness needs {self.p} columns, got {len(self.columns)}")
        if len({len(c) for c in self.columns}) > 1:
            raise StructureError("witness columns differ in length")

    @property
    def arity(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(c[j] for c in self.columns) for j in range(self.arity)]


@dataclass(frozen=True)
class WitnessCheck:
    valid: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def verify_obstruction_witness(
    A: FiniteStructure, B: FiniteStructure, w: ObstructionWitness, symbol: str | None = None
) -> WitnessCheck:
    """Check that ``w`` rules out every cyclic ``w.p``-ary polymorphism ``A -> B``."""
    require_same_signature(A, B)
    if symbol is None:
        if len(A.relations) != 1:
            raise StructureError("name the relation symbol for multi-relation structures")
        symbol = A.relations[0][0]
    RA, RB = A.relation(symbol), B.relation(symbol)
    if w.arity != RA.arity:
        raise StructureError(f"witness arity {w.arity} differs from relation arity {RA.arity}")
    for i, col in enumerate(w.columns):
        if any(not 0 <= v < A.domain_size for v in col) or col not in RA:
            return WitnessCheck(False, f"column {i} not in R^A")
    rows = w.rows
    if w.mode is WitnessMode.CONSTANT_FORCING:
        for j in range(w.arity - 1):
            if rows[j + 1] != rows[j][1:] + rows[j][:1]:
                return WitnessCheck(False, f"row {j + 1} is not the left rotation of row {j}")
        for c in range(B.domain_size):
            if (c,) * w.arity in RB:
                return WitnessCheck(False, f"constant tuple of {c} lies in R^B")
        return WitnessCheck(True, "rows are rotations of one vector and R^B has no constant tuple")
    labels, _ = orbit_ids(A.domain_size, w.p)
    row_orbits = [int(labels[point_index(r, A.domain_size, w.p)]) for r in rows]
    distinct = sorted(set(row_orbits))
    slot = {o: i for i, o in enumerate(distinct)}
    for values in itertools.product(range(B.domain_size), repeat=len(distinct)):
        image = tuple(values[slot[o]] for o in row_orbits)
        if image in RB:
            return WitnessCheck(False, f"cyclic assignment {values} on row orbits maps into R^B")
    return WitnessCheck(True, f"all {B.domain_size ** len(distinct)} cyclic assignments leave R^B")


# ---------------------------------------------------------------------------
# Sandwiches


@dataclass(frozen=True)
class SandwichCheck:
    left: Homomorphism | None
    right: Homomorphism | None

    @property
    def ok(self) -> bool:
        return self.left is not None and self.right is not None

    @property
    def failure(self) -> str | None:
        if self.left is None:
            return "left"
        if self.right is None:
            return "right"
        return None


def check_sandwich(A: FiniteStructure, C: FiniteStructure, B: FiniteStructure) -> SandwichCheck:
    """Homomorphisms ``A -> C`` and ``C -> B`` if both exist; otherwise the failing side."""
    require_same_signature(A, C, B)
    left = find_homomorphism(A, C)
    if left is None:
        return SandwichCheck(None, None)
    right = find_homomorphism(C, B)
    return SandwichCheck(left, right)


def verify_sandwich_maps(A, C, B, g: Homomorphism, h: Homomorphism) -> bool:
    return is_homomorphism(g, A, C) and is_homomorphism(h, C, B)


def brute_force_homomorphisms(X, A: FiniteStructure) -> Iterable[Homomorphism]:
    """Every map checked one by one, in lexicographic order (test oracle)."""
    inst = _as_instance(X)
    for m in itertools.product(range(A.domain_size), repeat=inst.variable_count):
        h = Homomorphism(inst.variable_count, A.domain_size, m)
        if is_homomorphism(h, inst, A):
            yield h

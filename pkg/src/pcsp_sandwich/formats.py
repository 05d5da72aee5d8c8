"""Line-oriented text formats for every object the tools read or write.

All formats are UTF-8, one record per line, ``#`` starts a comment.
Serialization is canonical, so ``serialize(parse(text))`` is byte-stable.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from .affine import ModMatrix
from .hom import CspInstance, ObstructionWitness, WitnessMode
from .structcore import Extensional, FiniteStructure, Intensional, StructureError


class FormatError(StructureError):
    pass


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {lineno}: expected an integer, got {tok!r}") from None


def _keyvals(tokens: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise FormatError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# Structures


def serialize_structure(S: FiniteStructure) -> str:
    out = [f"structure {S.name}", f"domain {S.domain_size}"]
    for sym, rel in S.relations:
        if isinstance(rel, Intensional):
            out.append(f"relation {sym} arity {rel.arity} intensional {rel.tag} n={rel.n} p={rel.p}")
        else:
            out.append(f"relation {sym} arity {rel.arity} size {rel.size()}")
            out.extend(" ".join(map(str, t)) for t in rel.tuples)
    out.append("end")
    return "\n".join(out) + "\n"


def parse_structures(text: str) -> list[FiniteStructure]:
    """Every ``structure ... end`` block in ``text``, in order; other lines are rejected."""
    found = []
    it = _lines(text)
    for lineno, tok in it:
        if tok[0] != "structure":
            raise FormatError(f"line {lineno}: expected 'structure NAME'")
        found.append(_parse_structure_body(tok, lineno, it))
    return found


def parse_structure(text: str) -> FiniteStructure:
    structures = parse_structures(text)
    if len(structures) != 1:
        raise FormatError(f"expected one structure, found {len(structures)}")
    return structures[0]


def _parse_structure_body(head, lineno, it) -> FiniteStructure:
    if len(head) != 2:
        raise FormatError(f"line {lineno}: expected 'structure NAME'")
    name = head[1]
    lineno, tok = next(it, (lineno, ["<eof>"]))
    if tok[0] != "domain" or len(tok) != 2:
        raise FormatError(f"line {lineno}: expected 'domain K'")
    domain = _int(tok[1], lineno)
    rels = []
    for lineno, tok in it:
        if tok == ["end"]:
            try:
                return FiniteStructure(domain, tuple(rels), name)
            except StructureError as exc:
                raise FormatError(f"structure {name}: {exc}") from None
        if tok[0] != "relation" or len(tok) < 5 or tok[2] != "arity":
            raise FormatError(f"line {lineno}: malformed relation header")
        sym, arity = tok[1], _int(tok[3], lineno)
        if tok[4] == "size" and len(tok) == 6:
            size = _int(tok[5], lineno)
            tuples = []
            for _ in range(size):
                lineno, row = next(it, (lineno, None))
                if row is None:
                    raise FormatError(f"relation {sym}: expected {size} tuples")
                if len(row) != arity:
                    raise FormatError(f"line {lineno}: tuple of length {len(row)}, arity {arity}")
                tuples.append(tuple(_int(v, lineno) for v in row))
            rel = Extensional.from_tuples(arity, tuples)
            if rel.size() != size:
                raise FormatError(f"relation {sym}: duplicate tuples")
        elif tok[4] == "intensional" and len(tok) == 8:
            kv = _keyvals(tok[6:], lineno)
            try:
                rel = Intensional(tok[5], _int(kv["n"], lineno), _int(kv["p"], lineno))
            except (KeyError, StructureError) as exc:
                raise FormatError(f"line {lineno}: bad intensional relation ({exc})") from None
            if rel.arity != arity:
                raise FormatError(f"line {lineno}: arity {arity} differs from n^p = {rel.arity}")
        else:
            raise FormatError(f"line {lineno}: malformed relation header")
        rels.append((sym, rel))
    raise FormatError(f"structure {name}: missing 'end'")


# ---------------------------------------------------------------------------
# Instances


def serialize_instance(inst: CspInstance) -> str:
    out = [f"instance {inst.name}", f"variables {inst.variable_count}"]
    out.extend(f"constraint {sym} " + " ".join(map(str, scope)) for sym, scope in inst.constraints)
    out.append("end")
    return "\n".join(out) + "\n"


def parse_instance(text: str) -> CspInstance:
    it = _lines(text)
    lineno, tok = next(it, (0, ["<eof>"]))
    if tok[0] != "instance" or len(tok) != 2:
        raise FormatError(f"line {lineno}: expected 'instance NAME'")
    name = tok[1]
    lineno, tok = next(it, (lineno, ["<eof>"]))
    if tok[0] != "variables" or len(tok) != 2:
        raise FormatError(f"line {lineno}: expected 'variables V'")
    nv = _int(tok[1], lineno)
    cons = []
    for lineno, tok in it:
        if tok == ["end"]:
            try:
                return CspInstance(nv, tuple(cons), name)
            except StructureError as exc:
                raise FormatError(str(exc)) from None
        if tok[0] != "constraint" or len(tok) < 3:
            raise FormatError(f"line {lineno}: expected 'constraint R v1 ... vK'")
        cons.append((tok[1], tuple(_int(v, lineno) for v in tok[2:])))
    raise FormatError("instance: missing 'end'")


# ---------------------------------------------------------------------------
# Witnesses


def serialize_witness(w: ObstructionWitness) -> str:
    out = [f"witness p={w.p} arity={w.arity} mode={w.mode.value}"]
    out.extend(" ".join(map(str, row)) for row in w.rows)
    return "\n".join(out) + "\n"


def parse_witness(text: str) -> ObstructionWitness:
    it = _lines(text)
    w = _parse_witness_from(it)
    extra = next(it, None)
    if extra is not None:
        raise FormatError(f"line {extra[0]}: trailing content after witness")
    return w


def _parse_witness_from(it, head=None) -> ObstructionWitness:
    lineno, tok = head or next(it, (0, ["<eof>"]))
    if tok[0] != "witness" or len(tok) != 4:
        raise FormatError(f"line {lineno}: expected 'witness p=P arity=K mode=MODE'")
    kv = _keyvals(tok[1:], lineno)
    try:
        p, k, mode = _int(kv["p"], lineno), _int(kv["arity"], lineno), WitnessMode(kv["mode"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"line {lineno}: bad witness header ({exc})") from None
    rows = []
    for _ in range(k):
        lineno, row = next(it, (lineno, None))
        if row is None or len(row) != p:
            raise FormatError(f"witness: expected {k} rows of {p} integers")
        rows.append(tuple(_int(v, lineno) for v in row))
    cols = tuple(tuple(r[i] for r in rows) for i in range(p))
    try:
        return ObstructionWitness(p, cols, mode)
    except StructureError as exc:
        raise FormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# Matrices


def serialize_matrix(M: ModMatrix) -> str:
    out = [f"matrix p={M.p} rows={len(M.rows)} cols={M.cols}"]
    out.extend(" ".join(map(str, r)) for r in M.rows)
    return "\n".join(out) + "\n"


def parse_matrix(text: str) -> ModMatrix:
    it = _lines(text)
    lineno, tok = next(it, (0, ["<eof>"]))
    if tok[0] != "matrix" or len(tok) != 4:
        raise FormatError(f"line {lineno}: expected 'matrix p=P rows=R cols=C'")
    kv = _keyvals(tok[1:], lineno)
    p, r, c = (_int(kv.get(k, "x"), lineno) for k in ("p", "rows", "cols"))
    rows = []
    for lineno, tok in it:
        if len(tok) != c:
            raise FormatError(f"line {lineno}: expected {c} entries")
        rows.append(tuple(_int(v, lineno) for v in tok))
    if len(rows) != r:
        raise FormatError(f"expected {r} rows, found {len(rows)}")
    return ModMatrix(p, tuple(rows), c)


# ---------------------------------------------------------------------------
# Files


def read_structure(path) -> FiniteStructure:
    return parse_structure(Path(path).read_text(encoding="utf-8"))


def read_instance(path) -> CspInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def read_witness(path) -> ObstructionWitness:
    return parse_witness(Path(path).read_text(encoding="utf-8"))


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Maps


def serialize_map(h) -> str:
    return f"map source={h.source_size} target={h.target_size}\n" + " ".join(map(str, h.map)) + "\n"


def parse_map(text: str):
    from .structcore import Homomorphism

    it = _lines(text)
    lineno, tok = next(it, (0, ["<eof>"]))
    if tok[0] != "map" or len(tok) != 3:
        raise FormatError(f"line {lineno}: expected 'map source=K target=M'")
    kv = _keyvals(tok[1:], lineno)
    k, m = _int(kv.get("source", "x"), lineno), _int(kv.get("target", "x"), lineno)
    values: list[int] = []
    for lineno, tok in it:
        values.extend(_int(v, lineno) for v in tok)
    try:
        return Homomorphism(k, m, tuple(values))
    except StructureError as exc:
        raise FormatError(str(exc)) from None


def read_map(path):
    return parse_map(Path(path).read_text(encoding="utf-8"))

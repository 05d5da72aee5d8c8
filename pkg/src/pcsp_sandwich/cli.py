"""Command-line front end.

Exit codes: 0 yes/sat/holds/valid, 1 no/unsat/fails/invalid, 2 usage or
input error, 3 unknown (budget exhausted).  Lines starting with ``::`` are
the machine-readable part of the output.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import formats
from .affine import pcsp_decide_via_sandwich, solve_affine_csp, to_affine_structure
from .constructions import build_thm1, build_thm2
from .digraph import (
    Digraph,
    classify_graph_csp,
    classify_smooth_digraph_csp,
    is_disjoint_union_of_cycles,
    smooth_part,
    solve_cycle_union_csp,
)
from .hom import (
    CspInstance,
    Status,
    check_sandwich,
    core_of,
    find_cyclic_polymorphism,
    find_homomorphism,
    verify_obstruction_witness,
)
from .structcore import BudgetExceeded, StructureError, is_prime
from .verify import (
    CertificateError,
    ClaimStatus,
    refutation_certificate,
    verify_lemma32,
    verify_lemma41,
    verify_thm2_claims,
    verify_thm31,
)

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3
DEFAULT_SEED = 20240601


def _default_budget() -> int:
    return int(os.environ.get("PCSP_SANDWICH_BUDGET", 10**6))


def _emit(line: str = "") -> None:
    print(line)


def _machine(**fields) -> None:
    print(":: " + " ".join(f"{k}={v}" for k, v in fields.items()))


def _fmt_map(h) -> str:
    return ",".join(map(str, h.map))


# ---------------------------------------------------------------------------
# construct


def _write_bundle(out: Path | None, files: dict[str, str]) -> None:
    if out is None:
        for name, text in files.items():
            _emit(f"# --- {name}")
            sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        formats.write_text(out / name, text)
        _emit(f"wrote {out / name}")


def cmd_construct_thm1(args) -> int:
    from .verify import projection_witness

    b = build_thm1(args.n, args.p, args.materialize)
    files = {
        "A.txt": formats.serialize_structure(b.A),
        "B.txt": formats.serialize_structure(b.B),
        "C.txt": formats.serialize_structure(b.C_ext if b.C_ext is not None else b.C),
        "g.txt": formats.serialize_map(b.g),
        "h.txt": formats.serialize_map(b.h),
        "witness.txt": formats.serialize_witness(projection_witness(b.A, b.n, b.p)),
    }
    if b.B_ext is not None:
        files["B_ext.txt"] = formats.serialize_structure(b.B_ext)
    _write_bundle(args.out, files)
    _machine(construct="thm1", n=b.n, p=b.p, size_A=b.A.relation("R").size(),
             size_B=b.B.relation("R").size(), size_C=b.C.relation("R").size())
    return EXIT_YES


def cmd_construct_thm2(args) -> int:
    b = build_thm2(args.p, allow_small=args.allow_small)
    files = {
        "A.txt": formats.serialize_structure(b.A),
        "B.txt": formats.serialize_structure(b.B),
        "C.txt": formats.serialize_structure(b.C),
        "h.txt": formats.serialize_map(b.h),
    }
    if b.U is not None:
        files["witness.txt"] = formats.serialize_witness(b.U)
    _write_bundle(args.out, files)
    _machine(construct="thm2", p=b.p, size_A=len(b.A.relation("R")), size_B=len(b.B.relation("R")),
             size_C=len(b.C.relation("R")), u=",".join(map(str, b.u)) or "none")
    return EXIT_YES


# ---------------------------------------------------------------------------
# homomorphisms and polymorphisms


def cmd_hom(args) -> int:
    X, A = formats.read_structure(args.source), formats.read_structure(args.target)
    h = find_homomorphism(X, A, node_budget=args.budget)
    if h is None:
        _emit(f"no homomorphism {X.name} -> {A.name}")
        _machine(result="none")
        return EXIT_NO
    _emit(f"homomorphism {X.name} -> {A.name}: {list(h.map)}")
    _machine(result="found", map=_fmt_map(h))
    return EXIT_YES


def cmd_core(args) -> int:
    A = formats.read_structure(args.input)
    core = core_of(A, max_size=args.max_size)
    _emit(f"core of {A.name} on vertices {list(core.vertices)}")
    sys.stdout.write(formats.serialize_structure(core.structure))
    _machine(result="core", size=core.structure.domain_size,
             vertices=",".join(map(str, core.vertices)), retraction=_fmt_map(core.retraction))
    return EXIT_YES


def cmd_cyclic_polym(args) -> int:
    A, B = formats.read_structure(args.source), formats.read_structure(args.target)
    outcome = find_cyclic_polymorphism(A, B, args.p, node_budget=args.budget,
                                       allow_composite=args.allow_composite)
    _emit(outcome.describe())
    if outcome.status is Status.FOUND:
        _machine(result="Found", table=",".join(map(str, outcome.certificate.values)))
        return EXIT_YES
    if outcome.status is Status.REFUTED:
        _machine(result="RefutedExhaustively", candidates=outcome.stats.candidates)
        return EXIT_NO
    _machine(result="Unknown", nodes=outcome.stats.nodes)
    return EXIT_UNKNOWN


def cmd_witness_verify(args) -> int:
    A, B = formats.read_structure(args.a), formats.read_structure(args.b)
    w = formats.read_witness(args.witness)
    check = verify_obstruction_witness(A, B, w)
    if not check:
        _emit(f"invalid witness: {check.reason}")
        _machine(witness="invalid")
        return EXIT_NO
    _emit(f"valid witness: {check.reason}")
    _machine(witness="valid", p=w.p)
    if is_prime(w.p):
        sys.stdout.write(refutation_certificate(A, B, w.p, w).text())
    return EXIT_YES


# ---------------------------------------------------------------------------
# affine solving


def cmd_solve_affine(args) -> int:
    C = to_affine_structure(formats.read_structure(args.structure))
    inst = formats.read_instance(args.instance)
    ans = solve_affine_csp(C, inst)
    if ans.sat:
        _emit(f"SAT: {list(ans.assignment)}")
        _machine(result="sat", assignment=",".join(map(str, ans.assignment)))
        return EXIT_YES
    _emit("UNSAT")
    _machine(result="unsat")
    return EXIT_NO


def cmd_pcsp(args) -> int:
    A, B = formats.read_structure(args.a), formats.read_structure(args.b)
    C_struct = formats.read_structure(args.via)
    inst = formats.read_instance(args.instance)
    sandwich = check_sandwich(A, C_struct, B)
    if not sandwich.ok:
        _emit(f"not a sandwich: {sandwich.failure} side has no homomorphism")
        _machine(error="sandwich", side=sandwich.failure)
        return EXIT_USAGE
    yes = pcsp_decide_via_sandwich(A, B, to_affine_structure(C_struct), inst, sandwich)
    _emit("YES" if yes else "NO")
    _machine(result="yes" if yes else "no")
    return EXIT_YES if yes else EXIT_NO


# ---------------------------------------------------------------------------
# verification


def _report_exit(reports) -> int:
    for r in reports:
        _emit(r.text())
        _machine(**dict(kv.split("=", 1) for kv in r.machine_line().split(" ")))
    if any(r.status is ClaimStatus.FAILS for r in reports):
        return EXIT_NO
    if any(r.status is ClaimStatus.PRECONDITION for r in reports):
        return EXIT_USAGE
    return EXIT_YES


def cmd_verify_lemma32(args) -> int:
    reports = verify_lemma32(args.n, args.p)
    code = _report_exit(reports)
    if code == EXIT_YES and all(r.status is ClaimStatus.SKIPPED for r in reports):
        return EXIT_UNKNOWN
    return code


def cmd_verify_thm2(args) -> int:
    return _report_exit(verify_thm2_claims(args.p))


def cmd_verify_thm31(args) -> int:
    return _report_exit(verify_thm31(args.n, args.p))


def cmd_verify_lemma41(args) -> int:
    A, C = formats.read_structure(args.a), formats.read_structure(args.c)
    return _report_exit([verify_lemma41(A, C, formats.read_map(args.map))])


def cmd_certify(args) -> int:
    A, B = formats.read_structure(args.a), formats.read_structure(args.b)
    if args.witness is not None:
        evidence = formats.read_witness(args.witness)
    else:
        evidence = find_cyclic_polymorphism(A, B, args.p, node_budget=args.budget)
        _emit(evidence.describe())
        if evidence.status is Status.UNKNOWN:
            _machine(certificate="none", reason="unknown")
            return EXIT_UNKNOWN
    try:
        cert = refutation_certificate(A, B, args.p, evidence)
    except CertificateError as exc:
        _emit(f"no certificate: {exc}")
        _machine(certificate="none")
        return EXIT_NO
    text = cert.text()
    if args.out is not None:
        formats.write_text(args.out, text)
        _emit(f"wrote {args.out}")
    sys.stdout.write(text)
    return EXIT_YES


# ---------------------------------------------------------------------------
# graphs


def _read_digraph(path) -> Digraph:
    return Digraph.from_structure(formats.read_structure(path))


def cmd_graph_classify(args) -> int:
    res = classify_graph_csp(_read_digraph(args.input))
    _emit(f"CSP verdict: {res.verdict} ({res.reason}); {res.caveat}")
    _machine(verdict=res.verdict, reason=res.reason)
    return EXIT_YES if res.verdict == "InP" else EXIT_NO


def cmd_digraph_smooth(args) -> int:
    G = _read_digraph(args.input)
    H, kept = smooth_part(G)
    sys.stdout.write(formats.serialize_structure(H.to_structure("smooth")))
    _machine(smooth_vertices=",".join(map(str, kept)) or "none", size=len(kept))
    return EXIT_YES


def cmd_digraph_classify(args) -> int:
    res = classify_smooth_digraph_csp(_read_digraph(args.input))
    _emit(f"CSP verdict: {res.verdict} ({res.reason}); {res.caveat}")
    if "core_vertices" in res.evidence:
        _emit(f"core vertices: {list(res.evidence['core_vertices'])}")
    _machine(verdict=res.verdict, reason=res.reason)
    return {"InP": EXIT_YES, "NPComplete": EXIT_NO}.get(res.verdict, EXIT_UNKNOWN)


def cmd_digraph_solve(args) -> int:
    if args.target is None:
        raise StructureError("solve-cycles needs --target")
    T = _read_digraph(args.target)
    X = _read_digraph(args.input)
    if not is_disjoint_union_of_cycles(T):
        raise StructureError("target is not a disjoint union of directed cycles")
    h = solve_cycle_union_csp(T, X)
    if h is None:
        _emit("NO")
        _machine(result="no")
        return EXIT_NO
    _emit(f"YES: {list(h.map)}")
    _machine(result="yes", map=_fmt_map(h))
    return EXIT_YES


# ---------------------------------------------------------------------------
# random instances


def cmd_gen_instance(args) -> int:
    S = formats.read_structure(args.structure).materialize()
    rng = random.Random(args.seed)
    symbols = [(s, r) for s, r in S.relations]
    planted = [rng.randrange(S.domain_size) for _ in range(args.variables)] if args.planted else None
    cons = []
    attempts = 0
    while len(cons) < args.constraints and attempts < 1000 * max(1, args.constraints):
        attempts += 1
        sym, rel = rng.choice(symbols)
        scope = tuple(rng.randrange(args.variables) for _ in range(rel.arity))
        # planted instances keep only constraints the hidden assignment satisfies
        if planted is None or tuple(planted[i] for i in scope) in rel:
            cons.append((sym, scope))
    inst = CspInstance(args.variables, tuple(cons), args.name)
    sys.stdout.write(formats.serialize_instance(inst))
    return EXIT_YES


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcsp-sandwich", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="build an example family").add_subparsers(dest="family", required=True)
    t1 = con.add_parser("thm1", help="arity n^p family (projections / non-cyclic / linear)")
    t1.add_argument("--n", type=int, required=True)
    t1.add_argument("--p", type=int, required=True)
    t1.add_argument("--materialize", type=int, default=10**6)
    t1.add_argument("--out", type=Path)
    t1.set_defaults(func=cmd_construct_thm1)
    t2 = con.add_parser("thm2", help="ternary family x - 2y + z = 1 mod p")
    t2.add_argument("--p", type=int, required=True)
    t2.add_argument("--allow-small", action="store_true")
    t2.add_argument("--out", type=Path)
    t2.set_defaults(func=cmd_construct_thm2)

    h = sub.add_parser("hom", help="find a homomorphism")
    h.add_argument("--from", dest="source", required=True)
    h.add_argument("--to", dest="target", required=True)
    h.add_argument("--budget", type=int, default=None)
    h.set_defaults(func=cmd_hom)

    c = sub.add_parser("core", help="compute the core of a small structure")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--max-size", type=int, default=10)
    c.set_defaults(func=cmd_core)

    cp = sub.add_parser("cyclic-polym", help="search for a cyclic p-ary polymorphism")
    cp.add_argument("--from", dest="source", required=True)
    cp.add_argument("--to", dest="target", required=True)
    cp.add_argument("--p", type=int, required=True)
    cp.add_argument("--budget", type=int, default=_default_budget())
    cp.add_argument("--allow-composite", action="store_true")
    cp.set_defaults(func=cmd_cyclic_polym)

    w = sub.add_parser("witness", help="obstruction witnesses").add_subparsers(dest="action", required=True)
    wv = w.add_parser("verify")
    wv.add_argument("--a", required=True)
    wv.add_argument("--b", required=True)
    wv.add_argument("--witness", required=True)
    wv.set_defaults(func=cmd_witness_verify)

    s = sub.add_parser("solve", help="CSP solvers").add_subparsers(dest="kind", required=True)
    sa = s.add_parser("affine")
    sa.add_argument("--structure", required=True)
    sa.add_argument("--instance", required=True)
    sa.set_defaults(func=cmd_solve_affine)

    pc = sub.add_parser("pcsp", help="decide PCSP(A, B) through an affine sandwich")
    pc.add_argument("--a", required=True)
    pc.add_argument("--b", required=True)
    pc.add_argument("--via", required=True)
    pc.add_argument("--instance", required=True)
    pc.set_defaults(func=cmd_pcsp)

    v = sub.add_parser("verify", help="exhaustive claim checks").add_subparsers(dest="claim", required=True)
    v32 = v.add_parser("lemma32")
    v32.add_argument("--n", type=int, required=True)
    v32.add_argument("--p", type=int, required=True)
    v32.set_defaults(func=cmd_verify_lemma32)
    vt2 = v.add_parser("thm2-claims")
    vt2.add_argument("--p", type=int, required=True)
    vt2.set_defaults(func=cmd_verify_thm2)
    v31 = v.add_parser("thm31")
    v31.add_argument("--n", type=int, required=True)
    v31.add_argument("--p", type=int, required=True)
    v31.set_defaults(func=cmd_verify_thm31)
    v41 = v.add_parser("lemma41")
    v41.add_argument("--a", required=True)
    v41.add_argument("--c", required=True)
    v41.add_argument("--map", required=True)
    v41.set_defaults(func=cmd_verify_lemma41)

    ce = sub.add_parser("certify", help="certificates").add_subparsers(dest="kind", required=True)
    cn = ce.add_parser("no-small-sandwich")
    cn.add_argument("--a", required=True)
    cn.add_argument("--b", required=True)
    cn.add_argument("--p", type=int, required=True)
    ev = cn.add_mutually_exclusive_group(required=True)
    ev.add_argument("--witness")
    ev.add_argument("--exhaustive", action="store_true")
    cn.add_argument("--budget", type=int, default=_default_budget())
    cn.add_argument("--out", type=Path)
    cn.set_defaults(func=cmd_certify)

    g = sub.add_parser("graph", help="undirected graphs").add_subparsers(dest="action", required=True)
    gc = g.add_parser("classify")
    gc.add_argument("--in", dest="input", required=True)
    gc.set_defaults(func=cmd_graph_classify)

    d = sub.add_parser("digraph", help="digraph procedures").add_subparsers(dest="action", required=True)
    for name, func in (("smooth-part", cmd_digraph_smooth), ("classify", cmd_digraph_classify),
                       ("solve-cycles", cmd_digraph_solve)):
        dp = d.add_parser(name)
        dp.add_argument("--in", dest="input", required=True)
        dp.add_argument("--target")
        dp.set_defaults(func=func)

    gen = sub.add_parser("gen", help="random inputs").add_subparsers(dest="kind", required=True)
    gi = gen.add_parser("instance")
    gi.add_argument("--structure", required=True)
    gi.add_argument("--variables", type=int, required=True)
    gi.add_argument("--constraints", type=int, required=True)
    gi.add_argument("--planted", action="store_true", help="only constraints satisfied by a hidden assignment")
    gi.add_argument("--name", default="random")
    gi.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gi.set_defaults(func=cmd_gen_instance)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        _emit(f"budget exhausted: {exc}")
        _machine(result="unknown")
        return EXIT_UNKNOWN
    except (StructureError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

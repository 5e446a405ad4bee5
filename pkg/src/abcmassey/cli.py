"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 validation or certificate failure,
4 undefined Massey product, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .algebra import Element
from .certificates import CertificateError, astheno_to_json, certify, massey_to_json
from .cohomology import THEORIES, cohomology, ddbar_lemma_check, theory_name
from .expr import ExprError, parse_defines, parse_form
from .families import (
    NakamuraParams,
    SemidirectParams,
    bigalke_rollenske,
    complex_torus,
    nakamura,
    semidirect_family,
)
from .hodge import MetricContext, bc_formality_check, harmonic_basis
from .massey import MasseyError, pairing_certificate, triple_abc_massey
from .model import (
    ManifoldModel,
    ParseError,
    ValidationError,
    character_to_json,
    characters_in_box,
    check_nilpotent_J,
    dumps,
    element_to_json,
    load_model,
)
from .obstructions import PoolError, astheno_obstruction_scan, canonical_section_check, proof_sketch

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_UNDEFINED, EXIT_INTERNAL = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


# -- helpers --------------------------------------------------------------------------

def _read(path: str) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None


def _model(args) -> ManifoldModel:
    return load_model(_read(args.model))


def _bidegree(text: str) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bidegree must look like P,Q, got {text!r}") from None
    return p, q


def _chars(m: ManifoldModel, bound):
    return m.character_set if bound is None else characters_in_box(m, bound)


def _fmt_chi(m: ManifoldModel, chi) -> str:
    parts = [lab if e == 1 else f"{lab}**{e}" for lab, e in zip(m.char_labels, chi) if e]
    return "*".join(parts) if parts else "1"


def _emit(args, obj, table: str) -> None:
    if args.format == "json":
        sys.stdout.write(dumps(obj))
    else:
        sys.stdout.write(table if table.endswith("\n") else table + "\n")


def _forms(m: ManifoldModel, elems) -> list:
    return [{"text": m.format(e), "terms": element_to_json(e, m)} for e in elems]


# -- subcommands ------------------------------------------------------------------------

def cmd_validate(args) -> int:
    m = _model(args)
    info = {
        "name": m.name,
        "n": m.n,
        "characters": m.char_labels,
        "nilpotent": check_nilpotent_J(m),
        "valid": True,
        "notes": m.meta.get("validation_notes", []),
        "transfer_hypothesis": m.transfer_hypothesis(),
    }
    lines = [f"model: {m.name}", f"complex dimension: {m.n}",
             f"basis characters: {', '.join(m.char_labels) or 'none'}",
             f"nilpotent complex structure: {'yes' if info['nilpotent'] else 'no'}",
             "invariants: integrable, d^2 = 0, dlog closed, model-Stokes: ok"]
    lines += [f"note: {x}" for x in info["notes"]]
    _emit(args, info, "\n".join(lines))
    return EXIT_OK


def _cohom_task(spec: dict, theory: str, chars, p: int, q, reps: bool):
    m = load_model(spec, validate=False)
    b = cohomology(m, theory, chars, p, q)
    out = {"per_character": [[list(c), d] for c, d in sorted(b.per_character.items())],
           "dimension": b.dimension}
    if reps:
        out["representatives"] = [{"text": m.format(e), "terms": element_to_json(e, m)}
                                  for e in b.representatives]
    return out


def cmd_cohomology(args) -> int:
    from .model import model_to_spec

    m = _model(args)
    chars = _chars(m, args.chars)
    theories = list(THEORIES) if args.theory == "all" else [theory_name(args.theory)]
    jobs = []
    for th in theories:
        if th == "de_rham":
            degs = [(k, None) for k in range(2 * m.n + 1)] if args.bidegree is None else [(sum(args.bidegree), None)]
        else:
            degs = ([(p, q) for p in range(m.n + 1) for q in range(m.n + 1)]
                    if args.bidegree is None else [args.bidegree])
        jobs.extend((th, p, q) for p, q in degs)
    spec = model_to_spec(m)
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            futs = [ex.submit(_cohom_task, spec, th, chars, p, q, args.reps) for th, p, q in jobs]
            results = [f.result() for f in futs]
    else:
        results = [_cohom_task(spec, th, chars, p, q, args.reps) for th, p, q in jobs]
    rows = []
    lines = [f"{'theory':<11} {'bidegree':<9} {'character':<14} dim"]
    for (th, p, q), res in zip(jobs, results):
        bd = f"{p}" if q is None else f"({p},{q})"
        row = {"theory": th, "bidegree": [p, q], "dimension": res["dimension"],
               "per_character": [{"character": character_to_json(tuple(c), m), "dimension": d}
                                 for c, d in res["per_character"]]}
        for c, d in res["per_character"]:
            if d or len(res["per_character"]) == 1:
                lines.append(f"{th:<11} {bd:<9} {_fmt_chi(m, tuple(c)):<14} {d}")
        lines.append(f"{th:<11} {bd:<9} {'total':<14} {res['dimension']}")
        if args.reps:
            row["representatives"] = res["representatives"]
            lines += [f"    {r['text']}" for r in res["representatives"]]
        rows.append(row)
    _emit(args, {"schema": 1, "model": m.name,
                 "characters": [character_to_json(c, m) for c in sorted(chars)], "table": rows},
          "\n".join(lines))
    return EXIT_OK


def cmd_harmonics(args) -> int:
    m = _model(args)
    ctx = MetricContext(m)
    kind = theory_name(args.kind)
    basis = harmonic_basis(ctx, kind, *args.bidegree, _chars(m, args.chars))
    lines = [f"{kind} harmonic forms at {tuple(args.bidegree)}: {len(basis)}"]
    lines += [f"  {m.format(e)}" for e in basis]
    _emit(args, {"schema": 1, "kind": kind, "bidegree": list(args.bidegree),
                 "forms": _forms(m, basis)}, "\n".join(lines))
    return EXIT_OK


def cmd_massey(args) -> int:
    m = _model(args)
    macros = parse_defines(args.define)
    a12, a23, a34 = (parse_form(m, x, macros) for x in (args.a12, args.a23, args.a34))
    ctx = MetricContext(m)
    res = triple_abc_massey(m, ctx, a12, a23, a34, _chars(m, args.chars))
    pairing = None
    if res.verdict == "non_vanishing" and args.pairing:
        pairing = pairing_certificate(m, ctx, res)
    doc = massey_to_json(m, res, pairing)
    if args.certificate_out:
        with open(args.certificate_out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    lines = [f"verdict: {res.verdict}"]
    if res.representative is not None:
        lines.append(f"representative: {m.format(res.representative)}")
        lines.append(f"primitives: f13 = {m.format(res.f13)}; f24 = {m.format(res.f24)}")
        lines.append(f"indeterminacy generators: {len(res.indeterminacy.generators)}")
    if res.obstruction is not None:
        lines.append(f"obstructing cup product: {m.format(res.obstruction)}")
    if pairing is not None:
        lines.append(f"pairing certificate: {'applies' if pairing.applicable else 'inapplicable'}"
                     f" (C = {pairing.C})")
        if pairing.orthogonal_characters:
            lines.append("  character-orthogonal pairings: "
                         + ", ".join(_fmt_chi(m, c) for c in pairing.orthogonal_characters))
        lines += [f"  problem: {x}" for x in pairing.problems]
    lines += [f"hypothesis: {h}" for h in res.hypotheses]
    _emit(args, doc, "\n".join(lines))
    return EXIT_UNDEFINED if res.verdict == "undefined" else EXIT_OK


def cmd_certify(args) -> int:
    text = _read(args.file)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON: {exc}", EXIT_PARSE) from None
    rep = certify(doc)
    lines = [f"{'ok' if ok else 'FAIL'}  {name}" for name, ok in rep.checks]
    lines.append(f"certificate {rep.kind}: {'verified' if rep.ok else 'REJECTED'}")
    _emit(args, {"kind": rep.kind, "verified": rep.ok, "verdict": rep.verdict,
                 "checks": [{"check": n, "ok": ok} for n, ok in rep.checks]}, "\n".join(lines))
    return EXIT_OK if rep.ok else EXIT_VALIDATION


def cmd_astheno(args) -> int:
    m = _model(args)
    macros = parse_defines(args.define)
    extra = []
    for item in args.pool or []:
        label, _, body = item.partition("=") if "=" in item else (item, "", item)
        extra.append((label.strip(), parse_form(m, body, macros)))
    certs = astheno_obstruction_scan(m, None, extra)
    sketches = [proof_sketch(m, c) for c in certs]
    lines = [f"astheno-Kahler obstructions found: {len(certs)}"]
    for c in certs:
        lines.append(f"  [{' ^ '.join(c.labels)}] beta = {m.format(c.beta)}   eta = {m.format(c.eta)}   scale = {c.scale}")
    if certs:
        lines.append("no astheno-Kahler metric exists (" + sketches[0] + ")")
    doc = astheno_to_json(m, certs, sketches)
    if args.certificate_out:
        with open(args.certificate_out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _rationals(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def cmd_family(args) -> int:
    flags = None
    try:
        if args.family == "bigalke-rollenske":
            spec = bigalke_rollenske(args.n)
        elif args.family == "torus":
            spec = complex_torus(args.n)
        elif args.family == "nakamura":
            spec, flags = nakamura(NakamuraParams(_rationals(args.lam), args.t, args.witness))
        else:
            ks = [int(x) for x in _rationals(args.ks)] if args.ks else None
            spec = semidirect_family(SemidirectParams(args.n, args.m, args.lam, ks))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from None
    if args.flags:
        out = flags if flags is not None else {"torus": args.family == "torus"}
        if args.format == "json":
            sys.stdout.write(dumps(out))
        else:
            sys.stdout.write("".join(f"{k}: {json.dumps(v)}\n" for k, v in out.items()))
        return EXIT_OK
    load_model(spec)  # generated specs always validate
    sys.stdout.write(dumps(spec))
    return EXIT_OK


def cmd_ddbar(args) -> int:
    m = _model(args)
    chars = _chars(m, args.chars)
    rep = ddbar_lemma_check(m, chars)
    state = "holds" if rep["holds"] else "fails"
    lines = [f"model-level ∂∂̄-lemma: {state}"]
    ff = rep["first_failure"]
    if ff:
        lines.append(f"  first failing block: ({ff['p']},{ff['q']}) character "
                     f"{_fmt_chi(m, tuple(ff['character']))}: BC {ff['bott_chern']}, "
                     f"Dolbeault {ff['dolbeault']}, Aeppli {ff['aeppli']}")
    if args.formality:
        fr = bc_formality_check(MetricContext(m), chars)
        rep["formality"] = {"passes": fr["passes"], "pairs_checked": fr["pairs_checked"],
                            "failing_pair": None if not fr["failing_pair"] else
                            [m.format(x) for x in fr["failing_pair"]]}
        lines.append(f"geometric Bott-Chern formality of the model metric: "
                     f"{'passes' if fr['passes'] else 'fails'}")
        if fr["failing_pair"]:
            lines.append("  failing pair: " + " , ".join(m.format(x) for x in fr["failing_pair"]))
    lines.append(f"scope: {rep['scope']}")
    out = {k: v for k, v in rep.items() if k != "blocks"} if args.format == "json" and not args.blocks else rep
    _emit(args, out, "\n".join(lines))
    return EXIT_OK


def cmd_canonical(args) -> int:
    m = _model(args)
    rep = canonical_section_check(m)
    rep = {k: v for k, v in rep.items() if not isinstance(v, Element)}
    lines = [f"dbar(top (n,0) form) = {rep['dbar_top_form']}"]
    if rep["holomorphic"]:
        lines += ["invariant canonical section is holomorphic", rep["plurigenera"],
                  "Kodaira dimension: 0 (invariant-section level)"]
    else:
        lines.append("invariant canonical section is not holomorphic")
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abcmassey", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    withmodel = argparse.ArgumentParser(add_help=False, parents=[common])
    withmodel.add_argument("model", nargs="?", default="-", help="model spec file (default: stdin)")
    withchars = argparse.ArgumentParser(add_help=False)
    withchars.add_argument("--chars", type=int, default=None, metavar="K",
                           help="use all characters with exponents in [-K, K]")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[withmodel], help="check model invariants")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cohomology", parents=[withmodel, withchars], help="cohomology tables")
    p.add_argument("--theory", default="all", choices=("all",) + THEORIES)
    p.add_argument("--bidegree", type=_bidegree, default=None)
    p.add_argument("--reps", action="store_true", help="list representatives")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("harmonics", parents=[withmodel, withchars], help="harmonic bases")
    p.add_argument("--kind", default="bott_chern", choices=("bott_chern", "aeppli", "bc", "a"))
    p.add_argument("--bidegree", type=_bidegree, required=True)
    p.set_defaults(func=cmd_harmonics)

    p = sub.add_parser("massey", parents=[withmodel, withchars], help="triple ABC-Massey product")
    for name in ("--a12", "--a23", "--a34"):
        p.add_argument(name, required=True)
    p.add_argument("--define", action="append", default=[], metavar="NAME=EXPR")
    p.add_argument("--pairing", action="store_true", help="also build the pairing certificate")
    p.add_argument("--certificate-out", default=None)
    p.set_defaults(func=cmd_massey)

    p = sub.add_parser("certify", parents=[common], help="re-verify a certificate file")
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("astheno", parents=[withmodel], help="astheno-Kahler obstruction scan")
    p.add_argument("--pool", action="append", default=[], metavar="[LABEL=]EXPR")
    p.add_argument("--define", action="append", default=[], metavar="NAME=EXPR")
    p.add_argument("--certificate-out", default=None)
    p.set_defaults(func=cmd_astheno)

    p = sub.add_parser("family", parents=[common], help="emit a family model spec")
    fam = p.add_subparsers(dest="family", required=True)
    f = fam.add_parser("bigalke-rollenske", parents=[common])
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--flags", action="store_true")
    f = fam.add_parser("torus", parents=[common])
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--flags", action="store_true")
    f = fam.add_parser("nakamura", parents=[common])
    f.add_argument("--lambda", dest="lam", required=True, help="comma-separated rationals")
    f.add_argument("--t", default="1")
    f.add_argument("--witness", default=None)
    f.add_argument("--flags", action="store_true")
    f = fam.add_parser("semidirect", parents=[common])
    f.add_argument("--n", type=int, default=1)
    f.add_argument("--m", type=int, default=1)
    f.add_argument("--lambda", dest="lam", default="1")
    f.add_argument("--ks", default=None)
    f.add_argument("--flags", action="store_true")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("ddbar-check", parents=[withmodel, withchars], help="ddbar-lemma report")
    p.add_argument("--formality", action="store_true", help="also test BC formality")
    p.add_argument("--blocks", action="store_true", help="include per-block rows in JSON")
    p.set_defaults(func=cmd_ddbar)

    p = sub.add_parser("canonical", parents=[withmodel], help="canonical section report")
    p.set_defaults(func=cmd_canonical)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, ExprError, CertificateError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, PoolError) as exc:
        print(f"validation error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MasseyError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Serialization and elimination-free re-verification of certificates.

A certificate document embeds the model it refers to. Checking it only
reloads the model, applies differentials, wedges and evaluates linear
functionals; no linear system is ever solved here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Element, block_basis, mono_sort_key, wedge
from .cohomology import NotMember, OpSpan, Span, evaluate_on
from .massey import MasseyResult, PairingCertificate
from .model import (
    ManifoldModel,
    ModelError,
    character_from_json,
    character_to_json,
    element_from_json,
    element_to_json,
    load_model,
    model_to_spec,
)
from .obstructions import AsthenoCertificate, certificate_problems
from .scalar import Scalar

SCHEMA = 1


class CertificateError(ValueError):
    pass


def functional_to_json(ell: dict, m: ManifoldModel) -> list[dict]:
    out = []
    for (chi, mask), c in sorted(ell.items(), key=lambda kv: (kv[0][0], mono_sort_key(kv[0][1], m.n))):
        out.extend(element_to_json(Element.from_mask(m.n, m.r, chi, mask, c), m))
    return out


def functional_from_json(data, m: ManifoldModel) -> dict:
    e = element_from_json(data, m)
    return dict(e.terms)


def _span_to_json(span: Span, chars, m: ManifoldModel) -> dict:
    ops = []
    for op in span.ops:
        cs = op.characters if op.characters is not None else chars
        ops.append({"kind": op.kind, "source": list(op.source),
                    "characters": [character_to_json(tuple(c), m) for c in sorted(cs)]})
    return {"ops": ops, "fixed": [element_to_json(e, m) for e in span.fixed]}


def _span_from_json(data: dict, m: ManifoldModel) -> Span:
    ops = [OpSpan(o["kind"], tuple(o["source"]), [character_from_json(c, m) for c in o["characters"]])
           for o in data.get("ops", [])]
    return Span(ops, [element_from_json(e, m) for e in data.get("fixed", [])])


def _space_chars(target: Element, span: Span):
    chars = set(target.characters())
    for e in span.fixed:
        chars |= e.characters()
    return sorted(chars)


def membership_to_json(res, m: ManifoldModel) -> dict:
    if isinstance(res, NotMember):
        chars = _space_chars(res.target, res.span)
        return {
            "type": "not_member",
            "target": element_to_json(res.target, m),
            "functional": functional_to_json(res.functional, m),
            "value": res.value.to_json(),
            "span": _span_to_json(res.span, chars, m),
        }
    return {
        "type": "witness",
        "target": element_to_json(res.target, m),
        "preimages": {k: element_to_json(v, m) for k, v in sorted(res.preimages.items())},
        "fixed": [element_to_json(e, m) for e in res.fixed],
        "fixed_coeffs": [c.to_json() for c in res.fixed_coeffs],
    }


def _tj(a: Element | None, m: ManifoldModel):
    return None if a is None else element_to_json(a, m)


def massey_to_json(m: ManifoldModel, r: MasseyResult, pairing: PairingCertificate | None = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "massey",
        "model": model_to_spec(m),
        "inputs": [element_to_json(a, m) for a in r.inputs],
        "bidegrees": [list(b) for b in r.bidegrees],
        "verdict": r.verdict,
        "primitives": {"f13": _tj(r.f13, m), "f24": _tj(r.f24, m)},
        "representative": _tj(r.representative, m),
        "representative_text": None if r.representative is None else m.format(r.representative),
        "hypotheses": list(r.hypotheses),
        "notes": list(r.notes),
    }
    if r.indeterminacy is not None:
        ind = r.indeterminacy
        doc["indeterminacy"] = {
            "left_bidegree": None if ind.left_bidegree is None else list(ind.left_bidegree),
            "right_bidegree": None if ind.right_bidegree is None else list(ind.right_bidegree),
            "left_classes": [element_to_json(h, m) for h in ind.left_classes],
            "right_classes": [element_to_json(h, m) for h in ind.right_classes],
            "characters": [character_to_json(c, m) for c in ind.characters],
        }
    if r.obstruction is not None:
        doc["obstruction"] = element_to_json(r.obstruction, m)
    if r.certificate is not None:
        doc["certificate"] = membership_to_json(r.certificate, m)
    if pairing is not None:
        doc["pairing"] = {
            "applicable": pairing.applicable,
            "problems": list(pairing.problems),
            "gamma": element_to_json(pairing.gamma, m),
            "gamma_is_representative": pairing.gamma_is_representative,
            "C": pairing.C.to_json(),
            "orthogonal_characters": [character_to_json(c, m) for c in pairing.orthogonal_characters],
            "generator_pairings": pairing.generator_pairings,
            "exact_terms_vanish": pairing.exact_terms_vanish,
        }
    return doc


def astheno_to_json(m: ManifoldModel, certs: list[AsthenoCertificate], sketches=None) -> dict:
    items = []
    for k, c in enumerate(certs):
        item = {
            "labels": list(c.labels),
            "beta": element_to_json(c.beta, m),
            "beta_text": m.format(c.beta),
            "eta": element_to_json(c.eta, m),
            "eta_text": m.format(c.eta),
            "scale": Scalar.coerce(c.scale).to_json(),
        }
        if sketches:
            item["proof_sketch"] = sketches[k]
        items.append(item)
    return {"schema": SCHEMA, "kind": "astheno", "model": model_to_spec(m), "certificates": items}


# -- verification ----------------------------------------------------------------

@dataclass
class CertifyReport:
    kind: str
    ok: bool
    checks: list = field(default_factory=list)
    verdict: str | None = None

    def add(self, name: str, passed: bool) -> None:
        self.checks.append((name, bool(passed)))
        if not passed:
            self.ok = False


def _span_generators(m: ManifoldModel, span: Span):
    out = list(span.fixed)
    for op in span.ops:
        p, q = op.source
        if not (0 <= p <= m.n and 0 <= q <= m.n):
            continue
        for chi in op.characters:
            for b in block_basis(m.n, p, q):
                e = Element.from_mask(m.n, m.r, chi, b)
                img = m.apply(op.kind, e)
                if img:
                    out.append(img)
    return out


def check_membership_doc(doc: dict, m: ManifoldModel, target: Element, report: CertifyReport,
                         prefix: str) -> None:
    if element_from_json(doc["target"], m) != target:
        report.add(f"{prefix}: target matches", False)
        return
    if doc["type"] == "not_member":
        ell = functional_from_json(doc["functional"], m)
        value = Scalar.from_json(doc["value"])
        span = _span_from_json(doc["span"], m)
        report.add(f"{prefix}: functional value on target is nonzero",
                   bool(value) and evaluate_on(ell, target) == value)
        gens = _span_generators(m, span)
        report.add(f"{prefix}: functional annihilates {len(gens)} spanning vectors",
                   all(not evaluate_on(ell, g) for g in gens))
    elif doc["type"] == "witness":
        acc = m.zero()
        for kind, pre in doc["preimages"].items():
            acc = acc + m.apply(kind, element_from_json(pre, m))
        for c, e in zip(doc["fixed_coeffs"], doc["fixed"]):
            acc = acc + element_from_json(e, m).scale(Scalar.from_json(c))
        report.add(f"{prefix}: witness substitutes to the target", acc == target)
    else:
        report.add(f"{prefix}: known certificate type", False)


def _certify_massey(doc: dict, m: ManifoldModel) -> CertifyReport:
    rep = CertifyReport("massey", True, verdict=doc.get("verdict"))
    a12, a23, a34 = (element_from_json(x, m) for x in doc["inputs"])
    (p, q), (r, s), (u, v) = (tuple(b) for b in doc["bidegrees"])
    rep.add("input bidegrees", [a.bidegrees() for a in (a12, a23, a34)] == [{(p, q)}, {(r, s)}, {(u, v)}])
    for a, name in ((a12, "a12"), (a23, "a23"), (a34, "a34")):
        rep.add(f"{name} is Bott-Chern closed", not m.del_(a) and not m.delbar(a))
    sg = lambda k: -1 if k % 2 else 1  # noqa: E731
    t13 = wedge(a12, a23).scale(sg(p + q))
    t24 = wedge(a23, a34).scale(sg(r + s))
    verdict = doc.get("verdict")
    if verdict == "undefined":
        ob = element_from_json(doc["obstruction"], m)
        rep.add("obstruction is one of the cup products", ob in (t13, t24))
        check_membership_doc(doc["certificate"], m, ob, rep, "cup product not ddbar-exact")
        return rep
    prim = doc["primitives"]
    f13 = element_from_json(prim["f13"], m)
    f24 = element_from_json(prim["f24"], m)
    rep.add("ddbar f13 = (-1)^(p+q) a12 ^ a23", m.ddbar(f13) == t13)
    rep.add("ddbar f24 = (-1)^(r+s) a23 ^ a34", m.ddbar(f24) == t24)
    rpr = wedge(a12, f24).scale(sg(p + q)) - wedge(f13, a34).scale(sg(r + s))
    rep.add("representative matches the defining formula",
            element_from_json(doc["representative"], m) == rpr)
    rep.add("representative is ddbar-closed", not m.ddbar(rpr))
    ind = doc.get("indeterminacy") or {}
    left = [element_from_json(h, m) for h in ind.get("left_classes", [])]
    right = [element_from_json(h, m) for h in ind.get("right_classes", [])]
    rep.add("indeterminacy classes are Aeppli cocycles", all(not m.ddbar(h) for h in left + right))
    gens = [g for g in (wedge(a12, h) for h in left) if g] + [g for g in (wedge(h, a34) for h in right) if g]
    cert = doc.get("certificate")
    if cert is None:
        rep.add("representative is zero", not rpr and verdict == "vanishes")
        return rep
    span_fixed = [element_from_json(e, m) for e in (cert.get("span", {}).get("fixed", [])
                                                     if cert["type"] == "not_member" else cert["fixed"])]
    rep.add("declared span contains exactly the indeterminacy generators", span_fixed == gens)
    if cert["type"] == "not_member":
        rep.add("verdict is non_vanishing", verdict == "non_vanishing")
        P, Q = p + r + u - 1, q + s + v - 1
        kinds = sorted((o["kind"], tuple(o["source"])) for o in cert["span"]["ops"])
        rep.add("declared span includes im del and im delbar",
                kinds == [("del", (P - 1, Q)), ("delbar", (P, Q - 1))])
        chars = {c for e in span_fixed for c in e.characters()} | rpr.characters()
        for o in cert["span"]["ops"]:
            have = {character_from_json(c, m) for c in o["characters"]}
            rep.add(f"{o['kind']} span covers every relevant character", chars <= have)
    else:
        rep.add("verdict is vanishes", verdict == "vanishes")
    check_membership_doc(cert, m, rpr, rep, "Aeppli membership")
    return rep


def _certify_astheno(doc: dict, m: ManifoldModel) -> CertifyReport:
    rep = CertifyReport("astheno", True)
    certs = doc.get("certificates", [])
    rep.add("at least one certificate", bool(certs))
    for k, c in enumerate(certs):
        cert = AsthenoCertificate(element_from_json(c["beta"], m), element_from_json(c["eta"], m),
                                  Scalar.from_json(c["scale"]))
        probs = certificate_problems(m, cert)
        rep.add(f"certificate {k}: " + ("valid" if not probs else ", ".join(probs)), not probs)
    return rep


def certify(doc) -> CertifyReport:
    """Re-verify a serialized certificate by substitution and evaluation only."""
    if isinstance(doc, (str, bytes)):
        import json

        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "kind" not in doc or "model" not in doc:
        raise CertificateError("not a certificate document")
    if doc.get("schema") != SCHEMA:
        raise CertificateError(f"unsupported schema {doc.get('schema')!r}")
    m = load_model(doc["model"])
    try:
        if doc["kind"] == "massey":
            return _certify_massey(doc, m)
        if doc["kind"] == "astheno":
            return _certify_astheno(doc, m)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        rep = CertifyReport(doc["kind"], True)
        rep.add(f"well-formed document ({exc.__class__.__name__}: {exc})", False)
        return rep
    raise CertificateError(f"unknown certificate kind {doc['kind']!r}")

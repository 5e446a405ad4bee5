"""Triple Aeppli-Bott-Chern-Massey products and their certificates.

Given Bott-Chern classes a12 (p,q), a23 (r,s), a34 (u,v) with vanishing cup
products, pick primitives

    (-1)^(p+q) a12 ^ a23 = ddbar f13,    (-1)^(r+s) a23 ^ a34 = ddbar f24

and form the Aeppli class of ``(-1)^(p+q) a12 ^ f24 - (-1)^(r+s) f13 ^ a34``
modulo ``a12 u H_A + H_A u a34``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Character, Element, block_basis, char_inv, char_mul, wedge
from .cohomology import (
    MembershipWitness,
    NotMember,
    OpSpan,
    Span,
    block_cohomology,
    evaluate_on,
    normalize_characters,
    solve_membership,
)
from .hodge import MetricContext, harmonic_block, hodge_star, inner_product, integrate, is_harmonic
from .model import ManifoldModel
from .scalar import Scalar

VERDICTS = ("vanishes", "non_vanishing", "undefined")


class MasseyError(ValueError):
    pass


class NotBottChernClosed(MasseyError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _bd(a: Element, name: str) -> tuple[int, int]:
    if not a:
        raise MasseyError(f"{name} is zero")
    if not a.is_homogeneous():
        raise MasseyError(f"{name} is not bidegree-homogeneous")
    return a.bidegree


def _check_bc(m: ManifoldModel, a: Element, name: str) -> None:
    if m.del_(a) or m.delbar(a):
        raise NotBottChernClosed(f"{name} is not Bott-Chern closed")


@dataclass
class Indeterminacy:
    """Spanning set of ``a12 u H_A^{left} + H_A^{right} u a34``."""

    left_bidegree: tuple | None
    right_bidegree: tuple | None
    left_classes: list = field(default_factory=list)   # Aeppli reps wedged after a12
    right_classes: list = field(default_factory=list)  # Aeppli reps wedged before a34
    generators: list = field(default_factory=list)
    characters: list = field(default_factory=list)


def _needed(target_chars, fixed_chars) -> set:
    return {char_mul(t, char_inv(c)) for t in target_chars for c in fixed_chars}


def indeterminacy_subspace(m: ManifoldModel, a12: Element, a34: Element, S=None,
                           middle: tuple[int, int] | None = None,
                           target_chars: Sequence[Character] | None = None) -> Indeterminacy:
    """Spanning set of the indeterminacy of a triple product.

    ``middle`` is the bidegree (r, s) of the middle class. Aeppli classes are
    taken over ``S`` together with the characters that can land in
    ``target_chars`` after wedging.
    """
    if middle is None:
        raise MasseyError("the bidegree of the middle class is required")
    r, s = middle
    base = set(normalize_characters(m, S))
    ind = Indeterminacy(None, None)
    chars_used = set()
    if a12:
        p, q = a12.bidegree
        u, v = a34.bidegree if a34 else (0, 0)
        bd = (r + u - 1, s + v - 1)
        ind.left_bidegree = bd
        if min(bd) >= 0 and bd[0] <= m.n and bd[1] <= m.n:
            cs = set(base)
            if target_chars:
                cs |= _needed(target_chars, a12.characters())
            cs = sorted(cs)
            chars_used |= set(cs)
            reps = []
            for chi in cs:
                reps.extend(_aeppli_block(m, chi, bd))
            ind.left_classes = reps
            ind.generators.extend(g for g in (wedge(a12, h) for h in reps) if g)
    if a34:
        p, q = a12.bidegree if a12 else (0, 0)
        bd = (p + r - 1, q + s - 1)
        ind.right_bidegree = bd
        if min(bd) >= 0 and bd[0] <= m.n and bd[1] <= m.n:
            cs = set(base)
            if target_chars:
                cs |= _needed(target_chars, a34.characters())
            cs = sorted(cs)
            chars_used |= set(cs)
            reps = []
            for chi in cs:
                reps.extend(_aeppli_block(m, chi, bd))
            ind.right_classes = reps
            ind.generators.extend(g for g in (wedge(h, a34) for h in reps) if g)
    ind.characters = sorted(chars_used)
    return ind


def _aeppli_block(m: ManifoldModel, chi: Character, bd) -> list[Element]:
    return block_cohomology(m, "aeppli", chi, *bd)


@dataclass
class MasseyResult:
    inputs: list
    bidegrees: list
    f13: Element | None
    f24: Element | None
    representative: Element | None
    indeterminacy: Indeterminacy | None
    verdict: str
    certificate: object
    hypotheses: list
    notes: list = field(default_factory=list)
    obstruction: Element | None = None

    @property
    def rep_bidegree(self):
        (p, q), (r, s), (u, v) = self.bidegrees
        return p + r + u - 1, q + s + v - 1


def hypotheses_for(m: ManifoldModel) -> list[str]:
    return [m.transfer_hypothesis(),
            "model-Stokes: exact top forms have zero trivial-character volume coefficient "
            "(checked when the model was loaded)"]


def _primitive(m: ManifoldModel, target: Element, bd):
    if not target:
        return m.zero(), None
    res = solve_membership(m, target, Span([OpSpan("ddbar", bd)]))
    if isinstance(res, NotMember):
        return None, res
    return res.preimages.get("ddbar", m.zero()), res


def evaluate_product(m: ManifoldModel, a12: Element, a23: Element, a34: Element,
                     f13: Element, f24: Element, S=None):
    """Representative, indeterminacy and Aeppli-membership decision for given primitives."""
    (p, q), (r, s) = a12.bidegree, a23.bidegree
    rep = wedge(a12, f24).scale(_sign(p + q)) - wedge(f13, a34).scale(_sign(r + s))
    if m.ddbar(rep):
        raise MasseyError("representative is not ddbar-closed (primitives inconsistent)")
    ind = indeterminacy_subspace(m, a12, a34, S, middle=(r, s),
                                 target_chars=sorted(rep.characters()))
    if not rep:
        return rep, ind, None
    P, Q = rep.bidegree
    span = Span([OpSpan("del", (P - 1, Q)), OpSpan("delbar", (P, Q - 1))], list(ind.generators))
    return rep, ind, solve_membership(m, rep, span)


def triple_abc_massey(m: ManifoldModel, ctx: MetricContext | None, a12: Element, a23: Element,
                      a34: Element, S=None) -> MasseyResult:
    """Compute the triple product and decide whether it vanishes."""
    bds = [_bd(a12, "a12"), _bd(a23, "a23"), _bd(a34, "a34")]
    for a, name in ((a12, "a12"), (a23, "a23"), (a34, "a34")):
        _check_bc(m, a, name)
    (p, q), (r, s), (u, v) = bds
    hyp = hypotheses_for(m)
    t13 = wedge(a12, a23).scale(_sign(p + q))
    t24 = wedge(a23, a34).scale(_sign(r + s))
    f13, cert13 = _primitive(m, t13, (p + r - 1, q + s - 1))
    f24, cert24 = _primitive(m, t24, (r + u - 1, s + v - 1))
    for f, cert, t, name in ((f13, cert13, t13, "a12 u a23"), (f24, cert24, t24, "a23 u a34")):
        if f is None:
            return MasseyResult([a12, a23, a34], bds, f13, f24, None, None, "undefined", cert, hyp,
                                [f"{name} is nonzero in Bott-Chern cohomology"], obstruction=t)
    rep, ind, res = evaluate_product(m, a12, a23, a34, f13, f24, S)
    notes = ["primitives are the pivot-supported (lexicographically minimal) solutions"]
    if not rep:
        return MasseyResult([a12, a23, a34], bds, f13, f24, rep, ind, "vanishes",
                            MembershipWitness(rep, {}, [], []), hyp, notes + ["representative is zero"])
    verdict = "non_vanishing" if isinstance(res, NotMember) else "vanishes"
    return MasseyResult([a12, a23, a34], bds, f13, f24, rep, ind, verdict, res, hyp, notes)


# -- pairing certificate ----------------------------------------------------------------

@dataclass
class PairingCertificate:
    gamma: Element
    gamma_is_representative: bool
    C: Scalar
    generator_pairings: list   # one dict per indeterminacy generator
    orthogonal_characters: list
    exact_terms_vanish: bool
    functional: dict
    value: Scalar
    applicable: bool
    problems: list = field(default_factory=list)


def pairing_certificate(m: ManifoldModel, ctx: MetricContext, result: MasseyResult) -> PairingCertificate:
    """Re-derive non-vanishing by pairing with the star of a harmonic representative.

    Steps: find an Aeppli-harmonic gamma in the class of the representative
    (so ``d(*gamma) = 0``); ``C = <gamma, gamma> != 0``; each indeterminacy
    generator g pairs to zero with gamma, either pointwise or because every
    nonzero volume coefficient of ``g ^ *gamma`` carries a nontrivial
    character; exact terms pair to zero by model-Stokes.
    """
    rep = result.representative
    if rep is None or not rep:
        raise MasseyError("pairing certificate needs a nonzero representative")
    problems = []
    P, Q = rep.bidegree
    if is_harmonic(ctx, rep, "aeppli"):
        gamma, same = rep, True
    else:
        same = False
        harm = []
        for chi in sorted(rep.characters()):
            harm.extend(harmonic_block(ctx, "aeppli", chi, P, Q))
        res = solve_membership(m, rep, Span([OpSpan("del", (P - 1, Q)), OpSpan("delbar", (P, Q - 1))], harm))
        if isinstance(res, NotMember):
            problems.append("representative has no harmonic representative over its characters")
            gamma = rep
        else:
            gamma = m.zero()
            for c, h in zip(res.fixed_coeffs, harm):
                gamma = gamma + h.scale(c)
    sg = hodge_star(ctx, gamma)
    if not is_harmonic(ctx, gamma, "aeppli"):
        problems.append("gamma is not Aeppli-harmonic")
    if m.d(sg):
        problems.append("d(*gamma) != 0")
    C = inner_product(ctx, gamma, gamma)
    if not C:
        problems.append("C = <gamma, gamma> vanishes")
    triv = m.trivial_character
    pairings = []
    orth = set()
    gens = result.indeterminacy.generators if result.indeterminacy else []
    for k, g in enumerate(gens):
        top = wedge(g, sg)
        coeffs = {chi: c for (chi, mask), c in top.terms.items() if mask == ctx.full}
        if not coeffs:
            status, chars = "pointwise_zero", []
        elif triv in coeffs:
            status, chars = "nonzero", sorted(coeffs)
            problems.append(f"indeterminacy generator {k} pairs nontrivially with gamma")
        else:
            status, chars = "character_orthogonal", sorted(coeffs)
            orth |= set(coeffs)
        pairings.append({"generator": k, "status": status, "characters": [list(c) for c in chars]})
    # exact terms: integral of (del R) ^ *gamma over every basis R in the relevant characters
    exact_ok = True
    chars = sorted(gamma.characters() | rep.characters())
    for kind, src in (("del", (P - 1, Q)), ("delbar", (P, Q - 1))):
        if min(src) < 0:
            continue
        for chi in chars:
            for b in block_basis(m.n, *src):
                img = m._op(kind, chi, b)
                if not img:
                    continue
                e = Element.from_mask(m.n, m.r, chi, b)
                if integrate(ctx, wedge(m.apply(kind, e), sg)):
                    exact_ok = False
    if not exact_ok:
        problems.append("an exact term pairs nontrivially with gamma")
    ell = {}
    for (chi, mask), c in gamma.terms.items():
        ell[(chi, mask)] = c.conjugate() * ctx.norm(mask)
    value = evaluate_on(ell, rep)
    if value != C:
        problems.append("functional value on the representative differs from C")
    return PairingCertificate(gamma, same, C, pairings, sorted(orth), exact_ok, ell, value,
                              not problems, problems)

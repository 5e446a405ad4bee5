"""Dolbeault, Bott-Chern, Aeppli and de Rham cohomology of a model.

Every computation is split into (character, bidegree) blocks. Within a block,
vectors are keyed by the position of a monomial in
:func:`~abcmassey.algebra.block_basis`, which is lexicographic in
(holo indices, anti indices); pivots are always the smallest key, so the
returned representatives are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .algebra import (
    Character,
    Element,
    _raw,
    block_basis,
    char_inv,
    mono_sort_key,
)
from .linalg import EchelonSpan, axpy, evaluate, kernel_basis, quotient_basis, rank
from .model import ManifoldModel, block_columns, operator_block
from .scalar import Scalar

THEORIES = ("dolbeault", "bott_chern", "aeppli", "de_rham")
_ALIASES = {"bc": "bott_chern", "a": "aeppli", "dbar": "dolbeault", "dr": "de_rham",
            "bott-chern": "bott_chern", "de-rham": "de_rham"}


def theory_name(t: str) -> str:
    t = _ALIASES.get(t.lower(), t.lower())
    if t not in THEORIES:
        raise ValueError(f"unknown theory {t!r}; expected one of {THEORIES}")
    return t


@dataclass
class CohomologyBasis:
    """Representatives of a cohomology space at one bidegree over a character set.

    For de Rham cohomology ``bidegree`` is ``(k, None)`` with ``k`` the degree.
    """

    theory: str
    bidegree: tuple
    characters: list
    representatives: list = field(default_factory=list)
    per_character: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.representatives)


def _valid(n: int, p: int, q: int) -> bool:
    return 0 <= p <= n and 0 <= q <= n


def _cols(m: ManifoldModel, kind: str, chi, src, tgt) -> list[dict]:
    if not (_valid(m.n, *src) and _valid(m.n, *tgt)):
        return []
    return block_columns(m, kind, chi, src[0], src[1], tgt)


def _vec_to_element(m: ManifoldModel, chi: Character, basis: Sequence[int], vec: dict) -> Element:
    return _raw(m.n, m.r, {(chi, basis[i]): c for i, c in vec.items()})


def _element_to_vec(a: Element, chi: Character, index: dict) -> dict:
    return {index[mask]: c for (c_, mask), c in a.terms.items() if c_ == chi}


def cycles_and_boundaries(m: ManifoldModel, theory: str, chi: Character, p: int, q: int):
    """Kernel basis and boundary spanning set of one block, in block coordinates."""
    n = m.n
    src = block_basis(n, p, q)
    if not src:
        return [], []
    if theory == "dolbeault":
        cyc = kernel_basis(_cols(m, "delbar", chi, (p, q), (p, q + 1)), len(src))
        bnd = _cols(m, "delbar", chi, (p, q - 1), (p, q))
    elif theory == "bott_chern":
        cyc = kernel_basis(operator_block(m, "d", chi, p, q).columns, len(src))
        bnd = _cols(m, "ddbar", chi, (p - 1, q - 1), (p, q))
    elif theory == "aeppli":
        cyc = kernel_basis(_cols(m, "ddbar", chi, (p, q), (p + 1, q + 1)), len(src))
        bnd = _cols(m, "del", chi, (p - 1, q), (p, q)) + _cols(m, "delbar", chi, (p, q - 1), (p, q))
    else:
        raise ValueError(f"block theory {theory!r} not bigraded")
    return cyc, bnd


def block_cohomology(m: ManifoldModel, theory: str, chi: Character, p: int, q: int) -> list[Element]:
    theory = theory_name(theory)
    chi = tuple(chi)
    cyc, bnd = cycles_and_boundaries(m, theory, chi, p, q)
    if not cyc:
        return []
    picked = quotient_basis(cyc, bnd)
    basis = block_basis(m.n, p, q)
    return [_vec_to_element(m, chi, basis, cyc[i]) for i in picked]


def _degree_basis(n: int, k: int) -> list[int]:
    return [b for p in range(max(0, k - n), min(n, k) + 1) for b in block_basis(n, p, k - p)]


def de_rham_block(m: ManifoldModel, chi: Character, k: int) -> list[Element]:
    n = m.n
    chi = tuple(chi)
    src = _degree_basis(n, k)
    if not src:
        return []
    tgt = {b: i for i, b in enumerate(_degree_basis(n, k + 1))}
    cols = [{tgt[t]: v for t, v in m._op("d", chi, b).items()} for b in src]
    cyc = kernel_basis(cols, len(src))
    sidx = {b: i for i, b in enumerate(src)}
    bnd = [{sidx[t]: v for t, v in m._op("d", chi, b).items()} for b in _degree_basis(n, k - 1)]
    picked = quotient_basis(cyc, bnd)
    return [_vec_to_element(m, chi, src, cyc[i]) for i in picked]


def normalize_characters(m: ManifoldModel, S: Iterable[Character] | None) -> list[Character]:
    chars = {tuple(c) for c in (S if S is not None else m.character_set)}
    chars.add(m.trivial_character)
    chars |= {char_inv(c) for c in chars}
    for c in chars:
        if len(c) != m.r:
            raise ValueError(f"character {c} does not match the model's {m.r} basis characters")
    return sorted(chars)


def cohomology(m: ManifoldModel, theory: str, S: Iterable[Character] | None, p: int,
               q: int | None = None) -> CohomologyBasis:
    """Cohomology basis at bidegree ``(p, q)`` (degree ``p`` for de Rham).

    ``S`` is closed under inversion and always contains the trivial character.
    """
    theory = theory_name(theory)
    chars = normalize_characters(m, S)
    reps: list[Element] = []
    per = {}
    for chi in chars:
        if theory == "de_rham":
            b = de_rham_block(m, chi, p)
        else:
            if q is None:
                raise ValueError("bigraded theories need (p, q)")
            b = block_cohomology(m, theory, chi, p, q)
        per[chi] = len(b)
        reps.extend(b)
    bd = (p, None) if theory == "de_rham" else (p, q)
    return CohomologyBasis(theory, bd, chars, reps, per)


def cohomology_table(m: ManifoldModel, theory: str, S=None) -> dict:
    """``{(p, q): {chi: dim}}`` over all bidegrees (degrees for de Rham)."""
    theory = theory_name(theory)
    out = {}
    if theory == "de_rham":
        for k in range(2 * m.n + 1):
            out[(k, None)] = cohomology(m, theory, S, k).per_character
        return out
    for p in range(m.n + 1):
        for q in range(m.n + 1):
            out[(p, q)] = cohomology(m, theory, S, p, q).per_character
    return out


# -- membership -------------------------------------------------------------------

@dataclass
class OpSpan:
    """``span{ kind(chi * e) : e monomial of bidegree source, chi in characters }``.

    ``characters=None`` means: whatever characters the target and fixed
    elements carry (operators never change the character).
    """

    kind: str
    source: tuple
    characters: list | None = None


@dataclass
class Span:
    ops: list = field(default_factory=list)
    fixed: list = field(default_factory=list)

    def generators(self, m: ManifoldModel, chars: Sequence[Character]):
        """Explicit spanning set as ``(label, Element)`` pairs, deterministic order."""
        out = []
        for k, e in enumerate(self.fixed):
            out.append((("fixed", k), e))
        for op in self.ops:
            p, q = op.source
            if not _valid(m.n, p, q):
                continue
            cs = sorted({tuple(c) for c in op.characters}) if op.characters is not None else chars
            for chi in cs:
                for b in block_basis(m.n, p, q):
                    img = m._op(op.kind, chi, b)
                    if img:
                        out.append(((op.kind, chi, b), _raw(m.n, m.r, {(chi, t): v for t, v in img.items()})))
        return out


@dataclass
class MembershipWitness:
    """``target = sum_k kind_k(preimage_k) + sum_i fixed_coeffs[i] * fixed[i]``."""

    target: Element
    preimages: dict  # kind -> Element
    fixed: list
    fixed_coeffs: list

    def check(self, m: ManifoldModel) -> bool:
        acc = m.zero()
        for kind, pre in self.preimages.items():
            acc = acc + m.apply(kind, pre)
        for c, e in zip(self.fixed_coeffs, self.fixed):
            acc = acc + e.scale(c)
        return acc == self.target


@dataclass
class NotMember:
    """Linear functional on forms, keyed by ``(character, mask)``.

    It vanishes on every spanning vector of the space and ``value`` is its
    (nonzero) value on the target.
    """

    target: Element
    functional: dict
    value: Scalar
    span: Span

    def check(self, m: ManifoldModel, chars: Sequence[Character] | None = None) -> bool:
        if chars is None:
            chars = sorted(self.target.characters() | {c for e in self.span.fixed for c in e.characters()})
        if not self.value or evaluate_on(self.functional, self.target) != self.value:
            return False
        return all(not evaluate_on(self.functional, g) for _, g in self.span.generators(m, chars))


def evaluate_on(ell: dict, a: Element) -> Scalar:
    return evaluate(ell, a.terms)


def _space_characters(target: Element, span: Span) -> list[Character]:
    chars = set(target.characters())
    for e in span.fixed:
        chars |= e.characters()
    return sorted(chars)


def solve_membership(m: ManifoldModel, target: Element, span: Span):
    """Decide whether ``target`` lies in ``span``.

    Returns a :class:`MembershipWitness` or a :class:`NotMember` carrying a dual
    functional. Raises ``ValueError`` when bidegrees are inconsistent.
    """
    n = m.n
    if target and not target.is_homogeneous():
        raise ValueError("target must be bidegree-homogeneous")
    shifts = {"del": (1, 0), "delbar": (0, 1), "ddbar": (1, 1)}
    tb = target.bidegree if target else None
    for op in span.ops:
        if op.kind not in shifts:
            raise ValueError(f"membership spans support del, delbar, ddbar; got {op.kind!r}")
        dp, dq = shifts[op.kind]
        img = (op.source[0] + dp, op.source[1] + dq)
        if tb is not None and img != tb:
            raise ValueError(f"{op.kind} from {op.source} lands in {img}, target is {tb}")
    for e in span.fixed:
        if e and tb is not None and e.bidegrees() != {tb}:
            raise ValueError(f"fixed element of bidegree {sorted(e.bidegrees())} vs target {tb}")
    if not target:
        return MembershipWitness(target, {}, list(span.fixed), [Scalar(0)] * len(span.fixed))

    chars = _space_characters(target, span)
    gens = span.generators(m, chars)
    keys = set(target.terms)
    for _, g in gens:
        keys |= set(g.terms)
    order = sorted(keys, key=lambda k: (k[0], mono_sort_key(k[1], n)))
    pos = {k: i for i, k in enumerate(order)}

    def vec(e: Element) -> dict:
        return {pos[k]: c for k, c in e.terms.items()}

    cols = [vec(g) for _, g in gens]
    real = all(not c.im for col in cols for c in col.values()) and all(
        not c.im for c in target.terms.values())

    if real:
        cols = [{k: v.re for k, v in col.items()} for col in cols]
        tv = {k: v.re for k, v in vec(target).items()}
    else:
        tv = vec(target)
    sp = EchelonSpan(track=True, one=mpq(1) if real else None)
    for c in cols:
        sp.add(c)
    r, coeffs = sp.reduce(tv)
    lift = (lambda x: Scalar(x)) if real else (lambda x: x)
    if r:
        ell_pos = sp.dual_functional(r)
        ell = {order[k]: lift(v) for k, v in ell_pos.items()}
        value = evaluate_on(ell, target)
        return NotMember(target, ell, value, span)
    x: dict = {}
    for p, c in coeffs.items():
        axpy(x, c, sp.combo[p])
    pre: dict = {}
    fixed_coeffs = [Scalar(0)] * len(span.fixed)
    for j, c in sorted(x.items()):
        label, _ = gens[j]
        if label[0] == "fixed":
            fixed_coeffs[label[1]] = lift(c)
            continue
        kind, chi, b = label
        pre.setdefault(kind, {})
        pre[kind][(chi, b)] = lift(c)
    preimages = {k: _raw(n, m.r, v) for k, v in pre.items()}
    return MembershipWitness(target, preimages, list(span.fixed), fixed_coeffs)


def in_image(m: ManifoldModel, kind: str, target: Element):
    """Membership of a homogeneous target in the image of one operator."""
    if not target:
        return solve_membership(m, target, Span())
    p, q = target.bidegree
    shift = {"del": (1, 0), "delbar": (0, 1), "ddbar": (1, 1)}[kind]
    return solve_membership(m, target, Span([OpSpan(kind, (p - shift[0], q - shift[1]))]))


def is_cocycle(m: ManifoldModel, theory: str, a: Element) -> bool:
    theory = theory_name(theory)
    if theory == "dolbeault":
        return not m.delbar(a)
    if theory == "bott_chern":
        return not m.del_(a) and not m.delbar(a)
    if theory == "aeppli":
        return not m.ddbar(a)
    return not m.d(a)


# -- ddbar-lemma ------------------------------------------------------------------

def _rank_mod(reps: list[dict], bnd: list[dict]) -> int:
    return rank(list(bnd) + list(reps)) - rank(bnd)


def ddbar_lemma_check(m: ManifoldModel, S=None) -> dict:
    """Model-level dimension comparison of Bott-Chern, Dolbeault and Aeppli.

    For every (character, p, q) block the maps H_BC -> H_dbar -> H_A induced
    by the identity on representatives must be isomorphisms.
    """
    n = m.n
    chars = normalize_characters(m, S)
    rows = []
    holds = True
    first_failure = None
    for p in range(n + 1):
        for q in range(n + 1):
            for chi in chars:
                cb, bb = cycles_and_boundaries(m, "bott_chern", chi, p, q)
                cd, bd = cycles_and_boundaries(m, "dolbeault", chi, p, q)
                ca, ba = cycles_and_boundaries(m, "aeppli", chi, p, q)
                bc_reps = [cb[i] for i in quotient_basis(cb, bb)]
                d_reps = [cd[i] for i in quotient_basis(cd, bd)]
                a_dim = len(quotient_basis(ca, ba))
                r1 = _rank_mod(bc_reps, bd)
                r2 = _rank_mod(d_reps, ba)
                ok = len(bc_reps) == len(d_reps) == a_dim == r1 == r2
                row = {"p": p, "q": q, "character": list(chi), "bott_chern": len(bc_reps),
                       "dolbeault": len(d_reps), "aeppli": a_dim,
                       "rank_bc_to_dolbeault": r1, "rank_dolbeault_to_aeppli": r2, "iso": ok}
                rows.append(row)
                if not ok:
                    holds = False
                    if first_failure is None:
                        first_failure = row
    return {
        "holds": holds,
        "scope": "model level: finite character set, invariant forms only",
        "characters": [list(c) for c in chars],
        "first_failure": first_failure,
        "blocks": rows,
    }

"""Antilinear Hodge star, the model L2 pairing and harmonic forms.

Conventions: the metric entry ``h_j`` is ``<phi^j, phi^j>``; a monomial has
norm the product of ``h`` over all its indices; nontrivial characters
integrate to zero and the volume of the quotient is 1. The star is defined by
the pairing ``integral(alpha ^ *beta) = <alpha, beta>`` (antilinear in beta)
with ``*beta`` built monomial by monomial:

    *(s chi e_M) = conj(s) chi^{-1} eps(M) |e_M|^2 e_{M^c}

where ``eps(M)`` is the sign making ``e_M ^ e_{M^c} = eps(M) Omega``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from gmpy2 import mpq

from .algebra import Character, Element, _raw, block_basis, char_inv, mask_bidegree, wedge, wedge_sign
from .cohomology import normalize_characters, theory_name
from .linalg import kernel_basis, span_equal
from .model import ManifoldModel, _acc
from .scalar import Scalar

HARMONIC_KINDS = ("bott_chern", "aeppli")


class MetricContext:
    """Diagonal Hermitian metric on a model, with volume normalised to 1."""

    def __init__(self, m: ManifoldModel, metric: Sequence | None = None):
        self.model = m
        self.n = m.n
        h = [mpq(x) for x in (metric if metric is not None else m.metric)]
        if len(h) != m.n or any(x <= 0 for x in h):
            raise ValueError("metric must list n positive rationals")
        self.h = h
        self.full = (1 << (2 * m.n)) - 1
        self._norm: dict = {}

    @property
    def volume(self) -> Element:
        m = self.model
        return _raw(m.n, m.r, {(m.trivial_character, self.full): Scalar(1)})

    def norm(self, mask: int) -> mpq:
        """Pointwise squared norm of the monomial ``e_mask``."""
        got = self._norm.get(mask)
        if got is None:
            got = mpq(1)
            n = self.n
            for k in range(2 * n):
                if mask >> k & 1:
                    got *= self.h[k % n]
            self._norm[mask] = got
        return got

    def star_sign(self, mask: int) -> int:
        return wedge_sign(mask, self.full ^ mask)


def hodge_star(ctx: MetricContext, a: Element) -> Element:
    """Complex-antilinear Hodge star: (p, q) -> (n-p, n-q), chi -> chi^{-1}."""
    full = ctx.full
    out = {}
    for (chi, mask), c in a.terms.items():
        v = c.conjugate() * ctx.norm(mask)
        out[(char_inv(chi), full ^ mask)] = v if ctx.star_sign(mask) > 0 else -v
    return _raw(a.n, a.r, out)


def integrate(ctx: MetricContext, a: Element) -> Scalar:
    """Integral over the quotient: trivial-character volume coefficient."""
    m = ctx.model
    return a.terms.get((m.trivial_character, ctx.full), Scalar(0))


def inner_product(ctx: MetricContext, a: Element, b: Element) -> Scalar:
    """L2 pairing, linear in ``a`` and antilinear in ``b``.

    Distinct monomials are orthogonal; terms with distinct characters pair
    through a nontrivial character, which integrates to zero.
    """
    acc = Scalar(0)
    bt = b.terms
    for k, c in a.terms.items():
        d = bt.get(k)
        if d is not None:
            acc = acc + c * d.conjugate() * ctx.norm(k[1])
    return acc


def star_star_sign(ctx: MetricContext, p: int, q: int) -> Scalar:
    """``** = (-1)^(p+q) |Omega|^2`` on bidegree (p, q)."""
    v = Scalar(ctx.norm(ctx.full))
    return v if (p + q) % 2 == 0 else -v


def is_harmonic(ctx: MetricContext, a: Element, kind: str) -> bool:
    """First-order characterisation of Bott-Chern / Aeppli harmonic forms."""
    kind = _kind(kind)
    m = ctx.model
    if a and not a.is_homogeneous():
        raise ValueError("is_harmonic needs a bidegree-homogeneous form")
    s = hodge_star(ctx, a)
    if kind == "bott_chern":
        return not m.del_(a) and not m.delbar(a) and not m.ddbar(s)
    return not m.ddbar(a) and not m.del_(s) and not m.delbar(s)


def _kind(kind: str) -> str:
    k = theory_name(kind)
    if k not in HARMONIC_KINDS:
        raise ValueError(f"harmonic kind must be bott_chern or aeppli, got {kind!r}")
    return k


def harmonic_block(ctx: MetricContext, kind: str, chi: Character, p: int, q: int) -> list[Element]:
    """Basis of harmonic forms in one (character, bidegree) block.

    The star is antilinear, so the conditions involving ``*a`` enter the
    linear system with conjugated coefficients.
    """
    kind = _kind(kind)
    m = ctx.model
    n = m.n
    chi = tuple(chi)
    src = block_basis(n, p, q)
    if not src:
        return []
    ichi = char_inv(chi)
    first = "d" if kind == "bott_chern" else "ddbar"
    second = "ddbar" if kind == "bott_chern" else "d"
    off = 1 << (2 * n)
    cols = []
    for b in src:
        col = dict(m._op(first, chi, b))
        comp = ctx.full ^ b
        w = ctx.norm(b) * ctx.star_sign(b)
        for t, v in m._op(second, ichi, comp).items():
            col[off + t] = v.conjugate() * w
        cols.append(col)
    keys = sorted({k for c in cols for k in c})
    pos = {k: i for i, k in enumerate(keys)}
    cols = [{pos[k]: v for k, v in c.items()} for c in cols]
    ker = kernel_basis(cols, len(src))
    return [_raw(n, m.r, {(chi, src[i]): c for i, c in v.items()}) for v in ker]


def harmonic_basis(ctx: MetricContext, kind: str, p: int, q: int, S=None) -> list[Element]:
    m = ctx.model
    out = []
    for chi in normalize_characters(m, S):
        out.extend(harmonic_block(ctx, kind, chi, p, q))
    return out


def bc_formality_check(ctx: MetricContext, S=None) -> dict:
    """Test whether wedge products of Bott-Chern harmonic forms stay harmonic.

    Products are formed between basis elements of all bidegrees over ``S``;
    their characters may leave ``S``, harmonicity is checked directly. Pairs are
    visited by increasing total degree so failures surface early.
    """
    m = ctx.model
    n = m.n
    chars = normalize_characters(m, S)
    basis = {}
    for p in range(n + 1):
        for q in range(n + 1):
            for chi in chars:
                for h in harmonic_block(ctx, "bott_chern", chi, p, q):
                    basis.setdefault((p, q), []).append(h)
    degs = sorted(basis, key=lambda bd: (bd[0] + bd[1], bd))
    checked = 0
    pairs = sorted(((a, b) for a in degs for b in degs
                    if a[0] + b[0] <= n and a[1] + b[1] <= n and a <= b),
                   key=lambda ab: (sum(ab[0]) + sum(ab[1]), ab))
    for bd1, bd2 in pairs:
        for i, x in enumerate(basis[bd1]):
            for j, y in enumerate(basis[bd2]):
                if bd1 == bd2 and j < i:
                    continue
                prod = wedge(x, y)
                checked += 1
                if prod and not is_harmonic(ctx, prod, "bott_chern"):
                    return {
                        "passes": False,
                        "pairs_checked": checked,
                        "failing_pair": [x, y],
                        "failing_bidegrees": [list(bd1), list(bd2)],
                        "product": prod,
                        "characters": [list(c) for c in chars],
                    }
    return {"passes": True, "pairs_checked": checked, "failing_pair": None,
            "characters": [list(c) for c in chars]}


# -- fourth-order Laplacians (used as an independent oracle) ------------------------

_SHIFT = {"del": (1, 0), "delbar": (0, 1)}


class _BlockOps:
    """Operators and their L2 adjoints on the forms of one character."""

    def __init__(self, ctx: MetricContext, chi: Character):
        self.ctx = ctx
        self.m = ctx.model
        self.chi = tuple(chi)
        self._adj: dict = {}

    def op(self, kind: str, vec: dict) -> dict:
        out: dict = {}
        for b, c in vec.items():
            for t, v in self.m._op(kind, self.chi, b).items():
                _acc(out, t, c * v)
        return out

    def _adjoint_table(self, kind: str, tgt: tuple) -> dict:
        key = (kind, tgt)
        got = self._adj.get(key)
        if got is None:
            dp, dq = _SHIFT[kind]
            p, q = tgt[0] - dp, tgt[1] - dq
            got = {}
            if 0 <= p and 0 <= q:
                N = self.ctx.norm
                for b in block_basis(self.m.n, p, q):
                    for t, v in self.m._op(kind, self.chi, b).items():
                        got.setdefault(t, []).append((b, v.conjugate() * (N(t) / N(b))))
            self._adj[key] = got
        return got

    def adj(self, kind: str, vec: dict) -> dict:
        out: dict = {}
        n = self.m.n
        for t, c in vec.items():
            table = self._adjoint_table(kind, mask_bidegree(t, n))
            for b, w in table.get(t, ()):
                _acc(out, b, c * w)
        return out

    def word(self, letters: Iterable[str], vec: dict) -> dict:
        """Apply a composition written left to right (rightmost acts first)."""
        for letter in reversed(list(letters)):
            if not vec:
                return vec
            if letter.endswith("*"):
                vec = self.adj(letter[:-1], vec)
            else:
                vec = self.op(letter, vec)
        return vec


_BC_WORDS = [
    ("del", "delbar", "delbar*", "del*"),
    ("delbar*", "del*", "del", "delbar"),
    ("delbar*", "del", "del*", "delbar"),
    ("del*", "delbar", "delbar*", "del"),
    ("delbar*", "delbar"),
    ("del*", "del"),
]
_A_WORDS = [
    ("del", "del*"),
    ("delbar", "delbar*"),
    ("delbar*", "del*", "del", "delbar"),
    ("del", "delbar", "delbar*", "del*"),
    ("del", "delbar*", "delbar", "del*"),
    ("delbar", "del*", "del", "delbar*"),
]


def laplacian_columns(ctx: MetricContext, kind: str, chi: Character, p: int, q: int) -> list[dict]:
    """Columns (keyed by block position) of the fourth-order Laplacian on one block."""
    kind = _kind(kind)
    ops = _BlockOps(ctx, chi)
    words = _BC_WORDS if kind == "bott_chern" else _A_WORDS
    src = block_basis(ctx.n, p, q)
    idx = {b: i for i, b in enumerate(src)}
    cols = []
    for b in src:
        acc: dict = {}
        for w in words:
            for t, v in ops.word(w, {b: Scalar(1)}).items():
                _acc(acc, t, v)
        cols.append({idx[t]: v for t, v in acc.items()})
    return cols


def laplacian_kernel_matches(ctx: MetricContext, kind: str, chi: Character, p: int, q: int) -> dict:
    """Compare ``ker Delta`` with the span of the first-order harmonic basis."""
    src = block_basis(ctx.n, p, q)
    idx = {b: i for i, b in enumerate(src)}
    cols = laplacian_columns(ctx, kind, chi, p, q)
    ker = kernel_basis(cols, len(src))
    harm = [{idx[mask]: c for (_, mask), c in h.terms.items()}
            for h in harmonic_block(ctx, kind, chi, p, q)]
    return {"kernel_dim": len(ker), "harmonic_dim": len(harm),
            "rank_laplacian": len(src) - len(ker), "equal": span_equal(ker, harm)}

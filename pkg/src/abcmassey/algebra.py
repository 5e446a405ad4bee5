"""Character-weighted bigraded exterior algebra over Q(i).

A basis form is ``chi * phi^I ^ phibar^J``. Internally the monomial is a bitmask
over 2n generators: bit ``k`` (``0 <= k < n``) is the holomorphic generator
``phi^{k+1}`` and bit ``n + k`` its conjugate. Canonical order is ascending bit
position, i.e. holomorphic indices ascending followed by antiholomorphic
indices ascending, so every sign is a transposition count.

Characters are integer exponent vectors over the basis characters declared by
a model; they multiply by adding exponents and are unitary, so conjugation is
inversion.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from .scalar import ONE, Scalar

Character = tuple  # tuple[int, ...]


def char_mul(a: Character, b: Character) -> Character:
    return tuple(x + y for x, y in zip(a, b))


def char_inv(a: Character) -> Character:
    return tuple(-x for x in a)


def char_pow(a: Character, k: int) -> Character:
    return tuple(k * x for x in a)


def is_trivial(a: Character) -> bool:
    return not any(a)


def trivial(r: int) -> Character:
    return (0,) * r


# -- monomials ---------------------------------------------------------------

class FormMonomial(NamedTuple):
    """``phi^holo ^ phibar^anti`` with 1-based, strictly increasing indices."""

    holo: tuple
    anti: tuple

    @property
    def bidegree(self) -> tuple[int, int]:
        return len(self.holo), len(self.anti)

    def mask(self, n: int) -> int:
        return to_mask(self.holo, self.anti, n)


def to_mask(holo: Iterable[int], anti: Iterable[int], n: int) -> int:
    """Canonical mask of ``phi^holo ^ phibar^anti``; indices are 1-based."""
    m = 0
    for i in holo:
        if not 1 <= i <= n:
            raise IndexError(f"holomorphic index {i} outside 1..{n}")
        m |= 1 << (i - 1)
    for j in anti:
        if not 1 <= j <= n:
            raise IndexError(f"antiholomorphic index {j} outside 1..{n}")
        m |= 1 << (n + j - 1)
    return m


def from_mask(mask: int, n: int) -> FormMonomial:
    holo = tuple(k + 1 for k in range(n) if mask >> k & 1)
    anti = tuple(k + 1 for k in range(n) if mask >> (n + k) & 1)
    return FormMonomial(holo, anti)


def mask_bidegree(mask: int, n: int) -> tuple[int, int]:
    low = (1 << n) - 1
    return (mask & low).bit_count(), (mask >> n).bit_count()


@lru_cache(maxsize=None)
def mono_sort_key(mask: int, n: int) -> tuple:
    """Lexicographic order on (holo indices, anti indices)."""
    h, a = from_mask(mask, n)
    return h, a


@lru_cache(maxsize=1 << 20)
def wedge_sign(a: int, b: int) -> int:
    """Sign of ``e_a ^ e_b`` relative to ``e_{a|b}`` for disjoint masks."""
    s = 0
    while b:
        low = b & -b
        s += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if s & 1 else 1


def conj_mask(mask: int, n: int) -> tuple[int, int]:
    """Mask and sign of the conjugate monomial after reordering."""
    low = (1 << n) - 1
    h, a = mask & low, mask >> n
    sign = -1 if (h.bit_count() * a.bit_count()) & 1 else 1
    return a | (h << n), sign


@lru_cache(maxsize=None)
def block_basis(n: int, p: int, q: int) -> tuple:
    """Masks of bidegree (p, q) in lexicographic (holo, anti) order."""
    if not (0 <= p <= n and 0 <= q <= n):
        return ()
    out = []
    for h in combinations(range(n), p):
        hm = sum(1 << k for k in h)
        for a in combinations(range(n), q):
            out.append(hm | sum(1 << (n + k) for k in a))
    return tuple(out)


@lru_cache(maxsize=None)
def block_index(n: int, p: int, q: int) -> dict:
    return {m: i for i, m in enumerate(block_basis(n, p, q))}


# -- elements ----------------------------------------------------------------

def _raw(n: int, r: int, terms: dict) -> "Element":
    e = object.__new__(Element)
    e.n = n
    e.r = r
    e.terms = terms
    return e


class Element:
    """Finite sum of ``coeff * chi * monomial`` terms.

    ``terms`` maps ``(character, mask)`` to a nonzero :class:`Scalar`. ``n`` is
    the complex dimension and ``r`` the number of basis characters.
    """

    __slots__ = ("n", "r", "terms")

    def __init__(self, n: int, r: int = 0, terms: dict | None = None):
        self.n = n
        self.r = r
        clean = {}
        for (chi, mask), c in (terms or {}).items():
            c = Scalar.coerce(c)
            chi = tuple(chi)
            if len(chi) != r:
                raise ValueError(f"character {chi} has length {len(chi)}, expected {r}")
            if mask >> (2 * n):
                raise ValueError(f"monomial mask {mask:#x} exceeds dimension {n}")
            if c:
                prev = clean.get((chi, mask))
                c = c if prev is None else prev + c
                if c:
                    clean[(chi, mask)] = c
                else:
                    del clean[(chi, mask)]
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, r: int = 0) -> "Element":
        return _raw(n, r, {})

    @classmethod
    def monomial(cls, n: int, holo=(), anti=(), coeff=ONE, char: Character | None = None,
                 r: int = 0) -> "Element":
        chi = trivial(r) if char is None else tuple(char)
        if len(chi) != r:
            r = len(chi)
        c = Scalar.coerce(coeff)
        if not c:
            return _raw(n, r, {})
        return _raw(n, r, {(chi, to_mask(holo, anti, n)): c})

    @classmethod
    def constant(cls, n: int, r: int = 0, coeff=ONE, char: Character | None = None) -> "Element":
        return cls.monomial(n, (), (), coeff, char, r)

    @classmethod
    def from_mask(cls, n: int, r: int, chi: Character, mask: int, coeff=ONE) -> "Element":
        c = Scalar.coerce(coeff)
        return _raw(n, r, {(tuple(chi), mask): c} if c else {})

    # -- vector space -------------------------------------------------------
    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.n != self.n or other.r != self.r:
            raise ValueError(f"dimension mismatch: (n={self.n}, r={self.r}) vs "
                             f"(n={other.n}, r={other.r})")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = prev + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return _raw(self.n, self.r, out)

    def __neg__(self) -> "Element":
        return _raw(self.n, self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, s) -> "Element":
        s = Scalar.coerce(s)
        if not s:
            return _raw(self.n, self.r, {})
        return _raw(self.n, self.r, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, s):
        if isinstance(s, Element):
            return wedge(self, s)
        return self.scale(s)

    __rmul__ = scale

    def __xor__(self, other: "Element") -> "Element":
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.n == other.n and self.r == other.r and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.r, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Character, int, Scalar]]:
        for (chi, mask), c in self.sorted_terms():
            yield chi, mask, c

    def sorted_terms(self) -> list:
        n = self.n
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], mono_sort_key(kv[0][1], n)))

    # -- structure ----------------------------------------------------------
    def characters(self) -> set:
        return {chi for chi, _ in self.terms}

    def bidegrees(self) -> set:
        return {mask_bidegree(m, self.n) for _, m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    @property
    def bidegree(self) -> tuple[int, int]:
        bd = self.bidegrees()
        if len(bd) != 1:
            raise ValueError(f"element is not bidegree-homogeneous: {sorted(bd)}")
        return next(iter(bd))

    @property
    def degree(self) -> int:
        degs = {p + q for p, q in self.bidegrees()}
        if len(degs) != 1:
            raise ValueError(f"element is not degree-homogeneous: {sorted(degs)}")
        return next(iter(degs))

    def character_part(self, chi: Character) -> "Element":
        chi = tuple(chi)
        return _raw(self.n, self.r, {k: c for k, c in self.terms.items() if k[0] == chi})

    def times_character(self, chi: Character) -> "Element":
        return _raw(self.n, self.r,
                    {(char_mul(k[0], chi), k[1]): c for k, c in self.terms.items()})

    def project(self, p: int, q: int) -> "Element":
        return project_bidegree(self, p, q)

    def conjugate(self) -> "Element":
        return conjugate(self)

    def wedge(self, other: "Element") -> "Element":
        return wedge(self, other)

    def coefficient(self, chi: Character, mask: int) -> Scalar:
        from .scalar import ZERO

        return self.terms.get((tuple(chi), mask), ZERO)

    # -- display ------------------------------------------------------------
    def format(self, coframe: list[str] | None = None, char_labels: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        coframe = coframe or [f"phi{k + 1}" for k in range(self.n)]
        char_labels = char_labels or [f"chi{k + 1}" for k in range(self.r)]
        parts = []
        for (chi, mask), c in self.sorted_terms():
            h, a = from_mask(mask, self.n)
            factors = []
            for lab, e in zip(char_labels, chi):
                if e:
                    factors.append(lab if e == 1 else f"{lab}**{e}")
            syms = [coframe[i - 1] for i in h] + [bar_label(coframe[j - 1]) for j in a]
            if syms:
                factors.append("^".join(syms))
            body = "*".join(factors) if factors else "1"
            cs = str(c)
            if c == 1:
                parts.append(("+", body))
            elif c == -1:
                parts.append(("-", body))
            elif c.is_real():
                sign = "-" if c.re < 0 else "+"
                parts.append((sign, f"{str(-c) if c.re < 0 else cs}*{body}"))
            else:
                parts.append(("+", f"({cs})*{body}"))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Element({self.format()})"


def bar_label(label: str) -> str:
    """``phi2`` -> ``phibar2``; labels without a numeric suffix get ``bar`` appended."""
    k = len(label)
    while k > 0 and label[k - 1].isdigit():
        k -= 1
    if k == len(label):
        return label + "bar"
    return label[:k] + "bar" + label[k:]


# -- operations --------------------------------------------------------------

def wedge(a: Element, b: Element) -> Element:
    """Graded wedge product; characters multiply."""
    a._check(b)
    out: dict = {}
    bt = list(b.terms.items())
    for (ca, ma), sa in a.terms.items():
        for (cb, mb), sb in bt:
            if ma & mb:
                continue
            v = sa * sb
            if wedge_sign(ma, mb) < 0:
                v = -v
            key = (char_mul(ca, cb) if ca else ca, ma | mb)
            prev = out.get(key)
            if prev is None:
                out[key] = v
            else:
                v = prev + v
                if v:
                    out[key] = v
                else:
                    del out[key]
    return _raw(a.n, a.r, out)


def wedge_all(items: Iterable[Element]) -> Element:
    items = list(items)
    if not items:
        raise ValueError("wedge of an empty sequence")
    out = items[0]
    for x in items[1:]:
        out = wedge(out, x)
    return out


def conjugate(a: Element) -> Element:
    """Antilinear involution: swaps holo and anti indices, inverts characters."""
    n = a.n
    out = {}
    for (chi, mask), c in a.terms.items():
        m2, sign = conj_mask(mask, n)
        v = c.conjugate()
        out[(char_inv(chi), m2)] = v if sign > 0 else -v
    return _raw(n, a.r, out)


def project_bidegree(a: Element, p: int, q: int) -> Element:
    n = a.n
    return _raw(n, a.r, {k: c for k, c in a.terms.items() if mask_bidegree(k[1], n) == (p, q)})

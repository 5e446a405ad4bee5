"""Manifold models: a (1,0)-coframe, its structure equations and characters.

The model only ever sees differential forms. ``d`` acts on a basis term
``chi * e_I`` by the Leibniz rule, with ``d(chi) = chi * dlog(chi)``; since
``dlog(chi)`` has constant coefficients every operator preserves the character,
so all linear algebra splits into independent (character, bidegree) blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Sequence

from gmpy2 import mpq

from .algebra import (
    Character,
    Element,
    _raw,
    block_basis,
    block_index,
    char_inv,
    conj_mask,
    conjugate,
    from_mask,
    mask_bidegree,
    to_mask,
    trivial,
    wedge_sign,
)
from .scalar import Scalar

KINDS = ("d", "del", "delbar", "ddbar")
SCHEMA = 1


class ModelError(Exception):
    """Base class for model loading failures."""


class ParseError(ModelError):
    pass


class ValidationError(ModelError):
    pass


class NotIntegrable(ValidationError):
    pass


class NotClosedSquare(ValidationError):
    pass


class DlogNotClosed(ValidationError):
    pass


class NotUnimodular(ValidationError):
    pass


class NonUnitaryCharacter(ValidationError):
    pass


@dataclass(frozen=True)
class BasisCharacter:
    label: str
    weight: mpq
    dlog: Element


@dataclass(frozen=True)
class CharacterInfo:
    """A character together with its derived weight and log-derivative."""

    exponents: Character
    weight: mpq
    dlog: Element

    @property
    def trivial(self) -> bool:
        return not any(self.exponents)


def _acc(out: dict, key, val) -> None:
    prev = out.get(key)
    if prev is None:
        out[key] = val
    else:
        s = prev + val
        if s:
            out[key] = s
        else:
            del out[key]


class ManifoldModel:
    """Finite model of a compact quotient with an invariant complex structure.

    Attributes:
        name: free-form label.
        n: complex dimension (number of coframe elements).
        coframe: coframe labels, position ``k`` is ``phi^{k+1}`` internally.
        characters: declared basis characters.
        structure: ``d phi^j`` for each coframe element (trivial character).
        metric: positive rationals, ``<phi^j, phi^j>``.
        character_set: default finite set of characters for computations.
        meta: family parameters, flags and other annotations.
    """

    def __init__(self, name: str, n: int, coframe: Sequence[str],
                 characters: Sequence[BasisCharacter], structure: Sequence[Element],
                 metric: Sequence, character_set: Sequence[Character] | None = None,
                 meta: dict | None = None):
        self.name = name
        self.n = n
        self.coframe = list(coframe)
        self.characters = list(characters)
        self.structure = list(structure)
        self.metric = [mpq(x) for x in metric]
        r = len(self.characters)
        cs = character_set if character_set else [trivial(r)]
        self.character_set = sorted({tuple(c) for c in cs})
        self.meta = dict(meta or {})
        self._dgen: list[dict] = []
        for k in range(n):
            self._dgen.append({m: c for (_, m), c in structure[k].terms.items()})
        for k in range(n):
            self._dgen.append({m: c for (_, m), c in conjugate(structure[k]).terms.items()})
        self._dm: dict = {0: {}}
        self._dlog: dict = {}
        self._ops: dict = {}

    # -- basics ---------------------------------------------------------------
    @property
    def r(self) -> int:
        return len(self.characters)

    @property
    def char_labels(self) -> list[str]:
        return [c.label for c in self.characters]

    @property
    def trivial_character(self) -> Character:
        return trivial(self.r)

    def zero(self) -> Element:
        return Element.zero(self.n, self.r)

    def one(self) -> Element:
        return Element.constant(self.n, self.r)

    def phi(self, k: int, coeff=1, char: Character | None = None) -> Element:
        return Element.monomial(self.n, (k,), (), coeff, char or self.trivial_character, self.r)

    def phibar(self, k: int, coeff=1, char: Character | None = None) -> Element:
        return Element.monomial(self.n, (), (k,), coeff, char or self.trivial_character, self.r)

    def monomial(self, holo=(), anti=(), coeff=1, char: Character | None = None) -> Element:
        return Element.monomial(self.n, holo, anti, coeff, char or self.trivial_character, self.r)

    def index_of(self, label: str) -> int:
        """1-based coframe position of ``label``."""
        try:
            return self.coframe.index(label) + 1
        except ValueError:
            raise KeyError(f"unknown coframe label {label!r}") from None

    def char_index(self, label: str) -> int:
        for k, c in enumerate(self.characters):
            if c.label == label:
                return k
        raise KeyError(f"unknown character label {label!r}")

    def character(self, exponents: Character) -> CharacterInfo:
        exps = tuple(exponents)
        w = mpq(0)
        for e, c in zip(exps, self.characters):
            w += e * c.weight
        dl = self.zero()
        for e, c in zip(exps, self.characters):
            if e:
                dl = dl + c.dlog.scale(e)
        return CharacterInfo(exps, w, dl)

    def format(self, a: Element) -> str:
        return a.format(self.coframe, self.char_labels)

    # -- differentials ----------------------------------------------------------
    def _dmono(self, mask: int) -> dict:
        got = self._dm.get(mask)
        if got is not None:
            return got
        low = mask & -mask
        rest = mask ^ low
        out: dict = {}
        for m2, c in self._dgen[low.bit_length() - 1].items():
            if m2 & rest:
                continue
            _acc(out, m2 | rest, c if wedge_sign(m2, rest) > 0 else -c)
        for m2, c in self._dmono(rest).items():
            if m2 & low:
                continue
            _acc(out, low | m2, -c if wedge_sign(low, m2) > 0 else c)
        self._dm[mask] = out
        return out

    def _dlog_masks(self, chi: Character) -> dict:
        got = self._dlog.get(chi)
        if got is None:
            got = {m: c for (_, m), c in self.character(chi).dlog.terms.items()}
            self._dlog[chi] = got
        return got

    def _op(self, kind: str, chi: Character, mask: int) -> dict:
        key = (kind, chi, mask)
        got = self._ops.get(key)
        if got is not None:
            return got
        n = self.n
        if kind == "d":
            out = dict(self._dmono(mask))
            if any(chi):
                for m1, c in self._dlog_masks(chi).items():
                    if m1 & mask:
                        continue
                    _acc(out, m1 | mask, c if wedge_sign(m1, mask) > 0 else -c)
        elif kind in ("del", "delbar"):
            p = mask_bidegree(mask, n)[0]
            want = p + 1 if kind == "del" else p
            low = (1 << n) - 1
            out = {m: c for m, c in self._op("d", chi, mask).items()
                   if (m & low).bit_count() == want}
        elif kind == "ddbar":
            out = {}
            for m1, c1 in self._op("delbar", chi, mask).items():
                for m2, c2 in self._op("del", chi, m1).items():
                    _acc(out, m2, c1 * c2)
        else:
            raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")
        self._ops[key] = out
        return out

    def apply(self, kind: str, a: Element) -> Element:
        if a.n != self.n or a.r != self.r:
            raise ValueError("element does not belong to this model")
        out: dict = {}
        for (chi, mask), c in a.terms.items():
            for m2, v in self._op(kind, chi, mask).items():
                _acc(out, (chi, m2), c * v)
        return _raw(self.n, self.r, out)

    def d(self, a: Element) -> Element:
        return self.apply("d", a)

    def del_(self, a: Element) -> Element:
        return self.apply("del", a)

    def delbar(self, a: Element) -> Element:
        return self.apply("delbar", a)

    def ddbar(self, a: Element) -> Element:
        return self.apply("ddbar", a)

    # -- invariants -------------------------------------------------------------
    def validate(self) -> list[str]:
        """Check every model invariant; raise on the first violation.

        Returns informational notes (the unimodularity check is our own
        formalisation and is reported as such).
        """
        n = self.n
        for k, dphi in enumerate(self.structure):
            lab = self.coframe[k]
            if dphi and dphi.characters() != {self.trivial_character}:
                raise ParseError(f"d{lab} must have constant (trivial-character) coefficients")
            if dphi and {p + q for p, q in dphi.bidegrees()} != {2}:
                raise ParseError(f"d{lab} must be a 2-form")
            if dphi.project(0, 2):
                raise NotIntegrable(f"d{lab} has a (0,2) component: {self.format(dphi.project(0, 2))}")
        for k, dphi in enumerate(self.structure):
            dd = self.d(dphi)
            if dd:
                raise NotClosedSquare(f"d(d{self.coframe[k]}) = {self.format(dd)} != 0")
        for c in self.characters:
            dl = c.dlog
            if dl and dl.characters() != {self.trivial_character}:
                raise ParseError(f"dlog({c.label}) must have constant coefficients")
            if dl and {p + q for p, q in dl.bidegrees()} != {1}:
                raise ParseError(f"dlog({c.label}) must be a 1-form")
            if conjugate(dl) != -dl:
                raise NonUnitaryCharacter(f"character {c.label} is not unitary (dlog not imaginary)")
            ddl = self.d(dl)
            if ddl:
                raise DlogNotClosed(f"d(dlog {c.label}) = {self.format(ddl)} != 0")
        full = (1 << (2 * n)) - 1
        for b in range(2 * n):
            top = self._dmono(full ^ (1 << b)).get(full)
            if top:
                mono = from_mask(full ^ (1 << b), n)
                raise NotUnimodular(
                    f"model-Stokes fails: d of {mono} has volume coefficient {top}")
        return ["unimodularity checked via model-Stokes (trivial-character volume "
                "coefficient of every exact top form vanishes)"]

    def is_nilpotent(self) -> bool:
        return check_nilpotent_J(self)

    def transfer_hypothesis(self) -> str:
        if self.r == 0 and check_nilpotent_J(self):
            return ("nilpotent invariant complex structure: invariant forms compute "
                    "Bott-Chern and Aeppli cohomology")
        return ("character-enlarged invariant complex computes Bott-Chern and Aeppli "
                "cohomology")


def check_nilpotent_J(m: ManifoldModel) -> bool:
    """Greedy search for a nilpotent ordering of the given coframe."""
    n = m.n
    low = (1 << n) - 1
    done = 0  # mask of extracted coframe positions
    remaining = set(range(n))
    while remaining:
        allowed = done | (done << n)
        ready = [k for k in sorted(remaining)
                 if all(not (mask & ~allowed) for (_, mask) in m.structure[k].terms)]
        if not ready:
            return False
        for k in ready:
            done |= 1 << k
            remaining.discard(k)
    return done == low


# -- operator blocks -----------------------------------------------------------

_SHIFT = {"del": ((1, 0),), "delbar": ((0, 1),), "ddbar": ((1, 1),), "d": ((1, 0), (0, 1))}


@dataclass
class OperatorBlock:
    """Matrix of an operator restricted to one character, in monomial bases.

    ``columns[j]`` maps row positions (indices into ``target_basis``) to the
    coefficients of ``op(chi * source_basis[j])``.
    """

    kind: str
    character: Character
    source: tuple
    target: tuple
    source_basis: tuple
    target_basis: tuple
    columns: list = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.target_basis), len(self.source_basis)

    def to_dense(self) -> list[list[Scalar]]:
        rows, cols = self.shape
        out = [[Scalar(0)] * cols for _ in range(rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self.columns)

    def __matmul__(self, other: "OperatorBlock") -> "OperatorBlock":
        if tuple(self.source_basis) != tuple(other.target_basis):
            raise ValueError("bases do not match for composition")
        cols = []
        for col in other.columns:
            out: dict = {}
            for k, c in col.items():
                for i, v in self.columns[k].items():
                    _acc(out, i, c * v)
            cols.append(out)
        return OperatorBlock(f"{self.kind}*{other.kind}", self.character, other.source,
                             self.target, other.source_basis, self.target_basis, cols)


def operator_matrix(m: ManifoldModel, kind: str, chi: Character,
                    source_basis: Sequence[int]) -> OperatorBlock:
    n = m.n
    chi = tuple(chi)
    src_bd = sorted({mask_bidegree(b, n) for b in source_basis})
    tgt_bd = sorted({(p + dp, q + dq) for p, q in src_bd for dp, dq in _SHIFT[kind]
                     if p + dp <= n and q + dq <= n})
    target_basis = tuple(b for bd in tgt_bd for b in block_basis(n, *bd))
    index = {b: i for i, b in enumerate(target_basis)}
    cols = [{index[t]: v for t, v in m._op(kind, chi, b).items()} for b in source_basis]
    return OperatorBlock(kind, chi, tuple(src_bd), tuple(tgt_bd), tuple(source_basis),
                         target_basis, cols)


def operator_block(m: ManifoldModel, kind: str, chi: Character, p: int, q: int) -> OperatorBlock:
    if not (0 <= p <= m.n and 0 <= q <= m.n):
        raise ValueError(f"bidegree ({p},{q}) outside 0..{m.n}")
    if kind not in KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    return operator_matrix(m, kind, chi, block_basis(m.n, p, q))


def block_columns(m: ManifoldModel, kind: str, chi: Character, p: int, q: int,
                  target: tuple[int, int]) -> list[dict]:
    """Columns of ``kind`` on block (chi, p, q), rows indexed in block ``target``."""
    n = m.n
    src = block_basis(n, p, q)
    if not src:
        return []
    idx = block_index(n, *target)
    return [{idx[t]: v for t, v in m._op(kind, chi, b).items()} for b in src]


def differential(m: ManifoldModel, a: Element, kind: str = "d") -> Element:
    return m.apply(kind, a)


# -- serialization -------------------------------------------------------------

def _scalar_json(s: Scalar) -> list[int]:
    return s.to_json()


def element_to_json(a: Element, m: ManifoldModel) -> list[dict]:
    out = []
    for chi, mask, c in a:
        h, an = from_mask(mask, m.n)
        term = {"coeff": _scalar_json(c)}
        chars = {lab: e for lab, e in zip(m.char_labels, chi) if e}
        if chars:
            term["character"] = chars
        term["holo"] = list(h)
        term["anti"] = list(an)
        out.append(term)
    return out


def _terms_from_json(terms, n: int, labels: list[str], coframe: list[str]) -> Element:
    r = len(labels)
    out: dict = {}
    if not isinstance(terms, list):
        raise ParseError("form terms must be a list")
    for t in terms:
        if not isinstance(t, dict):
            raise ParseError(f"form term must be an object, got {t!r}")
        try:
            c = Scalar.from_json(t.get("coeff", [1, 1, 0, 1]))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad coefficient in {t!r}: {exc}") from None
        chi = [0] * r
        for lab, e in (t.get("character") or {}).items():
            if lab not in labels:
                raise ParseError(f"unknown character label {lab!r}")
            if int(e) != e:
                raise ParseError(f"character exponent must be an integer: {e!r}")
            chi[labels.index(lab)] = int(e)

        def idx(v):
            if isinstance(v, str):
                if v not in coframe:
                    raise ParseError(f"unknown coframe label {v!r}")
                return coframe.index(v) + 1
            if not isinstance(v, int) or not 1 <= v <= n:
                raise ParseError(f"coframe index {v!r} outside 1..{n}")
            return v

        holo = [idx(v) for v in t.get("holo", [])]
        anti = [idx(v) for v in t.get("anti", [])]
        if len(set(holo)) != len(holo) or len(set(anti)) != len(anti):
            continue  # repeated generator: the term is zero
        sign = 1
        # reorder to canonical position, tracking the permutation parity
        for seq in (holo, anti):
            for i in range(len(seq)):
                for j in range(len(seq) - 1 - i):
                    if seq[j] > seq[j + 1]:
                        seq[j], seq[j + 1] = seq[j + 1], seq[j]
                        sign = -sign
        key = (tuple(chi), to_mask(holo, anti, n))
        _acc(out, key, c if sign > 0 else -c)
    return _raw(n, r, out)


def element_from_json(terms, m: ManifoldModel) -> Element:
    return _terms_from_json(terms, m.n, m.char_labels, m.coframe)


def _rat(x) -> mpq:
    try:
        if isinstance(x, list):
            if len(x) != 2 or int(x[1]) == 0:
                raise ValueError
            return mpq(int(x[0]), int(x[1]))
        if isinstance(x, (int, str)):
            s = str(x).strip()
            return mpq(s[1:] if s.startswith("+") else s)
    except (ValueError, TypeError, ZeroDivisionError):
        pass
    raise ParseError(f"bad rational {x!r}")


def _rat_json(x: mpq) -> list[int]:
    return [int(x.numerator), int(x.denominator)]


def character_to_json(chi: Character, m: ManifoldModel) -> dict:
    return {lab: e for lab, e in zip(m.char_labels, chi) if e}


def character_from_json(d: dict, m: ManifoldModel) -> Character:
    chi = [0] * m.r
    for lab, e in d.items():
        if lab not in m.char_labels:
            raise ParseError(f"unknown character label {lab!r}")
        chi[m.char_labels.index(lab)] = int(e)
    return tuple(chi)


def load_model(spec, validate: bool = True) -> ManifoldModel:
    """Build and validate a model from a JSON document (text or parsed dict)."""
    if isinstance(spec, (str, bytes)):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(spec, dict):
        raise ParseError("model spec must be a JSON object")
    try:
        n = int(spec["n"])
        coframe = list(spec.get("coframe") or [f"phi{k + 1}" for k in range(n)])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or bad field: {exc}") from None
    if n < 1 or len(coframe) != n or len(set(coframe)) != n:
        raise ParseError(f"coframe must list {n} distinct labels")
    chars_in = spec.get("characters") or []
    labels = []
    for c in chars_in:
        if "label" not in c:
            raise ParseError("character without label")
        labels.append(str(c["label"]))
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate character labels")
    characters = []
    for c in chars_in:
        dl = _terms_from_json(c.get("dlog", []), n, labels, coframe)
        characters.append(BasisCharacter(str(c["label"]), _rat(c.get("weight", 0)), dl))
    structure = [Element.zero(n, len(labels)) for _ in range(n)]
    seen = set()
    for s in spec.get("structure") or []:
        tgt = s.get("target")
        if isinstance(tgt, str):
            if tgt not in coframe:
                raise ParseError(f"unknown structure target {tgt!r}")
            k = coframe.index(tgt)
        elif isinstance(tgt, int) and 1 <= tgt <= n:
            k = tgt - 1
        else:
            raise ParseError(f"bad structure target {tgt!r}")
        if k in seen:
            raise ParseError(f"duplicate structure equation for {coframe[k]}")
        seen.add(k)
        structure[k] = _terms_from_json(s.get("terms", []), n, labels, coframe)
    metric_in = spec.get("metric")
    metric = [mpq(1)] * n if metric_in is None else [_rat(x) for x in metric_in]
    if len(metric) != n:
        raise ParseError(f"metric must have {n} entries")
    if any(x <= 0 for x in metric):
        raise ParseError("metric entries must be positive")
    cset = None
    if spec.get("character_set") is not None:
        cset = []
        for d in spec["character_set"]:
            chi = [0] * len(labels)
            for lab, e in d.items():
                if lab not in labels:
                    raise ParseError(f"unknown character label {lab!r} in character_set")
                chi[labels.index(lab)] = int(e)
            cset.append(tuple(chi))
    m = ManifoldModel(str(spec.get("name", "model")), n, coframe, characters, structure,
                      metric, cset, spec.get("meta"))
    if validate:
        notes = m.validate()
        m.meta.setdefault("validation_notes", notes)
    return m


def load_model_file(path) -> ManifoldModel:
    return load_model(Path(path).read_text())


def model_to_spec(m: ManifoldModel) -> dict:
    spec = {
        "schema": SCHEMA,
        "name": m.name,
        "n": m.n,
        "coframe": list(m.coframe),
        "characters": [
            {"label": c.label, "weight": _rat_json(c.weight), "dlog": element_to_json(c.dlog, m)}
            for c in m.characters
        ],
        "structure": [
            {"target": m.coframe[k], "terms": element_to_json(e, m)}
            for k, e in enumerate(m.structure) if e
        ],
        "metric": [_rat_json(x) for x in m.metric],
        "character_set": [character_to_json(c, m) for c in m.character_set],
    }
    meta = {k: v for k, v in m.meta.items() if k != "validation_notes"}
    if meta:
        spec["meta"] = meta
    return spec


def dumps(obj) -> str:
    """Deterministic JSON text used for every emitted document."""
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def characters_in_box(m: ManifoldModel, bound: int) -> list[Character]:
    """All exponent vectors with entries in ``[-bound, bound]``."""
    return sorted(product(range(-bound, bound + 1), repeat=m.r))


def closure_depth2(chars, extra=()) -> list[Character]:
    """``chars`` together with all products of pairs and inverses."""
    base = {tuple(c) for c in chars} | {tuple(c) for c in extra}
    base |= {char_inv(c) for c in base}
    out = set(base)
    for a in base:
        for b in base:
            out.add(tuple(x + y for x, y in zip(a, b)))
    return sorted(out)


def conj_of_mask(mask: int, n: int):
    return conj_mask(mask, n)

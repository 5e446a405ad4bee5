"""Exact sparse linear algebra over Q(i).

Vectors are ``dict[key, value]`` with no zero entries; keys must be mutually
comparable (pivots are chosen as the smallest key, which makes every result
deterministic). Values are :class:`~abcmassey.scalar.Scalar`; systems whose
entries are all real are lowered to bare ``mpq`` for speed and lifted back.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from gmpy2 import mpq

from .scalar import Scalar, _new, _Q0

Vector = dict


def _lower(vectors: Iterable[dict]) -> bool:
    return all(not v.im for vec in vectors for v in vec.values())


def _to_q(vec: dict) -> dict:
    return {k: v.re for k, v in vec.items()}


def _to_s(vec: dict) -> dict:
    return {k: (v if isinstance(v, Scalar) else _new(v, _Q0)) for k, v in vec.items()}


def axpy(y: dict, a, x: dict) -> None:
    """In place ``y += a * x``."""
    for k, v in x.items():
        prev = y.get(k)
        if prev is None:
            y[k] = a * v
        else:
            s = prev + a * v
            if s:
                y[k] = s
            else:
                del y[k]


class EchelonSpan:
    """Fully reduced echelon basis of a growing span.

    Every stored row has entry 1 at its pivot and 0 at every other pivot. With
    ``track=True`` each row also carries its expression in terms of the
    generators added so far (indexed by insertion order).
    """

    def __init__(self, track: bool = False, one=None):
        self.rows: dict = {}
        self.combo: dict | None = {} if track else None
        self.ngens = 0
        self._one = Scalar(1) if one is None else one

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> tuple[dict, dict]:
        """Return ``(residual, coefficients)`` with ``v = residual + sum c_p row_p``."""
        rows = self.rows
        coeffs = {p: x for p, x in v.items() if p in rows}
        r = dict(v)
        for p, c in coeffs.items():
            axpy(r, -c, rows[p])
        return r, coeffs

    def add(self, v: dict):
        """Insert a generator. Returns the dependency (kernel) combo if ``v`` is
        already in the span and tracking is on, ``None`` otherwise."""
        g = self.ngens
        self.ngens += 1
        r, coeffs = self.reduce(v)
        combo = None
        if self.combo is not None:
            combo = {g: self._one}
            for p, c in coeffs.items():
                axpy(combo, -c, self.combo[p])
        if not r:
            return combo if combo is not None else {}
        piv = min(r)
        inv = 1 / r[piv]
        if inv != 1:
            r = {k: x * inv for k, x in r.items()}
            if combo is not None:
                combo = {k: x * inv for k, x in combo.items()}
        for p, row in self.rows.items():
            x = row.get(piv)
            if x is not None:
                axpy(row, -x, r)
                if combo is not None:
                    axpy(self.combo[p], -x, combo)
        self.rows[piv] = r
        if combo is not None:
            self.combo[piv] = combo
        return None

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)[0]

    def express(self, v: dict) -> dict | None:
        """Coefficients on generators reproducing ``v``, or ``None``."""
        if self.combo is None:
            raise ValueError("express() needs a tracking span")
        r, coeffs = self.reduce(v)
        if r:
            return None
        out: dict = {}
        for p, c in coeffs.items():
            axpy(out, c, self.combo[p])
        return out

    def dual_functional(self, residual: dict) -> dict:
        """Functional vanishing on the span and equal to ``residual[s]`` on any
        vector whose reduction is ``residual`` (``s`` its smallest key)."""
        s = min(residual)
        ell = {s: self._one}
        for p, row in self.rows.items():
            x = row.get(s)
            if x is not None:
                ell[p] = -x
        return ell


def evaluate(ell: dict, v: dict):
    acc = None
    for k, x in ell.items():
        y = v.get(k)
        if y is not None:
            t = x * y
            acc = t if acc is None else acc + t
    return Scalar(0) if acc is None else acc


# -- one-shot helpers (real lowering applied) ---------------------------------

def _prepare(vectors: Sequence[dict]):
    real = _lower(vectors)
    if real:
        return [_to_q(v) for v in vectors], True
    return list(vectors), False


def rank(vectors: Sequence[dict]) -> int:
    vecs, real = _prepare(vectors)
    sp = EchelonSpan(one=mpq(1) if real else None)
    for v in vecs:
        sp.add(v)
    return sp.rank


def kernel(columns: Sequence[dict]) -> list[dict]:
    """Basis of ``{x : sum_j x_j columns[j] = 0}``; vectors keyed by column index.

    Each basis vector is the dependency found when a column reduced to zero,
    normalised to coefficient 1 on that column.
    """
    vecs, real = _prepare(columns)
    sp = EchelonSpan(track=True, one=mpq(1) if real else None)
    out = []
    for v in vecs:
        dep = sp.add(v)
        if dep is not None:
            out.append(_to_s(dep) if real else dep)
    return out


def kernel_basis(columns: Sequence[dict], ncols: int | None = None) -> list[dict]:
    """Canonical kernel basis read off the reduced row echelon form.

    One vector per free column ``f`` (ascending): 1 at ``f``, ``-R[p][f]`` at each
    pivot column ``p``. Columns are indexed ``0..ncols-1``.
    """
    ncols = len(columns) if ncols is None else ncols
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    vecs, real = _prepare([rows[i] for i in sorted(rows)])
    one = mpq(1) if real else Scalar(1)
    sp = EchelonSpan(one=one)
    for v in vecs:
        sp.add(v)
    col_hits: dict = {}
    for p, row in sp.rows.items():
        for f, x in row.items():
            if f != p:
                col_hits.setdefault(f, []).append((p, x))
    out = []
    for f in range(ncols):
        if f in sp.rows:
            continue
        vec = {f: one}
        for p, x in col_hits.get(f, ()):
            vec[p] = -x
        out.append(_to_s(vec) if real else vec)
    return out


def solve(columns: Sequence[dict], target: dict):
    """Solve ``sum_j x_j columns[j] = target``.

    Returns ``(True, x)`` with ``x`` keyed by column index, or ``(False, ell)``
    where ``ell`` vanishes on every column and not on ``target``.
    """
    vecs, real = _prepare(list(columns) + [target])
    tgt = vecs.pop()
    sp = EchelonSpan(track=True, one=mpq(1) if real else None)
    for v in vecs:
        sp.add(v)
    r, coeffs = sp.reduce(tgt)
    if not r:
        x: dict = {}
        for p, c in coeffs.items():
            axpy(x, c, sp.combo[p])
        return True, (_to_s(x) if real else x)
    ell = sp.dual_functional(r)
    return False, (_to_s(ell) if real else ell)


def quotient_basis(cycles: Sequence[dict], boundaries: Sequence[dict]) -> list[int]:
    """Indices of ``cycles`` whose classes form a basis of span(cycles)/span(boundaries).

    Assumes span(boundaries) lies inside span(cycles).
    """
    vecs, real = _prepare(list(boundaries) + list(cycles))
    sp = EchelonSpan(one=mpq(1) if real else None)
    nb = len(boundaries)
    for v in vecs[:nb]:
        sp.add(v)
    picked = []
    for i, v in enumerate(vecs[nb:]):
        before = sp.rank
        sp.add(v)
        if sp.rank > before:
            picked.append(i)
    return picked


def span_equal(a: Sequence[dict], b: Sequence[dict]) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(list(a) + list(b)) == ra


def combine(coeffs: dict, vectors: Sequence[dict]) -> dict:
    out: dict = {}
    for j, c in coeffs.items():
        axpy(out, c, vectors[j])
    return out


def keyed(items: Iterable[Hashable], sort_key=None) -> dict:
    """Stable integer positions for a set of keys (used to make pivots ordered)."""
    return {k: i for i, k in enumerate(sorted(set(items), key=sort_key))}

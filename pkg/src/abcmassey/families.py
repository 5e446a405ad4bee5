"""Generators for the three shipped manifold families.

Each generator returns a model spec (a JSON-ready dict accepted by
:func:`abcmassey.model.load_model`). Nakamura parameters also yield boolean
flags describing which characters descend to the quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from gmpy2 import mpq

from .model import ManifoldModel, load_model


def _rat(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, str):
        s = x.strip()
        return mpq(s[1:] if s.startswith("+") else s)
    return mpq(x)


def _rj(x: mpq) -> list[int]:
    return [int(x.numerator), int(x.denominator)]


def _term(coeff, holo=(), anti=(), character=None) -> dict:
    c = _rat(coeff)
    t = {"coeff": [int(c.numerator), int(c.denominator), 0, 1]}
    if character:
        t["character"] = dict(character)
    t["holo"] = list(holo)
    t["anti"] = list(anti)
    return t


def _unit_metric(n: int) -> list[list[int]]:
    return [[1, 1] for _ in range(n)]


# -- Bigalke-Rollenske nilmanifolds ---------------------------------------------

def bigalke_rollenske(n: int) -> dict:
    """Nilmanifold of complex dimension ``4n - 2`` with a nilpotent structure.

    ``d phi^j = 0`` for ``j <= 3n-2``, ``d phi^{3n-1} = phi^{2n} ^ phibar^n`` and
    ``d phi^j = phi^{j-3n+1} ^ phi^{j-2n+1} + phi^{j-2n} ^ phibar^{j-n}`` above.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"bigalke_rollenske needs an integer n >= 2, got {n!r}")
    dim = 4 * n - 2
    structure = [{"target": f"phi{3 * n - 1}", "terms": [_term(1, [2 * n], [n])]}]
    for j in range(3 * n, dim + 1):
        structure.append({"target": f"phi{j}", "terms": [
            _term(1, [j - 3 * n + 1, j - 2 * n + 1]),
            _term(1, [j - 2 * n], [j - n]),
        ]})
    return {
        "schema": 1,
        "name": f"bigalke-rollenske n={n}",
        "n": dim,
        "coframe": [f"phi{k}" for k in range(1, dim + 1)],
        "characters": [],
        "structure": structure,
        "metric": _unit_metric(dim),
        "meta": {"family": "bigalke-rollenske", "params": {"n": n}},
    }


def complex_torus(n: int) -> dict:
    """Flat model: every ``d phi^j`` vanishes."""
    if n < 1:
        raise ValueError("complex_torus needs n >= 1")
    return {
        "schema": 1,
        "name": f"complex torus n={n}",
        "n": n,
        "coframe": [f"phi{k}" for k in range(1, n + 1)],
        "characters": [],
        "structure": [],
        "metric": _unit_metric(n),
        "meta": {"family": "torus", "params": {"n": n}},
    }


# -- Nakamura manifolds -----------------------------------------------------------

@dataclass
class NakamuraParams:
    """Eigenvalue data ``lambdas`` (summing to zero) and lattice rational ``t``.

    ``t`` encodes the lattice parameter as ``2 pi t`` so that compatibility of a
    weight ``c`` reads ``t * c`` integral. ``witness`` is an optional free-form
    note (e.g. an integer matrix) attesting that the data come from a lattice.
    """

    lambdas: Sequence
    t: object = 1
    witness: str | None = None
    lam: list = field(init=False, repr=False)

    def __post_init__(self):
        self.lam = [_rat(x) for x in self.lambdas]
        self.t = _rat(self.t)
        if not self.lam:
            raise ValueError("need at least one lambda")
        if sum(self.lam) != 0:
            raise ValueError(f"lambdas must sum to zero, got sum {sum(self.lam)}")
        if not any(self.lam):
            raise ValueError("all lambdas vanish: the model is a complex torus")


def _subsets(n: int):
    for k in range(n + 1):
        yield from combinations(range(1, n + 1), k)


def weights_cij(params: NakamuraParams) -> dict:
    """Map ``(I, J) -> c_IJ`` over all pairs of index subsets of ``{1..n}``."""
    lam = params.lam
    out = {}
    for I in _subsets(len(lam)):
        sI = sum((lam[i - 1] for i in I), mpq(0))
        for J in _subsets(len(lam)):
            out[(I, J)] = sI + sum((lam[j - 1] for j in J), mpq(0))
    return out


def _is_int(x: mpq) -> bool:
    return x.denominator == 1


def admissible_characters(params: NakamuraParams) -> set:
    """Weights ``c_IJ`` whose character descends to the quotient (``t*c`` integral)."""
    cs = {c for c in weights_cij(params).values() if _is_int(params.t * c)}
    cs |= {-c for c in cs}
    cs.add(mpq(0))
    return cs


def nakamura_flags(params: NakamuraParams) -> dict:
    table = weights_cij(params)
    adm = admissible_characters(params)
    only_trivial = adm == {mpq(0)}
    witness48 = None
    for (I, J), c in sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if c and not set(I) & set(J) and _is_int(params.t * c):
            witness48 = {"I": list(I), "J": list(J), "c": _rj(c)}
            break
    return {
        "ddbar_condition": only_trivial,
        "massey_condition": witness48 is not None,
        "massey_witness": witness48,
        "torus": False,
        "formal_model": params.witness is None,
    }


def _qgcd(values) -> mpq:
    vals = [abs(v) for v in values if v]
    if not vals:
        return mpq(1)
    den = math.lcm(*(int(v.denominator) for v in vals))
    g = math.gcd(*(int(v * den) for v in vals))
    return mpq(g, den)


def nakamura(params: NakamuraParams) -> tuple[dict, dict]:
    """Nakamura-type solvmanifold ``C x_rho C^n`` with coframe ``phi0..phin``.

    A single basis character ``f`` of weight ``u`` (the rational gcd of all
    nonzero ``c_IJ``) is declared; the character with weight ``c`` is ``f**(c/u)``
    and has ``dlog = -c/2 (phi0 - phibar0)``. Returns ``(spec, flags)``.
    """
    n = len(params.lam)
    u = _qgcd(weights_cij(params).values())
    half = mpq(1, 2)
    structure = []
    for i, li in enumerate(params.lam, start=1):
        if not li:
            continue
        structure.append({"target": f"phi{i}", "terms": [
            _term(-half * li, [1, i + 1]),
            _term(half * li, [i + 1], [1]),
        ]})
    dlog = [_term(-half * u, [1]), _term(half * u, [], [1])]
    adm = sorted(admissible_characters(params))
    cset = [({"f": int(c / u)} if c else {}) for c in adm]
    flags = nakamura_flags(params)
    spec = {
        "schema": 1,
        "name": "nakamura lambda=(" + ",".join(str(x) for x in params.lam) + f") t={params.t}",
        "n": n + 1,
        "coframe": [f"phi{k}" for k in range(n + 1)],
        "characters": [{"label": "f", "weight": _rj(u), "dlog": dlog}],
        "structure": structure,
        "metric": _unit_metric(n + 1),
        "character_set": cset,
        "meta": {
            "family": "nakamura",
            "params": {"lambdas": [_rj(x) for x in params.lam], "t": _rj(params.t)},
            "flags": flags,
            "label": "formal model" if params.witness is None else "lattice witness supplied",
        },
    }
    return spec, flags


def nakamura_character(weight, spec_or_model) -> tuple:
    """Exponent vector of the character of weight ``c`` in a Nakamura model."""
    if isinstance(spec_or_model, ManifoldModel):
        u = spec_or_model.characters[0].weight
    else:
        w = spec_or_model["characters"][0]["weight"]
        u = mpq(w[0], w[1])
    q = _rat(weight) / u
    if not _is_int(q):
        raise ValueError(f"weight {weight} is not a multiple of the unit {u}")
    return (int(q),)


# -- semidirect family -------------------------------------------------------------

@dataclass
class SemidirectParams:
    n: int = 1
    m: int = 1
    lam: object = 1
    ks: Sequence[int] | None = None

    def __post_init__(self):
        self.lam = _rat(self.lam)
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if not self.lam:
            raise ValueError("lambda must be nonzero")
        self.ks = list(self.ks) if self.ks is not None else [1] * (2 * self.n)
        if len(self.ks) != 2 * self.n:
            raise ValueError(f"need {2 * self.n} integers ks")


def semidirect_family(params: SemidirectParams) -> dict:
    """Solvmanifold ``C^{2n} x_rho C^{2m}`` with coframe ``phi1..phi2n, psi1..psi2m``.

    Characters ``beta1`` (odd type) and ``beta2`` (even type) are declared with
    ``dlog beta1 = -lam * sum_{k even}(phi^k - phibar^k)`` and
    ``dlog beta2 = lam * sum_{k odd}(phi^k - phibar^k)``.
    """
    n2, m2, lam = 2 * params.n, 2 * params.m, params.lam
    structure = []
    for j in range(m2):
        pos = n2 + j + 1
        terms = []
        for k in range(1, n2 + 1):
            odd_k = k % 2 == 1
            if j % 2 == 0:
                # -lam * eta ^ psi, eta = phi^odd + phibar^even
                terms.append(_term(-lam, [k, pos]) if odd_k else _term(lam, [pos], [k]))
            else:
                # lam * conj(eta) ^ psi
                terms.append(_term(-lam, [pos], [k]) if odd_k else _term(lam, [k, pos]))
        structure.append({"target": f"psi{j + 1}", "terms": terms})

    def dlog(parity: int, c):
        out = []
        for k in range(1, n2 + 1):
            if k % 2 == parity:
                out.append(_term(c, [k]))
                out.append(_term(-c, [], [k]))
        return out

    chars = [
        {"label": "beta1", "weight": _rj(lam), "dlog": dlog(0, -lam)},
        {"label": "beta2", "weight": _rj(lam), "dlog": dlog(1, lam)},
    ]
    cset = []
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            d = {}
            if a:
                d["beta1"] = a
            if b:
                d["beta2"] = b
            cset.append(d)
    return {
        "schema": 1,
        "name": f"semidirect n={params.n} m={params.m} lambda={lam}",
        "n": n2 + m2,
        "coframe": [f"phi{k}" for k in range(1, n2 + 1)] + [f"psi{k}" for k in range(1, m2 + 1)],
        "characters": chars,
        "structure": structure,
        "metric": _unit_metric(n2 + m2),
        "character_set": cset,
        "meta": {
            "family": "semidirect",
            "params": {"n": params.n, "m": params.m, "lambda": _rj(lam), "ks": list(params.ks)},
        },
    }


def build(spec: dict) -> ManifoldModel:
    return load_model(spec)

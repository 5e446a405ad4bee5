"""Generator tables for Nakamura models, built by hand from the gating rules.

Each entry is ``(character exponent, holo indices, anti indices)`` with
coframe positions 1-based (position 1 is phi0). Signs are irrelevant: the
tables are compared up to scalars.
"""

from fractions import Fraction
from itertools import combinations


def _subsets(n, k):
    return list(combinations(range(1, n + 1), k))


def _weights(lambdas, L, M):
    return sum((Fraction(lambdas[i - 1]) for i in L), Fraction(0)) + \
        sum((Fraction(lambdas[j - 1]) for j in M), Fraction(0))


def _gen(lambdas, t, unit, p, q, rows):
    n = len(lambdas)
    out = set()
    for (dl, dm, zero_h, zero_a), (gate_f, gate_fbar) in rows:
        lp, mq = p - dl, q - dm
        if lp < 0 or mq < 0:
            continue
        for L in _subsets(n, lp):
            for M in _subsets(n, mq):
                c = _weights(lambdas, L, M)
                if (Fraction(t) * c).denominator != 1:
                    continue
                holo = tuple(([1] if zero_h else []) + [i + 1 for i in L])
                anti = tuple(([1] if zero_a else []) + [j + 1 for j in M])
                e = int(c / unit)
                if not gate_f or c == 0:
                    out.add(((e,), holo, anti))
                if not gate_fbar or c == 0:
                    out.add(((-e,), holo, anti))
    return out


# (|L| = p - dl, |M| = q - dm, has phi0, has phibar0) -> (delta on f, delta on fbar)
_BC_ROWS = [
    ((0, 0, False, False), (True, True)),
    ((1, 0, True, False), (False, True)),
    ((0, 1, False, True), (True, False)),
    ((1, 1, True, True), (False, False)),
]

_AEPPLI_ROWS = [
    ((0, 0, False, False), (False, False)),
    ((1, 0, True, False), (True, False)),
    ((0, 1, False, True), (False, True)),
    ((1, 1, True, True), (True, True)),
]


def bott_chern_table(lambdas, t, unit, p, q):
    return _gen(lambdas, t, unit, p, q, _BC_ROWS)


def aeppli_table(lambdas, t, unit, p, q):
    return _gen(lambdas, t, unit, p, q, _AEPPLI_ROWS)

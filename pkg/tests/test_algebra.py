import pytest

from abcmassey.algebra import (
    Element,
    block_basis,
    char_inv,
    char_mul,
    conj_mask,
    conjugate,
    from_mask,
    mask_bidegree,
    project_bidegree,
    to_mask,
    wedge,
    wedge_sign,
)
from abcmassey.linalg import kernel_basis, quotient_basis, rank, solve, span_equal
from abcmassey.scalar import I, ONE, ZERO, Scalar


# -- scalars --------------------------------------------------------------------

def test_scalar_field_ops():
    a = Scalar(1, 2)
    b = Scalar("1/3", -1)
    assert a * a.inverse() == ONE
    assert (a + b) - b == a
    assert a.conjugate() == Scalar(1, -2)
    assert I * I == Scalar(-1)
    assert a.norm2() == 5
    assert not ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


@pytest.mark.parametrize("text,val", [
    ("3/2", Scalar("3/2")),
    ("-i", Scalar(0, -1)),
    ("1/2+3/4i", Scalar("1/2", "3/4")),
    ("-2-i", Scalar(-2, -1)),
])
def test_scalar_parse(text, val):
    assert Scalar.parse(text) == val


def test_scalar_json_roundtrip():
    s = Scalar("-5/7", "2/3")
    assert Scalar.from_json(s.to_json()) == s
    assert s.to_json() == [-5, 7, 2, 3]


# -- monomials and signs ----------------------------------------------------------

def test_mask_roundtrip():
    n = 4
    mk = to_mask((3, 1), (2,), n)
    mono = from_mask(mk, n)
    assert mono.holo == (1, 3) and mono.anti == (2,)
    assert mask_bidegree(mk, n) == (2, 1)


def test_wedge_sign_counts_transpositions():
    # e2 ^ e1 = - e1 ^ e2
    assert wedge_sign(0b10, 0b01) == -1
    assert wedge_sign(0b01, 0b10) == 1
    assert wedge_sign(0b001, 0b110) == 1
    assert wedge_sign(0b100, 0b011) == 1


def test_block_basis_sizes():
    assert len(block_basis(6, 1, 1)) == 36
    assert len(block_basis(6, 2, 2)) == 225
    assert len(block_basis(3, 0, 0)) == 1
    assert list(block_basis(3, 1, 0)) == sorted(block_basis(3, 1, 0))


# -- worked examples -------------------------------------------------------------

def _m(n, holo=(), anti=(), c=1, chi=None, r=0):
    return Element.monomial(n, holo, anti, c, chi, r)


def test_wedge_repeated_index_vanishes():
    p1 = _m(3, (1,))
    assert not wedge(p1, p1)


def test_wedge_graded_anticommutative_degree_one():
    a, b = _m(3, (1,)), _m(3, (), (1,))
    assert wedge(a, b) == -wedge(b, a)


def test_wedge_character_squares():
    x = _m(3, (1,), (), 1, (1,), 1)
    y = _m(3, (), (2,), 1, (1,), 1)
    assert wedge(x, y) == _m(3, (1,), (2,), 1, (2,), 1)


def test_conjugate_swaps_and_reorders():
    a = _m(3, (1,), (2,))
    # conj(phi1 ^ phibar2) = phibar1 ^ phi2 = - phi2 ^ phibar1
    assert conjugate(a) == _m(3, (2,), (1,), -1)


def test_conjugate_inverts_character():
    f = Element.constant(3, 1, 1, (3,))
    assert conjugate(f) == Element.constant(3, 1, 1, (-3,))
    assert conjugate(Element.constant(3, 1, Scalar(2, 5), (1,))) == Element.constant(3, 1, Scalar(2, -5), (-1,))


def test_conj_mask_involution():
    n = 3
    for mk in range(1 << (2 * n)):
        m2, s = conj_mask(mk, n)
        m3, s2 = conj_mask(m2, n)
        assert m3 == mk and s * s2 == 1


def test_project_term_filter():
    a = _m(3, (1,)) + _m(3, (), (1,))
    assert project_bidegree(a, 1, 0) == _m(3, (1,))
    assert project_bidegree(a, 0, 2) == Element.zero(3)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(_m(3, (1,)), _m(4, (1,)))


def test_character_helpers():
    a, b = (1, -2), (3, 5)
    assert char_mul(a, b) == (4, 3)
    assert char_mul(a, char_inv(a)) == (0, 0)


def test_format():
    a = _m(3, (1,), (2,), -1) + _m(3, (2,), (), "1/2")
    s = a.format(["phi1", "phi2", "phi3"])
    assert "phi1^phibar2" in s and "1/2" in s


# -- exact linear algebra -------------------------------------------------------

def _dense_rank(rows):
    """Straight-line Gauss-Jordan elimination over Fractions."""
    from fractions import Fraction
    a = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    ncol = len(a[0]) if a else 0
    for c in range(ncol):
        piv = next((i for i in range(rk, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        for i in range(len(a)):
            if i != rk and a[i][c]:
                f = a[i][c] / a[rk][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        rk += 1
    return rk


def _as_dict(row):
    return {k: Scalar(v) for k, v in enumerate(row) if v}


def test_rank_against_dense(rng):
    for _ in range(40):
        rows = [[rng.randint(-2, 2) for _ in range(6)] for _ in range(rng.randint(1, 7))]
        assert rank([_as_dict(r) for r in rows]) == _dense_rank(rows)


def test_kernel_basis_is_kernel(rng):
    for _ in range(30):
        ncols = rng.randint(1, 6)
        cols = [_as_dict([rng.randint(-1, 1) for _ in range(5)]) for _ in range(ncols)]
        ker = kernel_basis(cols, ncols)
        assert len(ker) == ncols - rank(cols)
        for v in ker:
            acc = {}
            for j, c in v.items():
                for i, x in cols[j].items():
                    acc[i] = acc.get(i, ZERO) + c * x
            assert not any(acc.values())


def test_solve_and_quotient():
    cols = [_as_dict([1, 0, 1]), _as_dict([0, 1, 1])]
    ok, x = solve(cols, _as_dict([2, 3, 5]))
    assert ok and x[0] == Scalar(2) and x[1] == Scalar(3)
    ok, ell = solve(cols, _as_dict([1, 0, 0]))
    assert not ok
    assert all(not sum((ell.get(i, ZERO) * v for i, v in c.items()), ZERO) for c in cols)
    assert ell.get(0, ZERO)
    cyc = [_as_dict([1, 0, 0]), _as_dict([0, 1, 0]), _as_dict([1, 1, 0])]
    assert quotient_basis(cyc, [_as_dict([1, 0, 0])]) == [1]
    assert span_equal([_as_dict([1, 1])], [_as_dict([2, 2])])

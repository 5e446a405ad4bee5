import copy
from fractions import Fraction

import pytest

from abcmassey.algebra import Element, block_basis, conjugate
from abcmassey.families import NakamuraParams, bigalke_rollenske, complex_torus, nakamura
from abcmassey.model import (
    DlogNotClosed,
    NonUnitaryCharacter,
    NotClosedSquare,
    NotIntegrable,
    NotUnimodular,
    ParseError,
    check_nilpotent_J,
    differential,
    dumps,
    load_model,
    model_to_spec,
    operator_block,
    operator_matrix,
)
from abcmassey.scalar import Scalar


def _term(c, holo=(), anti=()):
    return {"coeff": [c, 1, 0, 1], "holo": list(holo), "anti": list(anti)}


def _tiny(structure, characters=(), n=2):
    return {"schema": 1, "name": "tiny", "n": n, "coframe": [f"phi{k + 1}" for k in range(n)],
            "characters": list(characters), "structure": structure, "metric": [[1, 1]] * n}


def test_br2_structure(br2):
    m = br2
    for k in range(1, 5):
        assert not m.d(m.phi(k))
    assert m.d(m.phi(5)) == m.monomial((4,), (2,))
    assert m.d(m.phi(6)) == m.monomial((1, 3)) + m.monomial((2,), (4,))


def test_project_of_dphi5(br2):
    d5 = br2.d(br2.phi(5))
    assert d5.project(1, 1) == br2.monomial((4,), (2,))
    assert not d5.project(2, 0)


def test_not_integrable():
    spec = _tiny([{"target": "phi1", "terms": [_term(1, (), (1, 2))]}])
    with pytest.raises(NotIntegrable):
        load_model(spec)


def test_not_closed_square():
    # d phi3 = phi1 ^ phi2 with d phi1 = phi1 ^ phi3 gives d^2 phi3 != 0
    spec = _tiny([{"target": "phi1", "terms": [_term(1, (1, 3))]},
                  {"target": "phi3", "terms": [_term(1, (1, 2))]}], n=3)
    with pytest.raises((NotClosedSquare, NotUnimodular)):
        load_model(spec)


def test_not_unimodular():
    # d phi2 = phi1 ^ phi2 and its conjugate: trace is nonzero
    spec = _tiny([{"target": "phi2", "terms": [_term(1, (1, 2))]}])
    with pytest.raises(NotUnimodular):
        load_model(spec)


def test_dlog_not_closed():
    # d phi2 = i phi1 ^ phibar1, so d(i (phi2 + phibar2)) = -2 phi1 ^ phibar1
    spec = _tiny([{"target": "phi2", "terms": [{"coeff": [0, 1, 1, 1], "holo": [1], "anti": [1]}]}],
                 [{"label": "g", "weight": [1, 1],
                   "dlog": [{"coeff": [0, 1, 1, 1], "holo": [2], "anti": []},
                            {"coeff": [0, 1, 1, 1], "holo": [], "anti": [2]}]}])
    with pytest.raises(DlogNotClosed):
        load_model(spec)


def test_non_unitary_character():
    spec = _tiny([], [{"label": "g", "weight": [1, 1], "dlog": [_term(1, (1,))]}])
    with pytest.raises(NonUnitaryCharacter):
        load_model(spec)


def test_parse_errors():
    with pytest.raises(ParseError):
        load_model("{not json")
    spec = _tiny([{"target": "phi9", "terms": []}])
    with pytest.raises(ParseError):
        load_model(spec)


def test_rejection_leaves_nothing():
    spec = bigalke_rollenske(2)
    bad = copy.deepcopy(spec)
    bad["structure"][0]["terms"].append(_term(1, (), (1, 2)))
    with pytest.raises(NotIntegrable):
        load_model(bad)
    assert load_model(spec).n == 6


def test_nakamura_structure(nak1):
    m = nak1
    half = Scalar("1/2")
    phi0 = m.phi(1) + m.phibar(1)
    assert m.d(m.phi(2)) == (phi0 ^ m.phi(2)).scale(-half)
    assert m.d(m.phi(3)) == (phi0 ^ m.phi(3)).scale(half)
    # delbar phi^1 = -1/2 lambda_1 phibar0 ^ phi1
    assert m.delbar(m.phi(2)) == (m.phibar(1) ^ m.phi(2)).scale(-half)


@pytest.mark.parametrize("c", [-2, -1, 1, 3])
def test_d_of_character(nak1, c):
    m = nak1
    f = m.one().times_character((c,))
    expected = (m.phi(1) - m.phibar(1)).times_character((c,)).scale(Fraction(-c, 2))
    assert differential(m, f, "d") == expected


def test_nilpotent(br2, br3, torus2, nak1):
    assert check_nilpotent_J(br2)
    assert check_nilpotent_J(br3)
    assert check_nilpotent_J(torus2)
    assert not check_nilpotent_J(nak1)


def test_operator_block_br_dimensions(br2):
    blk = operator_block(br2, "ddbar", br2.trivial_character, 1, 1)
    assert blk.shape == (225, 36)


def test_operator_block_agrees_with_differential(br2, nak1):
    for m in (br2, nak1):
        for chi in m.character_set:
            for kind in ("d", "del", "delbar", "ddbar"):
                blk = operator_block(m, kind, chi, 1, 1)
                for j, b in enumerate(blk.source_basis):
                    img = m.apply(kind, Element.from_mask(m.n, m.r, chi, b))
                    got = {(chi, blk.target_basis[i]): v for i, v in blk.columns[j].items()}
                    assert got == img.terms


def test_operator_composition_d_squared(br2, nak1, rng):
    for m in (br2, nak1):
        for _ in range(6):
            chi = rng.choice(m.character_set)
            p, q = rng.randint(0, m.n - 1), rng.randint(0, m.n - 1)
            first = operator_block(m, "d", chi, p, q)
            second = operator_matrix(m, "d", chi, first.target_basis)
            assert (second @ first).is_zero()
            dd = operator_block(m, "ddbar", chi, p, q)
            comp = operator_matrix(m, "del", chi, operator_block(m, "delbar", chi, p, q).target_basis) \
                @ operator_block(m, "delbar", chi, p, q)
            assert comp.to_dense() == dd.to_dense()


def _ddbar_11_by_hand(c):
    """ddbar(f_c phi1^phibar1) expanded by hand from the structure equations.

    With omega = phi1 ^ phibar1: del omega = -phi0 ^ omega, delbar omega =
    -phibar0 ^ omega, del f = -c/2 f phi0, delbar f = c/2 f phibar0. Then
    delbar(f omega) = (c/2 - 1) f phibar0 ^ omega and
    del of that = (c/2 - 1)(-c/2 - 1) f phi0 ^ phibar0 ^ omega.
    """
    return Scalar(Fraction(c - 2, 2) * Fraction(-c - 2, 2))


@pytest.mark.parametrize("c", [-3, -2, -1, 0, 1, 2, 3])
def test_nakamura_ddbar_column_derived(nak1, c):
    m = nak1
    blk = operator_block(m, "ddbar", (c,), 1, 1)
    b = m.monomial((2,), (2,)).terms
    (_, mask), = b
    j = blk.source_basis.index(mask)
    col = {blk.target_basis[i]: v for i, v in blk.columns[j].items()}
    omega = m.monomial((2,), (2,))
    expected = (m.phi(1) ^ m.phibar(1) ^ omega).scale(_ddbar_11_by_hand(c))
    assert col == {mk: v for (_, mk), v in expected.terms.items()}
    # entries depend on c only through c^2
    neg = operator_block(m, "ddbar", (-c,), 1, 1).columns[j]
    assert neg == blk.columns[j]


def test_nakamura_ddbar_column_c2_vanishes(nak1):
    blk = operator_block(nak1, "ddbar", (2,), 1, 1)
    (_, mask), = nak1.monomial((2,), (2,)).terms
    assert blk.columns[blk.source_basis.index(mask)] == {}


def test_conjugation_commutes_with_d(nak1, rng):
    m = nak1
    for _ in range(20):
        chi = rng.choice(m.character_set)
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        basis = block_basis(m.n, p, q)
        a = Element.from_mask(m.n, m.r, chi, rng.choice(basis), Scalar(rng.randint(-3, 3), 1))
        assert conjugate(m.d(a)) == m.d(conjugate(a))
        assert conjugate(m.del_(a)) == m.delbar(conjugate(a))


def test_spec_roundtrip(br2, nak1, semi11):
    for m in (br2, nak1, semi11):
        spec = model_to_spec(m)
        m2 = load_model(spec)
        assert dumps(model_to_spec(m2)) == dumps(spec)
        for k in range(1, m.n + 1):
            assert m2.d(m2.phi(k)) == m.d(m.phi(k))


def test_torus_spec():
    m = load_model(complex_torus(3))
    assert all(not m.d(m.phi(k)) for k in range(1, 4))


def test_nakamura_spec_is_valid():
    spec, flags = nakamura(NakamuraParams([2, -1, -1], "1/2"))
    assert load_model(spec).n == 4

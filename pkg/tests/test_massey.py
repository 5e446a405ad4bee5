import pytest

from abcmassey.algebra import Element, block_basis, conjugate, wedge
from abcmassey.cohomology import MembershipWitness, NotMember, cycles_and_boundaries
from abcmassey.massey import (
    MasseyError,
    NotBottChernClosed,
    evaluate_product,
    indeterminacy_subspace,
    pairing_certificate,
    triple_abc_massey,
)
from abcmassey.scalar import Scalar


def br_inputs(m, n):
    a12 = m.monomial((n,), (n,))
    a23 = m.monomial((2 * n,), (2 * n,))
    return a12, a23, a23


def nakamura_inputs(m):
    # I = {1}, J = {}, c = 1, T = {2}
    a12 = m.monomial((1, 2), (), 1, (1,))
    a23 = m.monomial((), (1, 2), 1, (-1,))
    a34 = m.monomial((), (1, 3), 1, (1,))
    return a12, a23, a34


def semidirect_inputs(m, lam=1):
    sigma = m.phi(1) + m.phi(2)
    sbar = conjugate(sigma)
    a12 = wedge(sigma, m.phi(4)).times_character((0, 1))
    a23 = wedge(sbar, m.phibar(3)).times_character((-1, 0)).scale(-Scalar(lam) * lam)
    a34 = wedge(sbar, m.phibar(4)).times_character((0, -1))
    return a12, a23, a34


@pytest.fixture(scope="module")
def br_result(br2, ctx_br2):
    return triple_abc_massey(br2, ctx_br2, *br_inputs(br2, 2))


@pytest.fixture(scope="module")
def nak_result(nak1, ctx_nak1):
    return triple_abc_massey(nak1, ctx_nak1, *nakamura_inputs(nak1))


@pytest.fixture(scope="module")
def semi_result(semi11, ctx_semi11):
    return triple_abc_massey(semi11, ctx_semi11, *semidirect_inputs(semi11))


def test_br_non_vanishing(br2, br_result):
    r = br_result
    assert r.verdict == "non_vanishing"
    expected = wedge(wedge(wedge(br2.phi(5), br2.phibar(5)), br2.phi(4)), br2.phibar(4)).scale(-1)
    assert r.representative in (expected, -expected)
    assert r.rep_bidegree == (2, 2)
    assert isinstance(r.certificate, NotMember) and r.certificate.check(br2)


def test_primitive_relations(br2, br_result, nak1, nak_result, semi11, semi_result):
    for m, r in ((br2, br_result), (nak1, nak_result), (semi11, semi_result)):
        a12, a23, a34 = r.inputs
        (p, q), (s1, s2), _ = r.bidegrees
        assert m.ddbar(r.f13) == wedge(a12, a23).scale((-1) ** (p + q))
        assert m.ddbar(r.f24) == wedge(a23, a34).scale((-1) ** (s1 + s2))
        rep = wedge(a12, r.f24).scale((-1) ** (p + q)) - wedge(r.f13, a34).scale((-1) ** (s1 + s2))
        assert rep == r.representative


def test_nakamura_non_vanishing(nak1, nak_result):
    r = nak_result
    assert r.verdict == "non_vanishing"
    # -f phi^{1} ^ phibar^{0 1 2}
    assert r.representative == nak1.monomial((2,), (1, 2, 3), -1, (1,))
    assert r.certificate.check(nak1)


def test_semidirect_non_vanishing(semi11, semi_result):
    r = semi_result
    m = semi11
    sbar = conjugate(m.phi(1) + m.phi(2))
    expected = wedge(sbar, m.monomial((4,), (3, 4))).times_character((-1, 0))
    assert r.verdict == "non_vanishing"
    assert r.representative == expected


def test_undefined_when_cup_product_nonzero(br2, ctx_br2):
    r = triple_abc_massey(br2, ctx_br2, br2.phi(1), br2.phi(3), br2.phi(1))
    assert r.verdict == "undefined"
    assert r.obstruction == wedge(br2.phi(1), br2.phi(3)).scale(-1)
    assert isinstance(r.certificate, NotMember) and r.certificate.check(br2)


def test_input_errors(br2, ctx_br2):
    with pytest.raises(NotBottChernClosed):
        triple_abc_massey(br2, ctx_br2, br2.phi(5), br2.phi(1), br2.phi(1))
    with pytest.raises(MasseyError):
        triple_abc_massey(br2, ctx_br2, br2.zero(), br2.phi(1), br2.phi(1))


def test_indeterminacy_br(br2, br_result):
    ind = br_result.indeterminacy
    assert ind.left_bidegree == (1, 1) and ind.right_bidegree == (1, 1)
    assert all(g.bidegree == (2, 2) for g in ind.generators)
    assert all(not br2.ddbar(h) for h in ind.left_classes + ind.right_classes)


def test_indeterminacy_semidirect_one_summand(semi_result):
    ind = semi_result.indeterminacy
    # a12 is (2,0), a23 (0,2), a34 (0,2): a12 u H_A^{-1,3} is empty
    assert ind.left_classes == []
    assert ind.right_bidegree == (1, 1) and ind.right_classes


def test_indeterminacy_zero_a12(br2):
    a34 = br2.monomial((4,), (4,))
    ind = indeterminacy_subspace(br2, br2.zero(), a34, middle=(1, 1))
    assert ind.left_classes == [] and ind.right_classes
    with pytest.raises(MasseyError):
        indeterminacy_subspace(br2, br2.zero(), a34)


def _ddbar_kernel(m, chi, p, q):
    cyc, _ = cycles_and_boundaries(m, "aeppli", chi, p, q)
    basis = block_basis(m.n, p, q)
    return [Element(m.n, m.r, {(chi, basis[i]): c for i, c in v.items()}) for v in cyc]


@pytest.mark.parametrize("case", ["br", "nak", "semi"])
def test_verdict_invariant_under_primitive_shifts(request, case, rng):
    m = request.getfixturevalue({"br": "br2", "nak": "nak1", "semi": "semi11"}[case])
    r = request.getfixturevalue(f"{case}_result")
    a12, a23, a34 = r.inputs
    (p, q), (s1, s2), (u, v) = r.bidegrees
    chars13 = sorted(r.f13.characters() | wedge(a12, a23).characters()) or [m.trivial_character]
    chars24 = sorted(r.f24.characters() | wedge(a23, a34).characters()) or [m.trivial_character]
    k13 = [k for chi in chars13 for k in _ddbar_kernel(m, chi, p + s1 - 1, q + s2 - 1)]
    k24 = [k for chi in chars24 for k in _ddbar_kernel(m, chi, s1 + u - 1, s2 + v - 1)]
    for _ in range(4):
        f13, f24 = r.f13, r.f24
        for k in rng.sample(k13, min(3, len(k13))):
            f13 = f13 + k.scale(rng.randint(-3, 3))
        for k in rng.sample(k24, min(3, len(k24))):
            f24 = f24 + k.scale(rng.randint(-3, 3))
        assert m.ddbar(f13) == m.ddbar(r.f13) and m.ddbar(f24) == m.ddbar(r.f24)
        rep, ind, res = evaluate_product(m, a12, a23, a34, f13, f24)
        assert isinstance(res, NotMember)
        assert res.check(m)


def test_pairing_br(br2, ctx_br2, br_result):
    pc = pairing_certificate(br2, ctx_br2, br_result)
    assert pc.applicable and pc.C == Scalar(1)
    assert pc.exact_terms_vanish
    assert {g["status"] for g in pc.generator_pairings} <= {"pointwise_zero", "character_orthogonal"}


def test_pairing_nakamura_character_orthogonal(nak1, ctx_nak1, nak_result):
    pc = pairing_certificate(nak1, ctx_nak1, nak_result)
    assert pc.applicable
    statuses = {g["status"] for g in pc.generator_pairings}
    assert "character_orthogonal" in statuses and "nonzero" not in statuses
    assert set(pc.orthogonal_characters) == {(2,), (-2,)}


def test_pairing_agrees_with_membership(semi11, ctx_semi11, semi_result):
    pc = pairing_certificate(semi11, ctx_semi11, semi_result)
    assert pc.applicable == (semi_result.verdict == "non_vanishing")


def test_pairing_zero_representative_errors(br2, ctx_br2, br_result):
    import dataclasses
    zero = dataclasses.replace(br_result, representative=br2.zero())
    with pytest.raises(MasseyError):
        pairing_certificate(br2, ctx_br2, zero)


def test_vanishing_product_on_torus(torus2):
    from abcmassey.hodge import MetricContext
    m = torus2
    r = triple_abc_massey(m, MetricContext(m), m.phi(1), m.phi(1), m.phi(1))
    assert r.verdict == "vanishes"
    assert isinstance(r.certificate, MembershipWitness)


def test_hypotheses_recorded(br_result, nak_result):
    assert "nilpotent" in br_result.hypotheses[0]
    assert "character-enlarged" in nak_result.hypotheses[0]

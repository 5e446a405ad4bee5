"""Astheno-Kähler obstructions and the invariant canonical-section report.

An astheno-Kähler metric has ``ddbar omega^{N-2} = 0``. If a simple (2,0)-form
beta has ``beta ^ conj(beta) = ddbar eta / scale`` then integrating
``omega^{N-2} ^ beta ^ conj(beta)`` is positive by transversality and zero by
Stokes, so no such metric exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence


from .algebra import Element, conjugate, wedge
from .cohomology import MembershipWitness, OpSpan, Span, solve_membership
from .model import ManifoldModel
from .scalar import Scalar


class PoolError(ValueError):
    pass


@dataclass
class AsthenoCertificate:
    """``ddbar(eta) = scale * beta ^ conj(beta)`` with beta simple of type (2,0)."""

    beta: Element
    eta: Element
    scale: Scalar
    factors: tuple = ()
    labels: tuple = ()


def is_decomposable_20(m: ManifoldModel, beta: Element) -> bool:
    """A nonzero 2-form is simple iff beta ^ beta = 0 (its coefficient matrix has rank 2).

    This form of the rank test needs no elimination, so verifiers can call it.
    """
    if not beta or beta.bidegrees() != {(2, 0)} or len(beta.characters()) != 1:
        return False
    return not wedge(beta, beta)


def certificate_problems(m: ManifoldModel, cert: AsthenoCertificate) -> list[str]:
    """Every reason the certificate fails; empty when it is valid."""
    out = []
    beta = cert.beta
    scale = Scalar.coerce(cert.scale)
    if not beta:
        out.append("ZeroBeta")
    elif beta.bidegrees() != {(2, 0)}:
        out.append("BetaNotType20")
    elif not is_decomposable_20(m, beta):
        out.append("NotDecomposable")
    if not scale or not scale.is_real():
        out.append("ScaleNotRealNonzero")
    bb = wedge(beta, conjugate(beta))
    if bb and bb.characters() != {m.trivial_character}:
        out.append("NontrivialCharacter")
    if cert.eta and cert.eta.bidegrees() != {(1, 1)}:
        out.append("EtaNotType11")
    if m.ddbar(cert.eta) != bb.scale(scale):
        out.append("EquationFails")
    return out


def verify_astheno_certificate(m: ManifoldModel, cert: AsthenoCertificate) -> bool:
    return not certificate_problems(m, cert)


def default_pool(m: ManifoldModel) -> list[tuple[str, Element]]:
    return [(lab, m.phi(k + 1)) for k, lab in enumerate(m.coframe)]


def astheno_obstruction_scan(m: ManifoldModel, pool: Sequence | None = None,
                             extra: Sequence = ()) -> list[AsthenoCertificate]:
    """Exhaustive scan over pairs from the pool.

    The pool is ``extra`` followed by ``pool`` (the coframe when ``None``).
    Entries are Elements or ``(label, Element)`` pairs of type (1,0); a pair
    ``(theta_i, theta_j)`` with ``i < j`` gives ``beta = theta_i ^ theta_j``.
    """
    items = []
    for k, e in enumerate(list(extra) + list(pool or [])):
        items.append(e if isinstance(e, tuple) else (f"theta{k + 1}", e))
    if pool is None:
        items.extend(default_pool(m))
    for lab, e in items:
        if not e or e.bidegrees() != {(1, 0)}:
            raise PoolError(f"pool element {lab} is not a nonzero (1,0)-form")
    triv = m.trivial_character
    out = []
    for (l1, t1), (l2, t2) in combinations(items, 2):
        beta = wedge(t1, t2)
        if not beta or not is_decomposable_20(m, beta):
            continue
        bb = wedge(beta, conjugate(beta))
        if not bb or bb.characters() != {triv}:
            continue
        res = solve_membership(m, bb, Span([OpSpan("ddbar", (1, 1), [triv])]))
        if isinstance(res, MembershipWitness):
            eta = res.preimages.get("ddbar", m.zero())
            out.append(AsthenoCertificate(beta, eta, Scalar(1), (t1, t2), (l1, l2)))
    return out


def proof_sketch(m: ManifoldModel, cert: AsthenoCertificate) -> str:
    N = m.n
    b = m.format(cert.beta)
    scale = Scalar.coerce(cert.scale)
    factor = "" if scale == Scalar(1) else f"({scale})^-1 "
    return (f"Let beta = {b}, simple of type (2,0). Then beta ^ conj(beta) = "
            f"{factor}ddbar({m.format(cert.eta)}). For an astheno-Kahler metric, "
            f"omega^{N - 2} is transverse, so the integral of omega^{N - 2} ^ beta ^ conj(beta) "
            f"is positive; integrating by parts twice (model-Stokes) turns it into the integral "
            f"of ddbar(omega^{N - 2}) ^ eta / scale = 0, a contradiction.")


# -- canonical bundle ---------------------------------------------------------------

def canonical_section_check(m: ManifoldModel) -> dict:
    """dbar of the invariant (N,0) coframe monomial and the plurigenera it implies."""
    top = m.monomial(tuple(range(1, m.n + 1)), ())
    dbar = m.delbar(top)
    if not dbar:
        return {
            "holomorphic": True,
            "dbar_top_form": m.format(dbar),
            "plurigenera": "P_r = 1 for all r >= 1 (invariant sections)",
            "kodaira_dimension": 0,
            "scope": "invariant-section level",
        }
    return {
        "holomorphic": False,
        "dbar_top_form": m.format(dbar),
        "obstruction": dbar,
        "plurigenera": None,
        "kodaira_dimension": None,
        "scope": "invariant-section level",
    }

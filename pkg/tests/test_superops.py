import random

import pytest
from hypothesis import given, settings

from kvnlab.errors import ConfigurationError
from kvnlab.model import corpus, model
from kvnlab.poly import Poly, poisson, variables
from kvnlab.scalar import I, Scalar
from kvnlab.superops import (
    DEFAULT_ADJOINT_RULES,
    OperatorMonomial,
    OperatorSum,
    adjoint,
    anticommutator,
    bracket,
    charges,
    commutator,
    compose,
    is_hermitian,
    lie_derivative,
    liouvillian,
    verify_charge_algebra,
)
from kvnlab.superspace import Fields

from strategies import operators

D = 2
phi = lambda a: OperatorSum.phi(D, a)  # noqa: E731
lam = lambda a: OperatorSum.lam(D, a)  # noqa: E731
c = lambda a: OperatorSum.c(D, a)  # noqa: E731
cbar = lambda a: OperatorSum.cbar(D, a)  # noqa: E731
one = OperatorSum.identity(D)


# ---------------------------------------------------------------------------
# oracle: the operators acting on wavefunctions psi(phi, c), with
# lam = -i d/dphi, c = left multiplication, cbar = left Grassmann derivative

F = Fields(1)


def act(op: OperatorSum, psi):
    out = F.zero()
    for m, coef in op.terms.items():
        v = psi
        for a in range(D):
            for _ in range(m.lam[a]):
                v = v.diff(("phi", a, 0)) * (-I)
        for a in reversed(range(D)):
            if m.cbar >> a & 1:
                v = v.gderiv(F.registry.find("ghost", a, 0))
        for a in reversed(range(D)):
            if m.c >> a & 1:
                v = F.c(a) * v
        for a in range(D):
            for _ in range(m.phi[a]):
                v = F.phi(a) * v
        out = out + v * coef
    return out


def _states():
    q, p = F.phi(0), F.phi(1)
    return [
        q**3 * p**2 + p,
        q * F.c(0) + p**2 * F.c(1) * 3,
        q**2 * F.c(0) * F.c(1) + F.const(1),
    ]


STATES = _states()


@given(operators(), operators())
def test_compose_is_operator_product(A, B):
    for psi in STATES:
        assert act(compose(A, B), psi) == act(A, act(B, psi))


@given(operators(max_terms=2), operators(max_terms=2), operators(max_terms=2))
@settings(max_examples=20)
def test_compose_associative(A, B, C):
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


@given(operators())
def test_normal_form_idempotent(A):
    assert OperatorSum(A.dim, dict(A.monomials())) == A
    assert compose(A, one) == A == compose(one, A)


@given(operators(), operators())
def test_bracket_symmetries(A, B):
    assert commutator(A, B) == -commutator(B, A)
    assert anticommutator(A, B) == anticommutator(B, A)


def test_canonical_relations():
    assert compose(lam(0), phi(0)) == phi(0) * lam(0) - I
    assert compose(cbar(0), c(0)) == one - c(0) * cbar(0)
    assert bracket(phi(0), phi(1)).is_zero()
    assert bracket(phi(0), lam(0)) == OperatorSum.scalar(D, I)
    assert bracket(phi(0), lam(1)).is_zero()
    assert bracket(lam(0), lam(1)).is_zero()
    assert bracket(c(0), cbar(0), graded=True) == one
    assert bracket(c(0), c(0), graded=True).is_zero()


def test_graded_bracket_picks_anticommutator_for_odd_pairs():
    assert bracket(c(0), cbar(1), graded=True) == anticommutator(c(0), cbar(1))
    assert bracket(c(0), phi(0), graded=True) == commutator(c(0), phi(0))


def test_liouvillian_examples():
    m = corpus()["harmonic"]
    assert liouvillian(m) == phi(1) * lam(0) - phi(0) * lam(1)
    assert liouvillian(model(1, 0)).is_zero()
    assert liouvillian(model(1, lambda q, p: q)) == -lam(1)


def test_lie_derivative_examples():
    assert lie_derivative(model(1, lambda q, p: q)) == -lam(1)
    ho = lie_derivative(corpus()["harmonic"])
    expected = phi(1) * lam(0) - phi(0) * lam(1) + (compose(cbar(0), c(1)) - compose(cbar(1), c(0))) * I
    assert ho == expected


def test_charges_examples():
    Q = charges(model(1, 0))
    assert Q.Q_BRS == (compose(c(0), lam(0)) + compose(c(1), lam(1))) * I
    assert Q.Q_H == Q.Q_BRS
    Qh = charges(model(1, lambda q, p: q))
    assert Qh.Qbar_H == (compose(cbar(0), lam(1)) - compose(cbar(1), lam(0))) * I - cbar(1)


@pytest.mark.parametrize("name", sorted(corpus()))
def test_charge_algebra_closes(name):
    report = verify_charge_algebra(corpus()[name])
    assert len(report.checks) == 11
    assert report.passed, report.failures()
    assert all(chk.residual == "0" for chk in report.checks)


def test_charge_algebra_trivial_hamiltonian():
    assert verify_charge_algebra(model(1, 0)).passed


def test_closure_for_cubic_by_hand():
    # brute force: expand Q_H Qbar_H + Qbar_H Q_H monomial by monomial
    m = model(1, lambda q, p: q**3)
    Q = charges(m)
    total = OperatorSum(D)
    for ma, ca in Q.Q_H.terms.items():
        for mb, cb in Q.Qbar_H.terms.items():
            a = OperatorSum(D, {ma: ca})
            b = OperatorSum(D, {mb: cb})
            total = total + compose(a, b) + compose(b, a)
    assert total == lie_derivative(m) * Scalar(0, 2)


def _random_poly(rng, deg=4):
    terms = {}
    for _ in range(rng.randint(1, 5)):
        i = rng.randint(0, deg)
        j = rng.randint(0, deg - i)
        terms[(i, j)] = Scalar(rng.randint(-5, 5), 0) / rng.randint(1, 4)
    return Poly(2, terms)


def test_poisson_correspondence_randomized():
    rng = random.Random(2024)
    for _ in range(20):
        H, O = _random_poly(rng), _random_poly(rng)
        lhs = bracket(liouvillian(model(1, H)), OperatorSum.mult(O))
        assert lhs == OperatorSum.mult(poisson(H, O)) * I


def test_poisson_sign_anchor():
    q, p = variables(1)
    lhs = bracket(liouvillian(model(1, p * p / 2)), OperatorSum.mult(q))
    assert lhs == phi(1) * (-I)


def test_adjoint_examples():
    assert adjoint(phi(0)) == phi(0)
    assert adjoint(lam(0) * I) == lam(0) * (-I)
    assert adjoint(compose(phi(0), lam(0))) == compose(phi(0), lam(0)) - I
    assert is_hermitian(phi(0)) and is_hermitian(lam(0))
    assert not is_hermitian(compose(phi(0), lam(0)))


@given(operators(), operators())
def test_adjoint_is_antilinear_anti_automorphism(A, B):
    assert adjoint(adjoint(A)) == A
    assert adjoint(compose(A, B)) == compose(adjoint(B), adjoint(A))
    assert adjoint(A * I) == adjoint(A) * (-I)


@pytest.mark.parametrize("name", sorted(corpus()))
def test_liouvillian_hermitian(name):
    assert is_hermitian(liouvillian(corpus()[name]))


def test_adjoint_rule_table_validation():
    rules = dict(DEFAULT_ADJOINT_RULES)
    del rules["c"]
    with pytest.raises(ConfigurationError):
        adjoint(c(0), rules)
    with pytest.raises(ConfigurationError):
        adjoint(c(0), {**DEFAULT_ADJOINT_RULES, "c": "bogus"})


def test_ghost_sector_and_parity():
    H = lie_derivative(corpus()["quartic"])
    assert H.parity() == 0
    assert H.ghost_sector(0, 0) == liouvillian(corpus()["quartic"])
    assert c(0).parity() == 1
    assert (c(0) + phi(0)).parity() is None


def test_rendering():
    assert str(compose(lam(0), phi(0))) == "-i + q_1*lam_q_1"
    assert OperatorMonomial((1, 0), 0b10, 0b01, (0, 2)).render() == ["q_1", "c_p_1", "cbar_q_1", "lam_p_1^2"]

import itertools
import random

import pytest
import sympy

from kvnlab.errors import UnsupportedInputError
from kvnlab.model import corpus, model
from kvnlab.poly import Poly, variables
from kvnlab.scalar import I, Scalar
from kvnlab.superfield import (
    THETA_SECTORS,
    berezin_reduce,
    build_superfield,
    check_action_identity,
    check_berezin_identity,
    classical_image,
    evaluate_on_superfield,
    superfield_eom,
    taylor_shift,
    total_derivative_test,
    variational_derivatives,
)
from kvnlab.superops import lie_derivative
from kvnlab.superspace import Fields

HO = corpus()["harmonic"]


@pytest.fixture
def f():
    return Fields(1)


def test_superfield_components_n1(f):
    Phi = build_superfield(HO, f)
    q, p = f.phi(0), f.phi(1)
    th, tb = f.theta, f.thetabar
    assert Phi[0] == q + th * f.c(0) + tb * f.cbar(1) + tb * th * f.lam(1) * I
    assert Phi[1] == p + th * f.c(1) - tb * f.cbar(0) - tb * th * f.lam(0) * I
    for a in range(2):
        assert Phi[a].theta_component("") == f.phi(a)
        assert Phi[a].theta_component("theta") == f.c(a)


def test_evaluate_identity_and_constant(f):
    Phi = build_superfield(HO, f)
    q, p = variables(1)
    assert evaluate_on_superfield(q, Phi) == Phi[0]
    assert evaluate_on_superfield(Poly.const(2, 7), Phi) == f.const(7)


def test_oscillator_expansion(f):
    Phi = build_superfield(HO, f)
    q, p = f.phi(0), f.phi(1)
    cq, cp, bq, bp = f.c(0), f.c(1), f.cbar(0), f.cbar(1)
    lq, lp = f.lam(0), f.lam(1)
    th, tb = f.theta, f.thetabar
    expected = (
        (q * q + p * p) * Scalar("1/2")
        + th * (q * cq + p * cp)
        + tb * (q * bp - p * bq)
        + tb * th * ((q * lp - p * lq) * I + cq * bp - cp * bq)
    )
    assert evaluate_on_superfield(HO.H, Phi) == expected


@pytest.mark.parametrize("name", sorted(corpus()))
def test_taylor_truncation_is_exact(name):
    m = corpus()[name]
    f = Fields(m.n)
    Phi = build_superfield(m, f)
    shifts = {("phi", a, 0): n for a, n in enumerate(Phi.nilpotent_parts())}
    assert taylor_shift(f.poly(m.H), shifts, 2) == taylor_shift(f.poly(m.H), shifts, 6)


def test_berezin_reduce_examples(f):
    assert berezin_reduce(Poly.var(2, 0), HO, f) == -f.lam(1)
    assert berezin_reduce(Poly(2), HO, f).is_zero()
    expected = f.lam(0) * f.phi(1) - f.lam(1) * f.phi(0) + (f.cbar(0) * f.c(1) - f.cbar(1) * f.c(0)) * I
    assert berezin_reduce(HO.H, HO, f) == expected


@pytest.mark.parametrize("name", sorted(corpus()))
def test_berezin_identity_corpus(name):
    m = corpus()[name]
    assert check_berezin_identity(m).passed
    f = Fields(m.n)
    assert berezin_reduce(m.H, m, f) == classical_image(lie_derivative(m), f)


def test_total_derivative_examples(f):
    q, p = f.phi(0), f.phi(1)
    assert total_derivative_test(f.phi(0, 1) * p + q * f.phi(1, 1), f)
    assert not total_derivative_test(f.lam(0) * f.phi(0, 1), f)
    assert total_derivative_test(f.zero(), f)
    ghost = (f.cbar(0) * f.c(0)).time_derivative()
    assert total_derivative_test(ghost, f)


def test_total_derivative_rejects_second_jets(f):
    with pytest.raises(UnsupportedInputError):
        variational_derivatives(f.phi(0, 2), f)


def test_euler_operator_value(f):
    ev = variational_derivatives(f.lam(0) * f.phi(0, 1), f)
    assert ev["q_1"] == -f.lam(0, 1)


# ---------------------------------------------------------------------------
# brute-force ansatz oracle: D is exact iff D = d/dt P for some polynomial P
# with exponents at most 2 in each of (q, p, lam_q, lam_p); decided by exact linear algebra


def _jet_monomial(f, exp):
    syms = [f.phi(0), f.phi(1), f.lam(0), f.lam(1)]
    out = f.const(1)
    for s, k in zip(syms, exp):
        if k:
            out = out * s**k
    return out


def _ansatz_exact(D, f, max_exp=2) -> bool:
    box = itertools.product(range(max_exp + 1), repeat=4)
    basis = [_jet_monomial(f, e).time_derivative() for e in box if sum(e) > 0]
    keys = sorted({k for b in basis for k in b.terms} | set(D.terms), key=repr)
    A = sympy.Matrix([[_sym(b.terms.get(k)) for b in basis] for k in keys])
    rhs = sympy.Matrix([_sym(D.terms.get(k)) for k in keys])
    return A.rank() == A.row_join(rhs).rank()


def _sym(x):
    if x is None:
        return sympy.Integer(0)
    return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(x.im.numerator, x.im.denominator)


def test_total_derivative_agrees_with_ansatz_solver():
    f = Fields(1)
    fields = [("phi", 0), ("phi", 1), ("lam", 0), ("lam", 1)]
    rng = random.Random(7)
    exact_seen = nonexact_seen = 0
    for trial in range(24):
        D = f.zero()
        if trial % 2 == 0:
            # d/dt of a random polynomial, possibly plus a perturbation
            for _ in range(3):
                e = tuple(rng.randint(0, 2) for _ in range(4))
                D = D + _jet_monomial(f, e).time_derivative() * rng.randint(-3, 3)
        for _ in range(rng.randint(0, 2)):
            e = tuple(rng.randint(0, 1) for _ in range(4))
            kind, a = rng.choice(fields)
            dot = f.phi(a, 1) if kind == "phi" else f.lam(a, 1)
            D = D + _jet_monomial(f, e) * dot * rng.randint(-2, 2)
        verdict = total_derivative_test(D, f)
        assert verdict == _ansatz_exact(D, f), str(D)
        exact_seen += verdict
        nonexact_seen += not verdict
    assert exact_seen and nonexact_seen


@pytest.mark.parametrize("name", sorted(corpus()))
@pytest.mark.parametrize("kinetic", [True, False])
def test_action_identity(name, kinetic):
    assert check_action_identity(corpus()[name], kinetic).passed


def test_action_identity_trivial_cases():
    assert check_action_identity(model(1, 0), kinetic=False).passed
    assert check_action_identity(model(1, 0), kinetic=True).passed


@pytest.mark.parametrize("name", sorted(corpus()))
def test_superfield_eom(name):
    m = corpus()[name]
    report = superfield_eom(m)
    assert report.passed, report.failures()
    assert len(report.checks) == 6 * m.dim


def test_eom_sectors_oscillator():
    report = superfield_eom(HO)
    sectors = report.details["sectors"]
    assert set(sectors) == set(THETA_SECTORS)
    assert sectors[""][0] == "q_1' - p_1 = 0"
    f = Fields(1)
    Phi = build_superfield(HO, f)
    dPhi = Phi.time_derivative()
    assert dPhi[0].theta_component("theta") - f.c(1) == f.c(0, 1) - f.c(1)


def test_eom_trivial_hamiltonian():
    assert superfield_eom(model(1, 0)).passed

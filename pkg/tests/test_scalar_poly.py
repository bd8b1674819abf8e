from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given

from kvnlab.errors import ConfigurationError
from kvnlab.model import PhaseSpaceModel, corpus, model, standard_omega
from kvnlab.poly import Poly, monomials, poisson, variables
from kvnlab.scalar import I, ONE, ZERO, Scalar

from strategies import nonzero_scalars, polys, scalars


def test_scalar_canonical_form():
    assert Scalar(Fraction(2, 4)) == Scalar(1, 0) / 2
    assert str(Scalar("1/2")) == "1/2"
    assert str(I) == "i"
    assert str(-I) == "-i"
    assert str(Scalar("1/2", "3/4")) == "(1/2+3/4i)"
    assert Scalar.coerce(1j) == I
    assert not ZERO and ONE


@given(scalars, scalars, scalars)
def test_scalar_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(nonzero_scalars)
def test_scalar_inverse(a):
    assert a * (ONE / a) == ONE


@given(polys(), polys())
def test_poly_product_matches_sympy(f, g):
    q, p = sympy.symbols("q p")

    def to_sym(h):
        return sum(
            (sympy.Rational(c.re.numerator, c.re.denominator) * q ** e[0] * p ** e[1] for e, c in h.terms.items()),
            sympy.Integer(0),
        )

    assert sympy.expand(to_sym(f * g) - to_sym(f) * to_sym(g)) == 0
    assert sympy.expand(to_sym(f.diff(0)) - sympy.diff(to_sym(f), q)) == 0


@given(polys(), polys(), polys())
def test_poisson_bracket_is_lie(f, g, h):
    assert poisson(f, g) == -poisson(g, f)
    jacobi = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
    assert jacobi.is_zero()
    assert poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h)


def test_poisson_sign_convention():
    q, p = variables(1)
    assert poisson(q, p) == Poly.const(2, 1)
    assert poisson(p * p / 2, q) == -p


def test_separable_split():
    q, p = variables(1)
    H = p**2 / 2 + q**4 / 4 + 3
    assert H.is_separable()
    V, T = H.split_qp()
    assert V == q**4 / 4 + 3 and T == p**2 / 2
    assert not (q * p).is_separable()


def test_numeric_evaluation_broadcasts():
    q, p = variables(1)
    H = (q**2 + p**2) / 2
    x = np.linspace(-1, 1, 5)
    assert np.allclose(H.evaluate(x, 2 * x), 2.5 * x**2)


def test_monomial_enumeration_counts():
    assert len(list(monomials(2, 3))) == 10
    assert len(list(monomials(4, 2))) == 15


def test_omega_pairs_with_its_inverse():
    w = standard_omega(2)
    m = PhaseSpaceModel(2, Poly(4))
    for a in range(4):
        for c in range(4):
            s = sum(w[a][b] * m.omega_lower[b][c] for b in range(4))
            assert s == (1 if a == c else 0)


def test_model_rejects_bad_symplectic_pair():
    with pytest.raises(ConfigurationError):
        PhaseSpaceModel(1, Poly(2), omega_upper=((0, 1), (-1, 0)), omega_lower=((0, 1), (-1, 0)))


def test_hamilton_flow_field_of_oscillator():
    m = corpus()["harmonic"]
    q, p = variables(1)
    assert m.flow_field() == [p, -q]


def test_model_from_callable_and_constant():
    assert model(1, lambda q, p: q * p).H == Poly(2, {(1, 1): 1})
    assert model(1, 0).H.is_zero()

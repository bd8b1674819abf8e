"""Hypothesis strategies shared by the algebra tests."""

from fractions import Fraction

from hypothesis import strategies as st

from kvnlab.grassmann import Multivector
from kvnlab.poly import Poly
from kvnlab.scalar import Scalar
from kvnlab.superops import OperatorMonomial, OperatorSum

small_fraction = st.fractions(min_value=-3, max_value=3, max_denominator=4)
scalars = st.builds(Scalar, small_fraction, small_fraction)
nonzero_scalars = scalars.filter(bool)


@st.composite
def polys(draw, nvars=2, max_degree=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_degree)) for _ in range(nvars))
        if sum(exp) <= max_degree:
            terms[exp] = Scalar(draw(small_fraction))
    return Poly(nvars, terms)


@st.composite
def multivectors(draw, registry, labels, max_terms=4):
    out = Multivector(registry)
    for _ in range(draw(st.integers(0, max_terms))):
        chosen = draw(st.lists(st.sampled_from(labels), max_size=3, unique=True))
        out = out + Multivector.blade(registry, chosen, draw(scalars))
    return out


@st.composite
def operators(draw, dim=2, max_terms=3, max_power=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        m = OperatorMonomial(
            tuple(draw(st.integers(0, max_power)) for _ in range(dim)),
            draw(st.integers(0, 2**dim - 1)),
            draw(st.integers(0, 2**dim - 1)),
            tuple(draw(st.integers(0, max_power)) for _ in range(dim)),
        )
        terms[m] = draw(scalars)
    return OperatorSum(dim, terms)


def frac(s):
    return Fraction(s)

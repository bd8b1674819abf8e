"""Commuting polynomials in the phase-space coordinates phi^1..phi^{2n}.

Index convention (0-based): even indices are q's, odd indices are p's, so for
one degree of freedom ``phi = (q, p)``.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .grassmann import _join_terms, _term_str, phase_label
from .scalar import Scalar, ScalarLike

Exp = tuple[int, ...]


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exp, ScalarLike] | None = None):
        self.nvars = nvars
        clean: dict[Exp, Scalar] = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {nvars} variables")
            c = Scalar.coerce(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def const(cls, nvars: int, c: ScalarLike) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, a: int) -> Poly:
        e = [0] * nvars
        e[a] = 1
        return cls(nvars, {tuple(e): 1})

    # ---- arithmetic ----
    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> Poly:
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Scalar(0)) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Poly:
        return self._lift(other) - self

    def __mul__(self, other) -> Poly:
        other = self._lift(other)
        out: dict[Exp, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Scalar(0)) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, c: ScalarLike) -> Poly:
        inv = Scalar(1) / Scalar.coerce(c)
        return self * inv

    def __pow__(self, k: int) -> Poly:
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # ---- calculus ----
    def diff(self, a: int) -> Poly:
        out: dict[Exp, Scalar] = {}
        for e, c in self.terms.items():
            if e[a]:
                f = list(e)
                f[a] -= 1
                out[tuple(f)] = c * e[a]
        return Poly(self.nvars, out)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_real(self) -> bool:
        return all(c.is_real for c in self.terms.values())

    def depends_on(self, a: int) -> bool:
        return any(e[a] for e in self.terms)

    def is_separable(self) -> bool:
        """True when every monomial is pure in q's or pure in p's."""
        for e in self.terms:
            has_q = any(e[a] for a in range(0, self.nvars, 2))
            has_p = any(e[a] for a in range(1, self.nvars, 2))
            if has_q and has_p:
                return False
        return True

    def split_qp(self) -> tuple[Poly, Poly]:
        """(V(q), T(p)) parts of a separable polynomial; constants go to V."""
        v, t = {}, {}
        for e, c in self.terms.items():
            if any(e[a] for a in range(1, self.nvars, 2)):
                t[e] = c
            else:
                v[e] = c
        return Poly(self.nvars, v), Poly(self.nvars, t)

    def evaluate(self, *values):
        """Numeric evaluation at float/array arguments (real coefficients)."""
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values")
        out = 0.0
        for e, c in self.terms.items():
            term = complex(c) if c.im else float(c.re)
            for v, k in zip(values, e):
                if k:
                    term = term * np.asarray(v, dtype=float) ** k
            out = out + term
        return out

    def sorted_terms(self) -> list[tuple[Exp, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-k for k in kv[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [
                phase_label(a) + (f"^{k}" if k > 1 else "") for a, k in enumerate(e) if k
            ]
            parts.append(_term_str(c, factors))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


def poisson(f: Poly, g: Poly) -> Poly:
    """{f, g} = sum over dof of (d_q f d_p g - d_p f d_q g)."""
    out = Poly(f.nvars)
    for k in range(0, f.nvars, 2):
        out = out + f.diff(k) * g.diff(k + 1) - f.diff(k + 1) * g.diff(k)
    return out


def variables(n: int) -> list[Poly]:
    """[q_1, p_1, q_2, p_2, ...] for n degrees of freedom."""
    return [Poly.var(2 * n, a) for a in range(2 * n)]


def monomials(nvars: int, max_degree: int) -> Iterable[Exp]:
    def rec(prefix: list[int], left: int, remaining: int):
        if remaining == 0:
            yield tuple(prefix)
            return
        for k in range(left + 1):
            yield from rec(prefix + [k], left - k, remaining - 1)

    yield from rec([], max_degree, nvars)

"""Exact complex-rational scalars.

Every symbolic identity in the package is checked for an exact zero, so all
coefficients live in Q(i) and are stored as a pair of reduced fractions.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

ScalarLike = Union["Scalar", int, Fraction]


class Scalar:
    """Gaussian rational ``re + i*im`` with exact equality."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int | str = 0, im: Rational | int | str = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def coerce(cls, value: ScalarLike) -> Scalar:
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, complex):
            # only used for small literal constants such as 1j
            return cls(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"cannot coerce {type(value).__name__} to Scalar")

    # ---- arithmetic ----
    def __add__(self, other: ScalarLike) -> Scalar:
        o = Scalar.coerce(other)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> Scalar:
        o = Scalar.coerce(other)
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ScalarLike) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> Scalar:
        o = Scalar.coerce(other)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> Scalar:
        o = Scalar.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("Scalar division by zero")
        num = self * o.conjugate()
        return Scalar(num.re / den, num.im / den)

    def __rtruediv__(self, other: ScalarLike) -> Scalar:
        return Scalar.coerce(other) / self

    def __neg__(self) -> Scalar:
        return Scalar(-self.re, -self.im)

    def __pos__(self) -> Scalar:
        return self

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return Scalar(1) / self ** (-k)
        out = Scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> Scalar:
        return Scalar(self.re, -self.im)

    # ---- comparison ----
    def __eq__(self, other) -> bool:
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __float__(self) -> float:
        if self.im:
            raise TypeError("complex Scalar has no float value")
        return float(self.re)

    # ---- rendering ----
    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"


def _imag_str(x: Fraction) -> str:
    if x == 1:
        return "i"
    if x == -1:
        return "-i"
    return f"{x}i"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)

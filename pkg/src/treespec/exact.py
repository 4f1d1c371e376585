"""Exact arithmetic in the quadratic field Q(sqrt 2).

Edge lengths are elements ``a + b*sqrt(2)`` with rational ``a`` and ``b``.
Sums, products, quotients and comparisons are exact, which makes rational
(in)dependence of two lengths decidable.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

_SQRT2 = math.sqrt(2.0)

Scalar = Union[int, Fraction, "QSqrt2"]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


def _sign_of(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt(2), decided without floating point."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with 2 b^2
    lhs, rhs = a * a, 2 * b * b
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


class QSqrt2:
    """An element ``rational_part + rad2_part * sqrt(2)``.

    Instances are immutable and hashable.  Both parts are stored as
    :class:`fractions.Fraction`, so they are always in lowest terms with a
    positive denominator.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, rational_part=0, rad2_part=0):
        self._a = _as_fraction(rational_part)
        self._b = _as_fraction(rad2_part)

    @property
    def rational_part(self) -> Fraction:
        return self._a

    @property
    def rad2_part(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        return cls(_as_fraction(x), 0)

    def is_rational(self) -> bool:
        return self._b == 0

    def conjugate(self) -> "QSqrt2":
        return QSqrt2(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm a^2 - 2 b^2 (zero only for the zero element)."""
        return self._a * self._a - 2 * self._b * self._b

    def sign(self) -> int:
        return _sign_of(self._a, self._b)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a + o._a, self._b + o._b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self._a, -self._b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a - o._a, self._b - o._b)

    def __rsub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a * o._a + 2 * self._b * o._b,
                      self._a * o._b + self._b * o._a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        num = self * o.conjugate()
        return QSqrt2(num._a / n, num._b / n)

    def __rtruediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return QSqrt2(1) / (self ** -exponent)
        result = QSqrt2(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # comparisons ----------------------------------------------------------

    def _cmp(self, other) -> int:
        o = QSqrt2.coerce(other)
        return _sign_of(self._a - o._a, self._b - o._b)

    def __eq__(self, other):
        if isinstance(other, float):
            return NotImplemented
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self._a == o._a and self._b == o._b

    def __lt__(self, other):
        try:
            return self._cmp(other) < 0
        except TypeError:
            return NotImplemented

    def __le__(self, other):
        try:
            return self._cmp(other) <= 0
        except TypeError:
            return NotImplemented

    def __gt__(self, other):
        try:
            return self._cmp(other) > 0
        except TypeError:
            return NotImplemented

    def __ge__(self, other):
        try:
            return self._cmp(other) >= 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self):
        return bool(self._a) or bool(self._b)

    def __float__(self):
        return float(self._a) + float(self._b) * _SQRT2

    def __repr__(self):
        return f"QSqrt2({self._a!s}, {self._b!s})"

    def __str__(self):
        if self._b == 0:
            return str(self._a)
        mag = abs(self._b)
        rad = "√2" if mag == 1 else f"{mag}·√2"
        if self._a == 0:
            return rad if self._b > 0 else f"-{rad}"
        op = "+" if self._b > 0 else "-"
        return f"{self._a} {op} {rad}"


# Edge lengths are positive elements of the field.
ExactLength = QSqrt2

SQRT2 = QSqrt2(0, 1)


def rationally_dependent(x: QSqrt2, y: QSqrt2) -> bool:
    """True iff x / y is rational (both nonzero)."""
    return x.rational_part * y.rad2_part - x.rad2_part * y.rational_part == 0

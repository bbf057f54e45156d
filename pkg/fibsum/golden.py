"""Exact arithmetic in the golden field Q(sqrt5).

Every value is kept as a pair of reduced rationals (a, b) standing for
a + b*sqrt5, so equality is structural and no rounding ever happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .bigfib import fib_lucas_pair

Rat = Fraction
Scalar = Union[int, Fraction, "GoldenNum"]


def _rat(value: int | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class GoldenNum:
    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _rat(self.a))
        object.__setattr__(self, "b", _rat(self.b))

    @classmethod
    def of(cls, value: Scalar) -> "GoldenNum":
        if isinstance(value, GoldenNum):
            return value
        return cls(_rat(value))

    def __str__(self) -> str:
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        magnitude = abs(b)
        term = "sqrt5" if magnitude == 1 else f"{magnitude}*sqrt5"
        if a == 0:
            return term if b > 0 else f"-{term}"
        sign = "+" if b > 0 else "-"
        return f"{a} {sign} {term}"

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __neg__(self) -> "GoldenNum":
        return GoldenNum(-self.a, -self.b)

    def __add__(self, other: object) -> "GoldenNum":
        rhs = _coerce(other)
        if rhs is None:
            return NotImplemented
        return GoldenNum(self.a + rhs.a, self.b + rhs.b)

    __radd__ = __add__

    def __sub__(self, other: object) -> "GoldenNum":
        rhs = _coerce(other)
        if rhs is None:
            return NotImplemented
        return GoldenNum(self.a - rhs.a, self.b - rhs.b)

    def __rsub__(self, other: object) -> "GoldenNum":
        lhs = _coerce(other)
        if lhs is None:
            return NotImplemented
        return GoldenNum(lhs.a - self.a, lhs.b - self.b)

    def __mul__(self, other: object) -> "GoldenNum":
        rhs = _coerce(other)
        if rhs is None:
            return NotImplemented
        return gf_mul(self, rhs)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "GoldenNum":
        rhs = _coerce(other)
        if rhs is None:
            return NotImplemented
        return gf_mul(self, gf_inv(rhs))

    def __rtruediv__(self, other: object) -> "GoldenNum":
        lhs = _coerce(other)
        if lhs is None:
            return NotImplemented
        return gf_mul(lhs, gf_inv(self))

    def __pow__(self, exponent: int) -> "GoldenNum":
        if not isinstance(exponent, int):
            return NotImplemented
        return gf_pow(self, exponent)

    def conj(self) -> "GoldenNum":
        return GoldenNum(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 - 5b^2, the product of the number with its conjugate."""
        return self.a * self.a - 5 * self.b * self.b

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1


def _coerce(value: object) -> GoldenNum | None:
    if isinstance(value, GoldenNum):
        return value
    if isinstance(value, (int, Fraction)):
        return GoldenNum(value)
    return None


ZERO = GoldenNum(0)
ONE = GoldenNum(1)
SQRT5 = GoldenNum(0, 1)
ALPHA = GoldenNum(Fraction(1, 2), Fraction(1, 2))
BETA = GoldenNum(Fraction(1, 2), Fraction(-1, 2))


def gf_mul(x: GoldenNum, y: GoldenNum) -> GoldenNum:
    return GoldenNum(x.a * y.a + 5 * x.b * y.b, x.a * y.b + x.b * y.a)


def gf_inv(x: GoldenNum) -> GoldenNum:
    norm = x.norm()
    if norm == 0:
        raise ZeroDivisionError("inverse of zero in Q(sqrt5)")
    return GoldenNum(x.a / norm, -x.b / norm)


def gf_pow(x: GoldenNum, m: int) -> GoldenNum:
    """Binary exponentiation; negative exponents go through the inverse."""
    if m < 0:
        return gf_pow(gf_inv(x), -m)
    result = ONE
    base = x
    while m:
        if m & 1:
            result = gf_mul(result, base)
        m >>= 1
        if m:
            base = gf_mul(base, base)
    return result


def gf_conj(x: GoldenNum) -> GoldenNum:
    return x.conj()


def alpha_pow(j: int) -> GoldenNum:
    """alpha^j = (L_j + F_j*sqrt5) / 2 for any integer j."""
    f, l = fib_lucas_pair(j)
    return GoldenNum(Fraction(l, 2), Fraction(f, 2))


def beta_pow(j: int) -> GoldenNum:
    f, l = fib_lucas_pair(j)
    return GoldenNum(Fraction(l, 2), Fraction(-f, 2))


def gf_decompose(x: GoldenNum) -> tuple[Fraction, Fraction]:
    return x.a, x.b

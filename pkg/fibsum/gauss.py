"""Gaussian extension Q(sqrt5)(i).

Cosine and sine factors multiplied by their modulus are the real and
imaginary parts of an integer power of x + iy, so they stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .golden import ONE, ZERO, GoldenNum, alpha_pow, beta_pow

SymmetryKind = Literal["cos-even", "cos-odd", "sin-even", "sin-odd"]

SYMMETRY_KINDS: tuple[SymmetryKind, ...] = ("cos-even", "cos-odd", "sin-even", "sin-odd")


@dataclass(frozen=True)
class GaussGolden:
    re: GoldenNum
    im: GoldenNum = ZERO

    def __add__(self, other: "GaussGolden") -> "GaussGolden":
        return GaussGolden(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussGolden") -> "GaussGolden":
        return GaussGolden(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussGolden") -> "GaussGolden":
        return GaussGolden(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "GaussGolden":
        return GaussGolden(self.re, -self.im)

    def norm(self) -> GoldenNum:
        return self.re * self.re + self.im * self.im

    def pow(self, m: int) -> "GaussGolden":
        if m < 0:
            raise ValueError(f"Gaussian powers need m >= 0, got {m}")
        result = GaussGolden(ONE)
        base = self
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result


def re_im_pow(x: GoldenNum, y: GoldenNum, m: int) -> tuple[GoldenNum, GoldenNum]:
    """Return (Re, Im) of (x + iy)^m."""
    power = GaussGolden(GoldenNum.of(x), GoldenNum.of(y)).pow(m)
    return power.re, power.im


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def symmetry_pair(kind: SymmetryKind, n: int, r: int) -> tuple[GoldenNum, GoldenNum]:
    """Both sides of a cleared arctangent symmetry for 1 + i*alpha^r against 1 + i*beta^r.

    The alpha-power on the right is the exact modulus ratio
    ((1 + alpha^(2r)) / (1 + beta^(2r)))^(m/2) = alpha^(r*m).
    """
    a_r, b_r = alpha_pow(r), beta_pow(r)
    if kind in ("cos-even", "sin-even"):
        m = 2 * n
    else:
        m = 2 * n - 1
        if m < 0:
            raise ValueError(f"odd symmetry forms need n >= 1, got {n}")
    a_re, a_im = re_im_pow(ONE, a_r, m)
    b_re, b_im = re_im_pow(ONE, b_r, m)
    scale = alpha_pow(r * m)
    if kind == "cos-even":
        return a_re, _sign(n) * b_re * scale
    if kind == "cos-odd":
        return a_re, _sign(n + r + 1) * b_im * scale
    if kind == "sin-even":
        return a_im, _sign(n + r + 1) * b_im * scale
    if kind == "sin-odd":
        return a_im, _sign(n - 1) * b_re * scale
    raise ValueError(f"unknown symmetry kind {kind!r}")


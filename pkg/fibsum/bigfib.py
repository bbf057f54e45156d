"""Arbitrary-precision Fibonacci, Lucas and binomial numbers for any integer index."""

from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from typing import Iterator


def _doubling(n: int) -> tuple[int, int]:
    """Return (F_n, F_{n+1}) for n >= 0 by walking the bits of n from the top."""
    a, b = 0, 1
    for bit in bin(n)[2:]:
        c = a * (2 * b - a)
        d = a * a + b * b
        if bit == "1":
            a, b = d, c + d
        else:
            a, b = c, d
    return a, b


def fib_lucas_pair(j: int) -> tuple[int, int]:
    """Return (F_j, L_j) from a single doubling pass over |j|."""
    m = abs(j)
    f, f_next = _doubling(m)
    lucas_m = 2 * f_next - f
    if j >= 0:
        return f, lucas_m
    # F_{-m} = (-1)^{m-1} F_m, L_{-m} = (-1)^m L_m
    if m % 2 == 0:
        return -f, lucas_m
    return f, -lucas_m


def fib(j: int) -> int:
    """Return F_j; negative indices follow F_{-j} = (-1)^{j-1} F_j."""
    m = abs(j)
    f, _ = _doubling(m)
    if j < 0 and m % 2 == 0:
        return -f
    return f


def lucas(j: int) -> int:
    """Return L_j; negative indices follow L_{-j} = (-1)^j L_j."""
    return fib_lucas_pair(j)[1]


def fib_iterative(n: int) -> int:
    """Linear recurrence for F_n, n >= 0."""
    if n < 0:
        raise ValueError(f"fib_iterative needs n >= 0, got {n}")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def lucas_iterative(n: int) -> int:
    if n < 0:
        raise ValueError(f"lucas_iterative needs n >= 0, got {n}")
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def binom(n: int, k: int) -> int:
    """Return C(n, k); zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError(f"binomial top index must be non-negative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@contextmanager
def unlimited_int_digits() -> Iterator[None]:
    """Lift the interpreter's int-to-decimal digit cap while large values are rendered."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    previous = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(previous)


WALK_REACH = 64


def _pair_at(j: int) -> tuple[int, int]:
    """Return (F_j, F_{j+1}) for any integer j."""
    if j >= 0:
        return _doubling(j)
    m = -j
    f, f_next = _doubling(m)
    f_prev = f_next - f
    return (f if m % 2 else -f), (-f_prev if m % 2 else f_prev)


class FibWalker:
    """F_j and L_j for a run of nearby indices.

    Indices within ``reach`` of the last one asked for are reached by stepping
    the recurrence; anything further restarts from fast doubling.
    """

    def __init__(self, reach: int = WALK_REACH) -> None:
        self.reach = reach
        self._j = 0
        self._f = 0
        self._f_next = 1

    def _seek(self, j: int) -> None:
        delta = j - self._j
        if abs(delta) > self.reach:
            self._f, self._f_next = _pair_at(j)
        else:
            f, g = self._f, self._f_next
            for _ in range(delta):
                f, g = g, f + g
            for _ in range(-delta):
                f, g = g - f, f
            self._f, self._f_next = f, g
        self._j = j

    def fib(self, j: int) -> int:
        self._seek(j)
        return self._f

    def lucas(self, j: int) -> int:
        self._seek(j)
        return 2 * self._f_next - self._f


class BinomWalker:
    """C(n, k) along one row, stepping k by exact multiply-divide."""

    def __init__(self, reach: int = WALK_REACH) -> None:
        self.reach = reach
        self._n = -1
        self._k = 0
        self._value = 0

    def binom(self, n: int, k: int) -> int:
        if n < 0:
            raise ValueError(f"binomial top index must be non-negative, got {n}")
        if k < 0 or k > n:
            return 0
        if n != self._n or abs(k - self._k) > self.reach:
            value = math.comb(n, k)
        else:
            value, i = self._value, self._k
            while i < k:
                value = value * (n - i) // (i + 1)
                i += 1
            while i > k:
                value = value * i // (n - i + 1)
                i -= 1
        self._n, self._k, self._value = n, k, value
        return value

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibsum.bigfib import (
    BinomWalker,
    FibWalker,
    binom,
    fib,
    fib_iterative,
    fib_lucas_pair,
    lucas,
    lucas_iterative,
    unlimited_int_digits,
)


def test_small_values() -> None:
    assert fib(0) == 0
    assert fib(1) == 1
    assert fib(10) == 55
    assert lucas(0) == 2
    assert lucas(1) == 1
    assert lucas(7) == 29


def test_negative_indices() -> None:
    assert fib(-4) == -3
    assert fib(-5) == 5
    assert lucas(-3) == -4
    assert lucas(-4) == 7


def test_pair() -> None:
    assert fib_lucas_pair(0) == (0, 2)
    assert fib_lucas_pair(10) == (55, 123)
    assert fib_lucas_pair(-5) == (5, -11)


def test_doubling_matches_recurrence_up_to_2000() -> None:
    f, f_next = 0, 1
    l, l_next = 2, 1
    for n in range(2001):
        assert fib(n) == f, n
        assert lucas(n) == l, n
        f, f_next = f_next, f + f_next
        l, l_next = l_next, l + l_next
    assert fib(2000) == fib_iterative(2000)
    assert lucas(2000) == lucas_iterative(2000)


def test_pair_matches_fib_and_lucas() -> None:
    for j in range(-500, 501):
        assert fib_lucas_pair(j) == (fib(j), lucas(j)), j


@given(st.integers(min_value=-300, max_value=300))
def test_recurrence_and_sign_laws(j: int) -> None:
    assert fib(j + 2) == fib(j + 1) + fib(j)
    assert lucas(j + 2) == lucas(j + 1) + lucas(j)
    sign = -1 if j % 2 == 0 else 1
    assert fib(-j) == sign * fib(j)
    assert lucas(-j) == -sign * lucas(j)
    assert lucas(j) == fib(j - 1) + fib(j + 1)


def test_iterative_rejects_negative() -> None:
    with pytest.raises(ValueError):
        fib_iterative(-1)
    with pytest.raises(ValueError):
        lucas_iterative(-2)


def test_binom() -> None:
    assert binom(4, 2) == 6
    assert binom(7, 0) == 1
    assert binom(3, 5) == 0
    assert binom(3, -1) == 0
    with pytest.raises(ValueError):
        binom(-1, 0)
    for n in range(65):
        assert sum(binom(n, k) for k in range(n + 1)) == 2**n


def test_large_index_renders() -> None:
    with unlimited_int_digits():
        digits = str(fib(100_000))
    assert len(digits) == 20_899
    assert digits.startswith("2597406934")


@given(st.lists(st.integers(min_value=-400, max_value=400), min_size=1, max_size=40), st.integers(0, 8))
def test_fib_walker_agrees_with_doubling(indices: list[int], reach: int) -> None:
    walker = FibWalker(reach=reach)
    for j in indices:
        assert walker.fib(j) == fib(j)
        assert walker.lucas(j) == lucas(j)


def test_fib_walker_steps_along_a_run() -> None:
    walker = FibWalker()
    values = [walker.fib(2 * k + 3) for k in range(200)]
    assert values == [fib(2 * k + 3) for k in range(200)]
    assert [walker.lucas(j) for j in range(10, -11, -1)] == [lucas(j) for j in range(10, -11, -1)]


@given(
    st.integers(min_value=0, max_value=120),
    st.lists(st.integers(min_value=-5, max_value=125), min_size=1, max_size=40),
)
def test_binom_walker_agrees_with_comb(n: int, ks: list[int]) -> None:
    walker = BinomWalker(reach=16)
    for k in ks:
        assert walker.binom(n, k) == binom(n, k)


def test_binom_walker_across_rows() -> None:
    walker = BinomWalker()
    assert [walker.binom(50, 2 * k) for k in range(26)] == [binom(50, 2 * k) for k in range(26)]
    assert walker.binom(51, 24) == binom(51, 24)
    assert walker.binom(51, 0) == 1
    with pytest.raises(ValueError):
        walker.binom(-1, 0)

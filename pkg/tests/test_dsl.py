from __future__ import annotations

from fractions import Fraction

import pytest

from fibsum.catalog import open_catalog
from fibsum.dsl import (
    Binom,
    Case,
    EvaluationError,
    FibOf,
    IntLit,
    Param,
    ParseError,
    RatLit,
    SemanticError,
    SignPow,
    clear_walkers,
    eval_expr,
    eval_value,
    parse_expr,
    parse_file,
    parse_identity,
    print_expr,
    print_identity,
    select_case,
)
from fibsum.golden import GoldenNum

T2F_TEXT = (
    "identity T2F { params n in 0..., s in int; "
    "lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s)); "
    "rhs = F(2*n+s) - (-1)^(s)*F(n-s) }"
)


def test_parse_t2f() -> None:
    spec = parse_identity(T2F_TEXT)
    assert spec.id == "T2F"
    assert spec.param_names == ("n", "s")
    assert spec.params[0].lo == 0 and spec.params[0].hi is None
    assert spec.params[1].lo is None
    assert len(spec.rhs) == 1
    assert not spec.has_cases


def test_literal_folding() -> None:
    assert parse_expr("3/2") == RatLit(Fraction(3, 2))
    assert parse_expr("(-1)^(n)") == SignPow(Param("n"))
    assert print_expr(parse_expr("3/2")) == "3/2"
    assert parse_expr("F(2*k + 1)") == FibOf(parse_expr("2*k + 1"))
    assert isinstance(parse_expr("C(n, k)"), Binom)
    assert parse_expr("4/2") != RatLit(Fraction(2))


def test_syntax_error_points_at_token() -> None:
    with pytest.raises(ParseError) as info:
        parse_identity("identity bad { lhs = F( }")
    assert info.value.line == 1
    assert info.value.column is not None and info.value.column > 23
    assert not isinstance(info.value, SemanticError)


def test_unknown_character() -> None:
    with pytest.raises(ParseError, match="unexpected character"):
        parse_expr("F(n) $ 2")


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("identity a { params n in int; lhs = F(m); rhs = 0 }", "unbound variable 'm'"),
        ("identity a { params n in int, n in int; lhs = 0; rhs = 0 }", "duplicate parameter"),
        ("identity a { params n in 3..1; lhs = 0; rhs = 0 }", "empty domain"),
        (
            "identity a { params n in int; lhs = 0; rhs = cases { even(n) -> 0; } }",
            "not exhaustive",
        ),
        (
            "identity a { params n in int; lhs = 0; "
            "rhs = cases { otherwise -> 0; otherwise -> 1; } }",
            "more than one otherwise",
        ),
    ],
)
def test_semantic_errors(text: str, message: str) -> None:
    with pytest.raises(SemanticError, match=message):
        parse_identity(text)


def test_sum_variable_is_scoped() -> None:
    with pytest.raises(SemanticError, match="unbound variable 'k'"):
        parse_identity("identity a { params n in 0...; lhs = sum(k=0..n; k) + k; rhs = 0 }")


def test_nested_parity_split_is_exhaustive() -> None:
    spec = parse_identity(
        "identity a { params n in int, m in int; lhs = 0; rhs = cases {"
        " even(n) && even(m) -> 0; even(n) && odd(m) -> 0; odd(n) -> 0; } }"
    )
    assert spec.has_cases
    assert len(spec.rhs) == 3


def test_parse_identity_needs_one_block() -> None:
    with pytest.raises(ParseError, match="exactly one"):
        parse_identity(T2F_TEXT + "\n" + T2F_TEXT.replace("T2F", "T2G"))
    assert len(parse_file("# only a comment\n")) == 0


def test_eval_t2f_sides() -> None:
    spec = parse_identity(T2F_TEXT)
    binding = {"n": 2, "s": 0}
    assert eval_value(spec.lhs, binding) == 2
    assert eval_value(select_case(spec, binding).expr, binding) == 2
    assert eval_value(parse_expr("F(2*k + s)"), {"k": 3, "s": 1}) == 13


def test_sums_at_large_n_match_closed_form() -> None:
    spec = parse_identity(T2F_TEXT)
    for n, s in ((3000, 1), (2999, -7), (3000, 1)):
        binding = {"n": n, "s": s}
        lhs = eval_value(spec.lhs, binding)
        assert lhs == eval_value(select_case(spec, binding).expr, binding)
    clear_walkers()
    descending = parse_expr("sum(k=0..n; C(n, n - k)*L(n - 2*k))")
    ascending = parse_expr("sum(k=0..n; C(n, k)*L(2*k - n))")
    assert eval_value(descending, {"n": 300}) == eval_value(ascending, {"n": 300})


def test_eval_number_tower() -> None:
    assert eval_value(parse_expr("1/2 + 1/2"), {}) == 1
    assert isinstance(eval_value(parse_expr("1/2 + 1/2"), {}), int)
    assert eval_value(parse_expr("5/2*F(3)"), {}) == 5
    assert eval_expr(parse_expr("alpha - beta"), {}) == GoldenNum(0, 1)
    assert eval_value(parse_expr("sqrt5^2"), {}) == 5
    assert eval_value(parse_expr("alpha^n + beta^n"), {"n": 10}) == 123
    assert eval_value(parse_expr("(alpha^n - beta^n)/sqrt5"), {"n": -4}) == -3
    assert eval_value(parse_expr("2^(-2)"), {}) == Fraction(1, 4)
    assert eval_value(parse_expr("(-1)^(n)"), {"n": -3}) == -1


def test_empty_sum_is_zero() -> None:
    assert eval_value(parse_expr("sum(k=1..n; F(k))"), {"n": 0}) == 0
    assert eval_value(parse_expr("sum(k=1..n; F(k))"), {"n": 5}) == 12


def test_eval_integer_division() -> None:
    assert eval_value(parse_expr("fdiv(-3, 2)"), {}) == -2
    assert eval_value(parse_expr("cdiv(-3, 2)"), {}) == -1
    assert eval_value(parse_expr("cdiv(3, 2)"), {}) == 2
    assert eval_value(parse_expr("fdiv(7, 2)"), {}) == 3


def test_eval_gaussian_parts() -> None:
    assert eval_value(parse_expr("re(1, 2, 2)"), {}) == -3
    assert eval_value(parse_expr("im(1, 2, 2)"), {}) == 4
    assert eval_value(parse_expr("re(1, 1, 4)"), {}) == -4


@pytest.mark.parametrize(
    ("text", "binding"),
    [
        ("0^(-1)", {}),
        ("1/(n - n)", {"n": 3}),
        ("C(n, 1)", {"n": -1}),
        ("F(1/2)", {}),
        ("F(sqrt5)", {}),
        ("fdiv(n, 0)", {"n": 1}),
        ("re(1, 1, -1)", {}),
        ("F(m)", {"n": 1}),
    ],
)
def test_eval_errors(text: str, binding: dict[str, int]) -> None:
    with pytest.raises(EvaluationError):
        eval_value(parse_expr(text), binding)


def test_select_case() -> None:
    spec = parse_identity(
        "identity a { params n in int; lhs = 0; rhs = cases {"
        " even(n) -> 1; n <= 5 -> 2; otherwise -> 3; } }"
    )
    assert select_case(spec, {"n": 7}).expr == IntLit(3)
    assert select_case(spec, {"n": 3}).expr == IntLit(2)
    assert select_case(spec, {"n": 8}).expr == IntLit(1)
    with pytest.raises(EvaluationError, match="2 cases hold"):
        select_case(spec, {"n": 2})
    assert isinstance(spec.rhs[-1], Case) and spec.rhs[-1].otherwise


def test_print_round_trip_t2f() -> None:
    spec = parse_identity(T2F_TEXT)
    text = print_identity(spec)
    assert text.startswith("identity T2F {\n  params n in 0..., s in int;\n")
    assert parse_identity(text) == spec


def test_print_round_trip_whole_catalog() -> None:
    for item in open_catalog():
        assert parse_identity(print_identity(item.spec)) == item.spec, item.id


@pytest.mark.parametrize(
    "text",
    ["-x^2", "(-x)^2", "a - (b - c)", "a - -b", "2*-a", "-(a*b)", "(a/b)/c", "a/(b/c)", "(3/2)^n", "x^(-1)"],
)
def test_print_round_trip_precedence(text: str) -> None:
    e = parse_expr(text)
    assert parse_expr(print_expr(e)) == e

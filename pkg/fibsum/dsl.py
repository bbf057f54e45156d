"""Identity description language: parser, exact evaluator and printer.

A catalog file is a sequence of blocks such as::

    identity T2F {
      params n in 0..., s in int;
      lhs = 2*sum(k=0..fdiv(n, 2); C(n, 2*k)*F(2*k + s));
      rhs = F(2*n + s) - (-1)^(s)*F(n - s)
    }

Values live in the tower int < Fraction < GoldenNum and are narrowed back
after every operation, so integer-only identities never leave int.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence, Union

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from .bigfib import BinomWalker, FibWalker
from .gauss import re_im_pow
from .golden import ALPHA, BETA, SQRT5, GoldenNum, alpha_pow, beta_pow, gf_pow

logger = logging.getLogger(__name__)

Value = Union[int, Fraction, GoldenNum]
Binding = Mapping[str, int]


class DslError(RuntimeError):
    """Base error for the identity language."""


class ParseError(DslError):
    def __init__(
        self,
        message: str,
        *,
        line: Optional[int] = None,
        column: Optional[int] = None,
        expected: Sequence[str] = (),
        source: Optional[str] = None,
    ) -> None:
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        where = self.source or "<text>"
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        text = f"{where}: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        return text

    def with_source(self, source: str) -> "ParseError":
        return type(self)(
            self.message,
            line=self.line,
            column=self.column,
            expected=self.expected,
            source=source,
        )


class SemanticError(ParseError):
    """Well-formed text that breaks a scoping or exhaustiveness rule."""


class EvaluationError(DslError):
    """Raised when an expression cannot be evaluated exactly under a binding."""


# --- expression tree -------------------------------------------------------


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class RatLit(Expr):
    value: Fraction


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Sqrt5(Expr):
    pass


@dataclass(frozen=True)
class Alpha(Expr):
    pass


@dataclass(frozen=True)
class Beta(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class SignPow(Expr):
    """(-1)^exponent, defined for every integer exponent."""

    exponent: Expr


@dataclass(frozen=True)
class FibOf(Expr):
    index: Expr


@dataclass(frozen=True)
class LucasOf(Expr):
    index: Expr


@dataclass(frozen=True)
class Binom(Expr):
    top: Expr
    bottom: Expr


@dataclass(frozen=True)
class Sum(Expr):
    var: str
    lo: Expr
    hi: Expr
    body: Expr


@dataclass(frozen=True)
class FloorDiv(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class CeilDiv(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class RePow(Expr):
    x: Expr
    y: Expr
    m: Expr


@dataclass(frozen=True)
class ImPow(Expr):
    x: Expr
    y: Expr
    m: Expr


# --- guards and identities -------------------------------------------------


@dataclass(frozen=True)
class Even:
    expr: Expr


@dataclass(frozen=True)
class Odd:
    expr: Expr


@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Le:
    left: Expr
    right: Expr


GuardAtom = Union[Even, Odd, Eq, Le]
Guard = tuple[GuardAtom, ...]


@dataclass(frozen=True)
class ParamSpec:
    name: str
    lo: Optional[int] = None
    hi: Optional[int] = None

    def admits(self, value: int) -> bool:
        if self.lo is not None and value < self.lo:
            return False
        if self.hi is not None and value > self.hi:
            return False
        return True


@dataclass(frozen=True)
class Case:
    guard: Guard
    expr: Expr
    otherwise: bool = False


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    params: tuple[ParamSpec, ...]
    require: tuple[Guard, ...]
    lhs: Expr
    rhs: tuple[Case, ...]
    line: int = field(default=0, compare=False)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @property
    def has_cases(self) -> bool:
        return len(self.rhs) != 1 or bool(self.rhs[0].guard) or self.rhs[0].otherwise


# --- grammar ---------------------------------------------------------------

GRAMMAR = r"""
start: identity*
expr_only: expr

identity: "identity" ENTRY_ID "{" params? require* "lhs" "=" expr ";" "rhs" "=" rhs_body ";"? "}"

params: "params" param_decl ("," param_decl)* ";"
param_decl: NAME "in" domain
domain: "int"                -> unbounded
      | signed "..."         -> lower_bounded
      | signed ".." signed   -> closed
signed: INT                  -> pos_int
      | "-" INT              -> neg_int

require: "require" guard ";"

rhs_body: expr                     -> plain_rhs
        | "cases" "{" case+ "}"    -> cases_rhs
case: guard "->" expr ";"          -> guarded_case
    | "otherwise" "->" expr ";"    -> default_case

guard: guard_atom ("&&" guard_atom)*
guard_atom: "even" "(" expr ")"    -> even
          | "odd" "(" expr ")"     -> odd
          | expr "==" expr         -> eq
          | expr "<=" expr         -> le

?expr: sum_expr
?sum_expr: product
         | sum_expr "+" product    -> add
         | sum_expr "-" product    -> sub
?product: unary
        | product "*" unary        -> mul
        | product "/" unary        -> div
?unary: power
      | "-" unary                  -> neg
?power: atom
      | atom "^" unary             -> pow
?atom: INT                                          -> int_lit
     | "sqrt5"                                      -> sqrt5
     | "alpha"                                      -> alpha
     | "beta"                                       -> beta
     | NAME                                         -> var
     | "F" "(" expr ")"                             -> fib_of
     | "L" "(" expr ")"                             -> lucas_of
     | "C" "(" expr "," expr ")"                    -> binom
     | "sum" "(" NAME "=" expr ".." expr ";" expr ")" -> sum_of
     | "fdiv" "(" expr "," expr ")"                 -> fdiv
     | "cdiv" "(" expr "," expr ")"                 -> cdiv
     | "re" "(" expr "," expr "," expr ")"          -> re_pow
     | "im" "(" expr "," expr "," expr ")"          -> im_pow
     | "(" expr ")"

ENTRY_ID: /[A-Za-z][A-Za-z0-9_+\-\/.]*/
NAME: /[a-z_][A-Za-z0-9_]*/
INT: /[0-9]+/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


@dataclass(frozen=True)
class _Require:
    guard: Guard


class _IdentityBuilder(Transformer):
    def start(self, children: list[IdentitySpec]) -> list[IdentitySpec]:
        return list(children)

    def expr_only(self, children: list[Expr]) -> Expr:
        return children[0]

    @v_args(meta=True)
    def identity(self, meta: Any, children: list[Any]) -> IdentitySpec:
        ident = str(children[0])
        params: tuple[ParamSpec, ...] = ()
        require: list[Guard] = []
        for child in children[1:-2]:
            if isinstance(child, _Require):
                require.append(child.guard)
            else:
                params = tuple(child)
        return IdentitySpec(
            id=ident,
            params=params,
            require=tuple(require),
            lhs=children[-2],
            rhs=children[-1],
            line=getattr(meta, "line", 0),
        )

    def params(self, children: list[ParamSpec]) -> list[ParamSpec]:
        return list(children)

    def param_decl(self, children: list[Any]) -> ParamSpec:
        name, (lo, hi) = children
        return ParamSpec(str(name), lo, hi)

    def unbounded(self, _children: list[Any]) -> tuple[None, None]:
        return None, None

    def lower_bounded(self, children: list[int]) -> tuple[int, None]:
        return children[0], None

    def closed(self, children: list[int]) -> tuple[int, int]:
        return children[0], children[1]

    def pos_int(self, children: list[Token]) -> int:
        return int(children[0])

    def neg_int(self, children: list[Token]) -> int:
        return -int(children[0])

    def require(self, children: list[Guard]) -> _Require:
        return _Require(children[0])

    def plain_rhs(self, children: list[Expr]) -> tuple[Case, ...]:
        return (Case((), children[0]),)

    def cases_rhs(self, children: list[Case]) -> tuple[Case, ...]:
        return tuple(children)

    def guarded_case(self, children: list[Any]) -> Case:
        return Case(children[0], children[1])

    def default_case(self, children: list[Expr]) -> Case:
        return Case((), children[0], otherwise=True)

    def guard(self, children: list[GuardAtom]) -> Guard:
        return tuple(children)

    def even(self, children: list[Expr]) -> Even:
        return Even(children[0])

    def odd(self, children: list[Expr]) -> Odd:
        return Odd(children[0])

    def eq(self, children: list[Expr]) -> Eq:
        return Eq(children[0], children[1])

    def le(self, children: list[Expr]) -> Le:
        return Le(children[0], children[1])

    def add(self, children: list[Expr]) -> Expr:
        return Add(children[0], children[1])

    def sub(self, children: list[Expr]) -> Expr:
        return Sub(children[0], children[1])

    def mul(self, children: list[Expr]) -> Expr:
        return Mul(children[0], children[1])

    def div(self, children: list[Expr]) -> Expr:
        left, right = children
        if isinstance(left, IntLit) and isinstance(right, IntLit):
            if right.value > 1 and math.gcd(left.value, right.value) == 1:
                return RatLit(Fraction(left.value, right.value))
        return Div(left, right)

    def neg(self, children: list[Expr]) -> Expr:
        return Neg(children[0])

    def pow(self, children: list[Expr]) -> Expr:
        base, exponent = children
        if base == Neg(IntLit(1)):
            return SignPow(exponent)
        return Pow(base, exponent)

    def int_lit(self, children: list[Token]) -> Expr:
        return IntLit(int(children[0]))

    def sqrt5(self, _children: list[Any]) -> Expr:
        return Sqrt5()

    def alpha(self, _children: list[Any]) -> Expr:
        return Alpha()

    def beta(self, _children: list[Any]) -> Expr:
        return Beta()

    def var(self, children: list[Token]) -> Expr:
        return Param(str(children[0]))

    def fib_of(self, children: list[Expr]) -> Expr:
        return FibOf(children[0])

    def lucas_of(self, children: list[Expr]) -> Expr:
        return LucasOf(children[0])

    def binom(self, children: list[Expr]) -> Expr:
        return Binom(children[0], children[1])

    def sum_of(self, children: list[Any]) -> Expr:
        var, lo, hi, body = children
        return Sum(str(var), lo, hi, body)

    def fdiv(self, children: list[Expr]) -> Expr:
        return FloorDiv(children[0], children[1])

    def cdiv(self, children: list[Expr]) -> Expr:
        return CeilDiv(children[0], children[1])

    def re_pow(self, children: list[Expr]) -> Expr:
        return RePow(children[0], children[1], children[2])

    def im_pow(self, children: list[Expr]) -> Expr:
        return ImPow(children[0], children[1], children[2])


_PARSER = Lark(
    GRAMMAR,
    parser="lalr",
    start=["start", "expr_only"],
    propagate_positions=True,
)


def _terminal_label(name: str) -> str:
    try:
        pattern = _PARSER.get_terminal(name).pattern
    except KeyError:
        return name
    if pattern.type == "str":
        return repr(pattern.value)
    return name


def _parse_tree(text: str, start: str) -> Tree:
    try:
        return _PARSER.parse(text, start=start)
    except UnexpectedEOF as exc:
        # lark reports -1 positions at end of input
        line = exc.line if exc.line > 0 else None
        raise ParseError(
            "unexpected end of input",
            line=line,
            column=exc.column if line is not None else None,
            expected=sorted(_terminal_label(t) for t in exc.expected),
        ) from None
    except UnexpectedToken as exc:
        raise ParseError(
            f"unexpected token {str(exc.token)!r}",
            line=exc.line,
            column=exc.column,
            expected=sorted(_terminal_label(t) for t in exc.expected),
        ) from None
    except UnexpectedCharacters as exc:
        raise ParseError(
            f"unexpected character {exc.char!r}",
            line=exc.line,
            column=exc.column,
            expected=sorted(_terminal_label(t) for t in (exc.allowed or ())),
        ) from None
    except UnexpectedInput as exc:
        raise ParseError(str(exc), line=exc.line, column=exc.column) from None


# --- static checks ---------------------------------------------------------


def _subexprs(e: Expr) -> Iterator[Expr]:
    for f in fields(e):  # type: ignore[arg-type]
        value = getattr(e, f.name)
        if isinstance(value, Expr):
            yield value


def free_params(e: Expr) -> frozenset[str]:
    """Names an expression reads from its binding; sum variables are bound in their body only."""
    if isinstance(e, Param):
        return frozenset((e.name,))
    if isinstance(e, Sum):
        return free_params(e.lo) | free_params(e.hi) | (free_params(e.body) - {e.var})
    names: frozenset[str] = frozenset()
    for child in _subexprs(e):
        names |= free_params(child)
    return names


def _guard_exprs(guard: Guard) -> Iterator[Expr]:
    for atom in guard:
        if isinstance(atom, (Even, Odd)):
            yield atom.expr
        else:
            yield atom.left
            yield atom.right


def _strip_parity(guard: Guard, expr: Expr) -> Guard:
    return tuple(a for a in guard if not (isinstance(a, (Even, Odd)) and a.expr == expr))


def _is_exhaustive(guards: list[Guard]) -> bool:
    if any(not g for g in guards):
        return True
    if not guards:
        return False
    candidates = {a.expr for a in guards[0] if isinstance(a, (Even, Odd))}
    for expr in candidates:
        if not all(Even(expr) in g or Odd(expr) in g for g in guards):
            continue
        evens = [_strip_parity(g, expr) for g in guards if Even(expr) in g]
        odds = [_strip_parity(g, expr) for g in guards if Odd(expr) in g]
        if _is_exhaustive(evens) and _is_exhaustive(odds):
            return True
    return False


def _check(spec: IdentitySpec) -> IdentitySpec:
    def fail(message: str) -> SemanticError:
        return SemanticError(f"identity {spec.id}: {message}", line=spec.line or None)

    declared: set[str] = set()
    for p in spec.params:
        if p.name in declared:
            raise fail(f"duplicate parameter {p.name!r}")
        if p.lo is not None and p.hi is not None and p.lo > p.hi:
            raise fail(f"empty domain {p.lo}..{p.hi} for {p.name!r}")
        declared.add(p.name)

    exprs: list[Expr] = [spec.lhs]
    for guard in spec.require:
        exprs.extend(_guard_exprs(guard))
    for case in spec.rhs:
        exprs.append(case.expr)
        exprs.extend(_guard_exprs(case.guard))
    for e in exprs:
        unbound = free_params(e) - declared
        if unbound:
            raise fail(f"unbound variable {sorted(unbound)[0]!r}")

    if not any(c.otherwise for c in spec.rhs):
        if not _is_exhaustive([c.guard for c in spec.rhs]):
            raise fail("cases are not exhaustive; add an even/odd pair or an otherwise case")
    if sum(1 for c in spec.rhs if c.otherwise) > 1:
        raise fail("more than one otherwise case")
    return spec


# --- parsing entry points ---------------------------------------------------


def parse_file(text: str) -> list[IdentitySpec]:
    tree = _parse_tree(text, "start")
    specs: list[IdentitySpec] = _IdentityBuilder().transform(tree)
    logger.debug("parsed %d identity blocks", len(specs))
    return [_check(spec) for spec in specs]


def parse_identity(text: str) -> IdentitySpec:
    specs = parse_file(text)
    if len(specs) != 1:
        raise ParseError(f"expected exactly one identity block, found {len(specs)}")
    return specs[0]


def parse_expr(text: str) -> Expr:
    tree = _parse_tree(text, "expr_only")
    return _IdentityBuilder().transform(tree)


# --- evaluation -------------------------------------------------------------


def _narrow(value: Value) -> Value:
    if isinstance(value, GoldenNum):
        if value.b != 0:
            return value
        value = value.a
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def _as_int(value: Value, node: Expr) -> int:
    value = _narrow(value)
    if isinstance(value, int):
        return value
    raise EvaluationError(f"non-integer value {value} in index position {print_expr(node)}")


_Handler = Callable[[Any, Binding], Value]
_HANDLERS: dict[type, _Handler] = {}


def _handles(node_type: type) -> Callable[[_Handler], _Handler]:
    def register(fn: _Handler) -> _Handler:
        _HANDLERS[node_type] = fn
        return fn

    return register


def _eval(e: Expr, env: Binding) -> Value:
    try:
        handler = _HANDLERS[type(e)]
    except KeyError:
        raise EvaluationError(f"cannot evaluate {type(e).__name__}") from None
    return handler(e, env)


def _index(e: Expr, env: Binding) -> int:
    return _as_int(_eval(e, env), e)


@_handles(IntLit)
def _eval_int(e: IntLit, env: Binding) -> Value:
    return e.value


@_handles(RatLit)
def _eval_rat(e: RatLit, env: Binding) -> Value:
    return e.value


@_handles(Param)
def _eval_param(e: Param, env: Binding) -> Value:
    try:
        return env[e.name]
    except KeyError:
        raise EvaluationError(f"unbound variable {e.name!r}") from None


@_handles(Sqrt5)
def _eval_sqrt5(e: Sqrt5, env: Binding) -> Value:
    return SQRT5


@_handles(Alpha)
def _eval_alpha(e: Alpha, env: Binding) -> Value:
    return ALPHA


@_handles(Beta)
def _eval_beta(e: Beta, env: Binding) -> Value:
    return BETA


@_handles(Neg)
def _eval_neg(e: Neg, env: Binding) -> Value:
    return -_eval(e.operand, env)


@_handles(Add)
def _eval_add(e: Add, env: Binding) -> Value:
    return _narrow(_eval(e.left, env) + _eval(e.right, env))


@_handles(Sub)
def _eval_sub(e: Sub, env: Binding) -> Value:
    return _narrow(_eval(e.left, env) - _eval(e.right, env))


@_handles(Mul)
def _eval_mul(e: Mul, env: Binding) -> Value:
    return _narrow(_eval(e.left, env) * _eval(e.right, env))


@_handles(Div)
def _eval_div(e: Div, env: Binding) -> Value:
    num = _eval(e.left, env)
    den = _eval(e.right, env)
    if not den:
        raise EvaluationError(f"division by zero in {print_expr(e)}")
    if isinstance(num, GoldenNum) or isinstance(den, GoldenNum):
        return _narrow(GoldenNum.of(num) / GoldenNum.of(den))
    return _narrow(Fraction(num) / den)


@_handles(Pow)
def _eval_pow(e: Pow, env: Binding) -> Value:
    m = _index(e.exponent, env)
    if isinstance(e.base, Alpha):
        return alpha_pow(m)
    if isinstance(e.base, Beta):
        return beta_pow(m)
    base = _eval(e.base, env)
    if m < 0 and not base:
        raise EvaluationError(f"zero raised to a negative power in {print_expr(e)}")
    if isinstance(base, GoldenNum):
        return _narrow(gf_pow(base, m))
    if m < 0:
        return _narrow(Fraction(base) ** m)
    return _narrow(base**m)


@_handles(SignPow)
def _eval_sign_pow(e: SignPow, env: Binding) -> Value:
    return -1 if _index(e.exponent, env) % 2 else 1


_WALKER_SLOTS = 4096
_walkers: dict[Expr, Any] = {}


def _walker_for(e: Expr, factory: Callable[[], Any]) -> Any:
    """One walker per F/L/C node, so a sum's consecutive terms step instead of recomputing."""
    walker = _walkers.get(e)
    if walker is None:
        if len(_walkers) >= _WALKER_SLOTS:
            _walkers.clear()
        walker = _walkers[e] = factory()
    return walker


def clear_walkers() -> None:
    _walkers.clear()


@_handles(FibOf)
def _eval_fib(e: FibOf, env: Binding) -> Value:
    return _walker_for(e, FibWalker).fib(_index(e.index, env))


@_handles(LucasOf)
def _eval_lucas(e: LucasOf, env: Binding) -> Value:
    return _walker_for(e, FibWalker).lucas(_index(e.index, env))


@_handles(Binom)
def _eval_binom(e: Binom, env: Binding) -> Value:
    top = _index(e.top, env)
    if top < 0:
        raise EvaluationError(f"negative top index {top} in {print_expr(e)}")
    return _walker_for(e, BinomWalker).binom(top, _index(e.bottom, env))


@_handles(Sum)
def _eval_sum(e: Sum, env: Binding) -> Value:
    lo = _index(e.lo, env)
    hi = _index(e.hi, env)
    scope = dict(env)
    total: Value = 0
    for k in range(lo, hi + 1):
        scope[e.var] = k
        total = total + _eval(e.body, scope)
    return _narrow(total)


def _int_pair(e: Union[FloorDiv, CeilDiv], env: Binding) -> tuple[int, int]:
    a = _index(e.left, env)
    b = _index(e.right, env)
    if b == 0:
        raise EvaluationError(f"division by zero in {print_expr(e)}")
    return a, b


@_handles(FloorDiv)
def _eval_fdiv(e: FloorDiv, env: Binding) -> Value:
    a, b = _int_pair(e, env)
    return a // b


@_handles(CeilDiv)
def _eval_cdiv(e: CeilDiv, env: Binding) -> Value:
    a, b = _int_pair(e, env)
    return -((-a) // b)


def _gauss_parts(e: Union[RePow, ImPow], env: Binding) -> tuple[GoldenNum, GoldenNum]:
    m = _index(e.m, env)
    if m < 0:
        raise EvaluationError(f"negative Gaussian power {m} in {print_expr(e)}")
    x = GoldenNum.of(_eval(e.x, env))
    y = GoldenNum.of(_eval(e.y, env))
    return re_im_pow(x, y, m)


@_handles(RePow)
def _eval_re(e: RePow, env: Binding) -> Value:
    return _narrow(_gauss_parts(e, env)[0])


@_handles(ImPow)
def _eval_im(e: ImPow, env: Binding) -> Value:
    return _narrow(_gauss_parts(e, env)[1])


def eval_value(e: Expr, env: Binding) -> Value:
    """Evaluate to the narrowest exact type (int, Fraction or GoldenNum)."""
    try:
        return _narrow(_eval(e, env))
    except ZeroDivisionError as exc:
        raise EvaluationError(f"division by zero in {print_expr(e)}") from exc


def eval_expr(e: Expr, env: Binding) -> GoldenNum:
    return GoldenNum.of(eval_value(e, env))


def _atom_holds(atom: GuardAtom, env: Binding) -> bool:
    if isinstance(atom, Even):
        return _index(atom.expr, env) % 2 == 0
    if isinstance(atom, Odd):
        return _index(atom.expr, env) % 2 == 1
    left = _narrow(_eval(atom.left, env))
    right = _narrow(_eval(atom.right, env))
    if isinstance(atom, Eq):
        return GoldenNum.of(left) == GoldenNum.of(right)
    if isinstance(left, GoldenNum) or isinstance(right, GoldenNum):
        raise EvaluationError("ordering guard compares irrational values")
    return left <= right


def guard_holds(guard: Guard, env: Binding) -> bool:
    return all(_atom_holds(atom, env) for atom in guard)


def requires_hold(spec: IdentitySpec, env: Binding) -> bool:
    return all(guard_holds(g, env) for g in spec.require)


def select_case(spec: IdentitySpec, env: Binding) -> Case:
    """The unique active guarded case, falling back to the otherwise case."""
    active = [c for c in spec.rhs if not c.otherwise and guard_holds(c.guard, env)]
    if len(active) == 1:
        return active[0]
    if active:
        raise EvaluationError(
            f"{len(active)} cases hold at once: " + "; ".join(print_guard(c.guard) for c in active)
        )
    for case in spec.rhs:
        if case.otherwise:
            return case
    raise EvaluationError("no case applies")


# --- printing ---------------------------------------------------------------

_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = 1, 2, 3, 4, 5

_BINARY: dict[type, tuple[str, int]] = {
    Add: (" + ", _SUM),
    Sub: (" - ", _SUM),
    Mul: ("*", _PRODUCT),
    Div: ("/", _PRODUCT),
}

_CALLS: dict[type, str] = {
    FibOf: "F",
    LucasOf: "L",
    Binom: "C",
    FloorDiv: "fdiv",
    CeilDiv: "cdiv",
    RePow: "re",
    ImPow: "im",
}


def _level(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _SUM
    if isinstance(e, (Mul, Div, RatLit)):
        return _PRODUCT
    if isinstance(e, Neg):
        return _UNARY
    if isinstance(e, (Pow, SignPow)):
        return _POWER
    return _ATOM


def _wrap(e: Expr, minimum: int) -> str:
    text = print_expr(e)
    return f"({text})" if _level(e) < minimum else text


def print_expr(e: Expr) -> str:
    kind = type(e)
    if kind in _BINARY:
        op, level = _BINARY[kind]
        return f"{_wrap(e.left, level)}{op}{_wrap(e.right, level + 1)}"  # type: ignore[attr-defined]
    if kind in _CALLS:
        args = ", ".join(print_expr(child) for child in _subexprs(e))
        return f"{_CALLS[kind]}({args})"
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RatLit):
        return str(e.value)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Sqrt5):
        return "sqrt5"
    if isinstance(e, Alpha):
        return "alpha"
    if isinstance(e, Beta):
        return "beta"
    if isinstance(e, Neg):
        return f"-{_wrap(e.operand, _UNARY)}"
    if isinstance(e, Pow):
        exponent = print_expr(e.exponent)
        if _level(e.exponent) < _ATOM:
            exponent = f"({exponent})"
        return f"{_wrap(e.base, _ATOM)}^{exponent}"
    if isinstance(e, SignPow):
        return f"(-1)^({print_expr(e.exponent)})"
    if isinstance(e, Sum):
        return f"sum({e.var}={print_expr(e.lo)}..{print_expr(e.hi)}; {print_expr(e.body)})"
    raise TypeError(f"cannot print {kind.__name__}")


def _print_atom(atom: GuardAtom) -> str:
    if isinstance(atom, Even):
        return f"even({print_expr(atom.expr)})"
    if isinstance(atom, Odd):
        return f"odd({print_expr(atom.expr)})"
    op = "==" if isinstance(atom, Eq) else "<="
    return f"{print_expr(atom.left)} {op} {print_expr(atom.right)}"


def print_guard(guard: Guard) -> str:
    return " && ".join(_print_atom(atom) for atom in guard)


def _print_domain(p: ParamSpec) -> str:
    if p.lo is None:
        return "int"
    if p.hi is None:
        return f"{p.lo}..."
    return f"{p.lo}..{p.hi}"


def print_identity(spec: IdentitySpec) -> str:
    lines = [f"identity {spec.id} {{"]
    if spec.params:
        decls = ", ".join(f"{p.name} in {_print_domain(p)}" for p in spec.params)
        lines.append(f"  params {decls};")
    for guard in spec.require:
        lines.append(f"  require {print_guard(guard)};")
    lines.append(f"  lhs = {print_expr(spec.lhs)};")
    if spec.has_cases:
        lines.append("  rhs = cases {")
        for case in spec.rhs:
            head = "otherwise" if case.otherwise else print_guard(case.guard)
            lines.append(f"    {head} -> {print_expr(case.expr)};")
        lines.append("  }")
    else:
        lines.append(f"  rhs = {print_expr(spec.rhs[0].expr)}")
    lines.append("}")
    return "\n".join(lines) + "\n"

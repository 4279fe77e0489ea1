"""
The calculator's expression language.

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | primary
    primary := INT | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

A minus sign directly in front of an integer literal is folded into the
literal. Every node is typed Bundle, Chow or Scalar before anything is
evaluated; integer parameters (O(d), wedge(k, E), ...) must be literals.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple, Union

from app.utils.bundles import (
    chern_character,
    degree,
    determinant,
    segre,
    sym,
    todd,
    wedge,
)
from app.utils.errors import (
    CalculusError,
    EvaluationError,
    ParseError,
    TypeCheckError,
    UnknownIdentifier,
)
from app.utils.exact_core import ChowClass, format_rational, hyperplane, integral
from app.utils.ktheory import euler_char
from app.utils.riemann_roch import TrackedBundle, hrr_rhs

if TYPE_CHECKING:
    from app.models import Workspace

logger = logging.getLogger(__name__)

BUNDLE, CHOW, SCALAR = "Bundle", "Chow", "Scalar"
# argument kinds beyond the three value types
INT, NATURAL = "integer", "non-negative integer"

Value = Union[TrackedBundle, ChowClass, Fraction]
Span = Tuple[int, int]


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass
class Token:
    typ: str
    value: Optional[str]
    position: int  # 1-based

    def __repr__(self) -> str:
        if self.value is None:
            return f"Token({self.typ})"
        return f"Token({self.typ!r}, {self.value!r})"


_PUNCTUATION = {"(": "LParen", ")": "RParen", ",": "Comma", "+": "Plus", "-": "Minus", "*": "Star"}
_DESCRIPTIONS = {
    "Int": "integer", "Name": "identifier", "LParen": "'('", "RParen": "')'",
    "Comma": "','", "Plus": "'+'", "Minus": "'-'", "Star": "'*'", "EOF": "end of input",
}


def lex(text: str) -> List[Token]:
    tokens: List[Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(Token("Int", text[start:i], start + 1))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(Token("Name", text[start:i], start + 1))
            continue
        if c in _PUNCTUATION:
            tokens.append(Token(_PUNCTUATION[c], None, i + 1))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i + 1,
                         ["integer", "identifier", "'('", "')'", "','", "'+'", "'-'", "'*'"])
    tokens.append(Token("EOF", None, n + 1))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    span: Span = field(default=(0, 0), compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class Name(Expr):
    """A workspace bundle or one of the built-in constants T, Omega and H."""

    name: str


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: Tuple[Expr, ...]


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


CONSTANTS = {"T": BUNDLE, "Omega": BUNDLE, "H": CHOW}

# name -> list of accepted argument signatures, result type; None marks a variadic bundle list
SIGNATURES: Dict[str, Tuple[List[Optional[Tuple[str, ...]]], str]] = {
    "O": ([(INT,)], BUNDLE),
    "sum": ([None], BUNDLE),
    "tensor": ([None], BUNDLE),
    "dual": ([(BUNDLE,)], BUNDLE),
    "det": ([(BUNDLE,)], BUNDLE),
    "wedge": ([(NATURAL, BUNDLE)], BUNDLE),
    "sym": ([(NATURAL, BUNDLE)], BUNDLE),
    "twist": ([(BUNDLE, INT)], BUNDLE),
    "ch": ([(BUNDLE,)], CHOW),
    "td": ([(BUNDLE,)], CHOW),
    "c": ([(BUNDLE,), (NATURAL, BUNDLE)], CHOW),
    "segre": ([(BUNDLE,)], CHOW),
    "chi": ([(BUNDLE,)], SCALAR),
    "integral": ([(CHOW,)], SCALAR),
    "rank": ([(BUNDLE,)], SCALAR),
    "degree": ([(BUNDLE,)], SCALAR),
}

_MIN_VARIADIC = {"sum": 1, "tensor": 2}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class Parser:
    """Recursive descent over the token list; errors carry 1-based positions."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = lex(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def _end_of(self, tok: Token) -> int:
        return tok.position + (len(tok.value) if tok.value is not None else 1)

    def fail(self, tok: Token, expected: List[str]):
        found = _DESCRIPTIONS[tok.typ] if tok.value is None else repr(tok.value)
        raise ParseError(f"unexpected {found}", tok.position, expected)

    def expect(self, typ: str) -> Token:
        tok = self.next()
        if tok.typ != typ:
            self.fail(tok, [_DESCRIPTIONS[typ]])
        return tok

    def parse(self) -> Expr:
        expr = self.parse_expr()
        tok = self.peek()
        if tok.typ != "EOF":
            self.fail(tok, ["'+'", "'-'", "'*'", "end of input"])
        return expr

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.peek().typ in ("Plus", "Minus"):
            op = "+" if self.next().typ == "Plus" else "-"
            right = self.parse_term()
            left = BinOp(op, left, right, span=(left.span[0], right.span[1]))
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.peek().typ == "Star":
            self.next()
            right = self.parse_unary()
            left = BinOp("*", left, right, span=(left.span[0], right.span[1]))
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.typ != "Minus":
            return self.parse_primary()
        self.next()
        following = self.peek()
        if following.typ == "Int":
            self.next()
            return IntLit(-int(following.value), span=(tok.position, self._end_of(following)))
        operand = self.parse_unary()
        return Neg(operand, span=(tok.position, operand.span[1]))

    def parse_primary(self) -> Expr:
        tok = self.next()
        if tok.typ == "Int":
            return IntLit(int(tok.value), span=(tok.position, self._end_of(tok)))
        if tok.typ == "LParen":
            inner = self.parse_expr()
            close = self.expect("RParen")
            # parentheses only group; the span widens to include them
            return _with_span(inner, (tok.position, close.position + 1))
        if tok.typ == "Name":
            if self.peek().typ != "LParen":
                return Name(tok.value, span=(tok.position, self._end_of(tok)))
            self.next()
            args = [self.parse_expr()]
            while self.peek().typ == "Comma":
                self.next()
                args.append(self.parse_expr())
            close = self.peek()
            if close.typ != "RParen":
                self.fail(close, ["','", "')'", "'+'", "'-'", "'*'"])
            self.next()
            return Call(tok.value, tuple(args), span=(tok.position, close.position + 1))
        self.fail(tok, ["integer", "identifier", "'('", "'-'"])


def _with_span(expr: Expr, span: Span) -> Expr:
    object.__setattr__(expr, 'span', span)
    return expr


def parse(text: str) -> Expr:
    return Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def print_expr(expr: Expr) -> str:
    """Canonical text; parse(print_expr(e)) == e."""
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.func}({', '.join(print_expr(a) for a in expr.args)})"
    if isinstance(expr, Neg):
        inner = print_expr(expr.operand)
        if isinstance(expr.operand, (IntLit, BinOp)):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, BinOp):
        level = _PRECEDENCE[expr.op]
        left, right = print_expr(expr.left), print_expr(expr.right)
        if isinstance(expr.left, BinOp) and _PRECEDENCE[expr.left.op] < level:
            left = f"({left})"
        if isinstance(expr.right, BinOp) and _PRECEDENCE[expr.right.op] <= level:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# Type checking
# ---------------------------------------------------------------------------

def _arg_matches(kind: str, arg: Expr, arg_type: str) -> bool:
    if kind == INT:
        return isinstance(arg, IntLit)
    if kind == NATURAL:
        return isinstance(arg, IntLit) and arg.value >= 0
    if kind == CHOW:
        return arg_type in (CHOW, SCALAR)
    return arg_type == kind


def typecheck(expr: Expr, bundle_names: Optional[set] = None) -> str:
    """Return Bundle, Chow or Scalar, or raise with the offending position."""
    bundle_names = bundle_names or set()
    if isinstance(expr, IntLit):
        return SCALAR
    if isinstance(expr, Name):
        if expr.name in bundle_names:
            return BUNDLE
        if expr.name in CONSTANTS:
            return CONSTANTS[expr.name]
        raise UnknownIdentifier(f"unknown identifier {expr.name!r}", expr.span[0],
                                sorted(bundle_names) + sorted(CONSTANTS))
    if isinstance(expr, Neg):
        inner = typecheck(expr.operand, bundle_names)
        if inner == BUNDLE:
            raise TypeCheckError("cannot negate a bundle", expr.span[0], [CHOW, SCALAR])
        return inner
    if isinstance(expr, BinOp):
        left = typecheck(expr.left, bundle_names)
        right = typecheck(expr.right, bundle_names)
        for side, side_type in ((expr.left, left), (expr.right, right)):
            if side_type == BUNDLE:
                raise TypeCheckError(
                    f"'{expr.op}' does not apply to bundles; use sum(...) or tensor(...)",
                    side.span[0], [CHOW, SCALAR],
                )
        return SCALAR if left == right == SCALAR else CHOW
    if isinstance(expr, Call):
        if expr.func not in SIGNATURES:
            raise UnknownIdentifier(f"unknown function {expr.func!r}", expr.span[0], sorted(SIGNATURES))
        signatures, result = SIGNATURES[expr.func]
        arg_types = [typecheck(a, bundle_names) if not isinstance(a, IntLit) else SCALAR for a in expr.args]
        for signature in signatures:
            if signature is None:
                if len(expr.args) >= _MIN_VARIADIC[expr.func] and all(t == BUNDLE for t in arg_types):
                    return result
                continue
            if len(signature) == len(expr.args) and all(
                _arg_matches(kind, a, t) for kind, a, t in zip(signature, expr.args, arg_types)
            ):
                return result
        raise TypeCheckError(
            f"{expr.func}() expects {_describe(signatures, expr.func)}", expr.span[0],
            [_describe(signatures, expr.func)],
        )
    raise TypeError(f"not an expression node: {expr!r}")


def _describe(signatures, func: str) -> str:
    options = []
    for signature in signatures:
        if signature is None:
            options.append(f"{_MIN_VARIADIC[func]} or more bundles")
        else:
            options.append("(" + ", ".join(signature) + ")")
    return " or ".join(options)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class Evaluator:
    def __init__(self, workspace: "Workspace", source: Optional[str] = None) -> None:
        self.workspace = workspace
        self.ambient = workspace.ambient
        self.source = source

    def evaluate(self, expr: Expr) -> Value:
        try:
            return self._evaluate(expr)
        except EvaluationError:
            raise
        except CalculusError as e:
            raise EvaluationError(str(e), expr.span, self.source, cause=e)

    def _evaluate(self, expr: Expr) -> Value:
        n = self.ambient
        if isinstance(expr, IntLit):
            return Fraction(expr.value)
        if isinstance(expr, Name):
            if expr.name in self.workspace.bundles:
                return self.workspace.bundles[expr.name]
            if expr.name == "T":
                return TrackedBundle.tangent(n)
            if expr.name == "Omega":
                return TrackedBundle.cotangent(n)
            return hyperplane(n)
        if isinstance(expr, Neg):
            return -self.evaluate(expr.operand)
        if isinstance(expr, BinOp):
            left, right = self.evaluate(expr.left), self.evaluate(expr.right)
            left, right = self._as_chow_if_needed(left, right), self._as_chow_if_needed(right, left)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if isinstance(left, Fraction) and isinstance(right, ChowClass):
                return right.scale(left)
            return left * right
        return self._call(expr)

    def _as_chow_if_needed(self, value, other):
        if isinstance(value, Fraction) and isinstance(other, ChowClass):
            return ChowClass.scalar(self.ambient, value)
        return value

    def _call(self, expr: Call) -> Value:
        n = self.ambient
        f, args = expr.func, expr.args
        if f == "O":
            return TrackedBundle.line(n, args[0].value)
        if f in ("wedge", "sym"):
            bundle = self.evaluate(args[1]).bundle
            op = wedge if f == "wedge" else sym
            return TrackedBundle.untracked(op(args[0].value, bundle))
        if f == "twist":
            return self.evaluate(args[0]).twist(args[1].value)
        if f == "c" and len(args) == 2:
            return self.evaluate(args[1]).bundle.c(args[0].value)
        if f == "integral":
            value = self.evaluate(args[0])
            if isinstance(value, Fraction):
                value = ChowClass.scalar(n, value)
            return integral(value)

        values = [self.evaluate(a) for a in args]
        if f == "sum":
            return values[0].sum(*values[1:])
        if f == "tensor":
            result = values[0]
            for v in values[1:]:
                result = result.tensor(v)
            return result
        tracked = values[0]
        bundle = tracked.bundle
        if f == "dual":
            return tracked.dual()
        if f == "det":
            return TrackedBundle.untracked(determinant(bundle))
        if f == "ch":
            return chern_character(bundle)
        if f == "td":
            return todd(bundle)
        if f == "c":
            return bundle.chern
        if f == "segre":
            return segre(bundle)
        if f == "chi":
            if tracked.tracked:
                return Fraction(euler_char(tracked.kclass))
            return hrr_rhs(bundle)
        if f == "rank":
            return Fraction(bundle.rank)
        if f == "degree":
            return degree(bundle)
        raise TypeError(f"no evaluation rule for {f}")


def evaluate(expr: Expr, workspace: "Workspace", source: Optional[str] = None) -> Value:
    """Type-check against the workspace, then evaluate."""
    typecheck(expr, set(workspace.bundles))
    return Evaluator(workspace, source).evaluate(expr)


def evaluate_text(text: str, workspace: "Workspace") -> Tuple[Expr, str, Value]:
    expr = parse(text)
    kind = typecheck(expr, set(workspace.bundles))
    value = Evaluator(workspace, text).evaluate(expr)
    logger.debug("evaluated %s : %s", print_expr(expr), kind)
    return expr, kind, value


def value_to_json(kind: str, value: Value) -> dict:
    if kind == BUNDLE:
        return {"type": BUNDLE, "value": value.to_json()}
    if kind == CHOW:
        return {"type": CHOW, "value": value.to_json()}
    return {"type": SCALAR, "value": format_rational(value)}


def value_to_text(kind: str, value: Value) -> str:
    if kind == BUNDLE:
        return str(value.bundle)
    if kind == CHOW:
        return str(value)
    return format_rational(value)


# ---------------------------------------------------------------------------
# Random well-typed expressions (round-trip checks)
# ---------------------------------------------------------------------------

def random_expression(rng, depth: int, bundle_names: Tuple[str, ...] = ()) -> Expr:
    kind = rng.choice([BUNDLE, CHOW, SCALAR])
    return _random_of_type(rng, kind, depth, bundle_names)


def _random_of_type(rng, kind: str, depth: int, names: Tuple[str, ...]) -> Expr:
    leaf = depth <= 1
    if kind == BUNDLE:
        if leaf:
            options = [Call("O", (IntLit(rng.randint(-3, 3)),)), Name("T"), Name("Omega")]
            options += [Name(name) for name in names]
            return rng.choice(options)
        sub = lambda: _random_of_type(rng, BUNDLE, depth - 1, names)
        choice = rng.randrange(7)
        if choice == 0:
            return Call("sum", tuple(sub() for _ in range(rng.randint(1, 3))))
        if choice == 1:
            return Call("tensor", (sub(), sub()))
        if choice == 2:
            return Call("dual", (sub(),))
        if choice == 3:
            return Call("det", (sub(),))
        if choice == 4:
            return Call("twist", (sub(), IntLit(rng.randint(-2, 2))))
        return Call("wedge" if choice == 5 else "sym", (IntLit(rng.randint(0, 2)), sub()))
    if kind == CHOW:
        bundle = _random_of_type(rng, BUNDLE, depth - 1, names) if not leaf else Call("O", (IntLit(1),))
        if leaf:
            return rng.choice([Name("H"), Call("ch", (bundle,)), Call("td", (bundle,))])
        choice = rng.randrange(6)
        if choice == 0:
            return Call(rng.choice(["ch", "td", "segre", "c"]), (bundle,))
        if choice == 1:
            return Call("c", (IntLit(rng.randint(0, 3)), bundle))
        if choice == 2:
            return Neg(_random_of_type(rng, CHOW, depth - 1, names))
        other = rng.choice([CHOW, SCALAR])
        left = _random_of_type(rng, CHOW, depth - 1, names)
        right = _random_of_type(rng, other, depth - 1, names)
        if rng.random() < 0.5:
            left, right = right, left
        return BinOp(rng.choice(["+", "-", "*"]), left, right)
    if leaf:
        return IntLit(rng.randint(-5, 5))
    choice = rng.randrange(6)
    if choice == 0:
        return Call(rng.choice(["chi", "rank", "degree"]), (_random_of_type(rng, BUNDLE, depth - 1, names),))
    if choice == 1:
        return Call("integral", (_random_of_type(rng, CHOW, depth - 1, names),))
    if choice == 2:
        return Neg(_random_of_type(rng, SCALAR, depth - 1, names))
    return BinOp(rng.choice(["+", "-", "*"]),
                 _random_of_type(rng, SCALAR, depth - 1, names),
                 _random_of_type(rng, SCALAR, depth - 1, names))

"""A small expression language for functions of one variable, with exact
first and second derivatives by forward-mode jet arithmetic.

Grammar (EBNF, also published in docs/grammar.md)::

    expr    = term   { ("+" | "-") term } ;
    term    = unary  { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;              (* right-associative *)
    atom    = NUMBER | "x" | "pi" | "e"
            | FUNC "(" expr { "," expr } ")"
            | "(" expr ")" ;
    FUNC    = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt"
            | "abs" | "atan" | "pow" ;

Expressions are immutable; ``parse`` and ``to_source`` are mutually inverse
up to structural equality (``parse(to_source(e)) == e``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EvalDomainError, ExprSyntaxError, NonFiniteError, UnknownNameError

FUNCTIONS = ("abs", "atan", "cos", "exp", "log", "pow", "sin", "sqrt", "tan")
CONSTANTS = {"pi": math.pi, "e": math.e}

_ARITY = {name: 1 for name in FUNCTIONS}
_ARITY["pow"] = 2


@dataclass(frozen=True)
class Expr:
    """One node of an expression tree.

    ``kind`` is one of: "num", "var", "neg", "add", "sub", "mul", "div",
    "pow", "call".  Numbers carry ``value``; calls carry the function
    ``name``; all interior nodes carry ``args``.
    """

    kind: str
    value: float = 0.0
    name: str = ""
    args: tuple["Expr", ...] = field(default=())

    def __post_init__(self):
        arity = {
            "num": 0, "var": 0, "neg": 1,
            "add": 2, "sub": 2, "mul": 2, "div": 2, "pow": 2,
        }
        if self.kind == "call":
            if self.name not in _ARITY:
                raise ValueError(f"unknown function {self.name!r}")
            if len(self.args) != _ARITY[self.name]:
                raise ValueError(f"{self.name} takes {_ARITY[self.name]} argument(s)")
        elif self.kind in arity:
            if len(self.args) != arity[self.kind]:
                raise ValueError(f"{self.kind} node takes {arity[self.kind]} argument(s)")
        else:
            raise ValueError(f"unknown node kind {self.kind!r}")


def num(value: float) -> Expr:
    return Expr("num", value=float(value))


def var() -> Expr:
    return Expr("var")


def call(name: str, *args: Expr) -> Expr:
    return Expr("call", name=name, args=tuple(args))


def add(a: Expr, b: Expr) -> Expr:
    return Expr("add", args=(a, b))


def sub(a: Expr, b: Expr) -> Expr:
    return Expr("sub", args=(a, b))


def mul(a: Expr, b: Expr) -> Expr:
    return Expr("mul", args=(a, b))


def div(a: Expr, b: Expr) -> Expr:
    return Expr("div", args=(a, b))


def pow_(a: Expr, b: Expr) -> Expr:
    return Expr("pow", args=(a, b))


def neg(a: Expr) -> Expr:
    return Expr("neg", args=(a,))


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_OPS = "+-*/^(),"


class _Token:
    __slots__ = ("kind", "text", "offset", "value")

    def __init__(self, kind: str, text: str, offset: int, value: float = 0.0):
        self.kind = kind      # "num", "name", one of +-*/^(),  or "end"
        self.text = text
        self.offset = offset
        self.value = value


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_OPS:
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                seen_dot = seen_dot or source[j] == "."
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ExprSyntaxError(f"malformed number {text!r}", i) from None
            tokens.append(_Token("num", text, i, value))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("name", source[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, expected)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind in "+-":
            op = self.advance().kind
            rhs = self.parse_term()
            node = Expr("add" if op == "+" else "sub", args=(node, rhs))
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek().kind in "*/":
            op = self.advance().kind
            rhs = self.parse_unary()
            node = Expr("mul" if op == "*" else "div", args=(node, rhs))
        return node

    def parse_unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek().kind == "^":
            self.advance()
            exponent = self.parse_unary()   # right-associative, unary minus allowed
            return pow_(base, exponent)
        return base

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return num(tok.value)
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")", ("')'",))
            return node
        if tok.kind == "name":
            self.advance()
            if self.peek().kind == "(":
                if tok.text not in _ARITY:
                    raise UnknownNameError(tok.text, tok.offset, is_call=True)
                self.advance()
                args = [self.parse_expr()]
                while self.peek().kind == ",":
                    self.advance()
                    args.append(self.parse_expr())
                self.expect(")", ("')'", "','"))
                if len(args) != _ARITY[tok.text]:
                    raise ExprSyntaxError(
                        f"{tok.text} takes {_ARITY[tok.text]} argument(s), got {len(args)}",
                        tok.offset)
                return call(tok.text, *args)
            if tok.text == "x":
                return var()
            if tok.text in CONSTANTS:
                return num(CONSTANTS[tok.text])
            raise UnknownNameError(tok.text, tok.offset, is_call=False)
        raise ExprSyntaxError(
            f"unexpected {tok.text or 'end of input'!r}", tok.offset,
            ("number", "'x'", "function name", "'('", "'-'"))


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises ExprSyntaxError (with byte offset and expected-token set) on
    malformed input, and UnknownNameError for identifiers outside the
    language.
    """
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.offset,
                              ("operator", "end of input"))
    return node


# --------------------------------------------------------------------------
# printer

_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _format_number(value: float) -> str:
    if value == math.pi:
        return "pi"
    if value == math.e:
        return "e"
    if value >= 0 and value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_source(e: Expr) -> str:
    """Render an expression as source text; ``parse(to_source(e)) == e``."""
    return _print(e, 0)


def _print(e: Expr, parent_prec: int) -> str:
    if e.kind == "num":
        text = _format_number(e.value)
        if text.startswith("-"):
            return f"({text})" if parent_prec > 1 else text
        return text
    if e.kind == "var":
        return "x"
    if e.kind == "call":
        return e.name + "(" + ", ".join(_print(a, 0) for a in e.args) + ")"
    prec = _PRECEDENCE[e.kind]
    if e.kind == "neg":
        text = "-" + _print(e.args[0], prec)
    elif e.kind == "pow":
        # right-associative: parenthesize an equal-precedence *left* child
        text = _print(e.args[0], prec + 1) + "^" + _print(e.args[1], prec)
    else:
        # left-associative: parenthesize an equal-precedence *right* child
        symbol = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[e.kind]
        text = _print(e.args[0], prec) + symbol + _print(e.args[1], prec + 1)
    if parent_prec > prec:
        return "(" + text + ")"
    if parent_prec == prec and e.kind == "neg":
        # avoid "--x" and keep "2*(-x)" readable
        return "(" + text + ")"
    return text


# --------------------------------------------------------------------------
# jets

@dataclass(frozen=True, slots=True)
class Jet2:
    """Value and first two derivatives of a function at a point."""

    v: float
    d1: float
    d2: float

    @staticmethod
    def variable(x: float) -> "Jet2":
        return Jet2(float(x), 1.0, 0.0)

    @staticmethod
    def constant(c: float) -> "Jet2":
        return Jet2(float(c), 0.0, 0.0)

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.v + other.v, self.d1 + other.d1, self.d2 + other.d2)

    def __sub__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.v - other.v, self.d1 - other.d1, self.d2 - other.d2)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.v, -self.d1, -self.d2)

    def __mul__(self, other: "Jet2") -> "Jet2":
        return Jet2(
            self.v * other.v,
            self.d1 * other.v + self.v * other.d1,
            self.d2 * other.v + 2.0 * self.d1 * other.d1 + self.v * other.d2,
        )

    def __truediv__(self, other: "Jet2") -> "Jet2":
        q = self.v / other.v
        q1 = (self.d1 - q * other.d1) / other.v
        q2 = (self.d2 - 2.0 * q1 * other.d1 - q * other.d2) / other.v
        return Jet2(q, q1, q2)

    def scale(self, c: float) -> "Jet2":
        return Jet2(c * self.v, c * self.d1, c * self.d2)


def _compose(f: float, fp: float, fpp: float, u: Jet2) -> Jet2:
    """Chain rule: the jet of g(u) from g's scalar derivatives at u.v."""
    return Jet2(f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2)


def _int_power(u: Jet2, n: int) -> Jet2:
    if n == 0:
        return Jet2.constant(1.0)
    if n < 0:
        return Jet2.constant(1.0) / _int_power(u, -n)
    result = Jet2.constant(1.0)
    base = u
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def eval_jet2(e: Expr, x: float) -> Jet2:
    """Evaluate ``e`` and its first two derivatives at ``x``.

    Raises EvalDomainError when a subexpression leaves its mathematical
    domain (reporting that subexpression) and NonFiniteError on overflow.
    """
    jet = _eval(e, float(x))
    if not (math.isfinite(jet.v) and math.isfinite(jet.d1) and math.isfinite(jet.d2)):
        raise NonFiniteError(to_source(e), x)
    return jet


def _eval(e: Expr, x: float) -> Jet2:
    kind = e.kind
    if kind == "num":
        return Jet2.constant(e.value)
    if kind == "var":
        return Jet2.variable(x)
    if kind == "neg":
        return -_eval(e.args[0], x)
    if kind == "add":
        return _eval(e.args[0], x) + _eval(e.args[1], x)
    if kind == "sub":
        return _eval(e.args[0], x) - _eval(e.args[1], x)
    if kind == "mul":
        return _eval(e.args[0], x) * _eval(e.args[1], x)
    if kind == "div":
        denominator = _eval(e.args[1], x)
        if denominator.v == 0.0:
            raise EvalDomainError(to_source(e), x, "division by zero")
        return _eval(e.args[0], x) / denominator
    if kind == "pow":
        return _power(e, _eval(e.args[0], x), _eval(e.args[1], x), x)
    # call
    u = _eval(e.args[0], x)
    try:
        return _apply_function(e, u, x)
    except OverflowError:
        raise NonFiniteError(to_source(e), x) from None
    except ValueError:
        # math.sin/cos/tan reject non-finite arguments with ValueError
        raise NonFiniteError(to_source(e), x) from None


def _power(e: Expr, base: Jet2, exponent: Jet2, x: float) -> Jet2:
    if exponent.d1 == 0.0 and exponent.d2 == 0.0 and float(exponent.v).is_integer():
        n = int(exponent.v)
        if base.v == 0.0 and n < 0:
            raise EvalDomainError(to_source(e), x, "zero base with negative exponent")
        return _int_power(base, n)
    if base.v <= 0.0:
        raise EvalDomainError(to_source(e), x,
                              "non-integer exponent needs a positive base")
    try:
        log_base = math.log(base.v)
        value = math.exp(exponent.v * log_base)
    except OverflowError:
        raise NonFiniteError(to_source(e), x) from None
    # d/dx exp(w log u) with u = base, w = exponent
    w = exponent
    u = base
    t1 = w.d1 * log_base + w.v * u.d1 / u.v
    t2 = (w.d2 * log_base + 2.0 * w.d1 * u.d1 / u.v
          + w.v * (u.d2 * u.v - u.d1 * u.d1) / (u.v * u.v))
    return Jet2(value, value * t1, value * (t1 * t1 + t2))


def _apply_function(e: Expr, u: Jet2, x: float) -> Jet2:
    name = e.name
    if name == "pow":
        other = _eval(e.args[1], x)
        return _power(e, u, other, x)
    if name == "sin":
        s, c = math.sin(u.v), math.cos(u.v)
        return _compose(s, c, -s, u)
    if name == "cos":
        s, c = math.sin(u.v), math.cos(u.v)
        return _compose(c, -s, -c, u)
    if name == "tan":
        t = math.tan(u.v)
        sec2 = 1.0 + t * t
        return _compose(t, sec2, 2.0 * t * sec2, u)
    if name == "exp":
        v = math.exp(u.v)
        return _compose(v, v, v, u)
    if name == "log":
        if u.v <= 0.0:
            raise EvalDomainError(to_source(e), x, "log of a non-positive value")
        return _compose(math.log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v), u)
    if name == "sqrt":
        if u.v < 0.0:
            raise EvalDomainError(to_source(e), x, "sqrt of a negative value")
        if u.v == 0.0:
            raise EvalDomainError(to_source(e), x, "sqrt not differentiable at 0")
        r = math.sqrt(u.v)
        return _compose(r, 0.5 / r, -0.25 / (r * u.v), u)
    if name == "abs":
        if u.v == 0.0:
            raise EvalDomainError(to_source(e), x, "abs not differentiable at 0")
        sign = 1.0 if u.v > 0.0 else -1.0
        return _compose(abs(u.v), sign, 0.0, u)
    if name == "atan":
        d = 1.0 + u.v * u.v
        return _compose(math.atan(u.v), 1.0 / d, -2.0 * u.v / (d * d), u)
    raise ValueError(f"unknown function {name!r}")  # pragma: no cover


def eval_value(e: Expr, x: float) -> float:
    """Evaluate just the value of ``e`` at ``x`` (same error semantics)."""
    return eval_jet2(e, x).v

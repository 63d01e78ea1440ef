"""Expression language for parameter functions of (t, x).

Grammar (recursive descent)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?
    atom    := number | "t" | "x" | "pi" | ident "(" expr ("," expr)* ")" | "(" expr ")"

``^`` binds tighter than unary minus and is right-associative, so ``-x^2``
is ``-(x^2)`` and ``2^-x`` is ``2^(-x)``.

Evaluation works on floats and on numpy arrays alike.  All domain
violations are reported as :class:`DomainError`; nothing is allowed to
turn silently into ``nan`` or ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Token", "LexError", "ParseError", "DomainError",
    "Expr", "Const", "Var", "Neg", "BinOp", "Call",
    "BUILTINS", "tokenize", "parse", "evaluate", "eval_expr", "pretty",
    "fold_constants", "degree", "depends_on",
]

BUILTINS = {
    "floor": 1, "abs": 1, "sqrt": 1, "exp": 1, "ln": 1, "sin": 1, "cos": 1,
    "min": 2, "max": 2, "ge": 2, "gt": 2, "le": 2, "lt": 2, "clamp": 3,
}
CONSTANTS = {"pi": math.pi}
VARIABLES = ("t", "x")

_OPERATORS = {"+": "+", "-": "-", "−": "-", "*": "*", "/": "/", "^": "^"}


class LexError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(ArithmeticError):
    """Evaluation left the real domain of a node (sqrt(-1), ln(0), 1/0, ...)."""

    def __init__(self, message, node=None, t=None, x=None):
        where = ""
        if t is not None:
            where = f" at t={t!r}, x={x!r}"
        super().__init__(f"{message}{where}" + (f" in '{pretty(node)}'" if node is not None else ""))
        self.node = node
        self.t = t
        self.x = x


# ---------------------------------------------------------------- tokens


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | variable | operator | paren | comma
    lexeme: str
    position: int


def _scan_number(src, i):
    n = len(src)
    j = i
    while j < n and src[j].isdigit():
        j += 1
    if j < n and src[j] == ".":
        j += 1
        while j < n and src[j].isdigit():
            j += 1
    if j == i or src[i:j] == ".":
        raise LexError(f"malformed number {src[i:j]!r}", i)
    if j < n and src[j] in "eE":
        k = j + 1
        if k < n and src[k] in "+-":
            k += 1
        if k < n and src[k].isdigit():
            while k < n and src[k].isdigit():
                k += 1
            j = k
        else:
            raise LexError("malformed exponent", j)
    return j


def tokenize(src: str) -> list[Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
        elif c.isdigit() or c == ".":
            j = _scan_number(src, i)
            tokens.append(Token("number", src[i:j], i))
            i = j
        elif c.isascii() and (c.isalpha() or c == "_"):
            j = i
            while j < n and src[j].isascii() and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            tokens.append(Token("variable" if word in VARIABLES else "ident", word, i))
            i = j
        elif c in _OPERATORS:
            tokens.append(Token("operator", c, i))
            i += 1
        elif c in "()":
            tokens.append(Token("paren", c, i))
            i += 1
        elif c == ",":
            tokens.append(Token("comma", c, i))
            i += 1
        else:
            raise LexError(f"unexpected character {c!r}", i)
    return tokens


# ------------------------------------------------------------------- AST


class Expr:
    """Base class of immutable expression nodes."""

    def __call__(self, t, x):
        return evaluate(self, t, x)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    name: str
    args: tuple


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def offset(self):
        tok = self.peek()
        return tok.position if tok is not None else len(self.src)

    def accept(self, kind, lexemes=None):
        tok = self.peek()
        if tok is not None and tok.kind == kind and (lexemes is None or tok.lexeme in lexemes):
            self.i += 1
            return tok
        return None

    def expect(self, kind, lexeme, what):
        tok = self.accept(kind, (lexeme,))
        if tok is None:
            found = "end of input" if self.peek() is None else repr(self.peek().lexeme)
            raise ParseError(f"expected {what}, found {found}", self.offset())
        return tok

    def parse(self):
        e = self.expr()
        if self.peek() is not None:
            raise ParseError(f"expected operator or end of input, found {self.peek().lexeme!r}", self.offset())
        return e

    def expr(self):
        e = self.term()
        while (tok := self.accept("operator", ("+", "-", "−"))) is not None:
            e = BinOp(_OPERATORS[tok.lexeme], e, self.term())
        return e

    def term(self):
        e = self.unary()
        while (tok := self.accept("operator", ("*", "/"))) is not None:
            e = BinOp(tok.lexeme, e, self.unary())
        return e

    def unary(self):
        if self.accept("operator", ("-", "−")) is not None:
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("operator", ("^",)) is not None:
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("expected operand, found end of input", len(self.src))
        if tok.kind == "number":
            self.i += 1
            return Const(float(tok.lexeme))
        if tok.kind == "variable":
            self.i += 1
            return Var(tok.lexeme)
        if tok.kind == "ident":
            self.i += 1
            if tok.lexeme in CONSTANTS and not (self.peek() and self.peek().lexeme == "("):
                return Const(CONSTANTS[tok.lexeme])
            if tok.lexeme not in BUILTINS:
                raise ParseError(f"unknown function {tok.lexeme!r}", tok.position)
            self.expect("paren", "(", f"'(' after {tok.lexeme}")
            args = [self.expr()]
            while self.accept("comma") is not None:
                args.append(self.expr())
            self.expect("paren", ")", "')' or ','")
            if len(args) != BUILTINS[tok.lexeme]:
                raise ParseError(
                    f"{tok.lexeme} takes {BUILTINS[tok.lexeme]} argument(s), got {len(args)}", tok.position)
            return Call(tok.lexeme, tuple(args))
        if self.accept("paren", ("(",)) is not None:
            e = self.expr()
            self.expect("paren", ")", "')'")
            return e
        raise ParseError(f"expected operand, found {tok.lexeme!r}", tok.position)


def parse(src: str) -> Expr:
    return _Parser(src).parse()


# --------------------------------------------------------- pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg) or (isinstance(e, Const) and math.copysign(1.0, e.value) < 0):
        return _PREC["neg"]
    return 5


def _wrap(e, cond):
    s = pretty(e)
    return f"({s})" if cond else s


def pretty(e: Expr) -> str:
    """Render ``e`` with the fewest parentheses that reparse to the same tree."""
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _prec(e.arg) < 3)
    if isinstance(e, Call):
        return f"{e.name}({', '.join(pretty(a) for a in e.args)})"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, _prec(e.left) < 5)}^{_wrap(e.right, _prec(e.right) < 3)}"
        return f"{_wrap(e.left, _prec(e.left) < p)} {e.op} {_wrap(e.right, _prec(e.right) <= p)}"
    raise TypeError(f"not an expression: {e!r}")


# ------------------------------------------------------------ evaluation

Number = Union[float, np.ndarray]


def _first_bad(bad, t, x):
    bad = np.broadcast_to(bad, np.broadcast(t, x, bad).shape)
    idx = np.unravel_index(int(np.argmax(bad)), bad.shape) if bad.ndim else ()
    tt = np.broadcast_to(t, bad.shape)[idx]
    xx = np.broadcast_to(x, bad.shape)[idx]
    return float(tt), float(xx)


def _check(e, ok, t, x, message):
    if not np.all(ok):
        tt, xx = _first_bad(~np.asarray(ok), t, x)
        raise DomainError(message, e, tt, xx)


def _ev(e, t, x):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return t if e.name == "t" else x
    if isinstance(e, Neg):
        return -_ev(e.arg, t, x)
    if isinstance(e, BinOp):
        a = _ev(e.left, t, x)
        b = _ev(e.right, t, x)
        if e.op == "+":
            r = np.add(a, b)
        elif e.op == "-":
            r = np.subtract(a, b)
        elif e.op == "*":
            r = np.multiply(a, b)
        elif e.op == "/":
            _check(e, np.asarray(b) != 0, t, x, "division by zero")
            r = np.divide(a, b)
        else:
            a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
            integral = np.floor(b_arr) == b_arr
            _check(e, (a_arr >= 0) | integral, t, x, "negative base with non-integer exponent")
            _check(e, (a_arr != 0) | (b_arr >= 0), t, x, "zero to a negative power")
            r = np.power(a_arr, b_arr)
        _check(e, np.isfinite(r), t, x, "non-finite result")
        return r
    if isinstance(e, Call):
        args = [_ev(a, t, x) for a in e.args]
        name = e.name
        if name == "sqrt":
            _check(e, np.asarray(args[0]) >= 0, t, x, "sqrt of a negative number")
            return np.sqrt(args[0])
        if name == "ln":
            _check(e, np.asarray(args[0]) > 0, t, x, "ln of a non-positive number")
            return np.log(args[0])
        if name == "exp":
            r = np.exp(args[0])
            _check(e, np.isfinite(r), t, x, "exp overflow")
            return r
        if name == "floor":
            return np.floor(args[0])
        if name == "abs":
            return np.abs(args[0])
        if name == "sin":
            return np.sin(args[0])
        if name == "cos":
            return np.cos(args[0])
        if name == "min":
            return np.minimum(args[0], args[1])
        if name == "max":
            return np.maximum(args[0], args[1])
        if name == "clamp":
            return np.minimum(np.maximum(args[0], args[1]), args[2])
        cmp = {"ge": np.greater_equal, "gt": np.greater, "le": np.less_equal, "lt": np.less}[name]
        return np.where(cmp(args[0], args[1]), 1.0, 0.0)
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, t: Number, x: Number) -> Number:
    """Evaluate ``e`` at (t, x); arrays broadcast, scalars give a float."""
    scalar = np.ndim(t) == 0 and np.ndim(x) == 0
    with np.errstate(all="ignore"):
        r = _ev(e, np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    if scalar:
        return float(r)
    return np.broadcast_to(np.asarray(r, dtype=float), np.broadcast(np.asarray(t), np.asarray(x)).shape)


def eval_expr(e: Expr, t: float, x: float) -> float:
    return float(evaluate(e, float(t), float(x)))


# ------------------------------------------------------------- analysis


def depends_on(e: Expr, var: str) -> bool:
    if isinstance(e, Var):
        return e.name == var
    if isinstance(e, Neg):
        return depends_on(e.arg, var)
    if isinstance(e, BinOp):
        return depends_on(e.left, var) or depends_on(e.right, var)
    if isinstance(e, Call):
        return any(depends_on(a, var) for a in e.args)
    return False


def fold_constants(e: Expr) -> Expr:
    """Replace variable-free subtrees by their value (when evaluable)."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        e = Neg(fold_constants(e.arg))
    elif isinstance(e, BinOp):
        e = BinOp(e.op, fold_constants(e.left), fold_constants(e.right))
    else:
        e = Call(e.name, tuple(fold_constants(a) for a in e.args))
    if not depends_on(e, "t") and not depends_on(e, "x"):
        try:
            return Const(eval_expr(e, 0.0, 0.0))
        except DomainError:
            return e
    return e


def _degree(e, var):
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return 1 if e.name == var else 0
    if isinstance(e, Neg):
        return _degree(e.arg, var)
    if isinstance(e, Call):
        return 0 if not any(depends_on(a, var) for a in e.args) else None
    dl, dr = _degree(e.left, var), _degree(e.right, var)
    if dl is None or dr is None:
        return None
    if e.op in "+-":
        return max(dl, dr)
    if e.op == "*":
        return dl + dr
    if e.op == "/":
        return dl if dr == 0 else None
    # power: polynomial only for a constant non-negative integer exponent
    if dr != 0:
        return None
    if dl == 0:
        return 0
    if isinstance(e.right, Const) and e.right.value >= 0 and float(e.right.value).is_integer():
        return dl * int(e.right.value)
    return None


def degree(e: Expr, var: str = "x") -> int | None:
    """Polynomial degree of ``e`` in ``var`` (other variable treated as a
    coefficient), or ``None`` when ``e`` is not polynomial in ``var``."""
    return _degree(fold_constants(e), var)

"""Recursive-descent parser and vectorized evaluator for weight expressions.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := base ("^" factor)?
    base   := NUMBER | IDENT | IDENT "(" expr ("," expr)? ")" | "(" expr ")"

``^`` binds tighter than unary minus (``-x1^2`` is ``-(x1^2)``) and is
right-associative. Variables are ``x<k>``, ``y<k>``, ``r<k>``, ``th<k>``
(real part, imaginary part, modulus and argument in ``[0, 2*pi)`` of the
k-th coordinate, 1-based) and ``absz`` (Euclidean norm of z); ``pi`` is a
constant.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import WeightDomainError, WeightSyntaxError

FUNCTIONS = {"exp": 1, "log": 1, "sqrt": 1, "sin": 1, "cos": 1, "abs": 1, "pow": 2}
_VAR_RE = re.compile(r"(x|y|r|th)([0-9]+)\Z")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str          # "x", "y", "r", "th", "absz" or "pi"
    index: int = 0     # 1-based coordinate; 0 for absz / pi


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


def _tokenize(src):
    tokens = []
    pos = 0
    data = src.encode("utf-8")
    text_offsets = {}
    # byte offsets of every character position, for error reporting
    acc = 0
    for i, ch in enumerate(src):
        text_offsets[i] = acc
        acc += len(ch.encode("utf-8"))
    text_offsets[len(src)] = len(data)
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            off = text_offsets[pos + (len(src[pos:]) - len(src[pos:].lstrip()))]
            raise WeightSyntaxError(f"unexpected character {src[pos:].lstrip()[0]!r}", off)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), text_offsets[start]))
        pos = m.end()
    tokens.append(("end", "", len(data)))
    return tokens


class _Parser:
    def __init__(self, src, n):
        self.tokens = _tokenize(src)
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, off = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise WeightSyntaxError(f"expected {value!r}, found {found}", off)

    def parse(self):
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise WeightSyntaxError(f"unexpected token {text!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            node = BinOp("^", node, self.factor())
        return node

    def base(self):
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                if len(args) != FUNCTIONS[text]:
                    raise WeightSyntaxError(
                        f"{text}() takes {FUNCTIONS[text]} argument(s), got {len(args)}", off)
                self.expect(")")
                return Call(text, tuple(args))
            if text in ("absz", "pi"):
                return Var(text)
            m = _VAR_RE.match(text)
            if m is None:
                raise WeightSyntaxError(f"unknown identifier {text!r}", off)
            k = int(m.group(2))
            if not 1 <= k <= self.n:
                raise WeightSyntaxError(
                    f"variable {text!r} index out of range 1..{self.n}", off)
            return Var(m.group(1), k)
        if kind == "end":
            raise WeightSyntaxError("unexpected end of input", off)
        raise WeightSyntaxError(f"unexpected token {text!r}", off)


def parse(src, n):
    """Parse ``src`` into an AST whose variable indices lie in ``1..n``."""
    if not isinstance(src, str) or not src.strip():
        raise WeightSyntaxError("empty weight expression", 0)
    return _Parser(src, n).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node):
    """Render ``node`` so that ``parse(to_source(node)) == node``."""
    return _render(node, 0)


def _render(node, ctx):
    # ctx: 0 expression, 1 right of +/-, 2 operand of * or /, 3 right of * or /,
    # 4 unary-minus operand, 5 base of ^
    if isinstance(node, Num):
        text = repr(node.value)
        return f"({text})" if ctx >= 5 and node.value < 0 else text
    if isinstance(node, Var):
        return node.kind if node.kind in ("absz", "pi") else f"{node.kind}{node.index}"
    if isinstance(node, Call):
        return f"{node.name}(" + ", ".join(_render(a, 0) for a in node.args) + ")"
    if isinstance(node, Neg):
        text = "-" + _render(node.operand, 4)
        return f"({text})" if ctx >= 5 else text
    if isinstance(node, BinOp):
        if node.op == "^":
            text = _render(node.left, 5) + "^" + _render(node.right, 4)
            return f"({text})" if ctx >= 5 else text
        prec = _PREC[node.op]
        if prec == 1:
            text = _render(node.left, 0) + f" {node.op} " + _render(node.right, 1)
            return f"({text})" if ctx >= 1 else text
        text = _render(node.left, 2) + f" {node.op} " + _render(node.right, 3)
        return f"({text})" if ctx >= 3 else text
    raise TypeError(f"not an expression node: {node!r}")


def variables(node):
    """Set of ``(kind, index)`` pairs referenced by ``node``."""
    if isinstance(node, Var):
        return set() if node.kind == "pi" else {(node.kind, node.index)}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return variables(node.operand)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    return set().union(*(variables(a) for a in node.args))


def principal_angle(z):
    """Argument in ``[0, 2*pi)`` with ``arg(0) = 0``."""
    th = np.angle(z)
    th = np.where(th < 0, th + 2 * np.pi, th)
    return np.where(th >= 2 * np.pi, 0.0, th)


def point_variables(points):
    """Variable table for an ``(npts, n)`` complex array."""
    return {
        "x": points.real, "y": points.imag, "r": np.abs(points),
        "th": principal_angle(points),
        "absz": np.sqrt(np.sum(np.abs(points) ** 2, axis=1)),
    }


def evaluate(node, env, points=None):
    """Evaluate ``node`` on a variable table (see ``point_variables``).

    ``env`` maps ``x``/``y``/``r``/``th`` to ``(npts, n)`` arrays and
    ``absz`` to an ``(npts,)`` array. ``points`` is only used to name the
    offending point in domain errors.
    """
    with np.errstate(all="ignore"):
        return _eval(node, env, points)


def _fail(message, mask, points):
    idx = int(np.flatnonzero(np.broadcast_to(mask, mask.shape))[0]) if np.ndim(mask) else 0
    pt = None if points is None else points[idx]
    raise WeightDomainError(message, pt)


def _eval(node, env, points):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        if node.kind == "pi":
            return np.float64(math.pi)
        if node.kind == "absz":
            return env["absz"]
        return env[node.kind][:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, env, points)
    if isinstance(node, BinOp):
        a = _eval(node.left, env, points)
        b = _eval(node.right, env, points)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            bad = np.asarray(b == 0)
            if bad.any():
                _fail("division by zero in weight expression", bad, points)
            return a / b
        return _power(a, b, points)
    args = [_eval(a, env, points) for a in node.args]
    if node.name == "pow":
        return _power(args[0], args[1], points)
    x = args[0]
    if node.name == "log":
        bad = np.asarray(x <= 0)
        if bad.any():
            _fail("log of a non-positive value", bad, points)
        return np.log(x)
    if node.name == "sqrt":
        bad = np.asarray(x < 0)
        if bad.any():
            _fail("sqrt of a negative value", bad, points)
        return np.sqrt(x)
    return {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}[node.name](x)


def _power(a, b, points):
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    bad = (a_arr < 0) & (b_arr != np.round(b_arr))
    if bad.any():
        _fail("negative base raised to a non-integer power", bad, points)
    bad = (a_arr == 0) & (b_arr < 0)
    if bad.any():
        _fail("zero raised to a negative power", bad, points)
    return np.power(a, b)

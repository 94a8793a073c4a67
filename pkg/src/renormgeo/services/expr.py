"""Expression language for surface charts.

Grammar (``^`` binds tighter than unary minus, which binds tighter than ``* /``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers are the chart parameters ``u1``..``u4`` and the constants ``pi`` and ``e``.
Error offsets are UTF-8 byte offsets into the source text.
"""

import math
import re
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from ..core.exceptions import ExprSyntaxError
from . import jets
from .jets import ELEMENTARY_FUNCTIONS, Jet

MAX_PARAMS = 4

CONSTANTS = {"pi": math.pi, "e": math.e}

BinaryOp = Literal["add", "sub", "mul", "div", "pow"]


# ===== AST =====


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Param:
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: BinaryOp
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


ExprAst = Const | Param | Neg | BinOp | Call


# ===== Tokenizer =====


@dataclass(frozen=True)
class Token:
    kind: Literal["number", "ident", "op", "lparen", "rparen", "comma", "eof"]
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^])
    |(?P<lparen>\()
    |(?P<rparen>\))
    |(?P<comma>,)
    """,
    re.VERBOSE,
)


def tokenize(src: str) -> list[Token]:
    """Split source text into tokens, recording byte offsets."""
    tokens: list[Token] = []
    position = 0
    byte_offset = 0
    while position < len(src):
        match = _TOKEN_RE.match(src, position)
        if match is None:
            raise ExprSyntaxError(
                f"unexpected character {src[position]!r} at offset {byte_offset}",
                details={"offset": byte_offset, "expected": ["token"]},
            )
        kind = match.lastgroup
        text = match.group()
        if kind != "ws":
            tokens.append(Token(kind, text, byte_offset))  # type: ignore[arg-type]
        byte_offset += len(text.encode("utf-8"))
        position = match.end()
    tokens.append(Token("eof", "", byte_offset))
    return tokens


# ===== Parser =====


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def fail(self, expected: list[str]) -> ExprSyntaxError:
        token = self.current
        found = "end of input" if token.kind == "eof" else repr(token.text)
        return ExprSyntaxError(
            f"syntax error at offset {token.offset}: expected {' or '.join(expected)}, "
            f"found {found}",
            details={"offset": token.offset, "expected": expected, "found": token.text},
        )

    def expect(self, kind: str, label: str) -> Token:
        if self.current.kind != kind:
            raise self.fail([label])
        return self.advance()

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.current.kind != "eof":
            raise self.fail(["operator", "end of input"])
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op: BinaryOp = "add" if self.advance().text == "+" else "sub"
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op: BinaryOp = "mul" if self.advance().text == "*" else "div"
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ExprAst:
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            return BinOp("pow", base, self.unary())
        return base

    def atom(self) -> ExprAst:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Const(float(token.text))
        if token.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect("rparen", "')'")
            return node
        if token.kind == "ident":
            self.advance()
            if self.current.kind == "lparen":
                return self.call(token)
            return self.identifier(token)
        raise self.fail(["expression"])

    def identifier(self, token: Token) -> ExprAst:
        name = token.text
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        match = re.fullmatch(r"u([1-9])", name)
        if match and int(match.group(1)) <= MAX_PARAMS:
            return Param(int(match.group(1)) - 1)
        raise ExprSyntaxError(
            f"unknown identifier {name!r} at offset {token.offset}",
            details={"offset": token.offset, "identifier": name},
        )

    def call(self, token: Token) -> ExprAst:
        name = token.text
        if name not in ELEMENTARY_FUNCTIONS:
            raise ExprSyntaxError(
                f"unknown function {name!r} at offset {token.offset}",
                details={"offset": token.offset, "identifier": name},
            )
        self.expect("lparen", "'('")
        args = [self.expr()]
        while self.current.kind == "comma":
            self.advance()
            args.append(self.expr())
        self.expect("rparen", "')'")
        if len(args) != 1:
            raise ExprSyntaxError(
                f"{name} takes 1 argument, got {len(args)} (offset {token.offset})",
                details={"offset": token.offset, "function": name, "arity": len(args)},
            )
        return Call(name, args[0])


def parse_expr(src: str) -> ExprAst:
    """Parse one chart expression into an AST."""
    return _Parser(src).parse()


# ===== Inspection and printing =====


def max_param(node: ExprAst) -> int:
    """Largest parameter index referenced, or -1 for a constant expression."""
    match node:
        case Param(index):
            return index
        case Const():
            return -1
        case Neg(operand):
            return max_param(operand)
        case Call(_, arg):
            return max_param(arg)
        case BinOp(_, left, right):
            return max(max_param(left), max_param(right))
    raise TypeError(f"not an expression node: {node!r}")


_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def to_source(node: ExprAst) -> str:
    """Fully parenthesized source text that parses back to the same tree."""
    match node:
        case Const(value):
            text = repr(float(value))
            return f"({text})" if value < 0 else text
        case Param(index):
            return f"u{index + 1}"
        case Neg(operand):
            return f"(-{to_source(operand)})"
        case Call(fn, arg):
            return f"{fn}({to_source(arg)})"
        case BinOp(op, left, right):
            return f"({to_source(left)} {_SYMBOLS[op]} {to_source(right)})"
    raise TypeError(f"not an expression node: {node!r}")


# ===== Evaluation =====

_NUMERIC = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "atan": np.arctan,
}


def evaluate(node: ExprAst, args: list[Any]) -> Any:
    """Evaluate on jets (exact derivatives) or on plain floats/arrays."""
    match node:
        case Const(value):
            return value
        case Param(index):
            return args[index]
        case Neg(operand):
            return -evaluate(operand, args)
        case Call(fn, arg):
            value = evaluate(arg, args)
            if isinstance(value, Jet):
                return jets.jet_apply(fn, value)  # type: ignore[arg-type]
            return _NUMERIC[fn](value)
        case BinOp(op, left, right):
            a = evaluate(left, args)
            b = evaluate(right, args)
            if op == "add":
                return a + b
            if op == "sub":
                return a - b
            if op == "mul":
                return a * b
            if op == "div":
                return a / b
            return a**b
    raise TypeError(f"not an expression node: {node!r}")

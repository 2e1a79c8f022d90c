"""Recursive-descent parser for the expression DSL.

Grammar (lowest to highest binding)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right associative; "**" is accepted for "^"
    atom   := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

``pi`` and ``e`` are constants unless declared as variables.
"""
from __future__ import annotations

import math
import re

from ..errors import ExprSyntaxError, UndeclaredVariableError
from .nodes import FUNCTIONS, BinOp, Call, Const, Neg, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)

_CONSTANTS = {"pi": math.pi, "e": math.e}


def _byte_offset(source: str, index: int) -> int:
    return len(source[:index].encode("utf-8"))


def tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", _byte_offset(source, pos))
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if text == "**":
                text = "^"
            tokens.append((kind, text, _byte_offset(source, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(source, len(source))))
    return tokens


class _Parser:
    def __init__(self, source, declared):
        self.tokens = tokenize(source)
        self.i = 0
        self.declared = declared

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what=None):
        if tok[0] == "end":
            raise ExprSyntaxError(what or "unexpected end of input", tok[2])
        raise ExprSyntaxError(what or f"unexpected {tok[1]!r}", tok[2])

    def expect(self, text):
        tok = self.take()
        if tok[1] != text or tok[0] != "op":
            self.fail(tok, f"expected {text!r}")
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(tok)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, text, offset = tok
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in self.declared:
                return Var(text)
            if text in _CONSTANTS:
                return Const(_CONSTANTS[text])
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                raise ExprSyntaxError(f"unknown function {text!r}", offset)
            raise UndeclaredVariableError(text, offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.fail(tok)


def parse_node(source: str, declared_vars):
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source, frozenset(declared_vars)).parse()

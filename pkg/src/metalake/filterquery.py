"""Boolean filter expressions over the flattened record schema.

Grammar (keywords are case-sensitive upper-case):

    expr   := or
    or     := and ("OR" and)*
    and    := unary ("AND" unary)*
    unary  := "NOT" unary | "(" expr ")" | cmp
    cmp    := fieldpath op literal
    op     := "=" | "!=" | "<" | "<=" | ">" | ">=" | "~"
    literal:= double-quoted string | integer

`~` is case-insensitive substring containment.  Evaluation semantics:
absent (None) field values fail every comparison; a list-valued field
satisfies a comparison iff any element does; comparing a number field
against a string literal (or vice versa) is false, never an error.
Unknown field paths are rejected when the expression is parsed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import FilterSyntaxError, InvalidInput
from .model import FLATTENED_FIELDS

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><=|>=|!=|=|<|>|~)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)
    """,
    re.VERBOSE,
)

_KEYWORDS = ("AND", "OR", "NOT")


@dataclass(frozen=True)
class Comparison:
    field: str
    op: str
    literal: Union[str, int]


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class And:
    operands: tuple


@dataclass(frozen=True)
class Or:
    operands: tuple


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise FilterSyntaxError("unexpected character %r" % text[pos], pos)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append((kind, match.group(0), pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind, what):
        kind_now, value, pos = self.peek()
        if kind_now != kind:
            raise FilterSyntaxError("expected %s" % what, pos)
        return self.advance()

    def parse(self):
        node = self.parse_or()
        kind, _, pos = self.peek()
        if kind != "end":
            raise FilterSyntaxError("unexpected trailing input", pos)
        return node

    def parse_or(self):
        operands = [self.parse_and()]
        while self.peek()[:2] == ("word", "OR"):
            self.advance()
            operands.append(self.parse_and())
        return operands[0] if len(operands) == 1 else Or(tuple(operands))

    def parse_and(self):
        operands = [self.parse_unary()]
        while self.peek()[:2] == ("word", "AND"):
            self.advance()
            operands.append(self.parse_unary())
        return operands[0] if len(operands) == 1 else And(tuple(operands))

    def parse_unary(self):
        kind, value, pos = self.peek()
        if (kind, value) == ("word", "NOT"):
            self.advance()
            return Not(self.parse_unary())
        if kind == "lparen":
            self.advance()
            node = self.parse_or()
            self.expect("rparen", "closing parenthesis")
            return node
        return self.parse_comparison()

    def parse_comparison(self):
        kind, value, pos = self.peek()
        if kind != "word" or value in _KEYWORDS:
            raise FilterSyntaxError("expected a field path", pos)
        if value not in FLATTENED_FIELDS:
            raise InvalidInput("unknown field path: %r" % value)
        self.advance()
        op = self.expect("op", "a comparison operator")[1]
        lit_kind, lit_value, lit_pos = self.peek()
        if lit_kind == "string":
            self.advance()
            literal = re.sub(r"\\(.)", r"\1", lit_value[1:-1])
        elif lit_kind == "int":
            self.advance()
            literal = int(lit_value)
        else:
            raise FilterSyntaxError("expected a string or integer literal", lit_pos)
        return Comparison(value, op, literal)


def parse_filter(text: str):
    """Parse an expression; FilterSyntaxError carries the character position."""
    return _Parser(text).parse()


def _compare_scalar(value, op: str, literal) -> bool:
    if value is None:
        return False
    if op == "~":
        return str(literal).lower() in str(value).lower()
    same_kind = isinstance(literal, str) == isinstance(value, str)
    if not same_kind:
        return False
    if op == "=":
        return value == literal
    if op == "!=":
        return value != literal
    if op == "<":
        return value < literal
    if op == "<=":
        return value <= literal
    if op == ">":
        return value > literal
    return value >= literal


def evaluate(node, record) -> bool:
    """Brute-force evaluation of a parsed expression against one record."""
    if isinstance(node, Comparison):
        value = FLATTENED_FIELDS[node.field](record)
        if isinstance(value, tuple):
            return any(_compare_scalar(v, node.op, node.literal) for v in value)
        return _compare_scalar(value, node.op, node.literal)
    if isinstance(node, Not):
        return not evaluate(node.operand, record)
    if isinstance(node, And):
        return all(evaluate(operand, record) for operand in node.operands)
    if isinstance(node, Or):
        return any(evaluate(operand, record) for operand in node.operands)
    raise TypeError("not a filter node: %r" % (node,))

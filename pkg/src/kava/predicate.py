"""Boolean query predicates over records: ``[variable] op constant``
leaves combined with AND/OR/NOT."""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass

from .errors import PredicateSyntaxError

_OPS = {
    ">": operator.gt,
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    "!=": operator.ne,
}


@dataclass(frozen=True)
class Comparison:
    variable: str
    op: str
    constant: object  # int, float, or str


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    operand: object


Predicate = Comparison | And | Or | Not

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<var>\[[^\]\[]+\])
      | (?P<num>-?\d+(?:\.\d+)?)
      | (?P<str>"(?:[^"\\]|\\.)*")
      | (?P<op>>=|<=|!=|>|<|=)
      | (?P<paren>[()])
      | (?P<word>[A-Za-z]+)
    )""",
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise PredicateSyntaxError(at, f"unexpected character {stripped[0]!r}")
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "word":
            upper = value.upper()
            if upper not in ("AND", "OR", "NOT"):
                raise PredicateSyntaxError(start, f"unexpected word {value!r}")
            tokens.append((upper, value, start))
        elif kind == "var":
            tokens.append(("VAR", value[1:-1], start))
        elif kind == "num":
            tokens.append(("NUM", float(value) if "." in value else int(value), start))
        elif kind == "str":
            tokens.append(("STR", value[1:-1].replace('\\"', '"').replace("\\\\", "\\"), start))
        elif kind == "op":
            tokens.append(("OP", value, start))
        else:
            tokens.append((value, value, start))
        pos = m.end()
    tokens.append(("EOF", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        node = self.parse_or()
        kind, _, at = self.peek()
        if kind != "EOF":
            raise PredicateSyntaxError(at, "trailing input after expression")
        return node

    def parse_or(self):
        node = self.parse_and()
        while self.peek()[0] == "OR":
            self.next()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_unary()
        while self.peek()[0] == "AND":
            self.next()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self):
        kind, value, at = self.peek()
        if kind == "NOT":
            self.next()
            return Not(self.parse_unary())
        if kind == "(":
            self.next()
            node = self.parse_or()
            kind, _, at = self.next()
            if kind != ")":
                raise PredicateSyntaxError(at, "expected ')'")
            return node
        if kind == "VAR":
            return self.parse_comparison()
        raise PredicateSyntaxError(at, f"expected comparison, NOT, or '(', found {kind}")

    def parse_comparison(self):
        _, variable, _ = self.next()
        kind, op, at = self.next()
        if kind != "OP":
            raise PredicateSyntaxError(at, "expected comparison operator")
        kind, constant, at = self.next()
        if kind not in ("NUM", "STR"):
            raise PredicateSyntaxError(at, "expected numeric or string constant")
        return Comparison(variable, op, constant)


def parse_predicate(text: str) -> Predicate:
    """Parse a predicate string; NOT binds tighter than AND, AND than OR."""
    return _Parser(_tokenize(text)).parse()


def variables(pred: Predicate) -> set[str]:
    if isinstance(pred, Comparison):
        return {pred.variable}
    if isinstance(pred, Not):
        return variables(pred.operand)
    return variables(pred.left) | variables(pred.right)


def _compare(value, op, constant):
    # comparisons against missing values never match
    if value is None:
        return False
    if isinstance(constant, str) != isinstance(value, str):
        return False
    return _OPS[op](value, constant)


def compile_predicate(pred: Predicate):
    """Compile to a closure over a record dict (variable name -> value)."""
    if isinstance(pred, Comparison):
        var, op, const = pred.variable, pred.op, pred.constant
        return lambda rec: _compare(rec.get(var), op, const)
    if isinstance(pred, Not):
        inner = compile_predicate(pred.operand)
        return lambda rec: not inner(rec)
    left = compile_predicate(pred.left)
    right = compile_predicate(pred.right)
    if isinstance(pred, And):
        return lambda rec: left(rec) and right(rec)
    return lambda rec: left(rec) or right(rec)


def to_text(pred: Predicate) -> str:
    """Render a predicate back to its string form."""
    if isinstance(pred, Comparison):
        const = pred.constant
        if isinstance(const, str):
            const = '"' + const.replace("\\", "\\\\").replace('"', '\\"') + '"'
        return f"[{pred.variable}] {pred.op} {const}"
    if isinstance(pred, Not):
        return f"NOT ({to_text(pred.operand)})"
    joint = "AND" if isinstance(pred, And) else "OR"
    return f"({to_text(pred.left)}) {joint} ({to_text(pred.right)})"

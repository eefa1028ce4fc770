"""Lossless parser and serializer for KiCad-style s-expressions.

Numbers keep their source lexeme so untouched file regions re-emit
byte-faithfully; strings keep their escaped source form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import (
    DepthExceeded,
    InvalidToken,
    UnbalancedParen,
    UnterminatedString,
)

MAX_DEPTH = 10_000

_INT_RE = re.compile(r"^[+-]?[0-9]+$")
_REAL_RE = re.compile(
    r"^[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$"
    r"|^[+-]?[0-9]+[eE][+-]?[0-9]+$"
)
_BARE_END = frozenset('()";') | frozenset(" \t\r\n")

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


@dataclass(frozen=True)
class Atom:
    """A terminal node: symbol, string, integer, or real."""

    kind: str  # "symbol" | "string" | "integer" | "real"
    lexeme: str  # source text; for strings, the escaped form without quotes

    @property
    def value(self) -> Union[str, int, float]:
        if self.kind == "integer":
            return int(self.lexeme)
        if self.kind == "real":
            return float(self.lexeme)
        if self.kind == "string":
            return unescape_string(self.lexeme)
        return self.lexeme

    @staticmethod
    def symbol(text: str) -> "Atom":
        return Atom("symbol", text)

    @staticmethod
    def string(value: str) -> "Atom":
        return Atom("string", escape_string(value))

    @staticmethod
    def number(value: Union[int, float]) -> "Atom":
        text = format_number(value)
        return Atom("integer" if _INT_RE.match(text) else "real", text)

    def __repr__(self) -> str:
        return f"Atom({self.kind}, {self.lexeme!r})"


@dataclass
class SList:
    """An ordered list node; the first symbol child, if any, is its tag."""

    children: list = field(default_factory=list)

    @property
    def tag(self) -> Optional[str]:
        if self.children and isinstance(self.children[0], Atom) \
                and self.children[0].kind == "symbol":
            return self.children[0].lexeme
        return None

    def find(self, tag: str) -> Optional["SList"]:
        for child in self.children:
            if isinstance(child, SList) and child.tag == tag:
                return child
        return None

    def find_all(self, tag: str) -> Iterator["SList"]:
        for child in self.children:
            if isinstance(child, SList) and child.tag == tag:
                yield child

    def atoms(self) -> list:
        """Values of the atom children after the tag."""
        return [c.value for c in self.children[1:] if isinstance(c, Atom)]

    def __eq__(self, other) -> bool:
        return isinstance(other, SList) and self.children == other.children

    def __repr__(self) -> str:
        return f"SList({self.tag}, {len(self.children)} children)"


SExprNode = Union[Atom, SList]


def format_number(value: Union[int, float]) -> str:
    """Minimal decimal rendering: no exponent, no trailing zeros."""
    if isinstance(value, int):
        return str(value)
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def escape_string(value: str) -> str:
    return "".join(_UNESCAPES.get(ch, ch) for ch in value)


def unescape_string(lexeme: str) -> str:
    out = []
    i = 0
    while i < len(lexeme):
        ch = lexeme[i]
        if ch == "\\" and i + 1 < len(lexeme):
            out.append(_ESCAPES.get(lexeme[i + 1], lexeme[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.length = len(text)

    def location(self, pos: Optional[int] = None) -> tuple:
        p = self.pos if pos is None else pos
        line = self.text.count("\n", 0, p) + 1
        column = p - self.text.rfind("\n", 0, p)
        return line, column

    def skip_whitespace(self) -> None:
        while self.pos < self.length and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def read_string(self) -> Atom:
        start = self.pos
        self.pos += 1  # opening quote
        body_start = self.pos
        while self.pos < self.length:
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= self.length:
                    raise UnterminatedString(
                        "unterminated string", *self.location(start))
                if self.text[self.pos + 1] not in _ESCAPES:
                    raise InvalidToken(
                        f"invalid escape '\\{self.text[self.pos + 1]}'",
                        *self.location(self.pos))
                self.pos += 2
                continue
            if ch == '"':
                lexeme = self.text[body_start:self.pos]
                self.pos += 1
                return Atom("string", lexeme)
            self.pos += 1
        raise UnterminatedString("unterminated string", *self.location(start))

    def read_bare(self) -> Atom:
        start = self.pos
        while self.pos < self.length and self.text[self.pos] not in _BARE_END:
            self.pos += 1
        lexeme = self.text[start:self.pos]
        if _INT_RE.match(lexeme):
            return Atom("integer", lexeme)
        if _REAL_RE.match(lexeme):
            return Atom("real", lexeme)
        return Atom("symbol", lexeme)


def parse_sexpr(text: str) -> SExprNode:
    """Parse one s-expression; trailing non-whitespace is an error."""
    scanner = _Scanner(text)
    stack: list = []
    root: Optional[SExprNode] = None

    while True:
        scanner.skip_whitespace()
        if scanner.pos >= scanner.length:
            if stack:
                raise UnbalancedParen(
                    "unclosed parenthesis", *scanner.location())
            break
        ch = scanner.text[scanner.pos]
        node: Optional[SExprNode] = None
        if ch == "(":
            if len(stack) >= MAX_DEPTH:
                raise DepthExceeded(
                    f"nesting deeper than {MAX_DEPTH}", *scanner.location())
            scanner.pos += 1
            stack.append(SList())
            continue
        if ch == ")":
            if not stack:
                raise UnbalancedParen(
                    "unmatched ')'", *scanner.location())
            scanner.pos += 1
            node = stack.pop()
        elif ch == '"':
            node = scanner.read_string()
        elif ch == ";":
            raise InvalidToken("';' is not valid", *scanner.location())
        else:
            node = scanner.read_bare()

        if stack:
            stack[-1].children.append(node)
        elif root is None:
            root = node
        else:
            raise InvalidToken(
                "trailing garbage after expression", *scanner.location())

    if root is None:
        raise InvalidToken("empty input", 1, 1)
    return root


def write_sexpr(node: SExprNode, style: str = "pretty") -> str:
    """Serialize a tree; output reparses to a structurally equal tree."""
    if style not in ("pretty", "compact"):
        raise ValueError(f"unknown style {style!r}")
    out: list = []
    # Work items: ("node", node, indent) or ("text", literal).
    work: list = [("node", node, 0)]
    while work:
        kind, item, indent = work.pop()
        if kind == "text":
            out.append(item)
            continue
        if isinstance(item, Atom):
            out.append(_atom_text(item))
            continue
        children = item.children
        split = len(children)
        if style == "pretty":
            for i, child in enumerate(children):
                if isinstance(child, SList):
                    split = i
                    break
        head, tail = children[:split], children[split:]
        pieces = ["("] + [" ".join(_atom_text(a) for a in head)]
        out.append("".join(pieces))
        if not tail:
            out.append(")")
            continue
        # Children after the inline head each go on their own line (pretty)
        # or inline (compact); close at parent indent.
        follow: list = []
        pad = "\n" + "  " * (indent + 1)
        for child in tail:
            follow.append(("text", pad if style == "pretty" else " ", 0))
            follow.append(("node", child, indent + 1))
        close = "\n" + "  " * indent + ")" if style == "pretty" else ")"
        follow.append(("text", close, 0))
        work.extend(reversed(follow))
    return "".join(out)


def _atom_text(atom: Atom) -> str:
    if atom.kind == "string":
        return f'"{atom.lexeme}"'
    return atom.lexeme

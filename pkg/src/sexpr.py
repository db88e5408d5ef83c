"""
Minimal s-expression reader: atoms and parenthesised lists, with source offsets.
"""

import re
from dataclasses import dataclass
from typing import List, Tuple, Union

from .errors import TermSyntaxError

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


@dataclass(frozen=True)
class Atom:
    value: str
    position: int


@dataclass(frozen=True)
class SList:
    items: Tuple["SExpr", ...]
    position: int


SExpr = Union[Atom, SList]


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    """Splits text into ('open'|'close'|'atom', value, offset) tokens."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            raise TermSyntaxError("Unreadable input", pos)
        if match.group(1):
            tokens.append(("open", "(", match.start(1)))
        elif match.group(2):
            tokens.append(("close", ")", match.start(2)))
        else:
            tokens.append(("atom", match.group(3), match.start(3)))
        pos = match.end()
    return tokens


def read(text: str) -> SExpr:
    """
    Reads exactly one s-expression.

    Raises:
        TermSyntaxError: On empty input, unbalanced parentheses or trailing tokens.
    """
    tokens = tokenize(text)
    if not tokens:
        raise TermSyntaxError("Empty term", 0)
    expr, pos = _read_at(tokens, 0)
    if pos != len(tokens):
        raise TermSyntaxError("Unexpected trailing input", tokens[pos][2])
    return expr


def _read_at(tokens: List[Tuple[str, str, int]], i: int) -> Tuple[SExpr, int]:
    kind, value, offset = tokens[i]
    if kind == "atom":
        return Atom(value, offset), i + 1
    if kind == "close":
        raise TermSyntaxError("Unexpected ')'", offset)
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise TermSyntaxError("Missing ')'", offset)
        if tokens[i][0] == "close":
            return SList(tuple(items), offset), i + 1
        item, i = _read_at(tokens, i)
        items.append(item)

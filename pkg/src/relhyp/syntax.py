"""Modal propositional formulas: AST, ASCII grammar, printing, and measures.

Surface syntax (precedence low to high)::

    ->   right associative
    |    left associative
    &    left associative
    ~  []  <>   prefix

Atoms match ``[a-z][a-z0-9_]*``; whitespace is ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "Atom", "Not", "And", "Or", "Implies", "Box", "Diamond", "Formula",
    "ParseError", "Token", "tokenize", "FormulaParser",
    "parse_formula", "render_formula", "degree", "modal_depth",
    "subformulas", "atoms",
]


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Not:
    sub: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Box:
    sub: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Diamond:
    sub: "Formula"

    def __str__(self) -> str:
        return render_formula(self)


Formula = Union[Atom, Not, And, Or, Implies, Box, Diamond]

UNARY = (Not, Box, Diamond)
BINARY = (And, Or, Implies)

ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class ParseError(ValueError):
    """Malformed formula or hypersequent text.

    ``position`` is a 0-based character offset into the input and
    ``expected`` names what the parser was looking for there.
    """

    def __init__(self, position: int, expected: str, text: str = ""):
        self.position = position
        self.expected = expected
        self.text = text
        found = repr(text[position:position + 10]) if position < len(text) else "end of input"
        super().__init__(f"at position {position}: expected {expected}, found {found}")


# ---------------------------------------------------------------------------
# Lexing

@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<imp>->)
  | (?P<seq>=>)
  | (?P<box>\[\])
  | (?P<dia><>)
  | (?P<not>~)
  | (?P<and>&)
  | (?P<or>\|)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<comma>,)
  | (?P<semi>;)
  | (?P<atom>[a-z][a-z0-9_]*)
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(pos, "a token", text)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class FormulaParser:
    """Recursive descent over a token list; shared with the hypersequent parser."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        if self.peek.kind != kind:
            self.fail(what)
        return self.advance()

    def fail(self, expected: str):
        raise ParseError(self.peek.pos, expected, self.text)

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek.kind == "imp":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek.kind == "or":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.prefix()
        while self.peek.kind == "and":
            self.advance()
            f = And(f, self.prefix())
        return f

    def prefix(self) -> Formula:
        tok = self.peek
        if tok.kind == "not":
            self.advance()
            return Not(self.prefix())
        if tok.kind == "box":
            self.advance()
            return Box(self.prefix())
        if tok.kind == "dia":
            self.advance()
            return Diamond(self.prefix())
        if tok.kind == "atom":
            self.advance()
            return Atom(tok.value)
        if tok.kind == "lp":
            self.advance()
            f = self.formula()
            self.expect("rp", "')'")
            return f
        self.fail("a formula")


def parse_formula(text: str) -> Formula:
    """Parse ``text`` as a single formula.

    >>> parse_formula("[]~(p&q)")
    Box(sub=Not(sub=And(left=Atom(name='p'), right=Atom(name='q'))))
    """
    parser = FormulaParser(text)
    f = parser.formula()
    if parser.peek.kind != "eof":
        parser.fail("end of input")
    return f


# ---------------------------------------------------------------------------
# Printing

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Box: 4, Diamond: 4, Atom: 5}
_OPS = {Implies: "->", Or: "|", And: "&", Not: "~", Box: "[]", Diamond: "<>"}


def _wrap(f: Formula, parens: bool) -> str:
    s = render_formula(f)
    return f"({s})" if parens else s


def render_formula(f: Formula) -> str:
    """Canonical text for ``f``; ``parse_formula`` inverts it exactly."""
    cls = type(f)
    if cls is Atom:
        return f.name
    prec = _PREC[cls]
    if cls in UNARY:
        return _OPS[cls] + _wrap(f.sub, _PREC[type(f.sub)] < prec)
    lp, rp = _PREC[type(f.left)], _PREC[type(f.right)]
    if cls is Implies:
        left, right = _wrap(f.left, lp <= prec), _wrap(f.right, rp < prec)
    else:
        left, right = _wrap(f.left, lp < prec), _wrap(f.right, rp <= prec)
    return f"{left} {_OPS[cls]} {right}"


# ---------------------------------------------------------------------------
# Measures

def degree(f: Formula) -> int:
    """Number of connectives in ``f``."""
    if type(f) is Atom:
        return 0
    if type(f) in UNARY:
        return 1 + degree(f.sub)
    return 1 + degree(f.left) + degree(f.right)


def modal_depth(f: Formula) -> int:
    cls = type(f)
    if cls is Atom:
        return 0
    if cls is Not:
        return modal_depth(f.sub)
    if cls in (Box, Diamond):
        return 1 + modal_depth(f.sub)
    return max(modal_depth(f.left), modal_depth(f.right))


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences of ``f``, ``f`` first (pre-order)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if type(g) in UNARY:
            stack.append(g.sub)
        elif type(g) in BINARY:
            stack.append(g.right)
            stack.append(g.left)


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if type(g) is Atom}

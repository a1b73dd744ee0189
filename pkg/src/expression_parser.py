"""
Lattice expression parser.

Grammar (whitespace allowed between tokens):

    Expr := Term ("+" Term)*
    Term := [Int "*"] Atom
    Atom := "U" ["(" Int ")"] | "E8" ["(" Int ")"] | "<" Int ">" | "L[" Int "]" | "M"

Examples: "2*U + 2*E8 + <-2>", "U + U(2) + 2*E8 + <-8>", "L[5]".
"""

import logging
import re
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import ExpressionSemanticError, ExpressionSyntaxError, UnknownFamilyError
from .lattice import Lattice, direct_sum, e8, hyperbolic_plane, k3n_lattice, mukai_lattice, rank_one

logger = logging.getLogger(__name__)

_TOKEN_REGEXP = re.compile(
    r"(?P<space>\s+)|(?P<int>-?\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<punct>[+*()<>\[\]⟨⟩])"
)
_ANGLE_ALIASES = {"⟨": "<", "⟩": ">"}
_FAMILY_NAMES = {"U": "U", "E8": "E8", "L": "L", "M": "M", "Mukai": "M"}
ATOM_KINDS = ("U", "E8", "<>", "L", "M")


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


@dataclass(frozen=True)
class Atom:
    """kind is one of U, E8, <>, L, M; parameter is the scale, value or n."""

    kind: str
    parameter: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == "<>":
            return f"<{self.parameter}>"
        if self.kind == "L":
            return f"L[{self.parameter}]"
        if self.parameter is None:
            return self.kind
        return f"{self.kind}({self.parameter})"

    def build(self) -> Lattice:
        if self.kind == "U":
            return hyperbolic_plane(1 if self.parameter is None else self.parameter)
        if self.kind == "E8":
            return e8(1 if self.parameter is None else self.parameter)
        if self.kind == "<>":
            return rank_one(self.parameter)
        if self.kind == "L":
            return k3n_lattice(self.parameter)
        if self.kind == "M":
            return mukai_lattice()
        raise UnknownFamilyError(f"unknown lattice family {self.kind!r}")


@dataclass(frozen=True)
class Term:
    multiplicity: int
    atom: Atom

    def __str__(self) -> str:
        return str(self.atom) if self.multiplicity == 1 else f"{self.multiplicity}*{self.atom}"


@dataclass(frozen=True)
class LatticeExpression:
    terms: Tuple[Term, ...]

    def __str__(self) -> str:
        return " + ".join(str(term) for term in self.terms)


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def tokenize(text: str) -> List[Token]:
    tokens = []
    index = 0
    while index < len(text):
        match = _TOKEN_REGEXP.match(text, index)
        if not match:
            raise ExpressionSyntaxError(f"unexpected character {text[index]!r}", _byte_offset(text, index))
        kind = match.lastgroup
        if kind != "space":
            value = _ANGLE_ALIASES.get(match.group(), match.group())
            tokens.append(Token(kind, value, _byte_offset(text, index)))
        index = match.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.current
        if token.text != text:
            found = token.text or "end of input"
            raise ExpressionSyntaxError(f"expected {text!r}, found {found!r}", token.offset)
        return self.advance()

    def integer(self) -> Tuple[int, int]:
        token = self.current
        if token.kind != "int":
            found = token.text or "end of input"
            raise ExpressionSyntaxError(f"expected an integer, found {found!r}", token.offset)
        self.advance()
        return int(token.text), token.offset

    def expression(self) -> LatticeExpression:
        terms = [self.term()]
        while self.current.text == "+":
            self.advance()
            terms.append(self.term())
        if self.current.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.current.text!r}", self.current.offset)
        return LatticeExpression(tuple(terms))

    def term(self) -> Term:
        multiplicity = 1
        if self.current.kind == "int":
            multiplicity, offset = self.integer()
            self.expect("*")
            if multiplicity <= 0:
                raise ExpressionSemanticError(f"multiplicity must be positive, got {multiplicity} (at offset {offset})")
        return Term(multiplicity, self.atom())

    def atom(self) -> Atom:
        token = self.current
        if token.text == "<":
            self.advance()
            value, offset = self.integer()
            self.expect(">")
            if value == 0 or value % 2:
                raise ExpressionSemanticError(f"<{value}> is not a nonzero even lattice (at offset {offset})")
            return Atom("<>", value)
        if token.kind != "name":
            found = token.text or "end of input"
            raise ExpressionSyntaxError(f"expected a lattice atom, found {found!r}", token.offset)
        family = _FAMILY_NAMES.get(token.text)
        if family is None:
            raise ExpressionSyntaxError(f"unknown lattice family {token.text!r}", token.offset)
        self.advance()
        if family == "L":
            self.expect("[")
            n, offset = self.integer()
            self.expect("]")
            if n < 2:
                raise ExpressionSemanticError(f"L[{n}] requires n >= 2 (at offset {offset})")
            return Atom("L", n)
        if family in ("U", "E8") and self.current.text == "(":
            self.advance()
            scale, offset = self.integer()
            self.expect(")")
            if scale == 0:
                raise ExpressionSemanticError(f"{family}(0) is degenerate (at offset {offset})")
            return Atom(family, scale)
        return Atom(family)


def parse_lattice(text: str) -> LatticeExpression:
    return _Parser(text).expression()


def build_lattice(expression: LatticeExpression) -> Lattice:
    parts = []
    for term in expression.terms:
        lattice = term.atom.build()
        parts.extend([lattice] * term.multiplicity)
    return direct_sum(*parts).with_label(str(expression))


def random_expressions(rng, count: int, kinds: Sequence[str] = ATOM_KINDS,
                       max_terms: int = 4) -> Iterator[LatticeExpression]:
    """Random well-formed expressions drawn from a numpy Generator."""
    for _ in range(count):
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            kind = kinds[int(rng.integers(0, len(kinds)))]
            if kind in ("U", "E8"):
                scale = int(rng.integers(-6, 7))
                atom = Atom(kind, None if scale == 0 else scale)
            elif kind == "<>":
                value = 2 * int(rng.integers(1, 20)) * (1 if rng.integers(0, 2) else -1)
                atom = Atom(kind, value)
            elif kind == "L":
                atom = Atom(kind, int(rng.integers(2, 30)))
            else:
                atom = Atom(kind)
            terms.append(Term(int(rng.integers(1, 4)), atom))
        yield LatticeExpression(tuple(terms))

"""S-expression syntax for formulas.

    true | false | (= x y) | (edge LABEL x y) | (reach x y) | (reachL NAME x y)
    | (jump x y) | (not φ) | (and φ φ …) | (or φ φ …) | (exists x φ)
    | (forall x φ) | (modcount K M x φ) | (infinite x φ)
"""

from dataclasses import dataclass
from enum import Enum, auto
from typing import List

from src.core.errors import FormulaSyntaxError
from src.logic.formula import (
    And,
    Const,
    Edge,
    Eq,
    Exists,
    Forall,
    Formula,
    Infinite,
    Jump,
    ModCount,
    Not,
    Or,
    Reach,
    ReachL,
)


class TokenType(Enum):
    LPAREN = auto()
    RPAREN = auto()
    WORD = auto()
    EOF = auto()


@dataclass
class Token:
    type: TokenType
    value: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        char = text[pos]
        if char.isspace():
            pos += 1
        elif char == "(":
            tokens.append(Token(TokenType.LPAREN, char, pos))
            pos += 1
        elif char == ")":
            tokens.append(Token(TokenType.RPAREN, char, pos))
            pos += 1
        else:
            start = pos
            while pos < len(text) and not text[pos].isspace() and text[pos] not in "()":
                pos += 1
            tokens.append(Token(TokenType.WORD, text[start:pos], start))
    tokens.append(Token(TokenType.EOF, "", len(text)))
    return tokens


_BINARY_ATOMS = {"=": Eq, "reach": Reach, "jump": Jump}
_KEYWORDS = {"true", "false", "not", "and", "or", "exists", "forall", "modcount", "infinite", "edge", "reachL"}
_KEYWORDS |= set(_BINARY_ATOMS)


class Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.current().position)

    def current(self) -> Token:
        return self.tokens[min(self.pos, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current()
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return token

    def expect(self, token_type: TokenType, what: str) -> Token:
        if self.current().type is not token_type:
            found = self.current().value or "end of input"
            self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def variable(self) -> str:
        token = self.expect(TokenType.WORD, "a variable")
        if token.value in _KEYWORDS:
            raise FormulaSyntaxError(f"keyword {token.value!r} used as a variable", token.position)
        return token.value

    def number(self, what: str) -> int:
        token = self.expect(TokenType.WORD, what)
        if not token.value.isdigit():
            raise FormulaSyntaxError(f"expected {what}, found {token.value!r}", token.position)
        return int(token.value)

    def parse(self) -> Formula:
        phi = self.parse_formula()
        if self.current().type is not TokenType.EOF:
            self.error("unexpected input after the formula")
        return phi

    def parse_formula(self) -> Formula:
        token = self.current()
        if token.type is TokenType.WORD:
            if token.value in ("true", "false"):
                self.advance()
                return Const(token.value == "true")
            self.error(f"unexpected {token.value!r}")
        self.expect(TokenType.LPAREN, "'('")
        head = self.expect(TokenType.WORD, "an operator").value
        phi = self.parse_body(head)
        self.expect(TokenType.RPAREN, "')'")
        return phi

    def parse_body(self, head: str) -> Formula:
        if head in _BINARY_ATOMS:
            return _BINARY_ATOMS[head](self.variable(), self.variable())
        if head == "edge":
            label = self.expect(TokenType.WORD, "a label").value
            return Edge(label, self.variable(), self.variable())
        if head == "reachL":
            name = self.expect(TokenType.WORD, "a language name").value
            return ReachL(name, self.variable(), self.variable())
        if head == "not":
            return Not(self.parse_formula())
        if head in ("and", "or"):
            connective = And if head == "and" else Or
            phi = connective(self.parse_formula(), self.parse_formula())
            while self.current().type is not TokenType.RPAREN:
                phi = connective(phi, self.parse_formula())
            return phi
        if head in ("exists", "forall", "infinite"):
            quantifier = {"exists": Exists, "forall": Forall, "infinite": Infinite}[head]
            return quantifier(self.variable(), self.parse_formula())
        if head == "modcount":
            k = self.number("a residue")
            m = self.number("a modulus")
            if m < 1:
                self.error("the modulus must be positive")
            return ModCount(k, m, self.variable(), self.parse_formula())
        self.error(f"unknown operator {head!r}")


def parse_formula(text: str) -> Formula:
    return Parser(tokenize(text)).parse()

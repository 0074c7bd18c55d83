"""First-order formulas over configuration graphs.

Atoms are equality, labelled edges, reachability (plain or along a named
regular language) and the jump relation of nested pushdown trees.
Quantifiers are ∃, ∀, the modulo counting quantifier ∃^(k,m) and ∃^∞.
"""

from dataclasses import dataclass
from typing import Hashable, Iterator, List, Tuple


class Formula:
    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Edge(Formula):
    label: Hashable
    x: str
    y: str


@dataclass(frozen=True)
class Reach(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class ReachL(Formula):
    language: str
    x: str
    y: str


@dataclass(frozen=True)
class Jump(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class ModCount(Formula):
    """∃^(k,m) x: the number of witnesses is finite and ≡ k mod m."""

    k: int
    m: int
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Infinite(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


ATOMS = (Eq, Edge, Reach, ReachL, Jump)
QUANTIFIERS = (Exists, Forall, ModCount, Infinite)


def walk(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def atom_vars(phi: Formula) -> Tuple[str, ...]:
    return (phi.x, phi.y) if isinstance(phi, ATOMS) else ()


def free_vars(phi: Formula) -> List[str]:
    """Free variables in order of first occurrence."""
    found: List[str] = []

    def visit(node: Formula, bound: frozenset):
        if isinstance(node, QUANTIFIERS):
            visit(node.body, bound | {node.var})
            return
        for v in atom_vars(node):
            if v not in bound and v not in found:
                found.append(v)
        for child in node.children():
            visit(child, bound)

    visit(phi, frozenset())
    return found


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def uses_reach(phi: Formula) -> bool:
    return any(isinstance(node, (Reach, ReachL)) for node in walk(phi))


def uses_jump(phi: Formula) -> bool:
    return any(isinstance(node, Jump) for node in walk(phi))


def quantifier_rank(phi: Formula) -> int:
    inner = max((quantifier_rank(c) for c in phi.children()), default=0)
    return inner + 1 if isinstance(phi, QUANTIFIERS) else inner


def languages(phi: Formula) -> List[str]:
    return sorted({node.language for node in walk(phi) if isinstance(node, ReachL)})


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Eq):
        return f"(= {phi.x} {phi.y})"
    if isinstance(phi, Edge):
        return f"(edge {phi.label} {phi.x} {phi.y})"
    if isinstance(phi, Reach):
        return f"(reach {phi.x} {phi.y})"
    if isinstance(phi, ReachL):
        return f"(reachL {phi.language} {phi.x} {phi.y})"
    if isinstance(phi, Jump):
        return f"(jump {phi.x} {phi.y})"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.arg)})"
    if isinstance(phi, (And, Or)):
        op = "and" if isinstance(phi, And) else "or"
        return f"({op} {format_formula(phi.left)} {format_formula(phi.right)})"
    if isinstance(phi, Exists):
        return f"(exists {phi.var} {format_formula(phi.body)})"
    if isinstance(phi, Forall):
        return f"(forall {phi.var} {format_formula(phi.body)})"
    if isinstance(phi, ModCount):
        return f"(modcount {phi.k} {phi.m} {phi.var} {format_formula(phi.body)})"
    if isinstance(phi, Infinite):
        return f"(infinite {phi.var} {format_formula(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")

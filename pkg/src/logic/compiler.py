"""Compilation of Reach-free formulas into automata over convolutions.

A formula with free variables x1…xn becomes an automaton accepting
encode(c1) ⊗ … ⊗ encode(cn) iff the configurations satisfy it. Every
language is kept inside domainⁿ, where the domain is the regular set of
reachable configurations, so that negation and quantification range over
the universe of the configuration graph.
"""

from dataclasses import dataclass
from typing import Dict, Hashable, Mapping, Optional, Sequence, Tuple

from src.automata.nfta import (
    Nfta,
    complement,
    conv_alphabet,
    cylindrify,
    intersect,
    mod_count_automaton,
    project,
    relabel,
    union,
    with_alphabet,
)
from src.automata.tree import EMPTY_TREE, convolve
from src.core.errors import PreconditionError
from src.core.logger import logger
from src.counting.counter_automaton import CounterAutomaton, counter_automaton
from src.encoding.codec import encode
from src.encoding.enc_trees import enc_labels
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
    free_vars,
)
from src.presentation.oprel import transition_relation_automaton
from src.presentation.reachable import reachable_configs_automaton
from src.pushdown.system import Configuration, Cps

_BORDER = ("border",)
_EQUAL = ("eq",)


@dataclass(frozen=True)
class Compiled:
    automaton: Nfta
    variables: Tuple[str, ...]

    @property
    def is_sentence(self) -> bool:
        return not self.variables

    def holds(self) -> bool:
        """Truth value of a compiled sentence: acceptance of the empty convolution."""
        if self.variables:
            raise PreconditionError("sentence", f"free variables {list(self.variables)}")
        return self.automaton.accepts(EMPTY_TREE)


class FormulaCompiler:
    def __init__(self, cps: Cps, automaton: Optional[CounterAutomaton] = None):
        self.cps = cps
        self.counters = automaton or counter_automaton(cps, 1)
        self.base = enc_labels(cps)
        self._domains: Dict[int, Nfta] = {}
        logger.info(f"Formula compiler for {cps.name or 'system'} over {len(self.base)} labels")

    @property
    def exact(self) -> bool:
        return self.counters.exact

    def alphabet(self, n: int):
        return conv_alphabet([self.base] * n)

    def _normalized(self, a: Nfta, n: int) -> Nfta:
        return with_alphabet(a, self.alphabet(n))

    def domain(self, n: int) -> Nfta:
        if n not in self._domains:
            if n == 0:
                result = Nfta((0,), self.alphabet(0), 0, frozenset({0}), frozenset())
            else:
                single = relabel(reachable_configs_automaton(self.cps, self.counters), lambda x: (x,))
                result = self._embed(single, (0,), n)
                for i in range(1, n):
                    result = intersect(result, self._embed(single, (i,), n))
            self._domains[n] = self._normalized(result, n)
        return self._domains[n]

    def _embed(self, a: Nfta, positions: Sequence[int], n: int) -> Nfta:
        """Place the components of ``a`` at ``positions`` among n, the others free."""
        k = len(positions)
        for j in range(k, n):
            a = cylindrify(a, j, self.base)
        rest = [i for i in range(n) if i not in positions]
        target = list(positions) + rest
        if target != list(range(n)):
            a = relabel(a, lambda x: tuple(x[target.index(i)] for i in range(n)))
        return self._normalized(a, n)

    def _align(self, compiled: Compiled, variables: Sequence[str]) -> Nfta:
        positions = [list(variables).index(v) for v in compiled.variables]
        return self._embed(compiled.automaton, positions, len(variables))

    # -- atoms --------------------------------------------------------------------

    def _equality(self) -> Nfta:
        def rule(p0, p1):
            if p0 in (_BORDER, _EQUAL) and p1 in (_BORDER, _EQUAL):
                for x in self.base:
                    yield (x, x), _EQUAL

        return Nfta.crawl(self.alphabet(2), _BORDER, rule, lambda p: p == _EQUAL)

    def _edge(self, label: Hashable) -> Nfta:
        if label not in self.cps.labels:
            logger.warning(f"Label {label} does not occur in the system; its edge relation is empty")
        return self._normalized(transition_relation_automaton(self.cps, label), 2)

    def _diagonal(self, a: Nfta) -> Nfta:
        """The unary relation {c : (c, c) ∈ L(a)}."""
        transitions = frozenset((q0, q1, (x[0],), q) for q0, q1, x, q in a.transitions if x[0] == x[1])
        return Nfta(a.states, self.alphabet(1), a.initial, a.finals, transitions, a.names).trim()

    def _atom(self, relation: Nfta, x: str, y: str) -> Compiled:
        if x == y:
            return Compiled(intersect(self._diagonal(relation), self.domain(1)), (x,))
        return Compiled(intersect(relation, self.domain(2)), (x, y))

    # -- formulas -------------------------------------------------------------------

    def compile(self, phi: Formula) -> Compiled:
        variables = tuple(free_vars(phi))
        n = len(variables)
        if isinstance(phi, Const):
            a = self.domain(n)
            if not phi.value:
                a = Nfta(a.states, a.alphabet, a.initial, frozenset(), frozenset())
            return Compiled(a, variables)
        if isinstance(phi, Eq):
            return self._atom(self._equality(), phi.x, phi.y)
        if isinstance(phi, Edge):
            return self._atom(self._edge(phi.label), phi.x, phi.y)
        if isinstance(phi, (Reach, ReachL)):
            raise PreconditionError("reach-free", f"{phi} has no automaton; use bounded checking")
        if isinstance(phi, Jump):
            raise PreconditionError("vocabulary", "jump edges exist only in nested pushdown trees")
        if isinstance(phi, Not):
            inner = self._align(self.compile(phi.arg), variables)
            return Compiled(intersect(self._normalized(complement(inner), n), self.domain(n)), variables)
        if isinstance(phi, (And, Or)):
            left = self._align(self.compile(phi.left), variables)
            right = self._align(self.compile(phi.right), variables)
            combine = intersect if isinstance(phi, And) else union
            return Compiled(self._normalized(combine(left, right), n), variables)
        if isinstance(phi, Exists):
            body = self.compile(phi.body)
            if phi.var not in body.variables:
                return Compiled(self._align(body, variables), variables)
            a = intersect(self._align(body, (phi.var,) + variables), self.domain(n + 1))
            return Compiled(self._normalized(project(a, 0), n), variables)
        if isinstance(phi, Forall):
            return self.compile(Not(Exists(phi.var, Not(phi.body))))
        if isinstance(phi, ModCount):
            body = self.compile(phi.body)
            a = intersect(self._align(body, (phi.var,) + variables), self.domain(n + 1))
            return Compiled(self._normalized(mod_count_automaton(a, phi.m, phi.k), n), variables)
        if isinstance(phi, Infinite):
            even = ModCount(0, 2, phi.var, phi.body)
            odd = ModCount(1, 2, phi.var, phi.body)
            return self.compile(Not(Or(even, odd)))
        raise TypeError(f"not a formula: {phi!r}")


def compile_formula(cps: Cps, phi: Formula, automaton: Optional[CounterAutomaton] = None) -> Compiled:
    compiled = FormulaCompiler(cps, automaton).compile(phi)
    logger.info(f"Compiled {phi} to {len(compiled.automaton.states)} states over {list(compiled.variables)}")
    return compiled


def satisfies(compiled: Compiled, assignment: Mapping[str, Configuration]) -> bool:
    """Whether the configurations assigned to the free variables are accepted."""
    missing = [v for v in compiled.variables if v not in assignment]
    if missing:
        raise PreconditionError("assignment", f"no value for {missing}")
    trees = [encode(assignment[v]) for v in compiled.variables]
    return compiled.automaton.accepts(convolve(trees))

"""Deciding sentences over the configuration graph of a system.

Reach-free sentences are compiled into automata and decided exactly.
Sentences with reachability atoms are evaluated by recursion over a
bounded universe: the reachable configurations whose encoding has depth at
most ``bound``, with each Reach atom answered by the reachability
procedures. Such verdicts carry the bound they were computed with.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from src.automata.nfta import language_upto
from src.core.errors import PreconditionError
from src.core.logger import logger
from src.counting.counter_automaton import CounterAutomaton, counter_automaton
from src.encoding.codec import decode
from src.logic.compiler import FormulaCompiler
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
    uses_jump,
    uses_reach,
    walk,
)
from src.presentation.reachable import reachable_configs_automaton
from src.pushdown.system import Configuration, Cps
from src.reachability.dfa import Dfa, reach_regular
from src.reachability.relations import reach

EXACT = "exact"
APPROXIMATE = "approximate"
BOUNDED = "bounded"


@dataclass(frozen=True)
class Verdict:
    value: bool
    exactness: str = EXACT
    bound: Optional[int] = None
    existential: bool = field(default=False, compare=False)

    @property
    def conclusive(self) -> bool:
        """Exact verdicts always; others only as found witnesses of existential-positive sentences."""
        return self.exactness == EXACT or (self.value and self.existential)

    def to_json(self) -> Dict:
        return {
            "value": self.value,
            "exactness": self.exactness,
            "bound": self.bound,
            "conclusive": self.conclusive,
        }

    def __str__(self) -> str:
        tag = self.exactness if self.bound is None else f"{self.exactness}({self.bound})"
        return f"{str(self.value).lower()} [{tag}]"


def is_existential_positive(phi: Formula) -> bool:
    return not any(isinstance(node, (Not, Forall, ModCount, Infinite)) for node in walk(phi))


def bounded_universe(
    cps: Cps, bound: int, automaton: Optional[CounterAutomaton] = None, limit: int = 20000
) -> List[Configuration]:
    """Reachable configurations whose encoding has depth at most ``bound``."""
    if bound < 0:
        raise PreconditionError("bound", "the bound must be nonnegative")
    trees = language_upto(reachable_configs_automaton(cps, automaton), bound, limit)
    universe = [decode(t) for t in trees]
    logger.info(f"Bounded universe of depth {bound} has {len(universe)} configurations")
    return universe


class BoundedEvaluator:
    def __init__(
        self,
        cps: Cps,
        universe: List[Configuration],
        languages: Optional[Mapping[str, Dfa]] = None,
        automaton: Optional[CounterAutomaton] = None,
    ):
        self.cps = cps
        self.universe = universe
        self.languages = dict(languages or {})
        self.automaton = automaton or counter_automaton(cps, 1)
        self._reach: Dict[Tuple, bool] = {}
        self._edges: Dict[Configuration, List] = {}

    def _successors(self, c: Configuration):
        if c not in self._edges:
            self._edges[c] = self.cps.successors(c)
        return self._edges[c]

    def _reaches(self, c1: Configuration, c2: Configuration, language: Optional[str] = None) -> bool:
        key = (language, c1, c2)
        if key not in self._reach:
            if language is None:
                self._reach[key] = reach(self.cps, c1, c2, self.automaton)
            else:
                if language not in self.languages:
                    raise PreconditionError("language", f"no DFA registered under {language!r}")
                self._reach[key] = reach_regular(self.cps, c1, c2, self.languages[language])
        return self._reach[key]

    def holds(self, phi: Formula, env: Mapping[str, Configuration]) -> bool:
        if isinstance(phi, Const):
            return phi.value
        if isinstance(phi, Eq):
            return env[phi.x] == env[phi.y]
        if isinstance(phi, Edge):
            return any(str(label) == str(phi.label) and c == env[phi.y] for label, c in self._successors(env[phi.x]))
        if isinstance(phi, Reach):
            return self._reaches(env[phi.x], env[phi.y])
        if isinstance(phi, ReachL):
            return self._reaches(env[phi.x], env[phi.y], phi.language)
        if isinstance(phi, Jump):
            raise PreconditionError("vocabulary", "jump edges exist only in nested pushdown trees")
        if isinstance(phi, Not):
            return not self.holds(phi.arg, env)
        if isinstance(phi, And):
            return self.holds(phi.left, env) and self.holds(phi.right, env)
        if isinstance(phi, Or):
            return self.holds(phi.left, env) or self.holds(phi.right, env)
        if isinstance(phi, Exists):
            return any(self.holds(phi.body, {**env, phi.var: c}) for c in self.universe)
        if isinstance(phi, Forall):
            return all(self.holds(phi.body, {**env, phi.var: c}) for c in self.universe)
        if isinstance(phi, ModCount):
            count = sum(1 for c in self.universe if self.holds(phi.body, {**env, phi.var: c}))
            return count % phi.m == phi.k % phi.m
        if isinstance(phi, Infinite):
            # a finite universe has no infinite witness sets
            return False
        raise TypeError(f"not a formula: {phi!r}")


def _check_closed(phi: Formula) -> None:
    if free_vars(phi):
        raise PreconditionError("sentence", f"free variables {free_vars(phi)}")
    if uses_jump(phi):
        raise PreconditionError("vocabulary", "jump edges exist only in nested pushdown trees")


def check_sentence(
    cps: Cps,
    phi: Formula,
    bound: Optional[int] = None,
    languages: Optional[Mapping[str, Dfa]] = None,
    automaton: Optional[CounterAutomaton] = None,
    limit: int = 20000,
) -> Verdict:
    _check_closed(phi)
    automaton = automaton or counter_automaton(cps, 1)
    existential = is_existential_positive(phi)
    if not uses_reach(phi):
        compiler = FormulaCompiler(cps, automaton)
        value = compiler.compile(phi).holds()
        exactness = EXACT if compiler.exact else APPROXIMATE
        logger.info(f"Checked {phi} by automata: {value} ({exactness})")
        return Verdict(value, exactness, None, existential)
    if bound is None:
        raise PreconditionError("bound", "sentences with reachability atoms need a bound")
    universe = bounded_universe(cps, bound, automaton, limit)
    value = BoundedEvaluator(cps, universe, languages, automaton).holds(phi, {})
    logger.info(f"Checked {phi} over {len(universe)} configurations: {value}")
    return Verdict(value, BOUNDED, bound, existential)


def _existential_block(phi: Formula) -> Tuple[List[str], Formula]:
    names: List[str] = []
    while isinstance(phi, Exists):
        names.append(phi.var)
        phi = phi.body
    return names, phi


def witnesses(
    cps: Cps,
    phi: Formula,
    depth: int,
    languages: Optional[Mapping[str, Dfa]] = None,
    automaton: Optional[CounterAutomaton] = None,
    limit: Optional[int] = None,
) -> Iterator[Dict[str, Configuration]]:
    """Assignments to the leading existential variables that make the rest true."""
    _check_closed(phi)
    names, body = _existential_block(phi)
    universe = bounded_universe(cps, depth, automaton)
    evaluator = BoundedEvaluator(cps, universe, languages, automaton)
    found = 0
    for values in product(universe, repeat=len(names)):
        env = dict(zip(names, values))
        if evaluator.holds(body, env):
            yield env
            found += 1
            if limit is not None and found >= limit:
                return

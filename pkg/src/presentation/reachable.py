"""A tree automaton for the encodings of reachable configurations.

Bottom-up, each node guesses its certificate value f and the counter state
c of its left stack. A subtree summary records, besides c and f, its exits:
``("end", f)`` for the value at its lexicographically largest node and
``("open", g)`` for every state g in which a run can come back to the
subtree's root word after cloning at that largest node, popping up and
looping. The certificate conditions between consecutive nodes are then
local to a node and its two children.
"""

from typing import FrozenSet, Iterator, Optional, Set, Tuple

from src.automata.nfta import Nfta, intersect
from src.core.logger import logger
from src.counting.counter_automaton import Annotation, CounterAutomaton, counter_automaton
from src.encoding.enc_trees import enc_labels, enc_trees_automaton
from src.presentation.certificates import CertificateRules
from src.pushdown.stack import EPSILON
from src.pushdown.system import Cps

_BORDER = ("border",)
_ROOT = ("root",)

Exits = FrozenSet[Tuple[str, object]]


def _opens(exits: Exits) -> Set[object]:
    return {g for tag, g in exits if tag == "open"}


def _exits_up(rules: CertificateRules, child, c: Annotation) -> Exits:
    """Exits of a node whose largest node lies in its 0-subtree ``child``."""
    _, _, c0, _, exits0 = child
    opens = set().union(*(rules.pop_loop(c0.letter, g, c) for g in _opens(exits0)))
    ends = {e for e in exits0 if e[0] == "end"}
    return frozenset(ends | {("open", g) for g in opens})


def reachable_configs_automaton(
    cps: Cps, automaton: Optional[CounterAutomaton] = None, max_states: int = 50000
) -> Nfta:
    """Accepts exactly encode(c) for the configurations c reachable from the initial one."""
    automaton = automaton or counter_automaton(cps, 1)
    automaton.saturate()
    rules = CertificateRules(cps, automaton)
    counters = automaton.states
    states = list(cps.states)
    start = rules.start()

    def candidates(p0, p1) -> Iterator[Annotation]:
        if p1 != _BORDER:
            c = p1[2]
            if p0 == _BORDER or automaton.step(c, p0[2].letter) == p0[2]:
                yield c
        elif p0 != _BORDER:
            yield from automaton.preimages(p0[2], p0[2].letter)
        else:
            yield from counters

    def node(c: Annotation, f, p0, p1) -> Optional[Exits]:
        if p0 == _BORDER and p1 == _BORDER:
            return frozenset({("end", f)} | {("open", g) for g in rules.clone_loop(c, f)})
        if p0 != _BORDER and p0[3] not in rules.push_high(c, f, p0[2]):
            return None
        if p1 == _BORDER:
            return _exits_up(rules, p0, c)
        if p0 == _BORDER:
            allowed = rules.clone_loop(c, f)
        else:
            allowed = set().union(*(rules.pop_loop(p0[2].letter, g, c) for g in _opens(p0[4])))
        return p1[4] if p1[3] in allowed else None

    def rule(p0, p1):
        if p0 == _ROOT or p1 == _ROOT:
            return
        if p0 != _BORDER and p0[1] != "letter" or p1 != _BORDER and p1[1] != "eps":
            return
        if p1 == _BORDER and p0 != _BORDER and p0[2] == automaton.initial:
            for q in states:
                if ("end", q) in p0[4] and p0[3] in start:
                    yield q, _ROOT
        for c in candidates(p0, p1):
            for kind in ("letter", "eps"):
                label = c.letter if kind == "letter" else EPSILON
                for f in states:
                    exits = node(c, f, p0, p1)
                    if exits is not None:
                        yield label, ("n", kind, c, f, exits)

    shape = Nfta.crawl(enc_labels(cps), _BORDER, rule, lambda p: p == _ROOT, max_states=max_states)
    result = intersect(shape, enc_trees_automaton(cps))
    logger.info(f"Reachable-configuration automaton has {len(result.states)} states")
    return result

"""Reachability between configurations, split at the lowest visited substacks.

Any run from c1 to c2 passes through x = (·, Pop2^i(s1)), then
y = (·, Pop1^j(x's stack)), then z with y's stack a Pop1-power of z's, and
finally c2 whose stack lies above z's by Pop2 steps. The four segments are
the relations A, B, C and D; each one is decided from counter-automaton
annotations of finitely many stacks.
"""

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from src.core.errors import PreconditionError
from src.core.logger import logger
from src.counting.counter_automaton import CounterAutomaton, counter_automaton
from src.encoding.codec import encode, milestone_nodes, stack_nodes
from src.presentation.certificates import CertificateRules, annotate
from src.pushdown.stack import OpKind, Stack, format_stack, is_substack, is_word_prefix, pop1
from src.pushdown.system import Configuration, Cps, State

FORMS = {
    1: "return",
    2: "1-loop then level-2 collapse",
    3: "loop then level-2 collapse",
    4: "loop then pop",
    5: "1-loop then pop",
}


@dataclass(frozen=True)
class ChainLink:
    """One segment of an A-witness: the run at ``stack`` in ``state`` continues by ``form``."""

    node: Optional[str]
    form: int
    state: State
    stack: Stack
    elevated: bool = False

    def to_json(self) -> Dict:
        return {
            "node": self.node,
            "form": self.form,
            "state": str(self.state),
            "stack": format_stack(self.stack),
            "elevated": self.elevated,
        }


def _automaton(cps: Cps, automaton: Optional[CounterAutomaton]) -> CounterAutomaton:
    return automaton or counter_automaton(cps, 1)


def _is_pop2_power(s: Stack, t: Stack) -> bool:
    """s = Pop2^m(t) for some m ≥ 0."""
    return len(s) <= len(t) and t[: len(s)] == s


def _pop1_power(s: Stack, t: Stack) -> Optional[int]:
    """m with s = Pop1^m(t), or None."""
    if len(s) != len(t) or s[:-1] != t[:-1] or not is_word_prefix(s[-1], t[-1]):
        return None
    return len(t[-1]) - len(s[-1])


def _moves(cps: Cps, state: State, symbol: str, kinds: Iterable[OpKind]) -> List[State]:
    kinds = tuple(kinds)
    return [t.target for _, t in cps.enabled(state, symbol) if t.op.kind in kinds]


# -- relation A ------------------------------------------------------------------


def _a_search(
    cps: Cps, q1: State, s1: Stack, s2: Stack, automaton: CounterAutomaton
) -> Dict[State, List[Tuple[int, State, Stack, bool]]]:
    """Every state reachable at s2 by an A-run from (q1, s1), with one witness chain each."""
    if not _is_pop2_power(s2, s1):
        raise PreconditionError("pop2-power", "the target stack must be Pop2^m of the source stack")
    if s1 == s2:
        high = automaton.evaluate(s1).high_loop
        return {q2: [] for q2 in high.successors(q1)}
    floor = len(s2)
    start = (q1, s1, False)
    parent: Dict[Tuple, Optional[Tuple[Tuple, int]]] = {start: None}
    arrivals: Dict[State, List[Tuple[int, State, Stack, bool]]] = {}
    queue = deque([start])

    def chain(node, form) -> List[Tuple[int, State, Stack, bool]]:
        links = [(form, node[0], node[1], node[2])]
        while parent[node] is not None:
            node, form = parent[node]
            links.append((form, node[0], node[1], node[2]))
        return list(reversed(links))

    while queue:
        current = queue.popleft()
        q, t, elevated = current
        a = automaton.evaluate(t)
        top = t[-1][-1]
        successors: List[Tuple[int, State, Stack, bool]] = []
        if not elevated:
            successors += [(1, x, t[:-1], False) for x in a.ret.successors(q)]
        if top.level == 2 and top.link >= floor:
            for x in [y for p, y in a.one_loops if p == q]:
                successors += [(2, q2, t[: top.link], False) for q2 in _moves(cps, x, top.sym, [OpKind.COLLAPSE])]
            for x in a.loop.successors(q):
                successors += [(3, q2, t[: top.link], False) for q2 in _moves(cps, x, top.sym, [OpKind.COLLAPSE])]
        shorter = pop1(t)
        if shorter is not None:
            kinds = [OpKind.POP1, OpKind.COLLAPSE] if top.level == 1 else [OpKind.POP1]
            for x in a.loop.successors(q):
                successors += [(4, q2, shorter, elevated) for q2 in _moves(cps, x, top.sym, kinds)]
            for x in [y for p, y in a.one_loops if p == q]:
                successors += [(5, q2, shorter, True) for q2 in _moves(cps, x, top.sym, kinds)]
        for form, q2, t2, e2 in successors:
            if len(t2) < floor:
                continue
            if len(t2) == floor:
                if t2 != s2 or e2:
                    continue
                for q3 in automaton.evaluate(s2).high_loop.successors(q2):
                    if q3 not in arrivals:
                        arrivals[q3] = chain(current, form)
                continue
            nxt = (q2, t2, e2)
            if nxt not in parent:
                parent[nxt] = (current, form)
                queue.append(nxt)
    return arrivals


def rel_A(cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None) -> bool:
    """A run from c1 to c2 visiting no proper substack of c2's stack."""
    found = _a_search(cps, c1.state, c1.stack, c2.stack, _automaton(cps, automaton))
    return c2.state in found


def substack_certificate(
    cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None
) -> Optional[List[ChainLink]]:
    """The witness chain for rel_A: one link per segment, nodes taken from encode(c1)."""
    found = _a_search(cps, c1.state, c1.stack, c2.stack, _automaton(cps, automaton))
    if c2.state not in found:
        return None
    nodes = milestone_nodes(encode(c1))
    return [ChainLink(nodes.get(t), form, q, t, e) for form, q, t, e in found[c2.state]]


def a_states(cps: Cps, q1: State, s1: Stack, s2: Stack, automaton: Optional[CounterAutomaton] = None) -> FrozenSet[State]:
    return frozenset(_a_search(cps, q1, s1, s2, _automaton(cps, automaton)))


# -- relations B and C -------------------------------------------------------------


def b_states(
    cps: Cps, sources: Iterable[State], s1: Stack, s2: Stack, automaton: Optional[CounterAutomaton] = None
) -> FrozenSet[State]:
    """States at s2 = Pop1^m(s1) reachable by a high loop before and after each Pop1."""
    m = _pop1_power(s2, s1)
    if m is None:
        raise PreconditionError("pop1-power", "the target stack must be Pop1^m of the source stack")
    automaton = _automaton(cps, automaton)
    current: Set[State] = set(sources)
    t = s1
    for _ in range(m):
        high = automaton.evaluate(t).high_loop
        top = t[-1][-1]
        kinds = [OpKind.POP1, OpKind.COLLAPSE] if top.level == 1 else [OpKind.POP1]
        current = {q2 for q in current for x in high.successors(q) for q2 in _moves(cps, x, top.sym, kinds)}
        t = pop1(t)
    high = automaton.evaluate(s2).high_loop
    return frozenset(q2 for q in current for q2 in high.successors(q))


def rel_B(cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None) -> bool:
    return c2.state in b_states(cps, [c1.state], c1.stack, c2.stack, automaton)


def c_states(
    cps: Cps, sources: Iterable[State], s1: Stack, s2: Stack, automaton: Optional[CounterAutomaton] = None
) -> FrozenSet[State]:
    """States at s2 with s1 = Pop1^m(s2): a high loop, then each letter pushed and high-looped."""
    m = _pop1_power(s1, s2)
    if m is None:
        raise PreconditionError("pop1-power", "the source stack must be Pop1^m of the target stack")
    automaton = _automaton(cps, automaton)
    current = {q2 for q in sources for q2 in automaton.evaluate(s1).high_loop.successors(q)}
    t = s1
    for letter in s2[-1][len(s1[-1]):]:
        if letter.level == 2 and letter.link != len(s2) - 1:
            return frozenset()
        symbol = t[-1][-1].sym
        t = t[:-1] + (t[-1] + (letter,),)
        high = automaton.evaluate(t).high_loop
        pushed = set()
        for q in current:
            for _, tr in cps.enabled(q, symbol):
                if tr.op.kind is OpKind.PUSH and (tr.op.sym, tr.op.level) == letter.label:
                    pushed.update(high.successors(tr.target))
        current = pushed
    return frozenset(current)


def rel_C(cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None) -> bool:
    return c2.state in c_states(cps, [c1.state], c1.stack, c2.stack, automaton)


# -- relation D --------------------------------------------------------------------


def d_states(
    cps: Cps, sources: Iterable[State], s1: Stack, s2: Stack, automaton: Optional[CounterAutomaton] = None
) -> FrozenSet[State]:
    """States at s2 reachable from s1 = Pop2^m(s2) along the milestones between them."""
    if not _is_pop2_power(s1, s2):
        raise PreconditionError("pop2-power", "the source stack must be Pop2^m of the target stack")
    sources = frozenset(sources)
    if s1 == s2:
        return sources
    rules = CertificateRules(cps, _automaton(cps, automaton))
    t = encode(Configuration(next(iter(sources), cps.initial), s2))
    nodes = stack_nodes(t)
    start = milestone_nodes(t)[s1]
    annotations = annotate(cps, t, automaton=rules.automaton)
    layer: Set[State] = set(sources)
    for x, y in zip(nodes[nodes.index(start):], nodes[nodes.index(start) + 1:]):
        layer = set().union(*(rules.step(t, x, fx, y, annotations) for fx in layer))
        if not layer:
            break
    return frozenset(layer)


def rel_D(cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None) -> bool:
    if c1.stack == c2.stack:
        return c1 == c2
    return c2.state in d_states(cps, [c1.state], c1.stack, c2.stack, automaton)


# -- composition -------------------------------------------------------------------


def reach(cps: Cps, c1: Configuration, c2: Configuration, automaton: Optional[CounterAutomaton] = None) -> bool:
    """Whether some run leads from c1 to c2."""
    automaton = _automaton(cps, automaton)
    s1, s2 = c1.stack, c2.stack
    for i in range(len(s1)):
        s3 = s1[: len(s1) - i]
        xs = a_states(cps, c1.state, s1, s3, automaton)
        if not xs:
            continue
        s4: Optional[Stack] = s3
        while s4 is not None:
            if len(s4) <= len(s2) and is_substack(s4, s2):
                s5 = s2[: len(s4)]
                if _pop1_power(s4, s5) is not None:
                    ys = b_states(cps, xs, s3, s4, automaton)
                    zs = c_states(cps, ys, s4, s5, automaton) if ys else frozenset()
                    if zs and c2.state in d_states(cps, zs, s5, s2, automaton):
                        logger.debug(f"Reach {c1} → {c2} through {len(s3)}/{len(s4[-1])}/{len(s5[-1])}")
                        return True
            s4 = pop1(s4)
    return False

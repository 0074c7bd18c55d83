"""Certificates: the state in which a run last visits each milestone.

Nodes of encode(c) other than the root stand for the milestones of c's
stack in substack order. A certificate labels each of them with a state;
it is valid when every two lexicographically consecutive nodes are linked
by a push followed by a high loop (next node is a 0-child) or by a clone,
pops back to the branching node and loops (next node is a 1-child).
"""

from typing import Dict, FrozenSet, Hashable, List, Optional, Set, Tuple

from src.automata.tree import Tree
from src.core.logger import logger
from src.counting.counter_automaton import Annotation, CounterAutomaton, counter_automaton
from src.encoding.codec import check_enc_tree, encode, left_stack, stack_nodes
from src.pushdown.runs import Run, run_configurations
from src.pushdown.stack import OpKind
from src.pushdown.system import Configuration, Cps, State

Certificate = Dict[str, State]


class CertificateRules:
    """Local certificate conditions over counter-automaton annotations."""

    def __init__(self, cps: Cps, automaton: Optional[CounterAutomaton] = None):
        self.cps = cps
        self.automaton = automaton or counter_automaton(cps, 1)
        self.base = self.automaton.initial

    def _targets(self, state: State, symbol: str, kinds, letter=None) -> List[State]:
        found = []
        for _, t in self.cps.enabled(state, symbol):
            if t.op.kind not in kinds:
                continue
            if letter is not None and (t.op.sym, t.op.level) != letter:
                continue
            found.append(t.target)
        return found

    @staticmethod
    def _after(targets, fn) -> Set[State]:
        return {g for q2 in targets for g in fn.successors(q2)}

    def clone_loop(self, c: Annotation, f: State) -> Set[State]:
        """States after Clone2 from f followed by a loop of the cloned word."""
        return self._after(self._targets(f, c.letter[0], (OpKind.CLONE,)), c.loop)

    def push_high(self, c: Annotation, f: State, pushed: Annotation) -> Set[State]:
        """States after pushing pushed.letter from f followed by a high loop."""
        targets = self._targets(f, c.letter[0], (OpKind.PUSH,), letter=pushed.letter)
        return self._after(targets, pushed.high_loop)

    def pop_loop(self, letter: Tuple[str, int], g: State, c: Annotation) -> Set[State]:
        """States after removing ``letter`` from g (Pop1, or collapse at level 1) and looping."""
        kinds = (OpKind.POP1, OpKind.COLLAPSE) if letter[1] == 1 else (OpKind.POP1,)
        return self._after(self._targets(g, letter[0], kinds), c.loop)

    def start(self) -> FrozenSet[State]:
        """Possible certificate values at node 0."""
        return frozenset(self.base.loop.successors(self.cps.initial))

    def step(self, t: Tree, x: str, fx: State, y: str, annotations: Dict[str, Annotation]) -> Set[State]:
        """Values allowed at y given value fx at its lexicographic predecessor x."""
        if y == x + "0":
            return self.push_high(annotations[x], fx, annotations[y])
        z = y[:-1]
        current = self.clone_loop(annotations[x], fx)
        u = x
        while u != z and current:
            parent = u[:-1]
            if u.endswith("0"):
                current = set().union(
                    *(self.pop_loop(t[u], g, annotations[parent]) for g in current)
                )
            u = parent
        return current


def annotate(cps: Cps, t: Tree, k: int = 1, automaton: Optional[CounterAutomaton] = None) -> Dict[str, Annotation]:
    """Counter-automaton state of every node's left stack, read along its path."""
    check_enc_tree(t)
    automaton = automaton or counter_automaton(cps, k)
    result: Dict[str, Annotation] = {}
    for d in stack_nodes(t):
        if d == "0":
            result[d] = automaton.initial
        elif d.endswith("1"):
            result[d] = result[d[:-1]]
        else:
            result[d] = automaton.step(result[d[:-1]], t[d])
    return result


def check_certificate(
    cps: Cps, t: Tree, f: Certificate, automaton: Optional[CounterAutomaton] = None
) -> bool:
    rules = CertificateRules(cps, automaton)
    nodes = stack_nodes(check_enc_tree(t))
    if any(d not in f for d in nodes):
        return False
    annotations = annotate(cps, t, automaton=rules.automaton)
    if f["0"] not in rules.start() or f[nodes[-1]] != t[""]:
        return False
    return all(f[y] in rules.step(t, x, f[x], y, annotations) for x, y in zip(nodes, nodes[1:]))


def find_certificate(
    cps: Cps, c: Configuration, automaton: Optional[CounterAutomaton] = None
) -> Optional[Certificate]:
    """A certificate for c found by a left-to-right pass over encode(c), or None."""
    rules = CertificateRules(cps, automaton)
    t = encode(c)
    nodes = stack_nodes(t)
    annotations = annotate(cps, t, automaton=rules.automaton)
    back: Dict[Tuple[str, State], Optional[State]] = {("0", q): None for q in rules.start()}
    layer: Set[State] = set(rules.start())
    for x, y in zip(nodes, nodes[1:]):
        following: Set[State] = set()
        for fx in sorted(layer, key=str):
            for fy in rules.step(t, x, fx, y, annotations):
                if fy not in following:
                    following.add(fy)
                    back[(y, fy)] = fx
        layer = following
        if not layer:
            logger.debug(f"No certificate for {c}: dead end at node {y}")
            return None
    if c.state not in layer:
        return None
    certificate: Certificate = {}
    value: Optional[State] = c.state
    for d in reversed(nodes):
        certificate[d] = value
        value = back[(d, value)]
    return certificate


def certificate_of_run(cps: Cps, run: Run) -> Certificate:
    """The state of the last visit of every milestone of the run's final stack."""
    configs = run_configurations(cps, run)
    t = encode(configs[-1])
    result: Certificate = {}
    for d in stack_nodes(t):
        target = left_stack(d, t)
        result[d] = next(c.state for c in reversed(configs) if c.stack == target)
    return result


def certificate_to_json(f: Certificate) -> Dict[str, Hashable]:
    return {d: str(q) for d, q in sorted(f.items())}


def annotations_to_json(annotations: Dict[str, Annotation]) -> Dict[str, Dict]:
    return {d: a.to_json() for d, a in sorted(annotations.items())}

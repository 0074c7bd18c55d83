"""Simulating the nested pushdown tree of a pushdown system by a level-2 system.

The level-2 system keeps the history of the simulated run as a stack of
words: every simulated step clones the top word, pops the state written on
it, performs the step (a push becomes a level-2 push linking to the stack
before it) and writes the new state. Configurations in state CLONE stand
for runs; a collapse from the state before a pop lands on the CLONE
configuration where the popped letter was pushed, which realizes the jump.
"""

from collections import deque
from typing import Dict, List, Optional, Tuple

import networkx as nx

from src.core.errors import PreconditionError, ReservedSymbolError
from src.core.logger import logger
from src.npt.nested import npt_graph
from src.pushdown.stack import CLONE, COLLAPSE, ID, POP1, Letter, OpKind, push, top2
from src.pushdown.system import Configuration, Cps, State, Transition

CLONE_STATE = "CLONE"
POP_STATE = "POP"
GAMMA_PUSH = "g_push"
GAMMA_CLONE = "g_clone"
GAMMA_POP = "g_pop"
GAMMA_JUMP = "g_jump"
AUX_LABELS = (GAMMA_PUSH, GAMMA_CLONE, GAMMA_POP, GAMMA_JUMP)


def push_state(q: State) -> str:
    return f"PUSH({q})"


def _check_names(pds: Cps) -> None:
    states = {str(q) for q in pds.states}
    aux = {CLONE_STATE, POP_STATE} | {push_state(q) for q in pds.states}
    clash = states & aux
    if clash:
        raise ReservedSymbolError(f"state names {sorted(clash)} are used by the simulation")
    clash = states & set(pds.alphabet)
    if clash:
        raise ReservedSymbolError(f"states {sorted(clash)} are also stack symbols")
    clash = set(map(str, pds.labels)) & set(AUX_LABELS)
    if clash:
        raise ReservedSymbolError(f"labels {sorted(clash)} are used by the simulation")


def translate_to_cps(pds: Cps) -> Cps:
    if pds.level != 1:
        raise PreconditionError("level", "only level-1 systems generate nested pushdown trees")
    _check_names(pds)
    rows: List[Transition] = []
    for q in pds.states:
        for sym in pds.alphabet:
            rows.append(Transition(push_state(q), sym, GAMMA_PUSH, CLONE_STATE, push(str(q), 1)))
        rows.append(Transition(CLONE_STATE, str(q), GAMMA_CLONE, POP_STATE, CLONE))
        rows.append(Transition(POP_STATE, str(q), GAMMA_POP, q, POP1))
    for t in pds.transitions:
        if t.op.kind is OpKind.ID:
            rows.append(Transition(t.state, t.sym, t.label, push_state(t.target), ID))
        elif t.op.kind is OpKind.PUSH:
            rows.append(Transition(t.state, t.sym, t.label, push_state(t.target), push(t.op.sym, 2)))
        elif t.op.kind is OpKind.POP1:
            rows.append(Transition(t.state, t.sym, t.label, push_state(t.target), POP1))
            rows.append(Transition(t.state, t.sym, GAMMA_JUMP, CLONE_STATE, COLLAPSE))
        else:
            raise PreconditionError("level", f"{t.op} is not a level-1 operation")
    states = [CLONE_STATE, POP_STATE] + list(pds.states) + [push_state(q) for q in pds.states]
    alphabet = list(pds.alphabet) + [str(q) for q in pds.states]
    labels = list(pds.labels) + list(AUX_LABELS)
    result = Cps(
        states=tuple(states),
        alphabet=tuple(dict.fromkeys(alphabet)),
        labels=tuple(dict.fromkeys(labels)),
        initial=push_state(pds.initial),
        transitions=tuple(dict.fromkeys(rows)),
        level=2,
        name=f"{pds.name}-sim" if pds.name else "sim",
    )
    logger.info(f"Simulating system has {len(result.states)} states and {len(result.transitions)} transitions")
    return result


def represented(c: Configuration) -> Optional[Configuration]:
    """The level-1 configuration (q, w) a CLONE configuration stands for: its top word is w q."""
    if c.state != CLONE_STATE:
        return None
    word = top2(c.stack)
    letters = tuple(Letter(x.sym) for x in word[:-1])
    return Configuration(word[-1].sym, (letters,))


def _simulated(cim: Cps, c: Configuration) -> Tuple[List[Tuple[str, Configuration, bool]], List[Configuration]]:
    """Simulated steps (γ, next CLONE configuration, popped) and the jump sources of the pops."""
    steps: List[Tuple[str, Configuration, bool]] = []
    sources: List[Configuration] = []
    for _, cloned in cim.steps(c):
        for _, d in cim.steps(cloned):
            for i, e in cim.steps(d):
                t = cim.transitions[i]
                if t.label == GAMMA_JUMP:
                    sources.append(e)
                    continue
                for _, f in cim.steps(e):
                    steps.append((str(t.label), f, t.op.kind is OpKind.POP1))
    return steps, sources


def clone_graph(cim: Cps, max_length: int) -> nx.MultiDiGraph:
    """CLONE configurations at most max_length simulated steps deep, with step and jump edges."""
    start = [d for _, d in cim.steps(cim.initial_configuration()) if d.state == CLONE_STATE]
    if len(start) != 1:
        raise PreconditionError("simulation", "the system does not start with the simulation prologue")
    depth: Dict[Configuration, int] = {start[0]: 0}
    queue = deque(start)
    g = nx.MultiDiGraph()
    g.add_node(str(start[0]), config=str(represented(start[0])), length=0)
    while queue:
        c = queue.popleft()
        if depth[c] >= max_length:
            continue
        steps, sources = _simulated(cim, c)
        for label, d, popped in steps:
            if d not in depth:
                depth[d] = depth[c] + 1
                g.add_node(str(d), config=str(represented(d)), length=depth[d])
                queue.append(d)
            g.add_edge(str(c), str(d), label=label, kind="step")
            if popped:
                for source in sources:
                    g.add_edge(str(source), str(d), label="jump", kind="jump")
    logger.info(f"CLONE graph up to {max_length} simulated steps: {g.number_of_nodes()} nodes")
    return g


def simulation_matches(pds: Cps, max_length: int) -> bool:
    """Whether the nested pushdown tree and the CLONE graph agree up to max_length."""
    tree = npt_graph(pds, max_length)
    clones = clone_graph(translate_to_cps(pds), max_length)
    return nx.is_isomorphic(
        tree,
        clones,
        node_match=nx.algorithms.isomorphism.categorical_node_match(["config", "length"], [None, None]),
        edge_match=nx.algorithms.isomorphism.categorical_multiedge_match("label", None),
    )

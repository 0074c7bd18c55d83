"""Nested pushdown trees: run unfoldings with jump edges.

Nodes are runs from the initial configuration. A run ρ jumps to ρ∘π when
π has length at least 2, ends on the stack ρ ended on, and every stack
strictly inside π is larger. At level 1 these are matching push/pop
pairs; at level 2 (systems without links) matching Clone2/Pop2 pairs.
"""

from typing import Hashable, Iterator, List, Optional, Tuple

import networkx as nx

from src.core.errors import CollapseNotAllowedError, PreconditionError
from src.core.logger import logger
from src.pushdown.runs import Run, run_configurations
from src.pushdown.stack import OpKind, Stack, is_word_prefix
from src.pushdown.system import Configuration, Cps

NptNode = Run


def root(pds: Cps) -> NptNode:
    return Run(pds.initial_configuration())


def _last(pds: Cps, rho: NptNode) -> Configuration:
    return run_configurations(pds, rho)[-1]


def _check_level1(pds: Cps) -> None:
    if pds.level != 1:
        raise PreconditionError("level", "nested pushdown trees are built from level-1 systems")


def npt_successors(pds: Cps, rho: NptNode) -> List[Tuple[Hashable, NptNode]]:
    """(γ, ρ extended by one γ-transition), in transition order."""
    return [(pds.transitions[i].label, rho.extend(i)) for i, _ in pds.steps(_last(pds, rho))]


def _word(s: Stack):
    return s[-1]


def _extensions(pds: Cps, rho: NptNode, length_bound: int, above) -> Iterator[NptNode]:
    """Extensions of ρ of total length ≤ bound whose inner stacks satisfy ``above`` and end back level."""
    start = _last(pds, rho)
    stack = [(rho, start, 0)]
    while stack:
        node, c, steps = stack.pop()
        if len(node) >= length_bound:
            continue
        for i, d in reversed(pds.steps(c)):
            nxt = node.extend(i)
            if steps >= 1 and d.stack == start.stack:
                yield nxt
            elif above(d.stack, start.stack):
                stack.append((nxt, d, steps + 1))


def jump_targets(pds: Cps, rho: NptNode, length_bound: int) -> List[NptNode]:
    """Every ρ′ with ρ ↪ ρ′ and |ρ′| ≤ length_bound, shortest first."""
    _check_level1(pds)

    def above(s: Stack, base: Stack) -> bool:
        return len(_word(s)) > len(_word(base)) and is_word_prefix(_word(base), _word(s))

    found = list(_extensions(pds, rho, length_bound, above))
    return sorted(found, key=lambda r: (len(r), r.steps))


def is_jump(pds: Cps, rho1: NptNode, rho2: NptNode) -> bool:
    if rho1.start != rho2.start or rho2.steps[: len(rho1)] != rho1.steps:
        return False
    if len(rho2) - len(rho1) < 2:
        return False
    configs = run_configurations(pds, rho2)[len(rho1):]
    w = _word(configs[0].stack)
    if _word(configs[-1].stack) != w:
        return False
    return all(len(_word(c.stack)) > len(w) and is_word_prefix(w, _word(c.stack)) for c in configs[1:-1])


def jump_sources(pds: Cps, rho: NptNode) -> List[NptNode]:
    """Every prefix of ρ that jumps to ρ."""
    return [rho.prefix(n) for n in range(len(rho) - 1) if is_jump(pds, rho.prefix(n), rho)]


def npt_nodes(pds: Cps, max_length: int) -> List[NptNode]:
    """All runs from the initial configuration of length ≤ max_length, breadth first."""
    layer = [root(pds)]
    nodes = list(layer)
    for _ in range(max_length):
        layer = [child for rho in layer for _, child in npt_successors(pds, rho)]
        nodes.extend(layer)
    return nodes


def format_node(rho: NptNode) -> str:
    return "ε" if not rho.steps else ".".join(str(i) for i in rho.steps)


def npt_graph(pds: Cps, max_length: int) -> nx.MultiDiGraph:
    """Transition and jump edges among the runs of length ≤ max_length."""
    g = nx.MultiDiGraph()
    nodes = npt_nodes(pds, max_length)
    for rho in nodes:
        c = _last(pds, rho)
        g.add_node(format_node(rho), config=str(c), length=len(rho))
    for rho in nodes:
        if len(rho) < max_length:
            for label, child in npt_successors(pds, rho):
                g.add_edge(format_node(rho), format_node(child), label=str(label), kind="step")
        for target in jump_targets(pds, rho, max_length):
            g.add_edge(format_node(rho), format_node(target), label="jump", kind="jump")
    logger.info(f"Nested pushdown tree up to length {max_length}: {g.number_of_nodes()} nodes")
    return g


# -- level 2 ---------------------------------------------------------------------


def _check_level2(hpds: Cps) -> None:
    bad = [t for t in hpds.transitions if t.op.kind is OpKind.COLLAPSE or (t.op.kind is OpKind.PUSH and t.op.level == 2)]
    if bad:
        raise CollapseNotAllowedError(f"level-2 nested pushdown trees need a system without links: {bad[0]}")


def npt2_successors(hpds: Cps, rho: NptNode) -> List[Tuple[Hashable, NptNode]]:
    _check_level2(hpds)
    return [(hpds.transitions[i].label, rho.extend(i)) for i, _ in hpds.steps(_last(hpds, rho))]


def npt2_jump_targets(hpds: Cps, rho: NptNode, length_bound: int) -> List[NptNode]:
    """Extensions by a Clone2, a run avoiding ρ's last stack, and a Pop2 back onto it."""
    _check_level2(hpds)
    start = _last(hpds, rho)
    found: List[NptNode] = []
    for i, d in hpds.steps(start):
        if hpds.transitions[i].op.kind is not OpKind.CLONE:
            continue
        stack = [(rho.extend(i), d)]
        while stack:
            node, c = stack.pop()
            if len(node) >= length_bound:
                continue
            for j, e in hpds.steps(c):
                nxt = node.extend(j)
                if e.stack == start.stack:
                    if hpds.transitions[j].op.kind is OpKind.POP2:
                        found.append(nxt)
                    continue
                stack.append((nxt, e))
    return sorted(found, key=lambda r: (len(r), r.steps))


def is_level2_jump(hpds: Cps, rho1: NptNode, rho2: NptNode) -> bool:
    """Width characterization: equal end widths, strictly wider in between, length ≥ 2."""
    if rho2.steps[: len(rho1)] != rho1.steps or len(rho2) - len(rho1) < 2:
        return False
    widths = [len(c.stack) for c in run_configurations(hpds, rho2)[len(rho1):]]
    return widths[0] == widths[-1] and all(w > widths[0] for w in widths[1:-1])


def node_of(pds: Cps, steps) -> Optional[NptNode]:
    rho = Run(pds.initial_configuration(), tuple(steps))
    try:
        run_configurations(pds, rho)
    except PreconditionError:
        return None
    return rho

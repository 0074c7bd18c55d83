"""Brute-force run enumerators used as oracles for the counting automata.

Runs are produced in length-lexicographic order: shorter runs first, ties
broken by the sequence of Δ indices.
"""

from collections import deque
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from src.core.errors import PreconditionError, ResourceLimitError
from src.core.logger import logger
from src.pushdown.predicates import (
    _pop1_depth,
    loop_shape,
    one_loop_shape,
    return_shape,
)
from src.pushdown.runs import Run
from src.pushdown.stack import Op, Stack
from src.pushdown.system import Configuration, Cps

Check = Callable[[Sequence[Stack], Sequence[Op]], bool]


def _search(
    cps: Cps,
    start: Configuration,
    length_bound: int,
    dead: Callable[[Stack], bool],
    final: Callable[[Stack], bool],
    accept: Check,
    max_nodes: int,
) -> List[Run]:
    found: List[Run] = []
    stacks: List[Stack] = [start.stack]
    run_ops: List[Op] = []
    steps: List[int] = []
    visited = 0

    def walk(c: Configuration) -> None:
        nonlocal visited
        visited += 1
        if visited > max_nodes:
            raise ResourceLimitError("max_runs", visited)
        if accept(stacks, run_ops):
            found.append(Run(start, tuple(steps)))
        if len(steps) == length_bound or (steps and final(c.stack)):
            return
        for index, nxt in cps.steps(c):
            if dead(nxt.stack):
                continue
            stacks.append(nxt.stack)
            run_ops.append(cps.transitions[index].op)
            steps.append(index)
            walk(nxt)
            stacks.pop()
            run_ops.pop()
            steps.pop()

    walk(start)
    found.sort(key=lambda r: (len(r.steps), r.steps))
    return found


def enumerate_returns(
    cps: Cps,
    c: Configuration,
    k: int,
    length_bound: int = 16,
    max_nodes: int = 200000,
) -> List[Run]:
    """The length-lex smallest min(k, found) returns from c to Pop2(c)."""
    if len(c.stack) < 2:
        raise PreconditionError("width", "returns need a stack of width at least 2")
    width = len(c.stack)
    runs = _search(
        cps,
        c,
        length_bound,
        dead=lambda t: len(t) < width - 1,
        final=lambda t: len(t) == width - 1,
        accept=return_shape,
        max_nodes=max_nodes,
    )
    logger.debug(f"Enumerated {len(runs)} returns from {c} within length {length_bound}")
    return runs[:k]


def _loop_dead(s: Stack, high: bool) -> Callable[[Stack], bool]:
    def dead(t: Stack) -> bool:
        if len(t) < len(s):
            return True
        depth = _pop1_depth(t, s)
        if depth == 0:
            return False
        return high or any(x.level != 1 for x in s[-1][-depth:])

    return dead


def enumerate_loops(
    cps: Cps,
    c: Configuration,
    k: int,
    length_bound: int = 16,
    high: bool = False,
    max_nodes: int = 200000,
) -> List[Run]:
    """Loops of c (the empty run included) ending in any state."""
    s = c.stack
    runs = _search(
        cps,
        c,
        length_bound,
        dead=_loop_dead(s, high),
        final=lambda t: False,
        accept=lambda stacks, _: loop_shape(stacks, high=high),
        max_nodes=max_nodes,
    )
    return runs[:k]


def enumerate_high_loops(
    cps: Cps, c: Configuration, k: int, length_bound: int = 16, max_nodes: int = 200000
) -> List[Run]:
    return enumerate_loops(cps, c, k, length_bound, high=True, max_nodes=max_nodes)


def enumerate_one_loops(
    cps: Cps, c: Configuration, k: int, length_bound: int = 16, max_nodes: int = 200000
) -> List[Run]:
    base = len(c.stack) - 1
    runs = _search(
        cps,
        c,
        length_bound,
        dead=lambda t: len(t) <= base,
        final=lambda t: False,
        accept=one_loop_shape,
        max_nodes=max_nodes,
    )
    return runs[:k]


def count_by_target(runs: Sequence[Run], cps: Cps) -> Dict[Hashable, int]:
    """Group runs by their final state."""
    counts: Dict[Hashable, int] = {}
    for run in runs:
        c = run.start
        for index in run.steps:
            c = cps.step(c, index)
        counts[c.state] = counts.get(c.state, 0) + 1
    return counts


_OFF = -1


def find_runs(
    cps: Cps,
    target: Configuration,
    k: int,
    length_bound: int,
    start: Optional[Configuration] = None,
    max_configs: int = 20000,
) -> List[Run]:
    """Up to k distinct runs to target, found one at a time.

    Each round searches the product of the system with a trie of the runs
    found so far and accepts only paths that leave the trie or stop at a
    non-terminal trie node, so every round yields a run not seen before.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    start = start or cps.initial_configuration()
    children: Dict[int, Dict[int, int]] = {0: {}}
    terminal = set()
    found: List[Run] = []

    while len(found) < k:
        parent: Dict[Tuple[Configuration, int], Optional[Tuple[Tuple[Configuration, int], int]]] = {}
        origin = (start, 0)
        parent[origin] = None
        queue = deque([(origin, 0)])
        hit = None
        while queue:
            (c, node), depth = queue.popleft()
            if c == target and (node == _OFF or node not in terminal):
                hit = (c, node)
                break
            if depth == length_bound:
                continue
            for index, nxt in cps.steps(c):
                child = _OFF if node == _OFF else children[node].get(index, _OFF)
                key = (nxt, child)
                if key in parent:
                    continue
                parent[key] = ((c, node), index)
                if len(parent) > max_configs:
                    raise ResourceLimitError("max_configs", len(parent))
                queue.append((key, depth + 1))
        if hit is None:
            break
        steps: List[int] = []
        key = hit
        while parent[key] is not None:
            key, index = parent[key]
            steps.append(index)
        steps.reverse()
        node = 0
        for index in steps:
            if index not in children[node]:
                new = len(children)
                children[new] = {}
                children[node][index] = new
            node = children[node][index]
        terminal.add(node)
        found.append(Run(start, tuple(steps)))
    return found


def count_runs(
    cps: Cps,
    target: Configuration,
    k: int,
    length_bound: int,
    start: Optional[Configuration] = None,
    max_configs: int = 20000,
) -> int:
    """min(k, number of runs of length ≤ length_bound from the start to target)."""
    return len(find_runs(cps, target, k, length_bound, start, max_configs))

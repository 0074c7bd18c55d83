"""Threshold counting of runs inside a region of the configuration graph.

A region is given by two predicates on configurations: ``allowed`` (may be
passed through) and ``is_target`` (ends a counted run). When the region
reachable from the source is exhausted within ``explore_depth`` BFS layers
and ``explore_limit`` configurations the counts are exact, a cycle on a
path to a target meaning at least k runs. Otherwise runs are counted layer
by layer up to the horizon and a count below k is trusted only when it did
not move during the second half of the horizon and no layer was cut at
``max_configs``.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx

from src.core.logger import logger
from src.pushdown.system import Configuration, Cps, State

Predicate = Callable[[Configuration], bool]


@dataclass
class CountResult:
    counts: Dict[State, int] = field(default_factory=dict)
    exact: bool = True
    # length by which the first min(k, count) runs have appeared
    lengths: Dict[State, int] = field(default_factory=dict)
    # most marked steps on a counted run up to that length
    marks: Dict[State, int] = field(default_factory=dict)

    def get(self, q: State) -> int:
        return self.counts.get(q, 0)


class RunCounter:
    def __init__(
        self,
        cps: Cps,
        k: int,
        horizon: int = 12,
        max_configs: int = 20000,
        marked: Optional[Callable[[int], bool]] = None,
        explore_depth: Optional[int] = None,
        explore_limit: int = 2000,
    ):
        if k < 1:
            raise ValueError("threshold k must be at least 1")
        self.cps = cps
        self.k = k
        self.horizon = horizon
        self.max_configs = max_configs
        self.explore_depth = 2 * horizon if explore_depth is None else explore_depth
        self.explore_limit = min(explore_limit, max_configs)
        self.marked = marked or (lambda index: False)

    def _explore(
        self, source: Configuration, is_target: Predicate, allowed: Predicate, terminal: bool
    ) -> Optional[nx.MultiDiGraph]:
        """The whole region as a graph, or None when it outgrows the depth or size limits."""
        g = nx.MultiDiGraph()
        g.add_node(source)
        depth = {source: 0}
        queue = deque([source])
        while queue:
            c = queue.popleft()
            if terminal and c != source and is_target(c):
                continue
            for index, d in self.cps.steps(c):
                if not (allowed(d) or is_target(d)):
                    continue
                if d not in depth:
                    if depth[c] >= self.explore_depth or len(depth) >= self.explore_limit:
                        return None
                    depth[d] = depth[c] + 1
                    queue.append(d)
                g.add_edge(c, d, key=index)
        return g

    def _count_finite(
        self, g: nx.MultiDiGraph, source: Configuration, is_target: Predicate
    ) -> Dict[State, int]:
        by_state: Dict[State, List[Configuration]] = {}
        for c in g.nodes:
            if is_target(c):
                by_state.setdefault(c.state, []).append(c)
        counts: Dict[State, int] = {}
        for q, targets in by_state.items():
            relevant = set(targets)
            for t in targets:
                relevant |= nx.ancestors(g, t)
            if source not in relevant:
                continue
            sub = g.subgraph(relevant)
            if not nx.is_directed_acyclic_graph(sub):
                counts[q] = self.k
                continue
            ways: Dict[Configuration, int] = {}
            for v in nx.topological_sort(sub):
                total = 1 if v == source else 0
                for u, _ in sub.in_edges(v):
                    total += ways[u]
                ways[v] = min(self.k, total)
            counts[q] = min(self.k, sum(ways[t] for t in targets))
        return {q: n for q, n in counts.items() if n > 0}

    def _count_layers(
        self, source: Configuration, is_target: Predicate, allowed: Predicate, terminal: bool
    ) -> Tuple[Dict[State, List[int]], Dict[State, List[int]], bool, bool]:
        """Cumulative arrivals and most marks per target state and run length.

        The two flags say whether the region ran out of moves before the
        horizon and whether a layer was cut at ``max_configs``.
        """
        arrivals: Dict[State, List[int]] = {}
        marks: Dict[State, List[int]] = {}
        frontier: Dict[Configuration, Tuple[int, int]] = {source: (1, 0)}
        exhausted = False
        truncated = False
        for n in range(self.horizon + 1):
            for c, (ways, mark) in frontier.items():
                if is_target(c):
                    row = arrivals.setdefault(c.state, [0] * (self.horizon + 1))
                    row[n] = min(self.k, row[n] + ways)
                    best = marks.setdefault(c.state, [0] * (self.horizon + 1))
                    best[n] = max(best[n], mark)
            if n == self.horizon:
                break
            following: Dict[Configuration, Tuple[int, int]] = {}
            for c, (ways, mark) in frontier.items():
                if terminal and n > 0 and is_target(c):
                    continue
                for index, d in self.cps.steps(c):
                    if not (allowed(d) or is_target(d)):
                        continue
                    w0, m0 = following.get(d, (0, 0))
                    following[d] = (min(self.k, w0 + ways), max(m0, mark + int(self.marked(index))))
            if len(following) > self.max_configs:
                logger.warning(f"Run counting layer {n + 1} exceeds {self.max_configs} configurations")
                truncated = True
                break
            if not following:
                exhausted = True
                break
            frontier = following
        cumulative = {}
        for q, row in arrivals.items():
            total, acc = 0, []
            for x in row:
                total = min(self.k, total + x)
                acc.append(total)
            cumulative[q] = acc
        return cumulative, marks, exhausted, truncated

    def count(
        self,
        source: Configuration,
        is_target: Predicate,
        allowed: Predicate,
        terminal: bool = True,
        with_stats: bool = False,
    ) -> CountResult:
        g = self._explore(source, is_target, allowed, terminal)
        result = CountResult()
        if g is not None:
            result.counts = self._count_finite(g, source, is_target)
            if not with_stats:
                return result
        cumulative, marks, exhausted, truncated = self._count_layers(source, is_target, allowed, terminal)
        if g is None:
            half = self.horizon // 2
            if truncated:
                result.exact = False
            for q, acc in cumulative.items():
                if acc[-1] == 0:
                    continue
                result.counts[q] = acc[-1]
                if acc[-1] < self.k and acc[half] != acc[-1] and not exhausted:
                    result.exact = False
        for q, n in result.counts.items():
            acc = cumulative.get(q)
            if acc is None:
                result.lengths[q] = self.horizon
                result.marks[q] = 0
                continue
            length = next((i for i, x in enumerate(acc) if x >= n), self.horizon)
            result.lengths[q] = length
            result.marks[q] = max(marks[q][: length + 1])
        if not result.exact:
            logger.warning(f"Run count from {source} is a lower bound within horizon {self.horizon}")
        return result

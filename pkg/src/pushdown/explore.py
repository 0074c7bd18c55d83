from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from src.core.errors import ResourceLimitError
from src.core.logger import logger
from src.pushdown.system import Configuration, Cps

Edge = Tuple[Configuration, Hashable, Configuration]


@dataclass
class ExplorationResult:
    """Configurations in discovery order with their BFS depth, plus all edges among them."""

    configs: List[Configuration] = field(default_factory=list)
    depth: Dict[Configuration, int] = field(default_factory=dict)
    edges: List[Edge] = field(default_factory=list)

    def __contains__(self, c: Configuration) -> bool:
        return c in self.depth

    def __len__(self) -> int:
        return len(self.configs)

    def successors(self, c: Configuration) -> List[Tuple[Hashable, Configuration]]:
        return [(label, d) for src, label, d in self.edges if src == c]


def bfs_explore(
    cps: Cps,
    step_limit: int,
    max_configs: int = 20000,
    start: Optional[Configuration] = None,
) -> ExplorationResult:
    """Every configuration reachable by a run of length ≤ step_limit."""
    if step_limit < 0:
        raise ValueError("step_limit must be non-negative")
    start = start or cps.initial_configuration()
    result = ExplorationResult()
    result.configs.append(start)
    result.depth[start] = 0
    queue = deque([start])
    while queue:
        c = queue.popleft()
        d = result.depth[c]
        if d == step_limit:
            continue
        for _, succ in cps.successors(c):
            if succ not in result.depth:
                result.depth[succ] = d + 1
                result.configs.append(succ)
                if len(result.configs) > max_configs:
                    raise ResourceLimitError("max_configs", len(result.configs))
                queue.append(succ)

    for c in result.configs:
        for label, succ in cps.successors(c):
            if succ in result.depth:
                result.edges.append((c, label, succ))
    logger.debug(
        f"Explored {len(result.configs)} configurations and {len(result.edges)} edges "
        f"within {step_limit} steps"
    )
    return result


def exploration_graph(result: ExplorationResult) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for c in result.configs:
        g.add_node(str(c), depth=result.depth[c])
    for src, label, dst in result.edges:
        g.add_edge(str(src), str(dst), key=str(label), label=str(label))
    return g


def to_dot(graph: nx.MultiDiGraph) -> str:
    """DOT text of any networkx graph whose node names may contain brackets."""
    quoted = nx.relabel_nodes(graph, {n: f'"{n}"' for n in graph.nodes}, copy=True)
    for _, _, data in quoted.edges(data=True):
        if "label" in data:
            data["label"] = f'"{data["label"]}"'
    for _, data in quoted.nodes(data=True):
        for key in list(data):
            data[key] = f'"{data[key]}"'
    return nx.nx_pydot.to_pydot(quoted).to_string()


def transitive_closure(result: ExplorationResult) -> Dict[Configuration, set]:
    """Reachability within the explored graph, reflexive."""
    g = nx.DiGraph()
    g.add_nodes_from(result.configs)
    g.add_edges_from((src, dst) for src, _, dst in result.edges)
    return {c: nx.descendants(g, c) | {c} for c in result.configs}

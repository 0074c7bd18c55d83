import hashlib
import time
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from src.automata.tree import Tree, format_tree
from src.core.errors import Cpg2kitError
from src.core.logger import logger
from src.counting.counter_automaton import CountFn, CounterAutomaton, counter_automaton, ret_k
from src.encoding.codec import decode, encode, milestone_nodes
from src.logic.checker import Verdict, check_sentence
from src.logic.parser import parse_formula
from src.npt.model_check import npt_model_check
from src.npt.smallness import system_size
from src.pushdown.explore import ExplorationResult, bfs_explore
from src.pushdown.loader import load_spec, parse_spec
from src.pushdown.stack import Stack, format_stack, parse_stack
from src.pushdown.system import Configuration, Cps
from src.reachability.dfa import Dfa
from src.reachability.relations import reach


class AnalysisService:
    """Service answering analysis requests on collapsible pushdown systems."""

    def __init__(
        self,
        max_configs: int = 20000,
        sim_horizon: int = 12,
        default_bound: int = 16,
        default_threshold: int = 1,
        npt_max_length: int = 8,
    ):
        self.max_configs = max_configs
        self.sim_horizon = sim_horizon
        self.default_bound = default_bound
        self.default_threshold = default_threshold
        self.npt_max_length = npt_max_length
        self._specs: Dict[str, Cps] = {}
        logger.info(f"AnalysisService initialized with max_configs={max_configs}")

    # -- loading ------------------------------------------------------------------

    def load(self, spec: Union[str, Path, Cps]) -> Cps:
        """A system from its text, a path to a .cps file, or as is; parsed systems are cached."""
        if isinstance(spec, Cps):
            return spec
        if isinstance(spec, Path) or (isinstance(spec, str) and "\n" not in spec and spec.endswith(".cps")):
            return load_spec(spec)
        key = hashlib.sha256(spec.encode("utf-8")).hexdigest()
        if key not in self._specs:
            self._specs[key] = parse_spec(spec)
            logger.debug(f"Cached system {key[:12]}")
        return self._specs[key]

    def automaton(self, cps: Cps, k: Optional[int] = None) -> CounterAutomaton:
        return counter_automaton(cps, k or self.default_threshold, self.sim_horizon, self.max_configs)

    @staticmethod
    def configuration(cps: Cps, state: Optional[str], stack: Optional[str]) -> Configuration:
        if state is None and stack is None:
            return cps.initial_configuration()
        parsed: Stack = parse_stack(stack) if stack else cps.initial_configuration().stack
        return Configuration(state if state is not None else cps.initial, parsed)

    def _run(self, what: str, action):
        start_time = time.time()
        try:
            result = action()
        except Cpg2kitError:
            raise
        except Exception as e:
            logger.error(f"Failed to {what}: {e}")
            raise RuntimeError(f"Failed to {what}: {e}")
        logger.debug(f"{what} finished in {(time.time() - start_time) * 1000:.2f}ms")
        return result

    # -- operations ---------------------------------------------------------------

    def explore(self, spec, steps: int) -> ExplorationResult:
        cps = self.load(spec)
        return self._run("explore", lambda: bfs_explore(cps, steps, self.max_configs))

    def encode(self, spec, state: Optional[str] = None, stack: Optional[str] = None) -> Tree:
        cps = self.load(spec)
        return self._run("encode", lambda: encode(self.configuration(cps, state, stack)))

    def decode(self, tree: Tree, spec=None) -> Configuration:
        states = self.load(spec).states if spec is not None else None
        return self._run("decode", lambda: decode(tree, states))

    def milestones(self, spec=None, state: Optional[str] = None, stack: Optional[str] = None) -> Dict[str, str]:
        """Milestones of a stack keyed by the encoding node that represents each."""
        if spec is None:
            c = Configuration("q", parse_stack(stack or "[⊥]"))
        else:
            c = self.configuration(self.load(spec), state, stack)

        def action() -> Dict[str, str]:
            nodes = milestone_nodes(encode(c))
            return {d or ".": format_stack(s) for s, d in sorted(nodes.items(), key=lambda item: item[1])}

        return self._run("compute milestones", action)

    def count_returns(self, spec, stack: str, k: Optional[int] = None) -> CountFn:
        cps = self.load(spec)
        automaton = self.automaton(cps, k)
        return self._run("count returns", lambda: ret_k(cps, parse_stack(stack), automaton.k, automaton))

    def count_loops(self, spec, stack: str, k: Optional[int] = None, kind: str = "loop") -> CountFn:
        if kind not in ("loop", "high_loop", "low_loop"):
            raise ValueError(f"unknown loop kind {kind!r}")
        cps = self.load(spec)
        automaton = self.automaton(cps, k)
        return self._run("count loops", lambda: getattr(automaton.evaluate(parse_stack(stack)), kind))

    def exact(self, spec, k: Optional[int] = None) -> bool:
        return self.automaton(self.load(spec), k).exact

    def reach(self, spec, source: Configuration, target: Configuration) -> bool:
        cps = self.load(spec)
        return self._run("decide reachability", lambda: reach(cps, source, target, self.automaton(cps, 1)))

    def check(
        self,
        spec,
        formula: str,
        bound: Optional[int] = None,
        languages: Optional[Mapping[str, Dfa]] = None,
    ) -> Verdict:
        cps = self.load(spec)
        phi = parse_formula(formula)
        return self._run(
            "check formula",
            lambda: check_sentence(cps, phi, bound, languages, self.automaton(cps, 1), self.max_configs),
        )

    def npt_check(self, spec, formula: str, max_length: Optional[int] = None) -> Dict[str, Any]:
        pds = self.load(spec)
        phi = parse_formula(formula)
        length = max_length or self.npt_max_length

        def action() -> Dict[str, Any]:
            verdict = npt_model_check(pds, phi, length)
            return {**verdict.to_json(), "size": system_size(pds), "max_length": length}

        return self._run("check nested pushdown tree", action)

    def render_tree(self, tree: Tree) -> str:
        return format_tree(tree)

    def configurations(self, result: ExplorationResult) -> List[Dict[str, Any]]:
        return [
            {"state": str(c.state), "stack": format_stack(c.stack), "depth": result.depth[c]}
            for c in result.configs
        ]

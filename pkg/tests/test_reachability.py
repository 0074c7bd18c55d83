import json
from pathlib import Path

import networkx as nx
import pytest

from src.core.errors import AlphabetMismatchError, ReservedSymbolError, SpecFormatError
from src.pushdown.explore import bfs_explore, transitive_closure
from src.pushdown.loader import load_spec, parse_spec
from src.pushdown.stack import parse_stack
from src.pushdown.system import Configuration
from src.reachability.dfa import ENTER, Dfa, load_dfa, parse_dfa, product_state, product_with_dfa, reach_regular
from src.reachability.relations import reach

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# the stack the decomposition fixture starts its run from
DECOMPOSITION_STACK = (
    "[⊥]:[⊥ (c,2,1) c]:[⊥ (c,2,1) b]:[⊥ (c,2,1) (a,2,3) a]:[⊥ (c,2,1) (a,2,3) a]"
)


def config(state: str, stack: str) -> Configuration:
    return Configuration(state, parse_stack(stack))


@pytest.fixture
def cycle():
    return load_spec(FIXTURES / "cycle.cps")


@pytest.fixture
def chain3():
    return load_spec(FIXTURES / "chain3.cps")


@pytest.fixture
def decomposition():
    """Deterministic system that needs returns, loops and collapses to empty the stack."""
    return load_spec(FIXTURES / "reach_decomposition.cps")


class TestReach:
    """Test the reachability decision procedure"""

    def test_matches_closure_on_finite_graph(self, chain3):
        """On a finite graph reach agrees with the transitive closure on every pair"""
        result = bfs_explore(chain3, 5)
        closure = transitive_closure(result)

        assert len(result) == 3
        for c in result.configs:
            for d in result.configs:
                assert reach(chain3, c, d) == (d in closure[c]), (str(c), str(d))

    def test_matches_closure_on_cycle(self, cycle):
        """Pairs within eight steps agree with reachability inside a sixteen-step exploration"""
        near = bfs_explore(cycle, 8).configs
        wide = bfs_explore(cycle, 16)
        graph = nx.DiGraph()
        graph.add_nodes_from(wide.configs)
        graph.add_edges_from((src, dst) for src, _, dst in wide.edges)

        for c in near:
            reachable = nx.descendants(graph, c) | {c}
            for d in near:
                assert reach(cycle, c, d) == (d in reachable), (str(c), str(d))

    def test_matches_the_deterministic_run(self, decomposition):
        """On a deterministic system a configuration reaches exactly the rest of its run"""
        source = config("q1", DECOMPOSITION_STACK)
        run = bfs_explore(decomposition, 40, start=source).configs
        near = run[:9]

        assert run[-1] == config("q1", "[⊥]")
        for i, c in enumerate(near):
            for d in near:
                assert reach(decomposition, c, d) == (d in run[i:]), (str(c), str(d))

    def test_reflexive(self, cycle):
        """Every configuration reaches itself"""
        c = config("2", "[⊥]:[⊥ (a,2,1)]")

        assert reach(cycle, c, c)

    def test_explored_pairs_reachable(self, cycle):
        """Pairs related by exploration are decided reachable"""
        result = bfs_explore(cycle, 3)
        closure = transitive_closure(result)
        start = cycle.initial_configuration()

        for d in closure[start]:
            assert reach(cycle, start, d), str(d)

    def test_pop_then_target(self, cycle):
        """Clone, push and pop leads back to a two-word stack"""
        assert reach(cycle, config("0", "[⊥]"), config("2", "[⊥]:[⊥]"))

    @pytest.mark.parametrize("target", [config("1", "[⊥]"), config("2", "[⊥]")])
    def test_unreachable(self, cycle, target):
        """States 1 and 2 never sit on the bottom stack"""
        assert not reach(cycle, cycle.initial_configuration(), target)

    def test_decomposition_run(self, decomposition):
        """The stack is emptied to its first word through returns, loops and collapses"""
        source = config("q1", DECOMPOSITION_STACK)

        assert reach(decomposition, source, config("q1", "[⊥]"))
        assert not reach(decomposition, source, config("q2", "[⊥]"))

    def test_decomposition_agrees_with_run(self, decomposition):
        """Every configuration on the deterministic run is reachable from its start"""
        source = config("q1", DECOMPOSITION_STACK)
        result = bfs_explore(decomposition, 20, start=source)

        assert config("q1", "[⊥]") in result
        for d in result.configs:
            assert reach(decomposition, source, d), str(d)

    def test_no_backwards_reach(self, chain3):
        """A configuration does not reach its predecessor"""
        assert not reach(chain3, config("2", "[⊥]"), config("0", "[⊥]"))


class TestDfa:
    """Test DFA files and label languages"""

    def test_load(self):
        """The fixture DFA accepts words ending in P"""
        dfa = load_dfa(FIXTURES / "ends_with_pop.json")

        assert dfa.name == "ends_with_pop"
        assert dfa.accepts(["Cl", "A'", "P"])
        assert not dfa.accepts(["Cl", "A'"])
        assert not dfa.accepts([])

    def test_universal(self):
        """The one-state DFA accepts every word"""
        dfa = Dfa.universal(["x", "y"])

        assert dfa.accepts([])
        assert dfa.accepts(["x", "y", "x"])
        assert not dfa.accepts(["z"])

    def test_to_json_round_trip(self):
        """A serialized DFA parses back to the same automaton"""
        dfa = load_dfa(FIXTURES / "ends_with_pop.json")

        assert parse_dfa(json.dumps(dfa.to_json())) == dfa

    def test_missing_format(self):
        """A DFA file without the format header is rejected"""
        with pytest.raises(SpecFormatError):
            parse_dfa('{"states": ["p"], "alphabet": [], "initial": "p", "finals": [], "transitions": []}')

    def test_not_json(self):
        """Malformed JSON is a format error"""
        with pytest.raises(SpecFormatError):
            parse_dfa("{states")

    def test_nondeterministic(self):
        """Two targets for one state and label are rejected"""
        with pytest.raises(SpecFormatError):
            Dfa(("p", "q"), ("x",), "p", frozenset({"q"}), (("p", "x", "p"), ("p", "x", "q")))

    def test_unknown_label(self):
        """A transition label outside the alphabet is rejected"""
        with pytest.raises(AlphabetMismatchError):
            Dfa(("p",), ("x",), "p", frozenset({"p"}), (("p", "y", "p"),))


class TestRegularReach:
    """Test reachability along a regular set of label words"""

    def test_product_states(self, cycle):
        """The product adds a copy of every state for every DFA state"""
        dfa = load_dfa(FIXTURES / "ends_with_pop.json")

        product = product_with_dfa(cycle, dfa)

        assert product_state("0", "wait") in product.states
        assert product_state("2", "done") in product.states
        assert ENTER in product.labels

    def test_reserved_label_clash(self):
        """A system already using the product's labels is rejected"""
        cps = parse_spec(
            "cpg2kit-format 1\nlevel: 2\nstates: p\ninitial: p\nalphabet: a\ntransitions:\np, _bot, eps_i, p, Clone2\n"
        )

        with pytest.raises(ReservedSymbolError):
            product_with_dfa(cps, Dfa.universal(["eps_i"]))

    @pytest.mark.parametrize(
        "target",
        [
            config("2", "[⊥]:[⊥]"),
            config("1", "[⊥]:[⊥]"),
            config("0", "[⊥]:[⊥ (a,2,1)]"),
            config("1", "[⊥]"),
        ],
    )
    def test_universal_language_is_plain_reach(self, cycle, target):
        """With every label word allowed the answer is plain reachability"""
        source = cycle.initial_configuration()
        dfa = load_dfa(FIXTURES / "all_labels.json")

        assert reach_regular(cycle, source, target, dfa) == reach(cycle, source, target)

    def test_runs_ending_in_pop(self, cycle):
        """Only targets entered by a pop are reachable along words ending in P"""
        dfa = load_dfa(FIXTURES / "ends_with_pop.json")
        source = cycle.initial_configuration()

        assert reach_regular(cycle, source, config("2", "[⊥]:[⊥]"), dfa)
        assert not reach_regular(cycle, source, config("1", "[⊥]:[⊥]"), dfa)

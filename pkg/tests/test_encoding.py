import random
from pathlib import Path

import pytest

from src.automata.tree import Tree, parse_tree
from src.core.errors import NotEncTreeError
from src.encoding.codec import (
    decode,
    enc_tree_violation,
    encode,
    is_enc_tree,
    left_stack,
    milestone_iso,
    milestone_nodes,
    top_word_of_path,
)
from src.encoding.enc_trees import enc_labels, enc_trees_automaton
from src.pushdown.explore import bfs_explore
from src.pushdown.loader import load_spec
from src.pushdown.milestones import milestones
from src.pushdown.stack import Letter, parse_stack, random_valid_stack
from src.pushdown.system import Configuration

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

LINKED_STACK = (
    "[⊥ (a,2,0) (b,2,0)]:[⊥ (a,2,0) (b,2,0) (c,2,1)]:[⊥ (a,2,2) c]:"
    "[⊥ (a,2,2) (d,2,3) e]:[⊥ (a,2,2)]"
)

DECOMPOSITION_STACK = (
    "[⊥]:[⊥ (c,2,1) c]:[⊥ (c,2,1) b]:[⊥ (c,2,1) (a,2,3) a]:[⊥ (c,2,1) (a,2,3) a]"
)


def tree(mapping) -> Tree:
    return Tree.from_mapping(mapping)


@pytest.fixture(scope="module")
def cycle():
    return load_spec(FIXTURES / "cycle.cps")


class TestCodec:
    """Test cases for the configuration/tree bijection."""

    def test_linked_fixture_decodes_with_links(self):
        t = parse_tree((FIXTURES / "linked_stack.tree").read_text(encoding="utf-8"))
        c = decode(t)
        assert c.state == "q"
        assert c.stack == parse_stack(LINKED_STACK)
        assert encode(c) == t

    def test_shared_prefixes(self):
        t = encode(Configuration("q", parse_stack("[⊥ a]:[⊥ b]")))
        assert t.labels == {"": "q", "0": ("⊥", 1), "00": ("a", 1), "01": "ε", "010": ("b", 1)}

    def test_round_trip_on_explored_configurations(self, cycle):
        for c in bfs_explore(cycle, 12).configs:
            assert decode(encode(c), cycle.states) == c

    def test_round_trip_on_random_stacks(self):
        rng = random.Random(3)
        for _ in range(1000):
            c = Configuration("q", random_valid_stack(rng, symbols=("a", "b", "c"), steps=14))
            t = encode(c)
            assert is_enc_tree(t)
            assert decode(t) == c

    @pytest.mark.parametrize(
        "mapping,violation",
        [
            ({"": ("a", 1), "0": ("⊥", 1)}, ("1", "")),
            ({"": "q", "0": ("⊥", 1), "1": "ε"}, ("4", "1")),
            ({"": "q"}, ("4", "0")),
            ({"": "q", "0": ("a", 1)}, ("2", "0")),
            ({"": "q", "0": ("⊥", 1), "00": "ε"}, ("2", "00")),
            ({"": "q", "0": ("⊥", 1), "01": ("a", 1)}, ("3", "01")),
            ({"": "q", "0": ("⊥", 1), "00": ("⊥", 1)}, ("bottom", "00")),
            ({"": "q", "0": ("⊥", 1), "00": ("a", 1), "01": "ε", "010": ("a", 1)}, ("5", "0")),
        ],
    )
    def test_violations(self, mapping, violation):
        t = tree(mapping)
        assert enc_tree_violation(t) == violation
        with pytest.raises(NotEncTreeError):
            decode(t)

    def test_root_state_must_be_known(self):
        t = encode(Configuration("q", parse_stack("[⊥]")))
        with pytest.raises(NotEncTreeError):
            decode(t, states=["p"])


class TestMilestoneNodes:
    """Nodes of an encoding stand for the milestones of its stack."""

    def test_left_stacks(self):
        t = encode(Configuration("q", parse_stack("[⊥ a]:[⊥ b]")))
        assert left_stack("0", t) == parse_stack("[⊥]")
        assert left_stack("01", t) == parse_stack("[⊥ a]:[⊥]")
        assert left_stack("010", t) == parse_stack("[⊥ a]:[⊥ b]")

    def test_top_word_of_path(self):
        t = encode(Configuration("q", parse_stack("[⊥ a]:[⊥ (b,2,1)]")))
        assert top_word_of_path(t, "010") == (Letter("⊥"), Letter("b", 2, 0))

    def test_nodes_are_milestones(self):
        s = parse_stack("[⊥ a]:[⊥ b]")
        nodes = milestone_nodes(encode(Configuration("q", s)))
        assert set(nodes) == set(milestones(s))

    def test_isomorphism_on_random_stacks(self):
        rng = random.Random(5)
        for _ in range(1000):
            s = random_valid_stack(rng, steps=10)
            assert milestone_iso(encode(Configuration("q", s)))

    def test_isomorphism_on_fixtures(self, cycle):
        """Lexicographic order of nodes matches the substack order of milestones."""
        linked = parse_tree((FIXTURES / "linked_stack.tree").read_text(encoding="utf-8"))
        assert milestone_iso(linked)
        for c in bfs_explore(cycle, 8).configs:
            assert milestone_iso(encode(c)), str(c)
        decomposition = load_spec(FIXTURES / "reach_decomposition.cps")
        start = Configuration("q1", parse_stack(DECOMPOSITION_STACK))
        for c in bfs_explore(decomposition, 20, start=start).configs:
            assert milestone_iso(encode(c)), str(c)


class TestEncTreesAutomaton:
    """The automaton recognising encoding trees of a system."""

    def test_accepts_encodings(self, cycle):
        a = enc_trees_automaton(cycle)
        for c in bfs_explore(cycle, 6).configs:
            assert a.accepts(encode(c))

    def test_rejects_non_encodings(self, cycle):
        a = enc_trees_automaton(cycle)
        assert not a.accepts(tree({"": "0", "0": ("⊥", 1), "1": "ε"}))
        assert not a.accepts(tree({"": "0", "0": ("⊥", 1), "00": ("a", 1), "01": "ε", "010": ("a", 1)}))
        assert not a.accepts(tree({"": "0", "0": ("⊥", 1), "00": ("⊥", 1)}))

    def test_agrees_with_the_static_check(self, cycle):
        a = enc_trees_automaton(cycle)
        labels = sorted(enc_labels(cycle), key=str)
        rng = random.Random(9)
        for _ in range(300):
            mapping = {"": rng.choice(labels)}
            for d in ("0", "1", "00", "01", "010", "011"):
                if d[:-1] in mapping and rng.random() < 0.7:
                    mapping[d] = rng.choice(labels)
            t = tree(mapping)
            assert a.accepts(t) == is_enc_tree(t, cycle.states)

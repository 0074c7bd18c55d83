import json
from pathlib import Path

import pytest

from src.cli import EXIT_ERROR, EXIT_FALSE, EXIT_INCONCLUSIVE, EXIT_TRUE, main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CYCLE = str(FIXTURES / "cycle.cps")
CHAIN3 = str(FIXTURES / "chain3.cps")
NPT_EXAMPLE = str(FIXTURES / "npt_example.cps")


class TestExploreCommands:
    """Test exploration and encoding subcommands"""

    def test_explore(self, capsys):
        """One line per configuration with its depth"""
        assert main(["explore", CYCLE, "--steps", "2"]) == EXIT_TRUE

        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 4
        assert lines[0] == "0\t(0, [⊥])"

    def test_explore_json_and_dot(self, capsys, tmp_path):
        """JSON on stdout and the graph in a DOT file"""
        dot = tmp_path / "graph.dot"

        assert main(["explore", CHAIN3, "--steps", "3", "--json", "--dot", str(dot)]) == EXIT_TRUE

        data = json.loads(capsys.readouterr().out)
        assert len(data["configurations"]) == 3
        assert ["(0, [⊥])", "Cl", "(1, [⊥]:[⊥])"] in data["edges"]
        assert "digraph" in dot.read_text(encoding="utf-8")

    def test_encode(self, capsys):
        """The encoding is printed in the tree file format"""
        assert main(["encode", CYCLE, "--state", "2", "--stack", "[⊥]:[⊥ (a,2,1)]"]) == EXIT_TRUE

        out = capsys.readouterr().out
        assert out.startswith("cpg2kit-format 1\ntree\n. 2\n")

    def test_decode(self, capsys):
        """The tree fixture decodes to its configuration"""
        assert main(["decode", str(FIXTURES / "linked_stack.tree"), "--json"]) == EXIT_TRUE

        data = json.loads(capsys.readouterr().out)
        assert data["state"] == "q"
        assert data["stack"].startswith("[⊥ (a,2,0) (b,2,0)]:")

    def test_decode_not_an_encoding(self, capsys, tmp_path):
        """Trees outside EncTrees name the violated condition"""
        tree = tmp_path / "bad.tree"
        tree.write_text("cpg2kit-format 1\ntree\n. q\n1 ε\n", encoding="utf-8")

        assert main(["decode", str(tree)]) == EXIT_ERROR
        assert "condition 4" in capsys.readouterr().err

    def test_milestones(self, capsys):
        """Milestones are listed with their nodes"""
        assert main(["milestones", "--stack", "[⊥ a]:[⊥ a]"]) == EXIT_TRUE

        lines = capsys.readouterr().out.splitlines()
        assert [line.split("\t")[1] for line in lines] == ["[⊥]", "[⊥ a]", "[⊥ a]:[⊥ a]"]


class TestCountCommands:
    """Test return and loop counting subcommands"""

    def test_returns_total(self, capsys):
        """Returns from q0 summed over target states"""
        argv = [
            "returns",
            str(FIXTURES / "subreturns.cps"),
            "--from",
            "q0",
            "--stack",
            "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1) a]",
            "--threshold",
            "10",
        ]

        assert main(argv) == EXIT_TRUE
        assert capsys.readouterr().out.strip() == "6"

    def test_loops_json(self, capsys):
        """The loop table is reported as JSON"""
        argv = ["loops", CYCLE, "--from", "1", "--stack", "[⊥]:[⊥]", "--kind", "high-loop", "--json"]

        assert main(argv) == EXIT_TRUE
        data = json.loads(capsys.readouterr().out)
        assert data["threshold"] == 1
        assert "exact" in data

    def test_returns_width_one(self, capsys):
        """Returns of a single-word stack are an error"""
        argv = ["returns", CYCLE, "--from", "0", "--stack", "[⊥]"]

        assert main(argv) == EXIT_ERROR
        assert "error" in capsys.readouterr().err


class TestDecisionCommands:
    """Test exit codes of the deciding subcommands"""

    def test_reach_true(self, capsys):
        argv = ["reach", CYCLE, "--from", "0", "--stack", "[⊥]", "--to-state", "2", "--to-stack", "[⊥]:[⊥]"]

        assert main(argv) == EXIT_TRUE
        assert capsys.readouterr().out.strip() == "true"

    def test_reach_false(self, capsys):
        argv = ["reach", CYCLE, "--from", "0", "--stack", "[⊥]", "--to-state", "1", "--to-stack", "[⊥]"]

        assert main(argv) == EXIT_FALSE
        assert capsys.readouterr().out.strip() == "false"

    @pytest.mark.parametrize(
        "formula, code",
        [
            ("(exists x (exists y (edge Cl x y)))", EXIT_TRUE),
            ("(exists x (edge P x x))", EXIT_FALSE),
        ],
    )
    def test_check(self, formula, code):
        """Reach-free sentences exit with their truth value"""
        assert main(["check", CYCLE, formula]) == code

    def test_check_bounded_universal(self, capsys):
        """A bounded universal verdict is inconclusive"""
        formula = "(forall x (forall y (or (reach x y) (reach y x))))"

        assert main(["check", CHAIN3, formula, "--bound", "6"]) == EXIT_INCONCLUSIVE
        assert capsys.readouterr().out.strip() == "true [bounded(6)]"

    def test_check_with_dfa(self):
        """Named languages are loaded from DFA files"""
        formula = "(exists x (exists y (reachL pop x y)))"
        dfa = f"pop={FIXTURES / 'ends_with_pop.json'}"

        assert main(["check", CYCLE, formula, "--bound", "4", "--dfa", dfa]) == EXIT_TRUE

    def test_check_without_bound(self, capsys):
        """Reachability atoms need a bound"""
        assert main(["check", CHAIN3, "(exists x (reach x x))"]) == EXIT_ERROR
        assert "bound" in capsys.readouterr().err

    def test_check_syntax_error(self, capsys):
        assert main(["check", CYCLE, "(exists x"]) == EXIT_ERROR
        assert "position" in capsys.readouterr().err

    def test_npt_check(self):
        """Jumps exist in the nested pushdown tree"""
        assert main(["npt-check", NPT_EXAMPLE, "(exists x (exists y (jump x y)))", "--bound", "6"]) == EXIT_TRUE

    def test_missing_file(self, capsys):
        assert main(["explore", str(FIXTURES / "nope.cps")]) == EXIT_ERROR
        assert "error" in capsys.readouterr().err


class TestAutomatonCommands:
    """Test translation and automaton dumps"""

    def test_translate_npt(self, tmp_path, capsys):
        """The simulating system is written and checked against the tree"""
        out = tmp_path / "sim.cps"

        assert main(["translate-npt", NPT_EXAMPLE, "-o", str(out), "--verify", "3"]) == EXIT_TRUE

        text = out.read_text(encoding="utf-8")
        assert text.startswith("cpg2kit-format 1\nlevel: 2\n")
        assert "CLONE" in text
        assert "simulation matches up to 3 steps: true" in capsys.readouterr().err

    def test_translate_level2(self, capsys):
        """Level-2 systems cannot be translated"""
        assert main(["translate-npt", CYCLE]) == EXIT_ERROR

    def test_dump_counter(self, capsys):
        """The counter automaton is dumped as JSON"""
        assert main(["dump-automaton", CYCLE, "counter", "--threshold", "2"]) == EXIT_TRUE

        data = json.loads(capsys.readouterr().out)
        assert data["threshold"] == 2
        assert data["initial"] == 0

    def test_dump_reachable_dot(self, tmp_path):
        """Tree automata can be written as DOT"""
        dot = tmp_path / "reachable.dot"

        assert main(["dump-automaton", CHAIN3, "reachable", "--dot", str(dot)]) == EXIT_TRUE
        assert "digraph" in dot.read_text(encoding="utf-8")

    def test_dump_transition_needs_label(self, capsys):
        assert main(["dump-automaton", CYCLE, "transition"]) == EXIT_ERROR
        assert "--label" in capsys.readouterr().err

from pathlib import Path

import pandas as pd
import pytest

from src.core.errors import PreconditionError, ReservedSymbolError
from src.counting.bounds import bound_fns
from src.counting.counter_automaton import (
    CountFn,
    CounterAutomaton,
    high_loop_k,
    loop_k,
    ret_k,
)
from src.counting.engine import RunCounter
from src.counting.simulator import check_fresh, is_return_label, return_label, simulator_for, simulator_stack
from src.pushdown.enumeration import count_by_target, enumerate_loops, enumerate_returns
from src.pushdown.loader import load_spec, parse_spec
from src.pushdown.stack import BOX, TOP, Letter, parse_stack, top2
from src.pushdown.system import Configuration

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

S = "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1) a]"
S_HAT = "[⊥]:[⊥ (b,2,1) (b,2,1) a]"


@pytest.fixture(scope="module")
def subreturns():
    return load_spec(FIXTURES / "subreturns.cps")


@pytest.fixture(scope="module")
def cycle():
    return load_spec(FIXTURES / "cycle.cps")


class TestCountFn:
    """Test cases for threshold count tables."""

    def test_values_are_capped(self):
        f = CountFn.build(["p", "q"], 3, {("p", "q"): 7, ("q", "q"): 1, ("q", "p"): 0})
        assert f("p", "q") == 3
        assert f("q", "p") == 0
        assert f.pairs() == frozenset({("p", "q"), ("q", "q")})
        assert f.successors("q") == ["q"]

    def test_zero(self):
        assert CountFn.zero(["p"], 2).is_zero

    def test_frame(self):
        f = CountFn.build(["p", "q"], 2, {("p", "q"): 2})
        frame = f.to_frame()
        assert isinstance(frame, pd.DataFrame)
        assert frame.loc["p", "q"] == 2
        assert frame.loc["q", "p"] == 0

    def test_json(self):
        f = CountFn.build(["p", "q"], 2, {("p", "q"): 1})
        assert f.to_json() == {"threshold": 2, "table": [["p", "q", 1]]}


class TestReturnCounts:
    """Counter automaton values against brute-force enumeration."""

    @pytest.mark.parametrize(
        "state,stack,k,target,expected",
        [
            ("q2", "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1)]", 5, "q2", 2),
            ("q0", S, 10, "q2", 6),
            ("q2", "[⊥]:[⊥ (b,2,1) (b,2,1)]", 5, "q2", 3),
            ("q0", S_HAT, 20, "q2", 12),
        ],
    )
    def test_return_counts(self, subreturns, state, stack, k, target, expected):
        counts = ret_k(subreturns, parse_stack(stack), k)
        assert counts(state, target) == expected
        runs = enumerate_returns(subreturns, Configuration(state, parse_stack(stack)), k, length_bound=16)
        assert count_by_target(runs, subreturns) == {target: expected}

    def test_threshold_caps_counts(self, subreturns):
        assert ret_k(subreturns, parse_stack(S_HAT), 4)("q0", "q2") == 4

    def test_counts_depend_on_top_word_only(self, subreturns):
        a = ret_k(subreturns, parse_stack(S), 10)
        b = ret_k(subreturns, parse_stack("[⊥]:[⊥ (b,2,1) a]"), 10)
        assert a == b

    def test_width_one(self, subreturns):
        with pytest.raises(PreconditionError):
            ret_k(subreturns, parse_stack("[⊥ a]"), 2)

    def test_infinitely_many_returns(self, cycle):
        assert ret_k(cycle, parse_stack("[⊥]:[⊥]"), 3)("1", "0") == 3



class TestLoopCounts:
    """Loop, high loop and low loop counts."""

    def test_push_pop_loop(self, cycle):
        s = parse_stack("[⊥]:[⊥]")
        assert high_loop_k(cycle, s, 5)("1", "2") == 1
        assert loop_k(cycle, s, 5)("1", "2") == 1

    def test_low_loops_through_pop(self):
        cps = parse_spec(
            "cpg2kit-format 1\nlevel: 2\nstates: p, q\ninitial: p\nalphabet: a\ntransitions:\n"
            "p, a, down, q, Pop1\nq, _bot, up, p, Push(a)\n"
        )
        annotation = CounterAutomaton(cps, 3).evaluate(parse_stack("[⊥ a]"))
        # pop, any of the unboundedly many loops of [⊥] in q, push again
        assert annotation.low_loop("p", "p") == 3
        assert annotation.loop("p", "p") == 3
        assert annotation.high_loop("p", "p") == 1


class TestAutomaton:
    """The automaton as a deterministic word automaton."""

    def test_run_rejects_missing_bottom(self, subreturns):
        automaton = CounterAutomaton(subreturns, 2)
        with pytest.raises(PreconditionError):
            automaton.run((Letter("a"),))

    def test_threshold_must_be_positive(self, subreturns):
        with pytest.raises(ValueError):
            CounterAutomaton(subreturns, 0)

    def test_saturation(self, cycle):
        automaton = CounterAutomaton(cycle, 1).saturate()
        assert automaton.saturated
        assert automaton.letters() == [("a", 2)]
        for a, letter, b in automaton.transitions:
            assert automaton.step(a, letter) == b
            assert a in automaton.preimages(b, letter)

    def test_json(self, cycle):
        data = CounterAutomaton(cycle, 1).saturate().to_json()
        assert data["threshold"] == 1
        assert data["initial"] == 0
        assert len(data["states"]) >= 1


class TestSimulator:
    """The return simulator built from a count table."""

    def test_labels(self):
        assert return_label(3) == "Rt3"
        assert is_return_label("Rt12")
        assert not is_return_label("Rt")

    def test_simulator_stack(self):
        s = simulator_stack(Letter("a", 2, 1))
        assert s[0][-1] == Letter(BOX)
        assert s[1][1] == Letter(TOP)
        assert s[1][-1] == Letter("a", 2, 0)

    def test_one_transition_per_counted_return(self, subreturns):
        ret = CountFn.build(subreturns.states, 3, {("q0", "q1"): 2})
        sim = simulator_for(subreturns, ret, 3)
        added = sim.transitions[len(subreturns.transitions):]
        assert [t.label for t in added] == ["Rt1", "Rt2"]
        assert all(t.sym == TOP for t in added)

    def test_reserved_symbols(self):
        cps = parse_spec(
            "cpg2kit-format 1\nstates: p\ninitial: p\nalphabet: a\ntransitions:\np, a, x, p, Clone2\n"
        )
        check_fresh(cps)
        with pytest.raises(ReservedSymbolError):
            check_fresh(cps.extend(alphabet=[TOP]))



class TestRunCounter:
    def test_finite_region(self):
        cps = load_spec(FIXTURES / "chain3.cps")
        counter = RunCounter(cps, 5)
        result = counter.count(
            cps.initial_configuration(),
            is_target=lambda c: c.state == "2",
            allowed=lambda c: True,
        )
        assert result.exact
        assert result.get("2") == 1
        assert result.get("1") == 0

    def test_unbounded_region_falls_back_to_layers(self, cycle):
        """The clone configuration is reached after 1 and 4 steps within six layers."""
        counter = RunCounter(cycle, 3, horizon=6)
        assert counter.explore_depth == 12
        target = Configuration("1", parse_stack("[⊥]:[⊥]"))
        result = counter.count(
            cycle.initial_configuration(),
            is_target=lambda c: c == target,
            allowed=lambda c: True,
            terminal=False,
        )
        assert result.get("1") == 2
        assert not result.exact
        assert result.lengths["1"] == 4

    def test_exploration_limit_is_capped_by_layer_width(self, cycle):
        assert RunCounter(cycle, 2, max_configs=50).explore_limit == 50

    def test_cut_layer_is_not_exact(self, cycle):
        """A layer cut early leaves the later half of the horizon unseen."""
        counter = RunCounter(cycle, 5, horizon=12, max_configs=2)
        result = counter.count(
            cycle.initial_configuration(),
            is_target=lambda c: c.state == "2",
            allowed=lambda c: True,
            terminal=False,
        )
        # layer 3 holds three configurations
        assert result.get("2") == 1
        assert result.exact is False


class TestBounds:
    def test_bounds_grow(self, subreturns):
        bounds = bound_fns(subreturns, 2)
        assert bounds.f_ret(0) == 0
        assert bounds.f_ret(2) >= bounds.f_ret(1)
        table = bounds.table(3)
        assert list(table.columns) == ["f_ret", "f_loop", "f_highloop", "f_lowloop"]
        assert len(table) == 4

    @pytest.fixture(scope="class")
    def automaton(self, subreturns):
        return CounterAutomaton(subreturns, 3).saturate()

    @pytest.mark.parametrize(
        "state,stack",
        [
            ("q2", "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1)]"),
            ("q0", S),
            ("q2", "[⊥]:[⊥ (b,2,1) (b,2,1)]"),
            ("q0", S_HAT),
        ],
    )
    def test_shortest_returns_fit_the_bound(self, subreturns, automaton, state, stack):
        s = parse_stack(stack)
        bounds = bound_fns(subreturns, 3, automaton)
        counts = ret_k(subreturns, s, 3, automaton)
        expected = min(3, sum(counts(state, p) for p in subreturns.states))
        runs = enumerate_returns(subreturns, Configuration(state, s), 3, length_bound=bounds.f_ret(len(top2(s))))
        assert len(runs) == expected

    @pytest.mark.parametrize("state", ["q0", "q1", "q2", "q3"])
    @pytest.mark.parametrize("stack", [S, S_HAT])
    def test_shortest_loops_fit_the_bound(self, subreturns, automaton, state, stack):
        s = parse_stack(stack)
        bounds = bound_fns(subreturns, 3, automaton)
        counts = loop_k(subreturns, s, 3, automaton)
        expected = min(3, sum(counts(state, p) for p in subreturns.states))
        runs = enumerate_loops(subreturns, Configuration(state, s), 3, length_bound=bounds.f_loop(len(top2(s))))
        assert len(runs) == expected

"""Deterministic automata reading a top word and annotating it with run counts.

After reading TOP2(s) with links dropped, starting from ⊥, the automaton is
in a state whose annotation holds Ret^k, Loop^k, HighLoop^k and LowLoop^k
of s together with the pairs connected by a 1-loop. Each step extends the
word by one letter τ and computes the new annotation from the annotation
of the word below, using runs of the return simulator on ⊥⊤τ□:⊥⊤τ.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from src.core.errors import PreconditionError
from src.core.logger import logger
from src.counting.engine import CountResult, RunCounter
from src.counting.simulator import (
    BASE_STACK,
    is_return_label,
    simulator_for,
    simulator_stack,
)
from src.pushdown.stack import (
    BOTTOM,
    OpKind,
    Letter,
    Stack,
    Word,
    down0,
    is_word_prefix,
    top2,
)
from src.pushdown.system import Configuration, Cps, State

LetterLabel = Tuple[str, int]


@dataclass(frozen=True)
class CountFn:
    """A map Q×Q → {0..k}; only the nonzero entries are stored."""

    states: Tuple[State, ...]
    threshold: int
    entries: Tuple[Tuple[State, State, int], ...] = ()

    @classmethod
    def build(cls, states: Sequence[State], k: int, values: Mapping[Tuple[State, State], int]) -> "CountFn":
        entries = sorted(
            ((q1, q2, min(k, n)) for (q1, q2), n in values.items() if n > 0), key=str
        )
        return cls(tuple(states), k, tuple(entries))

    @classmethod
    def zero(cls, states: Sequence[State], k: int) -> "CountFn":
        return cls(tuple(states), k)

    @cached_property
    def _table(self) -> Dict[Tuple[State, State], int]:
        return {(q1, q2): n for q1, q2, n in self.entries}

    def __call__(self, q1: State, q2: State) -> int:
        return self._table.get((q1, q2), 0)

    def __getitem__(self, pair: Tuple[State, State]) -> int:
        return self._table.get(pair, 0)

    def pairs(self) -> FrozenSet[Tuple[State, State]]:
        """The k = 1 projection: pairs with at least one run."""
        return frozenset(self._table)

    def successors(self, q1: State) -> List[State]:
        return [q2 for p, q2, _ in self.entries if p == q1]

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def to_frame(self) -> pd.DataFrame:
        labels = [str(q) for q in self.states]
        frame = pd.DataFrame(0, index=labels, columns=labels)
        for q1, q2, n in self.entries:
            frame.loc[str(q1), str(q2)] = n
        return frame

    def to_json(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "table": [[str(q1), str(q2), n] for q1, q2, n in self.entries],
        }


@dataclass(frozen=True)
class Annotation:
    ret: CountFn
    loop: CountFn
    high_loop: CountFn
    low_loop: CountFn
    one_loops: FrozenSet[Tuple[State, State]]
    letter: LetterLabel

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.ret, self.loop, self.high_loop, self.low_loop, self.one_loops, self.letter))
            object.__setattr__(self, "_hash", cached)
        return cached

    def to_json(self) -> Dict[str, Any]:
        return {
            "letter": list(self.letter),
            "ret": self.ret.to_json()["table"],
            "loop": self.loop.to_json()["table"],
            "high_loop": self.high_loop.to_json()["table"],
            "low_loop": self.low_loop.to_json()["table"],
            "one_loops": sorted([str(a), str(b)] for a, b in self.one_loops),
        }


@dataclass(frozen=True)
class SimulationStats:
    """Longest shortest simulation and most Rt steps on it, for returns and high loops."""

    ret_length: int = 0
    ret_marks: int = 0
    high_length: int = 0
    high_marks: int = 0

    def merge(self, other: "SimulationStats") -> "SimulationStats":
        return SimulationStats(
            max(self.ret_length, other.ret_length),
            max(self.ret_marks, other.ret_marks),
            max(self.high_length, other.high_length),
            max(self.high_marks, other.high_marks),
        )


def _compose(
    states: Sequence[State], k: int, high: CountFn, low: CountFn
) -> CountFn:
    """min(k, H(q,q′) + Σ H(q,x)·L(x,y)·H(y,q′))."""
    values: Dict[Tuple[State, State], int] = {}
    for q1 in states:
        for x in high.successors(q1):
            h1 = high(q1, x)
            for y in low.successors(x):
                hl = h1 * low(x, y)
                for q2 in high.successors(y):
                    values[(q1, q2)] = min(k, values.get((q1, q2), 0) + hl * high(y, q2))
    for q1, q2, n in high.entries:
        values[(q1, q2)] = min(k, values.get((q1, q2), 0) + n)
    return CountFn.build(states, k, values)


class CounterAutomaton:
    """Lazily built deterministic counter automaton for a fixed system and threshold."""

    def __init__(self, cps: Cps, k: int, horizon: int = 12, max_configs: int = 20000):
        if k < 1:
            raise ValueError("threshold k must be at least 1")
        self.cps = cps
        self.k = k
        self.horizon = horizon
        self.max_configs = max_configs
        self.exact = True
        self._delta: Dict[Tuple[Annotation, LetterLabel], Annotation] = {}
        self._steps: Dict[Tuple[Any, ...], Annotation] = {}
        self.stats: Dict[Tuple[Any, ...], SimulationStats] = {}
        self.saturated = False
        self.initial = self._base()
        logger.info(
            f"Counter automaton for {cps.name or 'system'} (k={k}, horizon={horizon}) initialised"
        )

    # -- counting ---------------------------------------------------------------

    def _counter(self, sim: Cps) -> RunCounter:
        return RunCounter(
            sim,
            self.k,
            horizon=self.horizon,
            max_configs=self.max_configs,
            marked=lambda index: is_return_label(sim.transitions[index].label),
        )

    def _table(self, results: Mapping[State, CountResult]) -> CountFn:
        values = {}
        for q1, result in results.items():
            if not result.exact:
                self.exact = False
            for q2, n in result.counts.items():
                values[(q1, q2)] = n
        return CountFn.build(self.cps.states, self.k, values)

    def _simulate(self, sim: Cps, start: Stack) -> Tuple[CountFn, CountFn, FrozenSet, SimulationStats]:
        top = start[-1]
        counter = self._counter(sim)

        def high_allowed(c: Configuration) -> bool:
            t = c.stack
            if len(t) < 2:
                return False
            return not (len(t) == 2 and len(t[-1]) < len(top) and is_word_prefix(t[-1], top))

        rets, highs, ones = {}, {}, {}
        for q in self.cps.states:
            source = Configuration(q, start)
            rets[q] = counter.count(
                source,
                is_target=lambda c: len(c.stack) == 1,
                allowed=lambda c: len(c.stack) >= 2,
                with_stats=True,
            )
            highs[q] = counter.count(
                source,
                is_target=lambda c: c.stack == start,
                allowed=high_allowed,
                terminal=False,
                with_stats=True,
            )
            ones[q] = counter.count(
                source,
                is_target=lambda c: len(c.stack) >= 3 and c.stack[-1] == top,
                allowed=lambda c: len(c.stack) >= 2,
                terminal=False,
            )
        one_loops = frozenset(
            (q1, q2) for q1, result in ones.items() for q2 in result.counts
        )
        stats = SimulationStats(
            ret_length=max((n for r in rets.values() for n in r.lengths.values()), default=0),
            ret_marks=max((n for r in rets.values() for n in r.marks.values()), default=0),
            high_length=max((n for r in highs.values() for n in r.lengths.values()), default=0),
            high_marks=max((n for r in highs.values() for n in r.marks.values()), default=0),
        )
        return self._table(rets), self._table(highs), one_loops, stats

    def _base(self) -> Annotation:
        key = ("base",)
        ret, high, one_loops, stats = self._simulate(self.cps, BASE_STACK)
        self.stats[key] = stats
        zero = CountFn.zero(self.cps.states, self.k)
        return Annotation(ret, high, high, zero, one_loops, (BOTTOM, 1))

    def _low_loops(self, below: Annotation, letter: LetterLabel) -> CountFn:
        symbol, level = letter
        if level != 1:
            return CountFn.zero(self.cps.states, self.k)
        down: Dict[Tuple[State, State], int] = {}
        up: Dict[Tuple[State, State], int] = {}
        for t in self.cps.transitions:
            if t.sym == symbol and t.op.kind in (OpKind.POP1, OpKind.COLLAPSE):
                down[(t.state, t.target)] = down.get((t.state, t.target), 0) + 1
            if (
                t.sym == below.letter[0]
                and t.op.kind is OpKind.PUSH
                and (t.op.sym, t.op.level) == letter
            ):
                up[(t.state, t.target)] = up.get((t.state, t.target), 0) + 1
        values: Dict[Tuple[State, State], int] = {}
        for (q1, x), m in down.items():
            for y in below.loop.successors(x):
                middle = m * below.loop(x, y)
                for (p, q2), n in up.items():
                    if p == y:
                        values[(q1, q2)] = min(self.k, values.get((q1, q2), 0) + middle * n)
        return CountFn.build(self.cps.states, self.k, values)

    def _extend(self, below: Annotation, letter: LetterLabel) -> Annotation:
        key = (below.ret, below.loop, below.letter[0], letter)
        cached = self._steps.get(key)
        if cached is not None:
            return cached
        sim = simulator_for(self.cps, below.ret, self.k)
        start = simulator_stack(Letter(letter[0], letter[1]))
        ret, high, one_loops, stats = self._simulate(sim, start)
        low = self._low_loops(below, letter)
        loop = _compose(self.cps.states, self.k, high, low)
        result = Annotation(ret, loop, high, low, one_loops, letter)
        self._steps[key] = result
        self.stats[key] = stats
        logger.debug(f"Counter automaton step on {letter} computed")
        return result

    # -- automaton interface ----------------------------------------------------

    def letters(self) -> List[LetterLabel]:
        """Letters that can occur on stacks of the system: ⊥ and every pushed letter."""
        pushed = {(t.op.sym, t.op.level) for t in self.cps.transitions if t.op.kind is OpKind.PUSH}
        return sorted(pushed)

    def step(self, state: Annotation, letter: LetterLabel) -> Annotation:
        key = (state, letter)
        if key not in self._delta:
            if letter[0] == BOTTOM:
                raise PreconditionError("word", "⊥ may only occur as the first letter")
            self._delta[key] = self._extend(state, letter)
        return self._delta[key]

    def run(self, word: Word) -> Annotation:
        """The state reached on a word ⊥τ1…τn (links are ignored)."""
        word = down0(word)
        if not word or word[0].sym != BOTTOM:
            raise PreconditionError("word", "top words start with ⊥")
        state = self.initial
        for letter in word[1:]:
            state = self.step(state, letter.label)
        return state

    def evaluate(self, s: Stack) -> Annotation:
        return self.run(top2(s))

    def saturate(self, letters: Optional[Iterable[LetterLabel]] = None) -> "CounterAutomaton":
        """Compute every state reachable from ⊥ over the given letters (pushed ones by default)."""
        alphabet = sorted(letters) if letters is not None else self.letters()
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            state = queue.popleft()
            for letter in alphabet:
                nxt = self.step(state, letter)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        self.saturated = True
        logger.info(f"Counter automaton saturated with {len(seen)} states")
        return self

    @property
    def states(self) -> List[Annotation]:
        found = [self.initial]
        seen = {self.initial}
        for (_, _), target in self._delta.items():
            if target not in seen:
                seen.add(target)
                found.append(target)
        return found

    @property
    def transitions(self) -> List[Tuple[Annotation, LetterLabel, Annotation]]:
        return [(a, x, b) for (a, x), b in self._delta.items()]

    def preimages(self, state: Annotation, letter: LetterLabel) -> List[Annotation]:
        """States reaching ``state`` on ``letter``; complete only after saturation."""
        return [a for (a, x), b in self._delta.items() if x == letter and b == state]

    def to_json(self) -> Dict[str, Any]:
        states = self.states
        number = {a: i for i, a in enumerate(states)}
        return {
            "threshold": self.k,
            "exact": self.exact,
            "initial": 0,
            "states": [dict(id=i, **a.to_json()) for i, a in enumerate(states)],
            "transitions": [
                [number[a], list(x), number[b]] for a, x, b in self.transitions
            ],
        }


@lru_cache(maxsize=32)
def counter_automaton(cps: Cps, k: int, horizon: int = 12, max_configs: int = 20000) -> CounterAutomaton:
    """Shared lazily-built automaton per (system, threshold, limits)."""
    return CounterAutomaton(cps, k, horizon, max_configs)


def build_counter_automaton(cps: Cps, k: int, horizon: int = 12, max_configs: int = 20000) -> CounterAutomaton:
    return counter_automaton(cps, k, horizon, max_configs).saturate()


def ret_k(cps: Cps, s: Stack, k: int, automaton: Optional[CounterAutomaton] = None) -> CountFn:
    if len(s) < 2:
        raise PreconditionError("width", "returns need a stack of width at least 2")
    return (automaton or counter_automaton(cps, k)).evaluate(s).ret


def loop_k(cps: Cps, s: Stack, k: int, automaton: Optional[CounterAutomaton] = None) -> CountFn:
    return (automaton or counter_automaton(cps, k)).evaluate(s).loop


def high_loop_k(cps: Cps, s: Stack, k: int, automaton: Optional[CounterAutomaton] = None) -> CountFn:
    return (automaton or counter_automaton(cps, k)).evaluate(s).high_loop


def low_loop_k(cps: Cps, s: Stack, k: int, automaton: Optional[CounterAutomaton] = None) -> CountFn:
    return (automaton or counter_automaton(cps, k)).evaluate(s).low_loop


def one_loops(cps: Cps, s: Stack, automaton: Optional[CounterAutomaton] = None) -> FrozenSet[Tuple[State, State]]:
    return (automaton or counter_automaton(cps, 1)).evaluate(s).one_loops

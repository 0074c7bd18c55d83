"""Length bounds for the k shortest returns and loops of a stack.

A shortest simulation of a return uses at most ``ret_length`` steps, of
which at most ``ret_marks`` are Rt steps, each standing for a return of the
word one letter shorter. Unfolding gives f_ret(n+1) = l + #⊤·f_ret(n).
"""

from dataclasses import dataclass
from typing import Optional

import pandas as pd

from src.counting.counter_automaton import CounterAutomaton, SimulationStats, build_counter_automaton
from src.pushdown.system import Cps


@dataclass(frozen=True)
class BoundFns:
    ret_length: int
    ret_marks: int
    high_length: int
    high_marks: int

    def f_ret(self, n: int) -> int:
        total = 0
        for _ in range(max(n, 0)):
            total = self.ret_length + self.ret_marks * total
        return total

    def f_highloop(self, n: int) -> int:
        if n <= 0:
            return 0
        return self.high_length + self.high_marks * self.f_ret(n - 1)

    def f_lowloop(self, n: int) -> int:
        if n <= 0:
            return 0
        return 2 + self.f_loop(n - 1)

    def f_loop(self, n: int) -> int:
        if n <= 0:
            return 0
        return self.f_lowloop(n) + 2 * self.f_highloop(n)

    def table(self, upto: int) -> pd.DataFrame:
        rows = range(upto + 1)
        return pd.DataFrame(
            {
                "f_ret": [self.f_ret(n) for n in rows],
                "f_loop": [self.f_loop(n) for n in rows],
                "f_highloop": [self.f_highloop(n) for n in rows],
                "f_lowloop": [self.f_lowloop(n) for n in rows],
            }
        )


def bound_fns(cps: Cps, k: int, automaton: Optional[CounterAutomaton] = None) -> BoundFns:
    """Bounds from the shortest simulations recorded while saturating the counter automaton."""
    automaton = automaton or build_counter_automaton(cps, k)
    if not automaton.saturated:
        automaton.saturate()
    stats = SimulationStats()
    for recorded in automaton.stats.values():
        stats = stats.merge(recorded)
    return BoundFns(stats.ret_length, stats.ret_marks, stats.high_length, stats.high_marks)

"""The return simulator: one Pop2 transition per return of the word below.

On a simulator stack ⊥⊤τ□:⊥⊤τ the symbol ⊤ stands for Pop1 of the top word
being analysed; exposing it can only be answered by one of the Rtᵢ
transitions, so a run of the simulator back to width 1 corresponds to a
return of the original system and vice versa (up to threshold k).
"""

from typing import Optional

from src.core.errors import ReservedSymbolError
from src.pushdown.stack import (
    BOTTOM_LETTER,
    BOX,
    POP2,
    TOP,
    Letter,
    Stack,
    Word,
    down0,
)
from src.pushdown.system import Cps, Transition

BASE_STACK: Stack = ((BOTTOM_LETTER, Letter(BOX)), (BOTTOM_LETTER,))


def return_label(i: int) -> str:
    return f"Rt{i}"


def is_return_label(label) -> bool:
    return isinstance(label, str) and label.startswith("Rt") and label[2:].isdigit()


def simulator_stack(letter: Letter) -> Stack:
    """⊥⊤τ□:⊥⊤τ for the letter τ with its link dropped."""
    word = (BOTTOM_LETTER, Letter(TOP), letter.down0())
    return (word + (Letter(BOX),), word)


def check_fresh(cps: Cps) -> None:
    for x in (TOP, BOX):
        if x in cps.alphabet or any(t.sym == x for t in cps.transitions):
            raise ReservedSymbolError(f"reserved symbol {x} already used by the system")


def simulator_for(cps: Cps, ret, k: int) -> Cps:
    """Extend cps by Rt₁..Rt_k, firing Rtᵢ from q₁ to q₂ when ret(q₁, q₂) ≥ i."""
    check_fresh(cps)
    transitions = [
        Transition(q1, TOP, return_label(i), q2, POP2)
        for q1 in cps.states
        for q2 in cps.states
        for i in range(1, ret(q1, q2) + 1)
    ]
    return cps.extend(
        alphabet=(TOP, BOX),
        labels=[return_label(i) for i in range(1, k + 1)],
        transitions=transitions,
    )


def return_simulator(cps: Cps, w: Word, k: int, automaton=None) -> Cps:
    """The return simulator for the word w: Rt transitions count the returns of Pop1(w)."""
    from src.counting.counter_automaton import CountFn, counter_automaton

    check_fresh(cps)
    w = down0(w)
    if len(w) < 2:
        return simulator_for(cps, CountFn.zero(cps.states, k), k)
    automaton: Optional[object] = automaton or counter_automaton(cps, k)
    return simulator_for(cps, automaton.run(w[:-1]).ret, k)

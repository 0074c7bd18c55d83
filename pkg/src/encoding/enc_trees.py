from typing import FrozenSet, Hashable

from src.automata.nfta import Nfta
from src.automata.tree import Label
from src.encoding.codec import BOTTOM_LABEL
from src.pushdown.stack import BOTTOM, EPSILON
from src.pushdown.system import Cps

_BORDER = ("border",)
_BOTTOM = ("bottom",)
_ROOT = ("root",)


def letter_labels(cps: Cps) -> FrozenSet[Label]:
    levels = (1, 2) if cps.level == 2 else (1,)
    letters = {(x, level) for x in cps.user_symbols for level in levels}
    return frozenset(letters | {BOTTOM_LABEL})


def enc_labels(cps: Cps) -> FrozenSet[Hashable]:
    """Every label an encoding tree of the system may carry."""
    return frozenset(cps.states) | letter_labels(cps) | {EPSILON}


def _child_ok(p0, p1) -> bool:
    return (p0 == _BORDER or p0[0] == "letter") and (p1 == _BORDER or p1[0] == "eps")


def _shifts_block(p0, p1) -> bool:
    # T(t0) = (σ,1) = T(t10)
    return p0 != _BORDER and p1 != _BORDER and p0[1][1] == 1 and p1[1] == p0[1]


def enc_trees_automaton(cps: Cps) -> Nfta:
    """Accepts exactly the encoding trees over the system's states and letters."""
    letters = sorted(letter_labels(cps) - {BOTTOM_LABEL}, key=str)

    def rule(p0, p1):
        if p0 == _BOTTOM and p1 == _BORDER:
            for q in cps.states:
                yield q, _ROOT
            return
        if not _child_ok(p0, p1) or _shifts_block(p0, p1):
            return
        yield BOTTOM_LABEL, _BOTTOM
        for x in letters:
            if x[0] != BOTTOM:
                yield x, ("letter", x)
        yield EPSILON, ("eps", None if p0 == _BORDER else p0[1])

    return Nfta.crawl(enc_labels(cps), _BORDER, rule, lambda p: p == _ROOT)

"""Automata for single transitions on convolutions encode(c1) ⊗ encode(c2).

Every operation changes the encoding only around the lexicographically
largest path: Clone2 and push add a leaf there (a level-1 push may instead
move the last word into the block of its left neighbour), Pop1 and level-1
collapses undo that, and Pop2 and level-2 collapses cut off one subtree.
The automata below check the shape of the change bottom-up; both
components are constrained to be encoding trees by intersecting with the
pair domain.
"""

from functools import lru_cache
from typing import Iterable, Iterator, Optional, Tuple

from src.automata.nfta import (
    Nfta,
    conv_alphabet,
    cylindrify,
    intersect,
    relabel,
    union,
)
from src.automata.tree import Label
from src.encoding.codec import is_letter_label
from src.encoding.enc_trees import enc_labels, enc_trees_automaton
from src.pushdown.stack import BOX, EPSILON, OpKind
from src.pushdown.system import Cps, Transition

_BORDER = ("border",)
_ROOT = ("root",)
_DEL_ANY = ("del_any",)
_BELOW = ("below",)
_NEW_EPS = ("new_eps",)
_OLD_EPS = ("old_eps",)
_CH1 = ("ch1",)
_CUT1 = ("cut1",)


def _own_symbol(x: Label) -> Optional[str]:
    return x[0] if is_letter_label(x) else None


@lru_cache(maxsize=16)
def pair_domain(cps: Cps) -> Nfta:
    """Convolutions of two encoding trees of the system."""
    labels = enc_labels(cps)
    single = relabel(enc_trees_automaton(cps), lambda x: (x,))
    return intersect(cylindrify(single, 1, labels), cylindrify(single, 0, labels))


def _eq_symbol(x: Label, p0, p1) -> Optional[str]:
    """Deepest letter on the rightmost path below and including this node."""
    if p1 != _BORDER and p1[1] is not None:
        return p1[1]
    if p1 == _BORDER and p0 != _BORDER:
        return p0[1]
    return _own_symbol(x)


def _generic(x: Label, p0, p1) -> Iterator[Tuple[Label, tuple]]:
    """Unchanged subtrees and ancestors of the changed region."""
    kids = (_BORDER[0], "eq")
    if p0[0] in kids and p1[0] in kids:
        yield (x, x), ("eq", _eq_symbol(x, p0, p1))
    if p1[0] == "mod" and p0[0] in kids:
        yield (x, x), ("mod", p1[1] if p1[1] is not None else _own_symbol(x))
    if p0[0] == "mod" and p1 == _BORDER:
        yield (x, x), ("mod", p0[1] if p0[1] is not None else _own_symbol(x))


def _push_heads(x: Label, p0, p1, pushed: Tuple[str, int]) -> Iterator[Tuple[Label, tuple]]:
    if p0 == _BORDER and p1 == _BORDER:
        yield (BOX, pushed), ("new_letter",)
    if p0 == ("new_letter",) and p1 == _BORDER:
        yield (x, x), ("mod", _own_symbol(x))
    if pushed[1] != 1:
        return
    # the last word joins the block of its left neighbour
    if p0 == _BORDER and p1 == _BORDER:
        yield (EPSILON, BOX), _OLD_EPS
        yield (BOX, EPSILON), _NEW_EPS
    if p1 in (_NEW_EPS, _CH1) and p0[0] in (_BORDER[0], "eq"):
        if x == EPSILON:
            yield (x, x), _CH1
        elif x == pushed:
            yield (x, x), ("ch1top",)
    if p0 == ("ch1top",) and p1 == _OLD_EPS:
        yield (x, x), ("mod", _own_symbol(x))


def _pop_heads(x: Label, p0, p1, level: Optional[int]) -> Iterator[Tuple[Label, tuple]]:
    """Pop1 (any level) or a collapse of a level-1 letter (``level == 1``)."""
    ok = is_letter_label(x) and (level is None or x[1] == level)
    if p0 == _BORDER and p1 == _BORDER:
        if ok:
            yield (x, BOX), ("del_leaf", x[0])
        if x == EPSILON:
            yield (EPSILON, BOX), _OLD_EPS
            yield (BOX, EPSILON), _NEW_EPS
    if p0[0] == "del_leaf" and p1 == _BORDER:
        yield (x, x), ("mod", p0[1])
    if p1 in (_OLD_EPS, _CUT1) and p0[0] in (_BORDER[0], "eq"):
        if x == EPSILON:
            yield (x, x), _CUT1
        elif ok:
            yield (x, x), ("cut1top", x[0])
    if p0[0] == "cut1top" and p1 == _NEW_EPS:
        yield (x, x), ("mod", p0[1])


def _collapse2_heads(x: Label, p0, p1) -> Iterator[Tuple[Label, tuple]]:
    removed = (x, BOX)
    tail = p1 == _BORDER and p0 == _BORDER or p1 == _BELOW and p0 in (_BORDER, _DEL_ANY)
    if p0 in (_BORDER, _DEL_ANY) and p1 in (_BORDER, _DEL_ANY):
        yield removed, _DEL_ANY
    if tail and x == EPSILON:
        yield removed, _BELOW
    if tail and is_letter_label(x) and x[1] == 2:
        yield removed, ("tprime", x[0])
    if p0[0] in ("chain", "tprime") and p1 == _BORDER:
        if is_letter_label(x):
            yield removed, ("chain", p0[1])
        elif x == EPSILON:
            yield removed, ("colcut", p0[1])
    if p1[0] == "colcut" and p0[0] in (_BORDER[0], "eq"):
        yield (x, x), ("mod", p1[1])


def _pop2_heads(x: Label, p0, p1) -> Iterator[Tuple[Label, tuple]]:
    removed = (x, BOX)
    if p1 == _BORDER and p0[0] in (_BORDER[0], "zchain") and is_letter_label(x):
        yield removed, ("zchain", p0[1] if p0 != _BORDER else x[0])
    if p1 == _BORDER and x == EPSILON:
        if p0 == _BORDER:
            yield removed, ("popcut", None)
        elif p0[0] == "zchain":
            yield removed, ("popcut", p0[1])
    if p1[0] == "popcut" and p0[0] in (_BORDER[0], "eq"):
        yield (x, x), ("mod", p1[1] if p1[1] is not None else _own_symbol(x))


def _clone_heads(x: Label, p0, p1) -> Iterator[Tuple[Label, tuple]]:
    if p0 == _BORDER and p1 == _BORDER:
        yield (BOX, EPSILON), _NEW_EPS
    if p0 == _BORDER and p1 == _NEW_EPS:
        yield (x, x), ("mod", _own_symbol(x))


def _transition_shape(cps: Cps, t: Transition) -> Nfta:
    states = set(cps.states)
    labels = sorted((x for x in enc_labels(cps) if x not in states), key=str)
    alphabet = conv_alphabet([enc_labels(cps), enc_labels(cps)])
    op = t.op
    kind = op.kind

    def heads(x, p0, p1):
        if kind is OpKind.CLONE:
            yield from _clone_heads(x, p0, p1)
        elif kind is OpKind.PUSH:
            yield from _push_heads(x, p0, p1, (op.sym, op.level))
        elif kind is OpKind.POP1:
            yield from _pop_heads(x, p0, p1, None)
        elif kind is OpKind.COLLAPSE:
            yield from _pop_heads(x, p0, p1, 1)
            yield from _collapse2_heads(x, p0, p1)
        elif kind is OpKind.POP2:
            yield from _pop2_heads(x, p0, p1)

    def rule(p0, p1):
        if p0 == _ROOT or p1 == _ROOT:
            return
        top = "eq" if kind is OpKind.ID else "mod"
        if p1 == _BORDER and p0[0] == top and p0[1] == t.sym:
            yield (t.state, t.target), _ROOT
        for x in labels:
            yield from _generic(x, p0, p1)
            yield from heads(x, p0, p1)

    return Nfta.crawl(alphabet, _BORDER, rule, lambda p: p == _ROOT)


@lru_cache(maxsize=256)
def op_relation_automaton(cps: Cps, t: Transition) -> Nfta:
    """Accepts encode(c1) ⊗ encode(c2) iff c1 reaches c2 by the transition t."""
    return intersect(_transition_shape(cps, t), pair_domain(cps))


def _empty(alphabet: Iterable[Label]) -> Nfta:
    return Nfta.crawl(alphabet, _BORDER, lambda p0, p1: iter(()), lambda p: False)


def transition_relation_automaton(cps: Cps, label) -> Nfta:
    """The edge relation of one label: the union over its transitions."""
    automata = [op_relation_automaton(cps, t) for t in cps.transitions_with(label)]
    if not automata:
        return _empty(pair_domain(cps).alphabet)
    result = automata[0]
    for a in automata[1:]:
        result = union(result, a)
    return result

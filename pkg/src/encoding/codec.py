"""Encode/Decode between configurations and encoding trees.

The root carries the control state and the stack hangs below node ``0``.
Words sharing their first letters share a path; a word that branches off
starts behind an ε-labelled 1-child, so 1-nodes mark the beginnings of
words and a level-2 link at node d is the number of 1-nodes up to d.
"""

from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from src.automata.tree import Label, Tree
from src.core.errors import NotEncTreeError, PreconditionError
from src.pushdown.milestones import milestones
from src.pushdown.stack import (
    BOTTOM,
    BOTTOM_LETTER,
    EPSILON,
    Letter,
    Stack,
    Word,
    is_substack,
    validate_stack,
)
from src.pushdown.system import Configuration

BOTTOM_LABEL = BOTTOM_LETTER.label


def _encode_words(words: Sequence[Word], label: Label, address: str, out: Dict[str, Label]) -> None:
    out[address] = label
    first = words[0]
    if len(first) == 1:
        if len(words) > 1:
            _encode_words(words[1:], EPSILON, address + "1", out)
        return
    second = first[1]
    j = 0
    while j < len(words) and len(words[j]) > 1 and words[j][1] == second:
        j += 1
    _encode_words([w[1:] for w in words[:j]], second.label, address + "0", out)
    if j < len(words):
        _encode_words(words[j:], EPSILON, address + "1", out)


def encode_stack(s: Stack, root: str = "0") -> Dict[str, Label]:
    validate_stack(s)
    out: Dict[str, Label] = {}
    _encode_words(list(s), BOTTOM_LABEL, root, out)
    return out


def encode(c: Configuration) -> Tree:
    labels = encode_stack(c.stack)
    labels[""] = c.state
    return Tree.from_mapping(labels)


def is_letter_label(x: Label) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and x[1] in (1, 2)


def enc_tree_violation(t: Tree, states: Optional[Iterable[Hashable]] = None) -> Optional[Tuple[str, str]]:
    """The first violated encoding-tree condition as (condition, node), or None."""
    if "" not in t:
        return ("1", "")
    root = t[""]
    if is_letter_label(root) or root == EPSILON or (states is not None and root not in set(states)):
        return ("1", "")
    if "1" in t:
        return ("4", "1")
    if "0" not in t:
        return ("4", "0")
    for d in t.domain[1:]:
        x = t[d]
        if d.endswith("0"):
            if not is_letter_label(x):
                return ("2", d)
            if d == "0" and x != BOTTOM_LABEL:
                return ("2", d)
            if d != "0" and x[0] == BOTTOM:
                return ("bottom", d)
        elif x != EPSILON:
            return ("3", d)
    for d in t.domain:
        left, shifted = d + "0", d + "10"
        if left in t and shifted in t and t[left][1] == 1 and t[shifted] == t[left]:
            return ("5", d)
    return None


def check_enc_tree(t: Tree, states: Optional[Iterable[Hashable]] = None) -> Tree:
    violation = enc_tree_violation(t, states)
    if violation is not None:
        raise NotEncTreeError(*violation)
    return t


def is_enc_tree(t: Tree, states: Optional[Iterable[Hashable]] = None) -> bool:
    return enc_tree_violation(t, states) is None


def _letter_at(t: Tree, d: str) -> Letter:
    symbol, level = t[d]
    if level == 1:
        return Letter(symbol)
    link = sum(1 for e in t.domain if e.endswith("1") and e <= d)
    return Letter(symbol, 2, link)


def decode_stack(t: Tree) -> Stack:
    starts = sorted(["0"] + [d for d in t.domain if d.endswith("1")])
    words: List[Word] = []
    for r in starts:
        path = [r[:i] for i in range(1, len(r) + 1)]
        chain = r + "0"
        while chain in t:
            path.append(chain)
            chain += "0"
        words.append(tuple(_letter_at(t, d) for d in path if t[d] != EPSILON))
    return tuple(words)


def decode(t: Tree, states: Optional[Iterable[Hashable]] = None) -> Configuration:
    check_enc_tree(t, states)
    return Configuration(t[""], decode_stack(t))


# -- left stacks and milestones ------------------------------------------------


def _stack_node(d: str) -> str:
    if not d:
        raise PreconditionError("node", "the root carries the state, not a stack position")
    return d


def left_stack(d: str, t: Tree) -> Stack:
    """Decode of the part of t that is lexicographically at most d."""
    _stack_node(d)
    return decode_stack(t.lex_upto(d))


def top_word_of_path(t: Tree, d: str) -> Word:
    """The letters read from node 0 down to d, links set to 0."""
    _stack_node(d)
    return tuple(
        Letter(t[d[:i]][0], t[d[:i]][1]) for i in range(1, len(d) + 1) if t[d[:i]] != EPSILON
    )


def stack_nodes(t: Tree) -> List[str]:
    return [d for d in t.domain if d]


def milestone_nodes(t: Tree) -> Dict[Stack, str]:
    """Each milestone of the encoded stack mapped to its node."""
    return {left_stack(d, t): d for d in stack_nodes(t)}


def milestone_iso(t: Tree) -> bool:
    """Whether d ↦ left_stack(d) is an order isomorphism onto the milestones."""
    nodes = stack_nodes(t)
    stacks = [left_stack(d, t) for d in nodes]
    increasing = all(is_substack(a, b) and a != b for a, b in zip(stacks, stacks[1:]))
    return increasing and stacks == milestones(decode_stack(t))

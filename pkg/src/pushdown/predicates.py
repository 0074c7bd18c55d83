"""Exact loop, return and 1-loop predicates on concrete runs.

The ``*_shape`` functions work on the list of stacks ρ(0..n) and the list of
operations fired, so the enumerators can test prefixes without rebuilding
runs.
"""

from typing import List, Sequence

from src.pushdown.runs import Run, run_configurations, stacks_and_ops
from src.pushdown.stack import Op, OpKind, Stack, is_substack, is_word_prefix
from src.pushdown.system import Cps


def _pop1_depth(t: Stack, s: Stack) -> int:
    """k when t = Pop1^k(s) with k ≥ 1, else 0."""
    if len(t) != len(s) or t[:-1] != s[:-1]:
        return 0
    if len(t[-1]) < len(s[-1]) and is_word_prefix(t[-1], s[-1]):
        return len(s[-1]) - len(t[-1])
    return 0


def loop_shape(stacks: Sequence[Stack], high: bool = False) -> bool:
    s = stacks[0]
    if stacks[-1] != s:
        return False
    for t in stacks:
        # below width |s| a run from s only sees substacks of Pop2(s)
        if len(t) < len(s):
            return False
        k = _pop1_depth(t, s)
        if k == 0:
            continue
        if high:
            return False
        if any(letter.level != 1 for letter in s[-1][-k:]):
            return False
    return True


def low_loop_shape(stacks: Sequence[Stack]) -> bool:
    if len(stacks) < 3 or not loop_shape(stacks):
        return False
    s = stacks[0]
    return _pop1_depth(stacks[1], s) == 1 and _pop1_depth(stacks[-2], s) == 1


def return_shape(stacks: Sequence[Stack], run_ops: Sequence[Op]) -> bool:
    n = len(run_ops)
    t = stacks[0]
    if n == 0 or len(t) < 2:
        return False
    target = t[:-1]
    if stacks[-1] != target:
        return False
    if any(is_substack(u, target) for u in stacks[:-1]):
        return False
    last = run_ops[-1].kind
    if last is OpKind.POP2:
        return True
    w = t[-1]
    if last is OpKind.COLLAPSE:
        before = stacks[-2][-1]
        if len(w) < len(before) and is_word_prefix(w, before):
            return True
    if len(w) < 2:
        return False
    inner = t[:-1] + (w[:-1],)
    return any(
        stacks[i] == inner and return_shape(stacks[i:], run_ops[i:]) for i in range(1, n)
    )


def one_loop_shape(stacks: Sequence[Stack], run_ops: Sequence[Op]) -> bool:
    t = stacks[0]
    base, w = t[:-1], t[-1]
    end = stacks[-1]
    if len(end) < len(t) + 1 or end[: len(base)] != base or end[-1] != w:
        return False
    if any(len(u) <= len(base) for u in stacks):
        return False
    n = len(run_ops)
    shorter = w[:-1]
    for i in range(1, n + 1):
        if is_word_prefix(w, stacks[i - 1][-1]) and stacks[i][-1] == shorter:
            if not any(return_shape(stacks[i : j + 1], run_ops[i:j]) for j in range(i + 1, n + 1)):
                return False
    return True


def is_loop(cps: Cps, run: Run) -> bool:
    stacks, _ = stacks_and_ops(cps, run)
    return loop_shape(stacks)


def is_high_loop(cps: Cps, run: Run) -> bool:
    stacks, _ = stacks_and_ops(cps, run)
    return loop_shape(stacks, high=True)


def is_low_loop(cps: Cps, run: Run) -> bool:
    stacks, _ = stacks_and_ops(cps, run)
    return low_loop_shape(stacks)


def is_return(cps: Cps, run: Run) -> bool:
    stacks, run_ops = stacks_and_ops(cps, run)
    return return_shape(stacks, run_ops)


def is_one_loop(cps: Cps, run: Run) -> bool:
    stacks, run_ops = stacks_and_ops(cps, run)
    return one_loop_shape(stacks, run_ops)


def loop_decomposition(cps: Cps, run: Run) -> List[Run]:
    """Split a loop as [λ] when high, else as high ∘ low ∘ high.

    The low part runs from the first to the last visit of the start stack
    that is followed (resp. preceded) by a Pop1 dip.
    """
    configs = run_configurations(cps, run)
    s = configs[0].stack
    dips = [i for i, c in enumerate(configs) if _pop1_depth(c.stack, s) > 0]
    if not dips:
        return [run]
    # dips are entered and left through s by a single Pop1 and push
    first, last = dips[0] - 1, dips[-1] + 1
    return [
        Run(configs[0], run.steps[:first]),
        Run(configs[first], run.steps[first:last]),
        Run(configs[last], run.steps[last:]),
    ]

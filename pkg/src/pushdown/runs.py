from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple

from src.core.errors import PreconditionError
from src.pushdown.stack import (
    Op,
    Stack,
    Word,
    apply_op,
    is_prefix,
    is_valid_stack,
    is_word_prefix,
)
from src.pushdown.system import Configuration, Cps


@dataclass(frozen=True)
class Run:
    """A start configuration and the Δ indices fired from it."""

    start: Configuration
    steps: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, index: int) -> "Run":
        return Run(self.start, self.steps + (index,))

    def prefix(self, n: int) -> "Run":
        return Run(self.start, self.steps[:n])


def run_configurations(cps: Cps, run: Run) -> List[Configuration]:
    """ρ(0), …, ρ(n); raises when some step cannot fire."""
    configs = [run.start]
    for i, index in enumerate(run.steps):
        nxt = cps.step(configs[-1], index)
        if nxt is None:
            raise PreconditionError("run-applicable", f"step {i} (transition {index}) cannot fire")
        configs.append(nxt)
    return configs


def validate_run(cps: Cps, run: Run) -> bool:
    current: Optional[Configuration] = run.start
    for index in run.steps:
        current = cps.step(current, index)
        if current is None:
            return False
    return True


def labels(cps: Cps, run: Run) -> List[Hashable]:
    return [cps.transitions[i].label for i in run.steps]


def ops(cps: Cps, run: Run) -> List[Op]:
    return [cps.transitions[i].op for i in run.steps]


def subrun(cps: Cps, run: Run, i: int, j: int) -> Run:
    """ρ restricted to positions i..j."""
    configs = run_configurations(cps, run)
    return Run(configs[i], run.steps[i:j])


def replace_prefix(t: Stack, s: Stack, u: Stack) -> Stack:
    """t[s/u] for s ⊑ t and |s| = |u|."""
    top = s[-1]
    return u[:-1] + tuple(u[-1] + w[len(top):] for w in t[len(s) - 1 :])


def prefix_replace_run(cps: Cps, run: Run, s: Stack, u: Stack) -> Run:
    """ρ[s/u]: the same transitions fired from the replaced start stack."""
    configs = run_configurations(cps, run)
    for i, c in enumerate(configs):
        if not is_prefix(s, c.stack):
            raise PreconditionError("prefix", f"stack at position {i} is not prefixed by s")
    if len(s) != len(u):
        raise PreconditionError("width", f"|s|={len(s)} differs from |u|={len(u)}")
    if u[-1][-1] != s[-1][-1]:
        if any(len(c.stack[-1]) <= len(s[-1]) for c in configs[:-1]):
            raise PreconditionError(
                "top", "TOP1(u) differs from TOP1(s) and the run reaches TOP2(s)"
            )
    replaced = [Configuration(c.state, replace_prefix(c.stack, s, u)) for c in configs]
    if not is_valid_stack(replaced[0].stack):
        raise PreconditionError("valid", "the first replaced stack is not valid")
    result = Run(replaced[0], run.steps)
    if run_configurations_or_none(cps, result) != replaced:
        raise PreconditionError("replay", "the replaced run does not follow ρ(i)[s/u]")
    return result


def run_configurations_or_none(cps: Cps, run: Run) -> Optional[List[Configuration]]:
    try:
        return run_configurations(cps, run)
    except PreconditionError:
        return None


def word_prefix_replace_run(cps: Cps, run: Run, w: Word, w2: Word) -> Run:
    """ρ[w/w′] for a run of a level-1 system whose stacks all extend w."""
    configs = run_configurations(cps, run)
    for i, c in enumerate(configs):
        if len(c.stack) != 1 or not is_word_prefix(w, c.stack[0]):
            raise PreconditionError("prefix", f"stack at position {i} does not extend w")
    if not w2 or w2[-1] != w[-1]:
        raise PreconditionError("top", "w′ does not end with the last letter of w")
    replaced = [
        Configuration(c.state, ((w2 + c.stack[0][len(w):]),)) for c in configs
    ]
    if not is_valid_stack(replaced[0].stack):
        raise PreconditionError("valid", "w′ is not a valid word")
    result = Run(replaced[0], run.steps)
    if run_configurations_or_none(cps, result) != replaced:
        raise PreconditionError("replay", "the replaced run does not follow ρ(i)[w/w′]")
    return result


def stacks_and_ops(cps: Cps, run: Run) -> Tuple[List[Stack], List[Op]]:
    return [c.stack for c in run_configurations(cps, run)], ops(cps, run)


def apply_run_ops(start: Stack, run_ops: Sequence[Op]) -> List[Optional[Stack]]:
    result: List[Optional[Stack]] = [start]
    for op in run_ops:
        prev = result[-1]
        result.append(None if prev is None else apply_op(prev, op))
    return result

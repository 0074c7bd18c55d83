from dataclasses import dataclass, field
from typing import List

from src.core.errors import PreconditionError
from src.pushdown.predicates import loop_shape
from src.pushdown.runs import Run, run_configurations
from src.pushdown.stack import (
    CLONE,
    POP1,
    Op,
    OpKind,
    Stack,
    apply_op,
    bottom_stack,
    is_substack,
    push,
    validate_stack,
)
from src.pushdown.system import Cps


def _common_prefix_length(v, w) -> int:
    n = 0
    for a, b in zip(v, w):
        if a != b:
            break
        n += 1
    return n


def min_op_sequence(s: Stack) -> List[Op]:
    """The shortest operation sequence building s from [⊥], word by word."""
    validate_stack(s)
    seq: List[Op] = [push(x.sym, x.level) for x in s[0][1:]]
    for prev, w in zip(s, s[1:]):
        seq.append(CLONE)
        keep = _common_prefix_length(prev, w)
        seq.extend([POP1] * (len(prev) - keep))
        seq.extend(push(x.sym, x.level) for x in w[keep:])
    return seq


def gen_milestones(s: Stack) -> List[Stack]:
    """Every stack visited by min_op_sequence(s), starting at [⊥]."""
    result = [bottom_stack()]
    for op in min_op_sequence(s):
        result.append(apply_op(result[-1], op))
    return result


def milestones(s: Stack) -> List[Stack]:
    return [m for m in gen_milestones(s) if is_substack(m, s)]


@dataclass
class MilestoneStep:
    """One transition from m_i to m_{i+1} followed by a loop of m_{i+1}."""

    op: Op
    position: int
    transition: int
    loop: Run


@dataclass
class Segment:
    kind: str  # "push" or "clone"
    steps: List[MilestoneStep] = field(default_factory=list)


@dataclass
class RunDecomposition:
    milestones: List[Stack]
    positions: List[int]
    initial_loop: Run
    segments: List[Segment]

    def reassemble(self) -> Run:
        steps = list(self.initial_loop.steps)
        for segment in self.segments:
            for step in segment.steps:
                steps.append(step.transition)
                steps.extend(step.loop.steps)
        return Run(self.initial_loop.start, tuple(steps))


def decompose_run(cps: Cps, run: Run) -> RunDecomposition:
    """Cut a run from the initial configuration at the last visit of each generalised milestone."""
    if run.start != cps.initial_configuration():
        raise PreconditionError("initial", "the run does not start at the initial configuration")
    configs = run_configurations(cps, run)
    target = configs[-1].stack
    gms = gen_milestones(target)
    sequence = min_op_sequence(target)

    positions = []
    for m in gms:
        visits = [i for i, c in enumerate(configs) if c.stack == m]
        if not visits:
            raise PreconditionError("milestones", "the run misses a generalised milestone")
        positions.append(visits[-1])

    stacks = [c.stack for c in configs]
    if not loop_shape(stacks[: positions[0] + 1]):
        raise PreconditionError("loop", "the run before the last visit of [⊥] is not a loop")
    initial_loop = Run(configs[0], run.steps[: positions[0]])
    segments: List[Segment] = []
    for i, op in enumerate(sequence):
        n_i, n_next = positions[i], positions[i + 1]
        if n_i >= n_next or configs[n_i + 1].stack != gms[i + 1]:
            raise PreconditionError("milestones", f"position {n_i} does not lead to the next milestone")
        if not loop_shape(stacks[n_i + 1 : n_next + 1]):
            raise PreconditionError("loop", f"positions {n_i + 1}..{n_next} do not form a loop")
        step = MilestoneStep(
            op=op,
            position=n_i,
            transition=run.steps[n_i],
            loop=Run(configs[n_i + 1], run.steps[n_i + 1 : n_next]),
        )
        if op.kind is OpKind.PUSH:
            segments.append(Segment("push", [step]))
        elif op.kind is OpKind.CLONE:
            segments.append(Segment("clone", [step]))
        else:
            segments[-1].steps.append(step)
    return RunDecomposition(gms, positions, initial_loop, segments)

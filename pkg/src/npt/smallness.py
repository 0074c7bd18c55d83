"""Run measures and the smallness thresholds bounding quantifier witnesses."""

from dataclasses import dataclass
from typing import Dict, List

from src.core.errors import PreconditionError
from src.pushdown.runs import Run, run_configurations
from src.pushdown.stack import Word, is_word_prefix
from src.pushdown.system import Cps


@dataclass(frozen=True)
class RunMetrics:
    width: int
    max_stack: int
    occ: int
    length: int = 0

    def to_json(self) -> Dict[str, int]:
        return {"width": self.width, "max_stack": self.max_stack, "occ": self.occ, "length": self.length}


@dataclass(frozen=True)
class SmallnessParams:
    j: int
    alpha: int
    size: int

    @property
    def width_limit(self) -> int:
        return 6 * self.size**2 * self.j * 2**self.alpha

    @property
    def max_limit(self) -> int:
        return 8 * self.size**3 * self.j * 2**self.alpha

    @property
    def occ_limit(self) -> int:
        return 6 * self.size * self.j * 2**self.alpha

    def admits(self, m: RunMetrics) -> bool:
        return m.width <= self.width_limit and m.max_stack <= self.max_limit and m.occ <= self.occ_limit


def system_size(pds: Cps) -> int:
    """|N| = |Q| + |Σ| + |Γ| + |Δ|."""
    return pds.size


def connected_occurrences(words: List[Word], w: Word) -> int:
    """Most occurrences of w inside one stretch of stacks all prefixed by w."""
    best = current = 0
    for v in words:
        if is_word_prefix(w, v):
            current += v == w
            best = max(best, current)
        else:
            current = 0
    return best


def metrics(pds: Cps, rho: Run) -> RunMetrics:
    words = [c.stack[-1] for c in run_configurations(pds, rho)]
    occ = max(connected_occurrences(words, w) for w in set(words))
    return RunMetrics(len(words[-1]), max(len(w) for w in words), occ, len(rho))


def is_small(pds: Cps, rho: Run, j: int, alpha: int) -> bool:
    """(j, α)-smallness: width, largest stack and occurrences under the thresholds."""
    if j < 0 or alpha < 0:
        raise PreconditionError("smallness", "j and α are nonnegative")
    return SmallnessParams(j, alpha, system_size(pds)).admits(metrics(pds, rho))


def depth_bound(b: int, h: int) -> int:
    """Longest run with largest stack h and at most b connected occurrences: ⌈(b^(h+2) − b)/(b − 1)⌉."""
    if b < 2:
        raise PreconditionError("base", "the occurrence bound must be at least 2")
    if h < 0:
        raise PreconditionError("height", "the height must be nonnegative")
    return -(-(b ** (h + 2) - b) // (b - 1))

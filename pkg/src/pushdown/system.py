from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from src.pushdown.stack import (
    BOTTOM,
    Op,
    OpKind,
    Stack,
    apply_op,
    bottom_stack,
    format_stack,
)

State = Hashable


@dataclass(frozen=True, order=True)
class Configuration:
    state: State
    stack: Stack

    def __hash__(self) -> int:
        # computed once per configuration
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.state, self.stack))
            object.__setattr__(self, "_hash", cached)
        return cached

    def __str__(self) -> str:
        return f"({self.state}, {format_stack(self.stack)})"


@dataclass(frozen=True)
class Transition:
    state: State
    sym: str
    label: Hashable
    target: State
    op: Op

    def __str__(self) -> str:
        return f"{self.state}, {self.sym}, {self.label}, {self.target}, {self.op}"


@dataclass(frozen=True)
class Cps:
    """A collapsible pushdown system of level 1 or 2.

    Transitions are kept in declaration order; that order breaks ties in
    every length-lexicographic enumeration.
    """

    states: Tuple[State, ...]
    alphabet: Tuple[str, ...]
    labels: Tuple[Hashable, ...]
    initial: State
    transitions: Tuple[Transition, ...]
    level: int = 2
    name: str = field(default="", compare=False)

    @cached_property
    def _index(self) -> Dict[Tuple[State, str], Tuple[Tuple[int, Transition], ...]]:
        index: Dict[Tuple[State, str], List[Tuple[int, Transition]]] = {}
        for i, t in enumerate(self.transitions):
            index.setdefault((t.state, t.sym), []).append((i, t))
        return {key: tuple(value) for key, value in index.items()}

    def enabled(self, state: State, symbol: str) -> Tuple[Tuple[int, Transition], ...]:
        return self._index.get((state, symbol), ())

    def initial_configuration(self) -> Configuration:
        return Configuration(self.initial, bottom_stack())

    def steps(self, c: Configuration) -> List[Tuple[int, Configuration]]:
        """Defined one-step moves as (transition index, successor)."""
        result = []
        for i, t in self.enabled(c.state, c.stack[-1][-1].sym):
            stack = apply_op(c.stack, t.op)
            if stack is not None:
                result.append((i, Configuration(t.target, stack)))
        return result

    def successors(self, c: Configuration) -> List[Tuple[Hashable, Configuration]]:
        return [(self.transitions[i].label, d) for i, d in self.steps(c)]

    def step(self, c: Configuration, index: int) -> Optional[Configuration]:
        t = self.transitions[index]
        if t.state != c.state or t.sym != c.stack[-1][-1].sym:
            return None
        stack = apply_op(c.stack, t.op)
        return None if stack is None else Configuration(t.target, stack)

    def transitions_with(self, label: Hashable) -> List[Transition]:
        return [t for t in self.transitions if t.label == label]

    @property
    def size(self) -> int:
        """|Q| + |Σ| + |Γ| + |Δ|."""
        return len(self.states) + len(self.alphabet) + len(self.labels) + len(self.transitions)

    @property
    def user_symbols(self) -> Tuple[str, ...]:
        return tuple(x for x in self.alphabet if x != BOTTOM)

    def uses(self, kind: OpKind) -> bool:
        return any(t.op.kind is kind for t in self.transitions)

    def extend(
        self,
        states: Iterable[State] = (),
        alphabet: Iterable[str] = (),
        labels: Iterable[Hashable] = (),
        transitions: Iterable[Transition] = (),
        initial: Optional[State] = None,
    ) -> "Cps":
        """A copy with extra states, symbols, labels and transitions appended."""

        def merged(old, new):
            seen = list(old)
            for item in new:
                if item not in seen:
                    seen.append(item)
            return tuple(seen)

        return replace(
            self,
            states=merged(self.states, states),
            alphabet=merged(self.alphabet, alphabet),
            labels=merged(self.labels, labels),
            transitions=self.transitions + tuple(transitions),
            initial=self.initial if initial is None else initial,
        )


def successors(cps: Cps, c: Configuration) -> List[Tuple[Hashable, Configuration]]:
    """One-step successors of c in transition declaration order."""
    return cps.successors(c)

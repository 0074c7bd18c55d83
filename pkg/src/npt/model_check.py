"""First-order model checking by bounded witnesses.

The generic recursion lets the m-th quantified variable range over a finite
candidate set S(m) that depends on the elements already chosen. When the
duplicating player of the Ehrenfeucht–Fraïssé game has a strategy that
keeps every chosen tuple inside S, this recursion is a decision procedure.
For nested pushdown trees, S(i) is the set of (i, α)-small runs, α the
quantifier rank.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Protocol, Tuple

from src.core.errors import NonFinitaryError, PreconditionError
from src.core.logger import logger
from src.logic.formula import (
    And,
    Const,
    Edge,
    Eq,
    Exists,
    Forall,
    Formula,
    Infinite,
    Jump,
    ModCount,
    Not,
    Or,
    Reach,
    ReachL,
    free_vars,
    quantifier_rank,
)
from src.npt.nested import NptNode, is_jump, npt_nodes
from src.npt.smallness import SmallnessParams, depth_bound, metrics, system_size
from src.pushdown.system import Cps


class Structure(Protocol):
    def atom(self, phi: Formula, env: Mapping[str, Any]) -> bool:
        ...


class Constraint(Protocol):
    finitary: bool

    def candidates(self, chosen: Tuple[Any, ...]) -> Iterable[Any]:
        ...


@dataclass
class FiniteConstraint:
    """S(m+1) given by a function of the chosen tuple."""

    choose: Callable[[Tuple[Any, ...]], Iterable[Any]]
    finitary: bool = True

    def candidates(self, chosen: Tuple[Any, ...]) -> Iterable[Any]:
        return self.choose(chosen)


def negation_normal_form(phi: Formula, negated: bool = False) -> Formula:
    if isinstance(phi, Not):
        return negation_normal_form(phi.arg, not negated)
    if isinstance(phi, Const):
        return Const(phi.value != negated)
    if isinstance(phi, (And, Or)):
        dual = {And: Or, Or: And}[type(phi)] if negated else type(phi)
        return dual(negation_normal_form(phi.left, negated), negation_normal_form(phi.right, negated))
    if isinstance(phi, (Exists, Forall)):
        dual = {Exists: Forall, Forall: Exists}[type(phi)] if negated else type(phi)
        return dual(phi.var, negation_normal_form(phi.body, negated))
    if isinstance(phi, (ModCount, Infinite)):
        raise PreconditionError("quantifier", "counting quantifiers have no bounded-witness semantics")
    return Not(phi) if negated else phi


def s_model_check(
    structure: Structure,
    constraint: Constraint,
    phi: Formula,
    env: Optional[Dict[str, Any]] = None,
    chosen: Tuple[Any, ...] = (),
) -> bool:
    if not constraint.finitary:
        raise NonFinitaryError("the witness constraint cannot be enumerated")
    env = dict(env or {})
    if not chosen and not env:
        phi = negation_normal_form(phi)

    def check(node: Formula, env: Dict[str, Any], chosen: Tuple[Any, ...]) -> bool:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Not):
            return not structure.atom(node.arg, env)
        if isinstance(node, And):
            return check(node.left, env, chosen) and check(node.right, env, chosen)
        if isinstance(node, Or):
            return check(node.left, env, chosen) or check(node.right, env, chosen)
        if isinstance(node, Exists):
            return any(check(node.body, {**env, node.var: a}, chosen + (a,)) for a in constraint.candidates(chosen))
        if isinstance(node, Forall):
            return all(check(node.body, {**env, node.var: a}, chosen + (a,)) for a in constraint.candidates(chosen))
        return structure.atom(node, env)

    return check(phi, env, chosen)


class NptStructure:
    def __init__(self, pds: Cps):
        self.pds = pds

    def atom(self, phi: Formula, env: Mapping[str, NptNode]) -> bool:
        if isinstance(phi, Eq):
            return env[phi.x] == env[phi.y]
        if isinstance(phi, Edge):
            x, y = env[phi.x], env[phi.y]
            return len(y) == len(x) + 1 and y.steps[:-1] == x.steps and str(self.pds.transitions[y.steps[-1]].label) == str(phi.label)
        if isinstance(phi, Jump):
            return is_jump(self.pds, env[phi.x], env[phi.y])
        if isinstance(phi, Reach):
            x, y = env[phi.x], env[phi.y]
            return y.steps[: len(x)] == x.steps
        if isinstance(phi, ReachL):
            raise PreconditionError("vocabulary", "regular reachability is not part of the tree vocabulary")
        raise TypeError(f"not an atom: {phi!r}")


@dataclass
class SmallRuns:
    """S(i): runs of length ≤ max_length that are (i, α)-small."""

    pds: Cps
    alpha: int
    max_length: int
    finitary: bool = True
    truncated: bool = field(default=False, init=False)

    def __post_init__(self):
        self.size = system_size(self.pds)
        self._runs = [(rho, metrics(self.pds, rho)) for rho in npt_nodes(self.pds, self.max_length)]
        self._by_level: Dict[int, List[NptNode]] = {}
        if self.alpha > 0:
            top = SmallnessParams(self.alpha, self.alpha, self.size)
            needed = depth_bound(max(top.occ_limit, 2), top.max_limit) if top.max_limit < 64 else None
            self.truncated = needed is None or needed > self.max_length
            if self.truncated:
                logger.warning(f"Small-run witnesses cut at length {self.max_length}; the verdict is bounded")

    def candidates(self, chosen: Tuple[Any, ...]) -> List[NptNode]:
        i = len(chosen) + 1
        if i not in self._by_level:
            params = SmallnessParams(i, self.alpha, self.size)
            self._by_level[i] = [rho for rho, m in self._runs if params.admits(m)]
        return self._by_level[i]


@dataclass(frozen=True)
class NptVerdict:
    holds: bool
    # witnesses were cut at max_length below the small-run bound
    truncated: bool

    def to_json(self) -> Dict[str, Any]:
        return {"value": self.holds, "truncated": self.truncated}


def npt_model_check(pds: Cps, phi: Formula, max_length: int = 8) -> NptVerdict:
    """Decide a sentence over {→γ, ↪, =} on the nested pushdown tree of a level-1 system.

    A truncated verdict is exact for the runs of length ≤ max_length only.
    """
    if pds.level != 1:
        raise PreconditionError("level", "nested pushdown trees are built from level-1 systems")
    if free_vars(phi):
        raise PreconditionError("sentence", f"free variables {free_vars(phi)}")
    constraint = SmallRuns(pds, quantifier_rank(phi), max_length)
    value = s_model_check(NptStructure(pds), constraint, phi)
    logger.info(f"NPT check of {phi} with |N|={constraint.size}: {value}")
    return NptVerdict(value, constraint.truncated)

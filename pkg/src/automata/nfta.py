"""Bottom-up nondeterministic finite tree automata.

A run labels every node of the tree and every border node; border nodes get
the initial state, an inner node d with label σ gets some q with
(ρ(d0), ρ(d1), σ, q) ∈ Δ, and the tree is accepted when the root state is
final. The empty tree is accepted iff the initial state is final.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import networkx as nx

from src.automata.tree import EMPTY_TREE, Label, Tree, format_label, parse_label
from src.core.errors import AlphabetMismatchError, PreconditionError, ResourceLimitError
from src.core.logger import logger
from src.pushdown.stack import BOX

State = Hashable
Rule = Callable[[Any, Any], Iterable[Tuple[Label, Any]]]

INFINITE = "infinite"
MAX_STATES = 50000


@dataclass(frozen=True)
class Nfta:
    states: Tuple[State, ...]
    alphabet: FrozenSet[Label]
    initial: State
    finals: FrozenSet[State]
    transitions: FrozenSet[Tuple[State, State, Label, State]]
    names: Tuple[Any, ...] = field(default=(), compare=False)

    @cached_property
    def _by_children(self) -> Dict[Tuple[State, State], List[Tuple[Label, State]]]:
        index: Dict[Tuple[State, State], List[Tuple[Label, State]]] = {}
        for q0, q1, x, q in self.transitions:
            index.setdefault((q0, q1), []).append((x, q))
        return index

    @cached_property
    def _targets(self) -> Dict[Tuple[State, State, Label], FrozenSet[State]]:
        index: Dict[Tuple[State, State, Label], Set[State]] = {}
        for q0, q1, x, q in self.transitions:
            index.setdefault((q0, q1, x), set()).add(q)
        return {key: frozenset(value) for key, value in index.items()}

    def moves(self, q0: State, q1: State) -> List[Tuple[Label, State]]:
        return self._by_children.get((q0, q1), [])

    def targets(self, q0: State, q1: State, x: Label) -> FrozenSet[State]:
        return self._targets.get((q0, q1, x), frozenset())

    def target(self, q0: State, q1: State, x: Label) -> State:
        """The unique target of a complete deterministic automaton."""
        (q,) = self.targets(q0, q1, x)
        return q

    def root_states(self, t: Tree) -> FrozenSet[State]:
        states: Dict[str, FrozenSet[State]] = {}
        init = frozenset([self.initial])
        for d in sorted(t.domain, key=len, reverse=True):
            left = states.get(d + "0", init)
            right = states.get(d + "1", init)
            x = t[d]
            states[d] = frozenset(
                q for q0 in left for q1 in right for q in self.targets(q0, q1, x)
            )
        return states.get("", init)

    def accepts(self, t: Tree) -> bool:
        return not self.finals.isdisjoint(self.root_states(t))

    @property
    def is_deterministic(self) -> bool:
        return all(len(v) == 1 for v in self._targets.values())

    def inhabited(self) -> Set[State]:
        """States that label the root of some tree (the initial state via the empty one)."""
        found = {self.initial}
        changed = True
        while changed:
            changed = False
            for q0, q1, _, q in self.transitions:
                if q not in found and q0 in found and q1 in found:
                    found.add(q)
                    changed = True
        return found

    def useful(self) -> Set[State]:
        inhabited = self.inhabited()
        useful = {q for q in self.finals if q in inhabited}
        changed = True
        while changed:
            changed = False
            for q0, q1, _, q in self.transitions:
                if q in useful and q0 in inhabited and q1 in inhabited:
                    for p in (q0, q1):
                        if p not in useful:
                            useful.add(p)
                            changed = True
        return useful

    def trim(self) -> "Nfta":
        keep = self.useful() | {self.initial}
        transitions = frozenset(t for t in self.transitions if t[0] in keep and t[1] in keep and t[3] in keep)
        return Nfta(
            states=tuple(q for q in self.states if q in keep),
            alphabet=self.alphabet,
            initial=self.initial,
            finals=frozenset(q for q in self.finals if q in keep),
            transitions=transitions,
            names=self.names,
        )

    @classmethod
    def crawl(
        cls,
        alphabet: Iterable[Label],
        initial: Any,
        rule: Rule,
        final: Callable[[Any], bool],
        trim: bool = True,
        max_states: int = MAX_STATES,
    ) -> "Nfta":
        """Saturate a local rule from the border state.

        ``rule(p0, p1)`` yields ``(σ, p)`` for every transition with children
        p0 and p1; discovered states are numbered in order of discovery.
        """
        names: List[Any] = [initial]
        index: Dict[Any, int] = {initial: 0}
        transitions: Set[Tuple[int, int, Label, int]] = set()
        i = 0
        while i < len(names):
            for j in range(i + 1):
                pairs = [(i, j)] if i == j else [(i, j), (j, i)]
                for a, b in pairs:
                    for x, p in rule(names[a], names[b]):
                        k = index.get(p)
                        if k is None:
                            k = index[p] = len(names)
                            names.append(p)
                            if len(names) > max_states:
                                raise ResourceLimitError("max_automaton_states", len(names))
                        transitions.add((a, b, x, k))
            i += 1
        result = cls(
            states=tuple(range(len(names))),
            alphabet=frozenset(alphabet),
            initial=0,
            finals=frozenset(k for k, p in enumerate(names) if final(p)),
            transitions=frozenset(transitions),
            names=tuple(names),
        )
        logger.debug(f"Crawled automaton with {len(names)} states and {len(transitions)} transitions")
        return result.trim() if trim else result

    def name_of(self, q: State) -> Any:
        return self.names[q] if self.names else q


# -- membership ----------------------------------------------------------------


def accepts(a: Nfta, t: Tree) -> bool:
    return a.accepts(t)


def find_run(a: Nfta, t: Tree) -> Optional[Dict[str, State]]:
    """An accepting run found top-down, independently of the subset evaluation."""
    memo: Dict[Tuple[str, State], Optional[Dict[str, State]]] = {}

    def run_from(d: str, q: State) -> Optional[Dict[str, State]]:
        if d not in t:
            return {} if q == a.initial else None
        key = (d, q)
        if key in memo:
            return memo[key]
        memo[key] = None
        for q0, q1, x, target in sorted(a.transitions, key=str):
            if target != q or x != t[d]:
                continue
            left = run_from(d + "0", q0)
            if left is None:
                continue
            right = run_from(d + "1", q1)
            if right is None:
                continue
            memo[key] = {d: q, **left, **right}
            break
        return memo[key]

    for f in sorted(a.finals, key=str):
        run = run_from("", f)
        if run is not None:
            return run
    return None


# -- boolean algebra -----------------------------------------------------------


def _check_alphabets(a: Nfta, b: Nfta) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {len(a.alphabet)} vs {len(b.alphabet)} symbols"
        )


def determinize(a: Nfta) -> Nfta:
    """Complete bottom-up deterministic automaton by the subset construction."""

    def rule(s0: FrozenSet[State], s1: FrozenSet[State]):
        reached: Dict[Label, Set[State]] = {x: set() for x in a.alphabet}
        for q0 in s0:
            for q1 in s1:
                for x, q in a.moves(q0, q1):
                    reached[x].add(q)
        for x in sorted(a.alphabet, key=str):
            yield x, frozenset(reached[x])

    return Nfta.crawl(
        a.alphabet,
        frozenset([a.initial]),
        rule,
        lambda s: not a.finals.isdisjoint(s),
        trim=False,
    )


def complement(a: Nfta) -> Nfta:
    d = a if a.is_deterministic and _is_complete(a) else determinize(a)
    return Nfta(
        states=d.states,
        alphabet=d.alphabet,
        initial=d.initial,
        finals=frozenset(q for q in d.states if q not in d.finals),
        transitions=d.transitions,
        names=d.names,
    )


def _is_complete(a: Nfta) -> bool:
    return all(a.targets(q0, q1, x) for q0 in a.states for q1 in a.states for x in a.alphabet)


def intersect(a: Nfta, b: Nfta) -> Nfta:
    _check_alphabets(a, b)

    def rule(p0, p1):
        for x, p in a.moves(p0[0], p1[0]):
            for q in b.targets(p0[1], p1[1], x):
                yield x, (p, q)

    return Nfta.crawl(
        a.alphabet,
        (a.initial, b.initial),
        rule,
        lambda p: p[0] in a.finals and p[1] in b.finals,
    )


_BORDER = ("border",)


def union(a: Nfta, b: Nfta) -> Nfta:
    _check_alphabets(a, b)
    sides = (("L", a), ("R", b))

    def rule(p0, p1):
        for tag, m in sides:
            q0 = m.initial if p0 == _BORDER else (p0[1] if p0[0] == tag else None)
            q1 = m.initial if p1 == _BORDER else (p1[1] if p1[0] == tag else None)
            if q0 is None or q1 is None:
                continue
            for x, q in m.moves(q0, q1):
                yield x, (tag, q)

    def final(p) -> bool:
        if p == _BORDER:
            return a.initial in a.finals or b.initial in b.finals
        return p[1] in dict(sides)[p[0]].finals

    return Nfta.crawl(a.alphabet, _BORDER, rule, final)


def relabel(a: Nfta, morphism: Callable[[Label], Label]) -> Nfta:
    """The image of L(a) under a letter-to-letter relabelling."""
    return Nfta(
        states=a.states,
        alphabet=frozenset(morphism(x) for x in a.alphabet),
        initial=a.initial,
        finals=a.finals,
        transitions=frozenset((q0, q1, morphism(x), q) for q0, q1, x, q in a.transitions),
        names=a.names,
    ).trim()


def with_alphabet(a: Nfta, alphabet: Iterable[Label]) -> Nfta:
    return Nfta(a.states, frozenset(alphabet), a.initial, a.finals, a.transitions, a.names)


# -- emptiness, finiteness, counting -------------------------------------------


def is_empty(a: Nfta) -> bool:
    return a.finals.isdisjoint(a.inhabited())


def witness(a: Nfta) -> Optional[Tree]:
    """An accepted tree of minimal depth."""
    trees: Dict[State, Tree] = {a.initial: EMPTY_TREE}
    changed = True
    while True:
        for f in sorted(a.finals, key=str):
            if f in trees:
                return trees[f]
        if not changed:
            return None
        changed = False
        found: Dict[State, Tree] = {}
        for q0, q1, x, q in sorted(a.transitions, key=str):
            if q in trees or q in found or q0 not in trees or q1 not in trees:
                continue
            found[q] = Tree.node(x, trees[q0], trees[q1])
        if found:
            trees.update(found)
            changed = True


def language_upto(a: Nfta, depth: int, limit: int = MAX_STATES) -> List[Tree]:
    """Accepted trees of depth ≤ depth, shallowest first."""
    reached: Dict[State, Set[Tree]] = {a.initial: {EMPTY_TREE}}
    for _ in range(depth):
        grown: Dict[State, Set[Tree]] = {q: set(ts) for q, ts in reached.items()}
        for q0, q1, x, q in a.transitions:
            for t0 in reached.get(q0, ()):
                for t1 in reached.get(q1, ()):
                    grown.setdefault(q, set()).add(Tree.node(x, t0, t1))
        total = sum(len(ts) for ts in grown.values())
        if total > limit:
            raise ResourceLimitError("max_trees", total)
        reached = grown
    accepted = set().union(*(reached.get(f, set()) for f in a.finals)) if a.finals else set()
    return sorted(accepted, key=lambda t: (t.depth, len(t), str(t.items)))


def _dependency_graph(a: Nfta, states: Set[State], labels=None) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(states)
    for q0, q1, x, q in a.transitions:
        if labels is not None and x not in labels:
            continue
        if q0 in states and q1 in states and q in states:
            g.add_edge(q0, q)
            g.add_edge(q1, q)
    return g


def _pumpable(g: nx.DiGraph) -> Set[State]:
    cyclic = set()
    for scc in nx.strongly_connected_components(g):
        if len(scc) > 1 or any(g.has_edge(q, q) for q in scc):
            cyclic |= scc
    result = set(cyclic)
    for q in cyclic:
        result |= nx.descendants(g, q)
    return result


def is_finite(a: Nfta) -> bool:
    trimmed = a.trim()
    useful = trimmed.useful()
    return not (_pumpable(_dependency_graph(trimmed, useful)) & useful)


def state_counts(a: Nfta, labels=None) -> Dict[State, Union[int, str]]:
    """For a deterministic automaton: the number of trees evaluating to each state.

    Only labels in ``labels`` are used when given; the empty tree counts for
    the initial state.
    """
    if labels is None:
        labels = a.alphabet
    inhabited = {a.initial}
    changed = True
    while changed:
        changed = False
        for q0, q1, x, q in a.transitions:
            if x in labels and q not in inhabited and q0 in inhabited and q1 in inhabited:
                inhabited.add(q)
                changed = True
    g = _dependency_graph(a, inhabited, labels)
    infinite = _pumpable(g)
    counts: Dict[State, Union[int, str]] = {q: INFINITE for q in infinite}
    finite = [q for q in nx.topological_sort(g.subgraph(inhabited - infinite))]
    incoming: Dict[State, List[Tuple[State, State]]] = {}
    for q0, q1, x, q in a.transitions:
        if x in labels and q0 in inhabited and q1 in inhabited and q not in infinite:
            incoming.setdefault(q, []).append((q0, q1))
    for q in finite:
        total = 1 if q == a.initial else 0
        for q0, q1 in incoming.get(q, []):
            total += counts[q0] * counts[q1]
        counts[q] = total
    return counts


def count_language(a: Nfta) -> Union[int, str]:
    """|L(a)|, or ``"infinite"``."""
    if not is_finite(a):
        return INFINITE
    d = determinize(a.trim()).trim()
    counts = state_counts(d)
    return sum(counts.get(q, 0) for q in d.finals)


# -- pumping -------------------------------------------------------------------


@dataclass
class Pumping:
    tree: Tree
    outer: str
    inner: str

    def inflate(self, n: int) -> Tree:
        """t_n: the context between outer and inner repeated n times (t_1 = t)."""
        hole = self.inner[len(self.outer) :]
        context = self.tree.subtree(self.outer)
        filler = self.tree.subtree(self.inner)
        for _ in range(n):
            filler = context.graft(hole, filler)
        return self.tree.graft(self.outer, filler)

    @property
    def deflated(self) -> Tree:
        return self.inflate(0)

    def __iter__(self) -> Iterator[Tree]:
        n = 1
        while True:
            yield self.inflate(n)
            n += 1


def pump(a: Nfta, t: Tree) -> Pumping:
    """Two nodes on a deepest path sharing a run state."""
    if t.depth <= len(a.states):
        raise PreconditionError("depth", f"depth {t.depth} does not exceed |Q|={len(a.states)}")
    run = find_run(a, t)
    if run is None:
        raise PreconditionError("accepted", "the automaton rejects the tree")
    leaf = max(t.domain, key=len)
    path = [leaf[:i] for i in range(len(leaf) + 1)]
    seen: Dict[State, str] = {}
    for d in reversed(path):
        q = run[d]
        if q in seen:
            return Pumping(t, d, seen[q])
        seen[q] = d
    raise PreconditionError("depth", "no repeated state on the deepest path")


# -- convolution alphabets ------------------------------------------------------


def conv_alphabet(bases: Sequence[Iterable[Label]], padding: Label = BOX) -> FrozenSet[Tuple]:
    """All label tuples over the bases with padding, except the all-padding tuple."""
    choices = [sorted(set(b), key=str) + [padding] for b in bases]
    blank = tuple(padding for _ in bases)
    return frozenset(x for x in product(*choices) if x != blank or not bases)


_PAD = ("pad",)


def cylindrify(a: Nfta, position: int, base: Iterable[Label], padding: Label = BOX) -> Nfta:
    """Insert a free component at ``position`` of a convolution automaton."""
    base = sorted(set(base), key=str) + [padding]
    arity = len(next(iter(a.alphabet))) if a.alphabet else 0
    blank = tuple(padding for _ in range(arity))
    old_labels = sorted(a.alphabet, key=str) + [blank]
    alphabet = frozenset(
        x[:position] + (y,) + x[position:]
        for x in old_labels
        for y in base
        if not (x == blank and y == padding)
    )

    def as_old(p):
        return a.initial if p in (_BORDER, _PAD) else p[1]

    def rule(p0, p1):
        for y in base:
            if y != padding and p0 in (_BORDER, _PAD) and p1 in (_BORDER, _PAD):
                yield blank[:position] + (y,) + blank[position:], _PAD
            for x, q in a.moves(as_old(p0), as_old(p1)):
                yield x[:position] + (y,) + x[position:], ("q", q)

    def final(p) -> bool:
        if p in (_BORDER, _PAD):
            return a.initial in a.finals
        return p[1] in a.finals

    return Nfta.crawl(alphabet, _BORDER, rule, final)


def padding_closure(a: Nfta, position: int, padding: Label = BOX) -> Set[State]:
    """States reached on nonempty trees whose other components are all padding."""
    reached: Set[State] = set()
    changed = True
    while changed:
        changed = False
        for q0, q1, x, q in a.transitions:
            if q in reached or x[position] == padding:
                continue
            if any(y != padding for i, y in enumerate(x) if i != position):
                continue
            if all(p == a.initial or p in reached for p in (q0, q1)):
                reached.add(q)
                changed = True
    return reached


def project(a: Nfta, position: int, padding: Label = BOX) -> Nfta:
    """∃ over component ``position``: drop it, guessing its labels."""
    closure = padding_closure(a, position, padding)
    alphabet = frozenset(x[:position] + x[position + 1 :] for x in a.alphabet)
    border_options = [(a.initial, True)] + [(z, False) for z in sorted(closure, key=str)]

    def options(p):
        return border_options if p == _BORDER else [p]

    def rule(p0, p1):
        for (q0, e0), (q1, e1) in product(options(p0), options(p1)):
            for x, q in a.moves(q0, q1):
                rest = x[:position] + x[position + 1 :]
                if all(y == padding for y in rest):
                    continue
                if x[position] == padding:
                    if e0 and e1:
                        yield rest, (q, True)
                else:
                    yield rest, (q, False)

    def final(p) -> bool:
        return any(q in a.finals for q, _ in options(p))

    return Nfta.crawl(alphabet, _BORDER, rule, final)


# -- modulo counting -----------------------------------------------------------


@dataclass(frozen=True, order=True)
class CountValue:
    """A count known modulo m, with exact zero and infinity information."""

    residue: int
    nonzero: bool
    infinite: bool

    @classmethod
    def of(cls, n: Union[int, str], m: int) -> "CountValue":
        if n == INFINITE:
            return cls(0, True, True)
        return cls(n % m, n > 0, False)

    def add(self, other: "CountValue", m: int) -> "CountValue":
        return CountValue(
            (self.residue + other.residue) % m,
            self.nonzero or other.nonzero,
            self.infinite or other.infinite,
        )

    def mul(self, other: "CountValue", m: int) -> "CountValue":
        nonzero = self.nonzero and other.nonzero
        return CountValue(
            (self.residue * other.residue) % m,
            nonzero,
            nonzero and (self.infinite or other.infinite),
        )


def mod_count_automaton(a: Nfta, m: int, k: int, padding: Label = BOX) -> Nfta:
    """Accepts t̄ iff finitely many t have t ⊗ t̄ ∈ L(a), and their number is ≡ k mod m.

    The counted component is the first one.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    d = determinize(a)
    states = list(d.states)
    zero = CountValue(0, False, False)
    one = CountValue.of(1, m)
    arity = len(next(iter(d.alphabet))) if d.alphabet else 1
    blank_rest = tuple(padding for _ in range(arity - 1))
    rest_alphabet = sorted({x[1:] for x in d.alphabet if x[1:] != blank_rest}, key=str)
    xs = sorted({x[0] for x in d.alphabet if x[0] != padding}, key=str)

    lone = {(x,) + blank_rest for x in xs}
    counts = state_counts(d, lone)
    initial = (tuple(CountValue.of(counts.get(q, 0), m) for q in states), d.initial)
    position = {q: i for i, q in enumerate(states)}

    def rule(h0, h1):
        f0, e0 = h0
        f1, e1 = h1
        live0 = [(q, v) for q, v in zip(states, f0) if v.nonzero]
        live1 = [(q, v) for q, v in zip(states, f1) if v.nonzero]
        for rest in rest_alphabet:
            f = [zero] * len(states)
            for x in xs:
                label = (x,) + rest
                for q0, v0 in live0:
                    for q1, v1 in live1:
                        q = d.target(q0, q1, label)
                        f[position[q]] = f[position[q]].add(v0.mul(v1, m), m)
            e = d.target(e0, e1, (padding,) + rest)
            f[position[e]] = f[position[e]].add(one, m)
            yield rest, (tuple(f), e)

    def final(h) -> bool:
        total = zero
        for q, v in zip(states, h[0]):
            if q in d.finals:
                total = total.add(v, m)
        return not total.infinite and total.residue == k % m

    result = Nfta.crawl(rest_alphabet, initial, rule, final)
    logger.debug(f"Modulo-{m} counting automaton has {len(result.states)} states")
    return result


# -- interchange ---------------------------------------------------------------


def to_json(a: Nfta) -> Dict[str, Any]:
    return {
        "format": "cpg2kit-format 1",
        "states": [str(q) for q in a.states],
        "alphabet": sorted(format_label(x) for x in a.alphabet),
        "initial": str(a.initial),
        "finals": sorted(str(q) for q in a.finals),
        "transitions": sorted(
            [str(q0), str(q1), format_label(x), str(q)] for q0, q1, x, q in a.transitions
        ),
    }


def from_json(data: Dict[str, Any]) -> Nfta:
    return Nfta(
        states=tuple(data["states"]),
        alphabet=frozenset(parse_label(x) for x in data["alphabet"]),
        initial=data["initial"],
        finals=frozenset(data["finals"]),
        transitions=frozenset(
            (q0, q1, parse_label(x), q) for q0, q1, x, q in data["transitions"]
        ),
    )


def to_graph(a: Nfta) -> nx.MultiDiGraph:
    """Each transition (q0, q1, σ, q) becomes edges q0 → q and q1 → q labelled σ/0 and σ/1."""
    g = nx.MultiDiGraph()
    for q in a.states:
        g.add_node(str(q), shape="doublecircle" if q in a.finals else "circle")
    for q0, q1, x, q in sorted(a.transitions, key=str):
        g.add_edge(str(q0), str(q), label=f"{format_label(x)}/0")
        g.add_edge(str(q1), str(q), label=f"{format_label(x)}/1")
    return g

"""Reachability restricted to runs whose label word lies in a regular language.

The language is given by a string DFA over transition labels. The product
system keeps the original states and adds copies (q, f) that track the DFA
state along a run; ``eps_i`` enters a copy at the DFA's initial state and
``eps_f`` at a final one. A labelled run from c1 to c2 exists iff the
product reaches ((q2, f), s2) from ((q1, f0), s1) for some final f.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Optional, Tuple, Union

from src.core.errors import AlphabetMismatchError, ReservedSymbolError, SpecFormatError
from src.core.logger import logger
from src.counting.counter_automaton import counter_automaton
from src.pushdown.loader import FORMAT_HEADER
from src.pushdown.stack import ID
from src.pushdown.system import Configuration, Cps, State, Transition
from src.reachability.relations import reach

ENTER = "eps_i"
LEAVE = "eps_f"


@dataclass(frozen=True)
class Dfa:
    states: Tuple[str, ...]
    alphabet: Tuple[Hashable, ...]
    initial: str
    finals: frozenset
    delta: Tuple[Tuple[str, Hashable, str], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        seen: Dict[Tuple[str, Hashable], str] = {}
        for p, label, q in self.delta:
            if p not in self.states or q not in self.states:
                raise SpecFormatError(f"DFA transition uses an unknown state: {p} -> {q}")
            if label not in self.alphabet:
                raise AlphabetMismatchError(f"DFA label {label!r} is not in its alphabet")
            if seen.setdefault((p, label), q) != q:
                raise SpecFormatError(f"DFA is not deterministic at ({p}, {label})")
        if self.initial not in self.states:
            raise SpecFormatError(f"unknown initial DFA state {self.initial}")

    def move(self, p: str, label: Hashable) -> Optional[str]:
        for source, x, target in self.delta:
            if source == p and x == label:
                return target
        return None

    def accepts(self, word: Iterable[Hashable]) -> bool:
        p: Optional[str] = self.initial
        for label in word:
            p = self.move(p, label)
            if p is None:
                return False
        return p in self.finals

    @classmethod
    def universal(cls, labels: Iterable[Hashable]) -> "Dfa":
        """The one-state DFA for Γ*."""
        labels = tuple(labels)
        return cls(("all",), labels, "all", frozenset({"all"}), tuple(("all", x, "all") for x in labels))

    def to_json(self) -> Dict:
        return {
            "format": FORMAT_HEADER,
            "states": list(self.states),
            "alphabet": [str(x) for x in self.alphabet],
            "initial": self.initial,
            "finals": sorted(self.finals),
            "transitions": [[p, str(x), q] for p, x, q in self.delta],
        }


def parse_dfa(text: str, name: str = "") -> Dfa:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"DFA file is not JSON: {e.msg}", e.lineno) from e
    if data.get("format") != FORMAT_HEADER:
        raise SpecFormatError(f"expected format '{FORMAT_HEADER}' in DFA file")
    try:
        return Dfa(
            states=tuple(data["states"]),
            alphabet=tuple(data["alphabet"]),
            initial=data["initial"],
            finals=frozenset(data["finals"]),
            delta=tuple((p, x, q) for p, x, q in data["transitions"]),
            name=name,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SpecFormatError(f"malformed DFA: {e}") from e


def load_dfa(path: Union[str, Path]) -> Dfa:
    path = Path(path)
    logger.info(f"Loading DFA from {path}")
    return parse_dfa(path.read_text(encoding="utf-8"), name=path.stem)


def product_state(q: State, p: str) -> str:
    return f"{q}@{p}"


def product_with_dfa(cps: Cps, dfa: Dfa) -> Cps:
    """The system whose copies (q, f) follow the DFA along the labels of a run."""
    clash = {ENTER, LEAVE} & set(cps.labels)
    if clash:
        raise ReservedSymbolError(f"labels {sorted(clash)} are used by the product construction")
    missing = set(cps.labels) - set(dfa.alphabet)
    if missing:
        logger.warning(f"Labels {sorted(map(str, missing))} do not occur in DFA {dfa.name or '?'}")
    rows: List[Transition] = []
    copies: List[str] = []
    for q in cps.states:
        for sym in cps.alphabet:
            rows.append(Transition(q, sym, ENTER, product_state(q, dfa.initial), ID))
            for f in sorted(dfa.finals):
                rows.append(Transition(q, sym, LEAVE, product_state(q, f), ID))
        copies += [product_state(q, p) for p in dfa.states]
    for t in cps.transitions:
        for p, label, p2 in dfa.delta:
            if label == t.label:
                rows.append(Transition(product_state(t.state, p), t.sym, t.label, product_state(t.target, p2), t.op))
    product = cps.extend(states=copies, labels=[ENTER, LEAVE], transitions=rows)
    logger.info(f"Product with DFA has {len(product.states)} states and {len(product.transitions)} transitions")
    return product


def reach_regular(cps: Cps, c1: Configuration, c2: Configuration, dfa: Dfa) -> bool:
    """Whether some run from c1 to c2 carries a label word accepted by the DFA."""
    product = product_with_dfa(cps, dfa)
    automaton = counter_automaton(product, 1)
    source = Configuration(product_state(c1.state, dfa.initial), c1.stack)
    for f in sorted(dfa.finals):
        if reach(product, source, Configuration(product_state(c2.state, f), c2.stack), automaton):
            return True
    return False

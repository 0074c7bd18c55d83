"""Finite binary trees addressed by strings over {0, 1}.

Addresses compare in plain string order, which puts a node before its
descendants and 0-subtrees before 1-subtrees.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, Sequence, Tuple

from src.core.errors import SpecFormatError
from src.pushdown.stack import BOX, resolve_alias

Label = Hashable

FORMAT_HEADER = "cpg2kit-format 1"


@dataclass(frozen=True)
class Tree:
    items: Tuple[Tuple[str, Label], ...] = ()

    @classmethod
    def from_mapping(cls, labels: Mapping[str, Label]) -> "Tree":
        for d in labels:
            if d and d[:-1] not in labels:
                raise ValueError(f"domain is not prefix closed at {d!r}")
            if set(d) - {"0", "1"}:
                raise ValueError(f"bad tree address {d!r}")
        return cls(tuple(sorted(labels.items())))

    @classmethod
    def node(cls, label: Label, left: "Tree" = None, right: "Tree" = None) -> "Tree":
        labels: Dict[str, Label] = {"": label}
        for prefix, sub in (("0", left), ("1", right)):
            if sub is not None:
                labels.update((prefix + d, x) for d, x in sub.items)
        return cls(tuple(sorted(labels.items())))

    @cached_property
    def labels(self) -> Dict[str, Label]:
        return dict(self.items)

    def __contains__(self, d: str) -> bool:
        return d in self.labels

    def __getitem__(self, d: str) -> Label:
        return self.labels[d]

    def __len__(self) -> int:
        return len(self.items)

    @property
    def domain(self) -> List[str]:
        return [d for d, _ in self.items]

    @property
    def is_empty(self) -> bool:
        return not self.items

    @property
    def depth(self) -> int:
        if not self.items:
            return 0
        return max(len(d) for d, _ in self.items) + 1

    def border(self) -> List[str]:
        """D⁺: the missing children of nodes (the root when the tree is empty)."""
        if not self.items:
            return [""]
        return sorted(d + x for d, _ in self.items for x in "01" if d + x not in self.labels)

    def subtree(self, d: str) -> "Tree":
        n = len(d)
        return Tree(tuple((e[n:], x) for e, x in self.items if e.startswith(d)))

    def graft(self, d: str, sub: "Tree") -> "Tree":
        """Replace the subtree at d (which may be a border node) by sub."""
        kept = {e: x for e, x in self.items if not e.startswith(d)}
        kept.update((d + e, x) for e, x in sub.items)
        return Tree(tuple(sorted(kept.items())))

    def lex_upto(self, d: str) -> "Tree":
        return Tree(tuple((e, x) for e, x in self.items if e <= d))

    def leaves(self) -> List[str]:
        return [d for d, _ in self.items if d + "0" not in self.labels and d + "1" not in self.labels]

    def relabel(self, f) -> "Tree":
        return Tree(tuple((d, f(x)) for d, x in self.items))


EMPTY_TREE = Tree()


def enumerate_trees(alphabet: Iterable[Label], depth: int) -> Iterator[Tree]:
    """Every tree of depth ≤ depth over the alphabet, the empty tree included."""
    symbols = sorted(alphabet, key=str)
    level: List[Tree] = [EMPTY_TREE]
    for _ in range(depth):
        level = [EMPTY_TREE] + [
            Tree.node(x, left, right) for x, left, right in product(symbols, level, level)
        ]
    yield from level


def convolve(trees: Sequence[Tree], padding: Label = BOX) -> Tree:
    """⊗(t1, …, tn): union domain, tuple labels, padding outside each component."""
    domain = sorted(set().union(*(t.labels for t in trees))) if trees else []
    return Tree(
        tuple((d, tuple(t.labels.get(d, padding) for t in trees)) for d in domain)
    )


def component(t: Tree, i: int, padding: Label = BOX) -> Tree:
    """The i-th tree of a convolution."""
    return Tree(tuple((d, x[i]) for d, x in t.items if x[i] != padding))


# -- text format ---------------------------------------------------------------

_LETTER_LABEL = re.compile(r"^\(\s*([^,\s()]+)\s*,\s*([12])\s*\)$")


def format_label(x: Any) -> str:
    if isinstance(x, tuple):
        if len(x) == 2 and isinstance(x[0], str) and isinstance(x[1], int):
            return f"({x[0]},{x[1]})"
        return "<" + "|".join(format_label(y) for y in x) + ">"
    return str(x)


def parse_label(text: str) -> Label:
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        body = text[1:-1]
        return tuple(parse_label(part) for part in body.split("|")) if body else ()
    match = _LETTER_LABEL.match(text)
    if match:
        return (resolve_alias(match.group(1)), int(match.group(2)))
    return resolve_alias(text)


def format_tree(t: Tree) -> str:
    lines = [FORMAT_HEADER, "tree"]
    lines.extend(f"{d or '.'} {format_label(x)}" for d, x in t.items)
    return "\n".join(lines) + "\n"


def parse_tree(text: str) -> Tree:
    lines = [
        (n, line.strip())
        for n, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith("#")
    ]
    if len(lines) < 2 or lines[0][1] != FORMAT_HEADER or lines[1][1] != "tree":
        raise SpecFormatError(f"expected header '{FORMAT_HEADER}' followed by 'tree'")
    labels: Dict[str, Label] = {}
    for number, line in lines[2:]:
        address, _, label = line.partition(" ")
        if not label.strip():
            raise SpecFormatError("expected 'address label'", number)
        address = "" if address == "." else address
        if address in labels:
            raise SpecFormatError(f"duplicate node {address or '.'}", number)
        labels[address] = parse_label(label)
    try:
        return Tree.from_mapping(labels)
    except ValueError as e:
        raise SpecFormatError(str(e))


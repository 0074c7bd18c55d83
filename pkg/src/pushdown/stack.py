"""Level-2 stacks with links, their operations and text format.

A stack is a tuple of words, a word is a tuple of letters; both are plain
immutable values. Operations return ``None`` when they are undefined.
"""

import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from src.core.errors import InvalidStackError, SpecFormatError

BOTTOM = "⊥"
BOX = "□"
TOP = "⊤"
EPSILON = "ε"

RESERVED = frozenset({BOTTOM, BOX, TOP, EPSILON})
ALIASES = {"_bot": BOTTOM, "_box": BOX, "_top": TOP, "_eps": EPSILON}


def resolve_alias(token: str) -> str:
    return ALIASES.get(token, token)


@dataclass(frozen=True, order=True)
class Letter:
    """A stack symbol with its link; level-1 letters always carry link 0."""

    sym: str
    level: int = 1
    link: int = 0

    def __post_init__(self):
        if self.level not in (1, 2):
            raise InvalidStackError(f"link level must be 1 or 2, got {self.level}")
        if self.level == 1 and self.link != 0:
            object.__setattr__(self, "link", 0)
        if self.link < 0:
            raise InvalidStackError(f"negative link width in {self.sym}")
        object.__setattr__(self, "_hash", hash((self.sym, self.level, self.link)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def label(self) -> Tuple[str, int]:
        return (self.sym, self.level)

    def down0(self) -> "Letter":
        return Letter(self.sym, self.level, 0)

    def __str__(self) -> str:
        if self.level == 1:
            return self.sym
        return f"({self.sym},2,{self.link})"


Word = Tuple[Letter, ...]
Stack = Tuple[Word, ...]

BOTTOM_LETTER = Letter(BOTTOM)
BOTTOM_WORD: Word = (BOTTOM_LETTER,)


def bottom_stack() -> Stack:
    return (BOTTOM_WORD,)


def word_of(*symbols: str) -> Word:
    """Level-1 word ⊥σ1…σn, handy for tests and fixtures."""
    return (BOTTOM_LETTER,) + tuple(Letter(s) for s in symbols)


# -- accessors ---------------------------------------------------------------


def top2(s: Stack) -> Word:
    return s[-1]


def top1(s: Stack) -> Letter:
    return s[-1][-1]


def sym(s: Stack) -> str:
    return s[-1][-1].sym


def lvl(s: Stack) -> int:
    return s[-1][-1].level


def lnk(s: Stack) -> int:
    return s[-1][-1].link


def width(s: Stack) -> int:
    return len(s)


def height(s: Stack) -> int:
    return max(len(w) for w in s)


def down0(w: Word) -> Word:
    return tuple(letter.down0() for letter in w)


def size(s: Stack) -> int:
    return sum(len(w) for w in s)


# -- validity ----------------------------------------------------------------


def stack_violation(s: Stack) -> Optional[str]:
    """Return a description of the first broken rule, or None for valid stacks."""
    if not s:
        return "empty stack"
    for i, w in enumerate(s):
        if not w:
            return f"word {i + 1} is empty"
        if w[0] != BOTTOM_LETTER:
            return f"word {i + 1} does not start with {BOTTOM}"
        for p, letter in enumerate(w):
            if p > 0 and letter.sym == BOTTOM:
                return f"word {i + 1} holds {BOTTOM} above the bottom"
            if letter.level != 2:
                continue
            if letter.link > i:
                return f"letter {letter} in word {i + 1} links above its own word"
            if letter.link < i:
                # inherited by clone from the word below
                prev = s[i - 1]
                if len(prev) <= p or prev[: p + 1] != w[: p + 1]:
                    return f"letter {letter} in word {i + 1} is not a clone"
    return None


def is_valid_stack(s: Stack) -> bool:
    return stack_violation(s) is None


def validate_stack(s: Stack) -> Stack:
    problem = stack_violation(s)
    if problem is not None:
        raise InvalidStackError(problem)
    return s


# -- operations --------------------------------------------------------------


class OpKind(str, Enum):
    PUSH = "Push"
    CLONE = "Clone2"
    POP1 = "Pop1"
    POP2 = "Pop2"
    COLLAPSE = "Collapse"
    ID = "Id"


@dataclass(frozen=True, order=True)
class Op:
    kind: OpKind
    sym: Optional[str] = None
    level: int = 1

    def __str__(self) -> str:
        if self.kind is OpKind.PUSH:
            return f"Push({self.sym},{self.level})"
        return self.kind.value

    @property
    def is_push(self) -> bool:
        return self.kind is OpKind.PUSH


def push(symbol: str, level: int = 1) -> Op:
    if level not in (1, 2):
        raise InvalidStackError(f"push level must be 1 or 2, got {level}")
    return Op(OpKind.PUSH, symbol, level)


CLONE = Op(OpKind.CLONE)
POP1 = Op(OpKind.POP1)
POP2 = Op(OpKind.POP2)
COLLAPSE = Op(OpKind.COLLAPSE)
ID = Op(OpKind.ID)

_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_PUSH_RE = re.compile(r"^Push\(\s*([^,\s()]+)\s*(?:,\s*([12])\s*)?\)$")
_SIMPLE_OPS = {
    "clone2": CLONE,
    "clone": CLONE,
    "pop1": POP1,
    "pop": POP1,
    "pop2": POP2,
    "collapse": COLLAPSE,
    "id": ID,
}


def parse_op(text: str) -> Op:
    token = text.strip().translate(_SUBSCRIPTS)
    match = _PUSH_RE.match(token)
    if match:
        return push(resolve_alias(match.group(1)), int(match.group(2) or 1))
    op = _SIMPLE_OPS.get(token.lower())
    if op is None:
        raise SpecFormatError(f"unknown stack operation {text!r}")
    return op


def pop1(s: Stack) -> Optional[Stack]:
    w = s[-1]
    if len(w) <= 1:
        return None
    return s[:-1] + (w[:-1],)


def pop2(s: Stack) -> Optional[Stack]:
    if len(s) <= 1:
        return None
    return s[:-1]


def collapse(s: Stack) -> Optional[Stack]:
    letter = s[-1][-1]
    if letter.level == 1:
        return pop1(s)
    if letter.link == 0:
        return None
    return s[: letter.link]


def apply_op(s: Stack, op: Op) -> Optional[Stack]:
    """Apply one operation; undefined results are None."""
    kind = op.kind
    if kind is OpKind.PUSH:
        link = len(s) - 1 if op.level == 2 else 0
        return s[:-1] + (s[-1] + (Letter(op.sym, op.level, link),),)
    if kind is OpKind.CLONE:
        return s + (s[-1],)
    if kind is OpKind.POP1:
        return pop1(s)
    if kind is OpKind.POP2:
        return pop2(s)
    if kind is OpKind.COLLAPSE:
        return collapse(s)
    return s


def apply_ops(s: Stack, ops: Iterable[Op]) -> Optional[Stack]:
    current: Optional[Stack] = s
    for op in ops:
        if current is None:
            return None
        current = apply_op(current, op)
    return current


# -- prefix and substack relations -------------------------------------------


def is_word_prefix(v: Sequence[Letter], w: Sequence[Letter]) -> bool:
    return len(v) <= len(w) and tuple(w[: len(v)]) == tuple(v)


def is_prefix(s: Stack, t: Stack) -> bool:
    """s ⊑ t: same lower words, and s's top word prefixes every later word of t."""
    n = len(s)
    if n > len(t) or s[:-1] != t[: n - 1]:
        return False
    return all(is_word_prefix(s[-1], w) for w in t[n - 1 :])


def is_substack(s: Stack, t: Stack) -> bool:
    """s = Pop1^m(Pop2^n(t)) for some m, n."""
    n = len(s)
    if n > len(t) or s[:-1] != t[: n - 1]:
        return False
    return is_word_prefix(s[-1], t[n - 1])


# -- text format -------------------------------------------------------------


def format_word(w: Word) -> str:
    return "[" + " ".join(str(letter) for letter in w) + "]"


def format_stack(s: Stack) -> str:
    return ":".join(format_word(w) for w in s)


_LETTER_RE = re.compile(r"\(\s*([^,\s()]+)\s*,\s*([12])\s*(?:,\s*(\d+)\s*)?\)|([^\s()\[\]:]+)")
_WORD_RE = re.compile(r"\[([^\[\]]*)\]")


def parse_word(text: str) -> Word:
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    letters: List[Letter] = []
    pos = 0
    while pos < len(body):
        if body[pos].isspace():
            pos += 1
            continue
        match = _LETTER_RE.match(body, pos)
        if not match:
            raise InvalidStackError(f"cannot parse letter at {body[pos:]!r}")
        if match.group(4) is not None:
            letters.append(Letter(resolve_alias(match.group(4))))
        else:
            level = int(match.group(2))
            link = int(match.group(3) or 0)
            letters.append(Letter(resolve_alias(match.group(1)), level, link))
        pos = match.end()
    return tuple(letters)


def parse_stack(text: str, validate: bool = True) -> Stack:
    """Parse ``[⊥ a (b,2,1)]:[⊥ a]``; aliases _bot, _box, _top are accepted."""
    source = text.strip()
    words = _WORD_RE.findall(source)
    rebuilt = ":".join(f"[{w}]" for w in words)
    if not words or re.sub(r"\s*:\s*", ":", source) != rebuilt:
        raise InvalidStackError(f"malformed stack text {text!r}")
    s = tuple(parse_word(w) for w in words)
    return validate_stack(s) if validate else s


# -- random stacks for property tests ----------------------------------------


def random_valid_stack(
    rng: random.Random,
    symbols: Sequence[str] = ("a", "b"),
    steps: int = 12,
) -> Stack:
    """A stack generated by a random sequence of defined operations."""
    ops = [push(x, level) for x in symbols for level in (1, 2)] + [CLONE, POP1, POP2, COLLAPSE]
    s = bottom_stack()
    for _ in range(steps):
        result = apply_op(s, rng.choice(ops))
        if result is not None:
            s = result
    return s

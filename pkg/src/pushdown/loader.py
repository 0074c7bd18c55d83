"""Reading and writing ``.cps`` system files.

    cpg2kit-format 1
    level: 2
    states: q0, q1
    initial: q0
    alphabet: a, b
    labels: Cl, A          (optional)
    transitions:
    q0, *, Cl, q1, Clone2
    q1, a, A, q0, Push(b,2)
"""

from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple, Union

from src.core.errors import ReservedSymbolError, SpecFormatError
from src.core.logger import logger
from src.pushdown.stack import (
    BOTTOM,
    BOX,
    EPSILON,
    RESERVED,
    TOP,
    Op,
    OpKind,
    parse_op,
    resolve_alias,
)
from src.pushdown.system import Cps, Transition

FORMAT_HEADER = "cpg2kit-format 1"
WILDCARDS = frozenset({"*", "-", "−"})
_LEVEL1_OPS = frozenset({OpKind.PUSH, OpKind.POP1, OpKind.ID})


def _split_list(value: str) -> List[str]:
    return [resolve_alias(x.strip()) for x in value.split(",") if x.strip()]


def _check_header(lines: List[Tuple[int, str]]) -> List[Tuple[int, str]]:
    if not lines or lines[0][1] != FORMAT_HEADER:
        line = lines[0][0] if lines else 1
        raise SpecFormatError(f"expected header '{FORMAT_HEADER}'", line)
    return lines[1:]


def significant_lines(text: str) -> List[Tuple[int, str]]:
    """Non-blank lines that are not ``#`` comments, with 1-based numbers."""
    result = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            result.append((number, line))
    return result


def _normalize_labels(rows: List[Transition]) -> List[Transition]:
    """Rename labels so that each label determines (target, op)."""
    meaning: Dict[Hashable, Tuple[Hashable, Op]] = {}
    renamed: Dict[Tuple[Hashable, Hashable, Op], Hashable] = {}
    counters: Dict[Hashable, int] = {}
    result = []
    for t in rows:
        key = (t.target, t.op)
        first = meaning.setdefault(t.label, key)
        if first == key:
            result.append(t)
            continue
        fresh = renamed.get((t.label,) + key)
        if fresh is None:
            counters[t.label] = counters.get(t.label, 0) + 1
            fresh = f"{t.label}#{counters[t.label]}"
            renamed[(t.label,) + key] = fresh
            meaning[fresh] = key
            logger.warning(
                f"Label {t.label} is used with different targets; renamed to {fresh} "
                f"for ({t.target}, {t.op})"
            )
        result.append(Transition(t.state, t.sym, fresh, t.target, t.op))
    return result


def parse_spec(text: str, name: str = "") -> Cps:
    """Parse system text into a :class:`Cps`; errors carry the line number."""
    lines = _check_header(significant_lines(text))
    header: Dict[str, str] = {}
    rows: List[Tuple[int, str]] = []
    in_table = False
    for number, line in lines:
        if in_table:
            rows.append((number, line))
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise SpecFormatError(f"expected 'key: value', got {line!r}", number)
        if key == "transitions":
            in_table = True
            if value.strip():
                raise SpecFormatError("transition rows start on the next line", number)
            continue
        if key in header:
            raise SpecFormatError(f"duplicate key {key!r}", number)
        header[key] = value.strip()

    for required in ("states", "initial", "alphabet"):
        if required not in header:
            raise SpecFormatError(f"missing key {required!r}")

    try:
        level = int(header.get("level", "2"))
    except ValueError:
        raise SpecFormatError(f"level must be 1 or 2, got {header['level']!r}")
    if level not in (1, 2):
        raise SpecFormatError(f"level must be 1 or 2, got {level}")

    states = _split_list(header["states"])
    for q in states:
        if q in RESERVED:
            raise ReservedSymbolError(f"state name {q!r} is reserved")
    initial = resolve_alias(header["initial"])
    if initial not in states:
        raise SpecFormatError(f"initial state {initial!r} is not declared")

    alphabet = [BOTTOM]
    for x in _split_list(header["alphabet"]):
        if x in (BOX, TOP, EPSILON):
            raise ReservedSymbolError(f"stack symbol {x!r} is reserved")
        if x not in alphabet:
            alphabet.append(x)

    labels: List[Hashable] = _split_list(header.get("labels", ""))
    transitions: List[Transition] = []
    for number, row in rows:
        cells = [c.strip() for c in row.split(",", 4)]
        if len(cells) != 5:
            raise SpecFormatError(f"transition row needs 5 fields, got {row!r}", number)
        q, guard, label, target, op_text = cells
        guard = resolve_alias(guard)
        for state in (q, target):
            if state not in states:
                raise SpecFormatError(f"undeclared state {state!r}", number)
        try:
            op = parse_op(op_text)
        except SpecFormatError as e:
            raise SpecFormatError(str(e), number)
        if op.kind is OpKind.PUSH:
            if op.sym == BOTTOM or op.sym in (BOX, TOP, EPSILON):
                raise ReservedSymbolError(f"line {number}: cannot push {op.sym}")
            if op.sym not in alphabet:
                raise SpecFormatError(f"push of undeclared symbol {op.sym!r}", number)
        if level == 1 and (op.kind not in _LEVEL1_OPS or (op.is_push and op.level == 2)):
            raise SpecFormatError(f"{op} is not a level-1 operation", number)
        if guard in WILDCARDS:
            guards = list(alphabet)
        elif guard in (BOX, TOP, EPSILON):
            raise ReservedSymbolError(f"line {number}: guard {guard!r} is reserved")
        elif guard not in alphabet:
            raise SpecFormatError(f"undeclared stack symbol {guard!r}", number)
        else:
            guards = [guard]
        for x in guards:
            transitions.append(Transition(q, x, label, target, op))

    transitions = _normalize_labels(transitions)
    for t in transitions:
        if t.label not in labels:
            labels.append(t.label)

    cps = Cps(
        states=tuple(states),
        alphabet=tuple(alphabet),
        labels=tuple(labels),
        initial=initial,
        transitions=tuple(transitions),
        level=level,
        name=name,
    )
    logger.info(
        f"Loaded system {name or '<text>'}: {len(states)} states, "
        f"{len(alphabet)} symbols, {len(transitions)} transitions"
    )
    return cps


def load_spec(path: Union[str, Path]) -> Cps:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), name=path.stem)


def format_spec(cps: Cps) -> str:
    """Serialize a system; wildcards are written out symbol by symbol."""
    lines = [
        FORMAT_HEADER,
        f"level: {cps.level}",
        f"states: {', '.join(str(q) for q in cps.states)}",
        f"initial: {cps.initial}",
        f"alphabet: {', '.join(cps.user_symbols)}",
        f"labels: {', '.join(str(x) for x in cps.labels)}",
        "transitions:",
    ]
    lines.extend(str(t) for t in cps.transitions)
    return "\n".join(lines) + "\n"


def find_transition(cps: Cps, label: Hashable, state: Optional[str] = None) -> Transition:
    for t in cps.transitions:
        if t.label == label and (state is None or t.state == state):
            return t
    raise SpecFormatError(f"no transition labelled {label!r}")

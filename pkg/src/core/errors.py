"""Exception hierarchy shared by every cpg2kit module.

Undefined stack operations are not errors: they are reported as ``None``.
Everything below signals malformed input, a violated precondition or an
exhausted resource.
"""

from typing import Optional


class Cpg2kitError(Exception):
    """Base class of all domain errors."""


class InvalidStackError(Cpg2kitError):
    """A stack violates the bottom-symbol, link-range or clone-validity rules."""


class SpecFormatError(Cpg2kitError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ReservedSymbolError(Cpg2kitError):
    """A reserved symbol (⊥ misuse, □, ⊤, ε) appears where it is not allowed."""


class ResourceLimitError(Cpg2kitError):
    def __init__(self, limit: str, value: int):
        self.limit = limit
        self.value = value
        super().__init__(f"resource limit '{limit}' exceeded ({value})")


class PreconditionError(Cpg2kitError):
    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        suffix = f": {detail}" if detail else ""
        super().__init__(f"precondition '{clause}' violated{suffix}")


class NotEncTreeError(Cpg2kitError):
    def __init__(self, condition: str, node: Optional[str] = None):
        self.condition = condition
        self.node = node
        at = f" at node {node!r}" if node is not None else ""
        super().__init__(f"not an encoding tree: condition {condition}{at}")


class FormulaSyntaxError(Cpg2kitError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class AlphabetMismatchError(Cpg2kitError):
    """Two automata combined by a product construction disagree on the alphabet."""


class NonFinitaryError(Cpg2kitError):
    """A quantifier constraint cannot be enumerated."""


class CollapseNotAllowedError(Cpg2kitError):
    """A level-2 nested pushdown tree was requested for a system using links."""

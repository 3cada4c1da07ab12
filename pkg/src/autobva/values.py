"""Value domain shared by all subject programs.

Arguments are arbitrary-precision integers or booleans.  Python's ``bool``
is a subtype of ``int``, which mirrors the integer type hierarchy the
subject programs were written against (``true + 1 == 2``), so values are
plain ``bool``/``int`` objects and an input is just a tuple of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

Value = int  # bool is accepted anywhere a Value is; isinstance(v, bool) distinguishes
InputTuple = tuple        # tuple[Value, ...]

BOUNDS_ERROR = "bounds_error"
ARGUMENT_ERROR = "argument_error"
DOMAIN_ERROR = "domain_error"

_ERROR_LABELS = {
    BOUNDS_ERROR: "BoundsError",
    ARGUMENT_ERROR: "ArgumentError",
    DOMAIN_ERROR: "DomainError",
}


def render_value(v: Value) -> str:
    """Render a value the way the subject programs print it.

    Booleans render as ``false``/``true``; integers as plain decimal with a
    leading ``-`` for negatives and no digit grouping.
    """
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def parse_value(text: str) -> Value:
    if text == "true":
        return True
    if text == "false":
        return False
    return int(text)


def render_tuple(values: InputTuple) -> str:
    """Semicolon-joined rendering, used as one half of a candidate's identity key."""
    return ";".join(render_value(v) for v in values)


def parse_tuple(text: str) -> InputTuple:
    if text == "":
        return ()
    return tuple(parse_value(part) for part in text.split(";"))


def display_tuple(values: InputTuple) -> str:
    """Human-facing rendering: bare value for arity 1, ``(a,b,...)`` otherwise."""
    if len(values) == 1:
        return render_value(values[0])
    return "(" + ",".join(render_value(v) for v in values) + ")"


@dataclass(frozen=True)
class ExecutionOutcome:
    """The observed result of one execution: a rendered output or a captured error.

    ``text`` is the string the rest of the pipeline compares; for errors it is
    the rendered error (e.g. ``BoundsError("kMGTPE", 7)``) so that two distinct
    errors can still be told apart by string distance.
    """

    text: str
    error_kind: Optional[str] = None   # None for valid outcomes
    payload: dict = field(default_factory=dict, compare=False)

    @property
    def is_valid(self) -> bool:
        return self.error_kind is None

    @property
    def status(self) -> str:
        return "valid" if self.error_kind is None else "error"


def valid_outcome(text: str) -> ExecutionOutcome:
    return ExecutionOutcome(text=text)


def error_outcome(kind: str, message: str, **payload) -> ExecutionOutcome:
    """Build an error outcome with the canonical ``Kind("message")`` text."""
    label = _ERROR_LABELS.get(kind, "Error")
    return ExecutionOutcome(text=f'{label}("{message}")', error_kind=kind, payload=dict(payload))


def bounds_error(accessed: str, index: int) -> ExecutionOutcome:
    """Out-of-range string access, rendered like ``BoundsError("kMGTPE", 7)``."""
    return ExecutionOutcome(
        text=f'BoundsError("{accessed}", {index})',
        error_kind=BOUNDS_ERROR,
        payload={"accessed": accessed, "index": int(index)},
    )

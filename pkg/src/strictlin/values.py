"""Scalar values flowing through histories, object states and client programs.

A value is an integer, a symbol (a short printable token such as ``'c'``),
or one of three reserved constants:

* ``NULL``  -- the empty array-cell marker,
* ``EMPTY`` -- the "nothing to dequeue" return,
* ``UNIT``  -- the return of a method that returns nothing.

The reserved constants are distinct from every integer and symbol and from
each other.
"""

from __future__ import annotations

import enum
from typing import Union


class Special(enum.Enum):
    NULL = "null"
    EMPTY = "EMPTY"
    UNIT = "unit"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return self.value


NULL = Special.NULL
EMPTY = Special.EMPTY
UNIT = Special.UNIT

#: A symbol is a plain ``str``; an integer a plain ``int``.
Value = Union[int, str, Special]

_RESERVED_TOKENS = {s.value for s in Special}


def render_value(v: Value) -> str:
    """Render a value in the history-file syntax (``5``, ``'c'``, ``null``...)."""
    if isinstance(v, Special):
        return v.value
    if isinstance(v, bool):  # bool is an int subclass; forbid silently odd output
        raise TypeError(f"not a history value: {v!r}")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return f"'{v}'"
    raise TypeError(f"not a history value: {v!r}")


def parse_value(token: str) -> Value:
    """Inverse of :func:`render_value`.

    Raises ``ValueError`` on anything that does not round-trip.
    """
    if token in _RESERVED_TOKENS:
        return Special(token)
    if token.startswith("'") and token.endswith("'") and len(token) >= 3:
        sym = token[1:-1]
        if sym and "'" not in sym and not sym.isspace():
            return sym
        raise ValueError(f"bad symbol token: {token!r}")
    try:
        return int(token, 10)
    except ValueError:
        raise ValueError(f"bad value token: {token!r}") from None


def value_key(v: Value) -> tuple:
    """Total order over values, used for canonical renderings and multisets."""
    if isinstance(v, Special):
        return (2, v.value)
    if isinstance(v, int):
        return (0, v)
    return (1, v)

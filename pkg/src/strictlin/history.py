"""Histories of invocation/response events and the linearization relation.

A history is the subsequence of an execution trace consisting of invocation
and response events.  Each method call (an *operation*) carries a unique
integer operation id; an invocation matches a response when their ids are
equal.  On top of histories this module provides the per-thread projection,
well-formedness and sequentiality tests, pending-operation completion
enumeration, the happened-before order on operations, and the linearization
relation ``linearizes(h, h_seq)``.

Everything here is immutable and purely functional.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .values import Value, parse_value, render_value

# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Inv:
    """Invocation of ``method`` with one argument value."""

    method: str
    arg: Value


@dataclass(frozen=True)
class Ret:
    """Normal response carrying the return value."""

    value: Value


@dataclass(frozen=True)
class RetAbort:
    """Response closing an operation that hit a runtime error."""


@dataclass(frozen=True)
class Act:
    """An atomic action; ``action`` is a human-readable descriptor.

    Client actions carry no operation id on their event; actions inside a
    method body carry the operation's id.
    """

    action: str


Label = Union[Inv, Ret, RetAbort, Act]


@dataclass(frozen=True)
class Event:
    """One step of a trace: thread id, label, optional operation id."""

    thread: int
    label: Label
    op: Optional[int] = None

    def __post_init__(self) -> None:
        if isinstance(self.label, (Inv, Ret, RetAbort)) and self.op is None:
            raise ValueError(f"interface event without operation id: {self}")

    @property
    def is_client(self) -> bool:
        return isinstance(self.label, Act) and self.op is None

    @property
    def is_interface(self) -> bool:
        return isinstance(self.label, (Inv, Ret, RetAbort))

    def render(self) -> str:
        lab = self.label
        if isinstance(lab, Inv):
            return f"t={self.thread} op={self.op} inv {lab.method} {render_value(lab.arg)}"
        if isinstance(lab, Ret):
            return f"t={self.thread} op={self.op} ret {render_value(lab.value)}"
        if isinstance(lab, RetAbort):
            return f"t={self.thread} op={self.op} abort"
        if self.op is None:
            return f"t={self.thread} act {lab.action}"
        return f"t={self.thread} op={self.op} act {lab.action}"


def inv(thread: int, op: int, method: str, arg: Value) -> Event:
    return Event(thread, Inv(method, arg), op)


def ret(thread: int, op: int, value: Value) -> Event:
    return Event(thread, Ret(value), op)


def ret_abort(thread: int, op: int) -> Event:
    return Event(thread, RetAbort(), op)


# ---------------------------------------------------------------------------
# Histories
# ---------------------------------------------------------------------------


class HistoryError(ValueError):
    """Structurally invalid history (duplicate ids, stray events...)."""


@dataclass(frozen=True)
class History:
    """A finite sequence of invocation/response events.

    Structural invariants enforced at construction: only interface events,
    and each operation id has at most one ``Inv`` and at most one
    ``Ret``/``RetAbort``.  Per-thread well-formedness is a separate property
    of valid histories: see :func:`is_well_formed`.
    """

    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        invs: set[int] = set()
        rets: set[int] = set()
        for e in self.events:
            if not e.is_interface:
                raise HistoryError(f"non-interface event in history: {e}")
            assert e.op is not None
            if isinstance(e.label, Inv):
                if e.op in invs:
                    raise HistoryError(f"duplicate invocation for op {e.op}")
                invs.add(e.op)
            else:
                if e.op in rets:
                    raise HistoryError(f"duplicate response for op {e.op}")
                rets.add(e.op)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __getitem__(self, i: int) -> Event:
        return self.events[i]

    def threads(self) -> tuple[int, ...]:
        return tuple(sorted({e.thread for e in self.events}))

    def operations(self) -> tuple[int, ...]:
        """Operation ids in order of invocation (un-invoked responses ignored)."""
        return tuple(e.op for e in self.events if isinstance(e.label, Inv))  # type: ignore[misc]


def history(events: Iterable[Event]) -> History:
    return History(tuple(events))


def project_thread(h: History, thread: int) -> History:
    """Maximal subsequence of ``h`` with the given thread id, order preserved."""
    return History(tuple(e for e in h if e.thread == thread))


def is_sequential(h: History) -> bool:
    """True iff every response is immediately preceded by its matching invocation.

    Equivalently: the history alternates Inv/Ret pairs of equal op ids,
    possibly ending in one trailing invocation.
    """
    prev: Optional[Event] = None
    for e in h:
        if isinstance(e.label, (Ret, RetAbort)):
            if prev is None or not isinstance(prev.label, Inv) or prev.op != e.op:
                return False
        prev = e
    # every invocation except possibly the last must be followed by its response
    for i, e in enumerate(h.events[:-1]):
        if isinstance(e.label, Inv):
            nxt = h.events[i + 1]
            if not (isinstance(nxt.label, (Ret, RetAbort)) and nxt.op == e.op):
                return False
    return True


def is_well_formed(h: History) -> bool:
    """True iff every per-thread projection is sequential."""
    return all(is_sequential(project_thread(h, t)) for t in h.threads())


def is_complete(h: History) -> bool:
    """True iff well-formed and every invocation has a matching response."""
    return is_well_formed(h) and not pending(h)


def pending(h: History) -> frozenset[int]:
    """Operation ids with an invocation but no response."""
    invs = {e.op for e in h if isinstance(e.label, Inv)}
    rets = {e.op for e in h if isinstance(e.label, (Ret, RetAbort))}
    return frozenset(invs - rets)  # type: ignore[arg-type]


def completions(
    h: History, candidates: Mapping[int, Sequence[Value]]
) -> Iterator[History]:
    """Enumerate every completion of ``h``.

    Operations already closed by ``RetAbort`` stay closed as they are.  Each
    remaining pending operation is either dropped (its invocation removed) or
    closed by a response appended at the end, with the return value drawn
    from ``candidates[op]``; every append order of the added responses is
    produced.  For a complete history the stream contains exactly ``h``.
    """
    pend = sorted(pending(h))
    by_op = {e.op: e for e in h if isinstance(e.label, Inv)}
    for r in range(len(pend) + 1):
        for closed in itertools.combinations(pend, r):
            dropped = set(pend) - set(closed)
            base = tuple(e for e in h if not (e.op in dropped))
            for order in itertools.permutations(closed):
                pools = [tuple(candidates.get(o, ())) for o in order]
                for vals in itertools.product(*pools):
                    tail = tuple(
                        ret(by_op[o].thread, o, v) for o, v in zip(order, vals)
                    )
                    yield History(base + tail)


# ---------------------------------------------------------------------------
# Happened-before and the linearization relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpOrder:
    """Strict partial order on operation ids: ``o`` before ``o'`` when the
    response of ``o`` precedes the invocation of ``o'`` in the history."""

    pairs: frozenset[tuple[int, int]]

    def precedes(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def issubset(self, other: "OpOrder") -> bool:
        return self.pairs <= other.pairs

    def predecessors(self, b: int) -> frozenset[int]:
        return frozenset(a for (a, bb) in self.pairs if bb == b)


def happened_before(h: History) -> OpOrder:
    pairs = set()
    ret_at: dict[int, int] = {}
    for i, e in enumerate(h):
        if isinstance(e.label, (Ret, RetAbort)):
            ret_at[e.op] = i  # type: ignore[index]
    for j, e in enumerate(h):
        if isinstance(e.label, Inv):
            for o, i in ret_at.items():
                if i < j and o != e.op:
                    pairs.add((o, e.op))
    return OpOrder(frozenset(pairs))


def linearizes(h: History, h_seq: History) -> bool:
    """The linearization relation on histories.

    ``h_seq`` must be a permutation of ``h`` with identical per-thread
    projections, and the order of non-overlapping operations in ``h`` must
    be preserved.  Because operation ids are unique, the only candidate
    event bijection is the identity on events, so the order condition
    reduces to containment of happened-before orders.
    """
    if h.threads() != h_seq.threads():
        return False
    for t in h.threads():
        if project_thread(h, t) != project_thread(h_seq, t):
            return False
    return happened_before(h).issubset(happened_before(h_seq))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


class HistoryParseError(ValueError):
    """Malformed history file; message names the offending line."""


def serialize_history(h: History) -> str:
    """One event per line, in the format accepted by :func:`parse_history`."""
    return "".join(e.render() + "\n" for e in h)


def _parse_fields(parts: list[str], lineno: int) -> tuple[int, int]:
    if len(parts) < 3 or not parts[0].startswith("t=") or not parts[1].startswith("op="):
        raise HistoryParseError(f"line {lineno}: expected 't=<int> op=<int> ...'")
    try:
        return int(parts[0][2:]), int(parts[1][3:])
    except ValueError:
        raise HistoryParseError(f"line {lineno}: bad thread/op id") from None


def parse_history(text: str) -> History:
    """Parse the line format; ``#`` starts a comment, blank lines are skipped.

    Round-trip law: ``parse_history(serialize_history(h)) == h``.
    """
    events: list[Event] = []
    seen_inv: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        t, op = _parse_fields(parts, lineno)
        kind = parts[2]
        if kind == "inv":
            if len(parts) != 5:
                raise HistoryParseError(
                    f"line {lineno}: expected 'inv <method> <value>'"
                )
            try:
                arg = parse_value(parts[4])
            except ValueError as exc:
                raise HistoryParseError(f"line {lineno}: {exc}") from None
            events.append(inv(t, op, parts[3], arg))
            seen_inv.add(op)
        elif kind == "ret":
            if len(parts) != 4:
                raise HistoryParseError(f"line {lineno}: expected 'ret <value>'")
            if op not in seen_inv:
                raise HistoryParseError(
                    f"line {lineno}: response for op {op} with no prior invocation"
                )
            try:
                val = parse_value(parts[3])
            except ValueError as exc:
                raise HistoryParseError(f"line {lineno}: {exc}") from None
            events.append(ret(t, op, val))
        elif kind == "abort":
            if len(parts) != 3:
                raise HistoryParseError(f"line {lineno}: expected 'abort'")
            if op not in seen_inv:
                raise HistoryParseError(
                    f"line {lineno}: abort for op {op} with no prior invocation"
                )
            events.append(ret_abort(t, op))
        else:
            raise HistoryParseError(f"line {lineno}: unknown event kind {kind!r}")
    try:
        return History(tuple(events))
    except HistoryError as exc:
        raise HistoryParseError(str(exc)) from None

"""Sequential specifications, abstract data types, and refinement checks.

A sequential specification describes an object in the absence of
concurrency.  Methods are *relations*: applying a method to a state and an
input yields a finite, possibly empty set of (state', output) pairs.  An
empty outcome set means the pair is outside the method's domain (the method
blocks there); deterministic methods yield singletons.

An ADT is a sequential specification over abstract states with one
distinguished initial state.  Abstraction functions map well-formed concrete
states to abstract states; renaming functions map concrete method names to
abstract ones.  The refinement checks here are bounded: they sample a finite
enumeration of states and inputs and report a verdict over that sample,
never a proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .history import History, Inv, Ret, is_sequential
from .values import EMPTY, UNIT, Value, render_value, value_key

State = Hashable
Outcome = tuple[State, Value]
MethodRelation = Callable[[State, Value], Iterable[Outcome]]


class UnknownMethodError(ValueError):
    pass


@dataclass
class SeqSpec:
    """A sequential specification: state domain plus per-method relations.

    ``methods`` maps method names to relations; ``initial_states`` lists the
    designated start states for checks; ``is_state`` is the state-domain
    membership predicate; ``method_inputs`` gives the finite input sample
    used by refinement checks (methods that take no argument use ``UNIT``).
    ``state_key`` canonicalizes states for equality of observable state sets;
    ``render_state`` produces the canonical text rendering.
    """

    name: str
    methods: Mapping[str, MethodRelation]
    initial_states: tuple[State, ...]
    is_state: Callable[[State], bool] = lambda s: True
    method_inputs: Mapping[str, tuple[Value, ...]] = field(default_factory=dict)
    state_key: Callable[[State], Hashable] = lambda s: s
    render_state: Callable[[State], str] = repr
    cells: Optional["CellAccess"] = None
    from_contents: Optional[Callable[[tuple[Value, ...]], State]] = None

    def method_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.methods))

    def seed_state(self, contents: Sequence[Value]) -> State:
        """Build a start state holding ``contents``, front first."""
        if self.from_contents is None:
            raise ValueError(f"{self.name}: no contents-based initial state")
        return self.from_contents(tuple(contents))


@dataclass
class Adt(SeqSpec):
    """A sequential specification with a distinguished initial state."""

    @property
    def initial_state(self) -> State:
        return self.initial_states[0]


@dataclass(frozen=True)
class CellAccess:
    """Direct-access hooks for object cells exposed to client programs."""

    read: Callable[[State, tuple], Value]
    write: Callable[[State, tuple, Value], State]


class CellError(ValueError):
    """Raised by cell accessors on a bad address or value (a runtime error)."""


def apply(spec: SeqSpec, method: str, state: State, inp: Value) -> frozenset[Outcome]:
    """Outcome set of ``method`` at ``(state, inp)``; empty = out of domain."""
    try:
        rel = spec.methods[method]
    except KeyError:
        raise UnknownMethodError(f"{spec.name}: unknown method {method!r}") from None
    return frozenset(rel(state, inp))


def in_domain(spec: SeqSpec, method: str, state: State, inp: Value) -> bool:
    return bool(apply(spec, method, state, inp))


def legal_seq_outcomes(spec: SeqSpec, start: State, h_seq: History) -> frozenset[State]:
    """Final states of legal sequential executions of ``h_seq`` from ``start``.

    The history must be complete and sequential.  State is threaded through
    each (method, argument, return) triple, keeping only spec outcomes whose
    output equals the recorded return.  An empty result means the history is
    not legal from ``start``.
    """
    if not is_sequential(h_seq):
        raise ValueError("history is not sequential")
    states: set[State] = {start}
    ev = list(h_seq)
    for i in range(0, len(ev) - 1, 2):
        call, resp = ev[i], ev[i + 1]
        assert isinstance(call.label, Inv)
        if not isinstance(resp.label, Ret):
            return frozenset()
        nxt: set[State] = set()
        for s in states:
            for s2, out in apply(spec, call.label.method, s, call.label.arg):
                if out == resp.label.value:
                    nxt.add(s2)
        states = nxt
        if not states:
            return frozenset()
    if len(ev) % 2:
        raise ValueError("history is not complete")
    return frozenset(states)


# ---------------------------------------------------------------------------
# Abstraction and renaming
# ---------------------------------------------------------------------------


@dataclass
class AbstractionFunction:
    """Total map from well-formed concrete states to abstract states.

    ``domain`` guards application (well-formedness of the concrete state);
    applying outside it raises.  ``inverse`` is the injectivity certificate:
    it is populated lazily by :func:`injectivity_scan` and maps every image
    seen so far back to its unique preimage.
    """

    name: str
    fn: Callable[[State], State]
    domain: Callable[[State], bool] = lambda s: True
    inverse: dict = field(default_factory=dict)

    def __call__(self, state: State) -> State:
        if not self.domain(state):
            raise ValueError(f"{self.name}: state outside abstraction domain")
        return self.fn(state)


@dataclass(frozen=True)
class RenamingFunction:
    """Bijection from concrete method names to abstract method names."""

    mapping: tuple[tuple[str, str], ...]

    @staticmethod
    def of(d: Mapping[str, str]) -> "RenamingFunction":
        if len(set(d.values())) != len(d):
            raise ValueError("renaming is not injective")
        return RenamingFunction(tuple(sorted(d.items())))

    @staticmethod
    def identity(names: Iterable[str]) -> "RenamingFunction":
        return RenamingFunction.of({n: n for n in names})

    def forward(self, name: str) -> str:
        for a, b in self.mapping:
            if a == name:
                return b
        raise UnknownMethodError(f"renaming: unknown concrete method {name!r}")

    def backward(self, name: str) -> str:
        for a, b in self.mapping:
            if b == name:
                return a
        raise UnknownMethodError(f"renaming: unknown abstract method {name!r}")

    def concrete_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.mapping)


def injectivity_scan(
    af: AbstractionFunction, states: Iterable[State], key: Callable[[State], Hashable]
) -> list[tuple[State, State]]:
    """Scan ``states`` for abstraction-image collisions.

    Returns the list of colliding state pairs (empty iff injective on the
    sample) and extends ``af.inverse`` with every collision-free image.
    States equal under ``key`` are the same state and never collide.
    """
    seen: dict[Hashable, State] = {}
    collisions: list[tuple[State, State]] = []
    for s in states:
        img = af(s)
        k = key(s)
        if img in seen and seen[img] != k:
            collisions.append((s, img))
        else:
            seen[img] = k
            af.inverse[img] = s
    return collisions


# ---------------------------------------------------------------------------
# Refinement checks (bounded, over sampled states)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImplCounterexample:
    state: State
    method: str  # abstract method name
    inp: Value
    detail: str


@dataclass(frozen=True)
class ImplVerdict:
    ok: bool
    states_checked: int
    counterexample: Optional[ImplCounterexample] = None


def _inputs_for(spec: SeqSpec, method: str) -> tuple[Value, ...]:
    return tuple(spec.method_inputs.get(method, (UNIT,)))


def is_sequential_implementation(
    model_spec: SeqSpec,
    adt: Adt,
    af: AbstractionFunction,
    rf: RenamingFunction,
    states: Iterable[State],
) -> ImplVerdict:
    """Check that ``model_spec`` implements ``adt`` through ``af``/``rf``.

    For every sampled concrete state, abstract method and input whose
    abstract application is in-domain, every concrete outcome of the renamed
    method must be matched by an abstract outcome with the same return value
    and an abstraction-consistent next state.  Where the abstract method is
    out of its domain the concrete one is unconstrained.  Deterministic
    specs degenerate to outcome-for-outcome equality modulo abstraction.
    """
    n = 0
    for sz in states:
        n += 1
        sa = af(sz)
        for aop in adt.method_names():
            zop = rf.backward(aop)
            for inp in _inputs_for(adt, aop):
                abstract = apply(adt, aop, sa, inp)
                if not abstract:
                    continue
                for sz2, out in apply(model_spec, zop, sz, inp):
                    hits = [
                        (sa2, aout)
                        for sa2, aout in abstract
                        if aout == out and sa2 == af(sz2)
                    ]
                    if not hits:
                        return ImplVerdict(
                            False,
                            n,
                            ImplCounterexample(
                                sz,
                                aop,
                                inp,
                                f"concrete outcome ({model_spec.render_state(sz2)}, "
                                f"{render_value(out)}) has no abstract match",
                            ),
                        )
    return ImplVerdict(True, n)


def check_domain_lifting(
    model_spec: SeqSpec,
    adt: Adt,
    af: AbstractionFunction,
    rf: RenamingFunction,
    states: Iterable[State],
) -> ImplVerdict:
    """Check concrete domains lift: ``(s, in)`` in the concrete domain implies
    ``(af(s), in)`` in the abstract domain, over the sampled states."""
    n = 0
    for sz in states:
        n += 1
        for zop in rf.concrete_names():
            aop = rf.forward(zop)
            for inp in _inputs_for(adt, aop):
                if in_domain(model_spec, zop, sz, inp) and not in_domain(
                    adt, aop, af(sz), inp
                ):
                    return ImplVerdict(
                        False,
                        n,
                        ImplCounterexample(
                            sz, aop, inp, "concrete method defined where abstract blocks"
                        ),
                    )
    return ImplVerdict(True, n)


# ---------------------------------------------------------------------------
# Built-in abstract data types
# ---------------------------------------------------------------------------


def _seq_render(seq: tuple) -> str:
    return "<" + ",".join(render_value(v) for v in seq) + ">"


def _queue_enqueue(state: State, x: Value) -> Iterable[Outcome]:
    assert isinstance(state, tuple)
    return [(state + (x,), UNIT)]


def _queue_dequeue(state: State, _: Value) -> Iterable[Outcome]:
    assert isinstance(state, tuple)
    if state:
        return [(state[1:], state[0])]
    return [(state, EMPTY)]


def _pseudo_dequeue(state: State, _: Value) -> Iterable[Outcome]:
    # Not allowed on an empty sequence; with one element returns EMPTY and
    # keeps the element; otherwise discards the front and returns the new
    # front, which stays in place as the new held element.
    assert isinstance(state, tuple)
    if len(state) == 0:
        return []
    if len(state) == 1:
        return [(state, EMPTY)]
    return [(state[1:], state[1])]


def _mset_add(state: State, x: Value) -> Iterable[Outcome]:
    assert isinstance(state, tuple)
    return [(tuple(sorted(state + (x,), key=value_key)), UNIT)]


def _mset_remove(state: State, _: Value) -> Iterable[Outcome]:
    assert isinstance(state, tuple)
    outs = []
    for e in sorted(set(state), key=value_key):
        rest = list(state)
        rest.remove(e)
        outs.append((tuple(rest), e))
    return outs


def _mset_render(state: tuple) -> str:
    return "{" + ",".join(render_value(v) for v in state) + "}"


DEFAULT_ALPHABET: tuple[Value, ...] = ("a", "b")


def queue_adt(alphabet: Sequence[Value] = DEFAULT_ALPHABET) -> Adt:
    return Adt(
        name="adt-queue",
        methods={"Enqueue": _queue_enqueue, "Dequeue": _queue_dequeue},
        initial_states=((),),
        is_state=lambda s: isinstance(s, tuple),
        method_inputs={"Enqueue": tuple(alphabet), "Dequeue": (UNIT,)},
        render_state=_seq_render,
        from_contents=lambda vs: vs,
    )


def pseudo_queue_adt(alphabet: Sequence[Value] = DEFAULT_ALPHABET) -> Adt:
    return Adt(
        name="adt-pseudo-queue",
        methods={"Enqueue": _queue_enqueue, "Dequeue": _pseudo_dequeue},
        initial_states=((),),
        is_state=lambda s: isinstance(s, tuple),
        method_inputs={"Enqueue": tuple(alphabet), "Dequeue": (UNIT,)},
        render_state=_seq_render,
        from_contents=lambda vs: vs,
    )


def multiset_adt(alphabet: Sequence[Value] = DEFAULT_ALPHABET) -> Adt:
    return Adt(
        name="adt-multiset",
        methods={"Add": _mset_add, "Remove": _mset_remove},
        initial_states=((),),
        is_state=lambda s: isinstance(s, tuple) and list(s) == sorted(s, key=value_key),
        method_inputs={"Add": tuple(alphabet), "Remove": (UNIT,)},
        render_state=_mset_render,
        from_contents=lambda vs: tuple(sorted(vs, key=value_key)),
    )


def enumerate_sequences(
    alphabet: Sequence[Value], max_len: int
) -> Iterable[tuple[Value, ...]]:
    """All tuples over ``alphabet`` up to ``max_len``, shortest first."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_SPEC_REGISTRY: dict[str, Callable[[], SeqSpec]] = {
    "adt-queue": queue_adt,
    "adt-pseudo-queue": pseudo_queue_adt,
    "adt-multiset": multiset_adt,
}

_AF_REGISTRY: dict[str, Callable[[], AbstractionFunction]] = {}


def register_spec(name: str, factory: Callable[[], SeqSpec]) -> None:
    _SPEC_REGISTRY[name] = factory


def register_af(name: str, factory: Callable[[], AbstractionFunction]) -> None:
    _AF_REGISTRY[name] = factory


def get_spec(name: str) -> SeqSpec:
    try:
        return _SPEC_REGISTRY[name]()
    except KeyError:
        raise UnknownMethodError(f"unknown spec {name!r}") from None


def get_af(name: str) -> AbstractionFunction:
    try:
        return _AF_REGISTRY[name]()
    except KeyError:
        raise UnknownMethodError(f"unknown abstraction function {name!r}") from None


def spec_names() -> tuple[str, ...]:
    return tuple(sorted(_SPEC_REGISTRY))


def af_names() -> tuple[str, ...]:
    return tuple(sorted(_AF_REGISTRY))

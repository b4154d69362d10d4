"""Executable object models: fine-grained step machines plus companion specs.

Three models ship with the package:

* ``hw-queue``   -- the array-based queue whose Enqueue reserves a slot with
  an atomic fetch-and-increment and stores later, and whose Dequeue sweeps
  the array with atomic swaps, retrying forever when it finds nothing.
* ``ms-queue``   -- the lock-free linked queue with a dummy head node,
  compare-and-swap linking and a tail-helping step.
* ``coarse-queue`` -- a control model whose methods are single atomic steps.

Each model is a set of per-method step machines over (local state, shared
state).  One step is one atomic action at the granularity of one source
line; composite tests such as "read pointer and branch" are a single atomic
read-and-branch, and initialization of a node that no other thread can reach
yet is folded into its allocation.  Each model carries a companion
sequential specification (the machine run to completion in isolation) and a
canonical state rendering for golden-file reports.

The array model is bounded by a parameter ``N``; enqueueing past the bound
is a runtime error.  The linked model draws nodes from a bounded pool of
``P`` nodes, lowest free index first, and never reclaims memory.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

from . import specs
from .specs import AbstractionFunction, CellAccess, CellError, SeqSpec
from .values import EMPTY, NULL, UNIT, Value, render_value, value_key

# ---------------------------------------------------------------------------
# Step-machine plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Done:
    """Terminal local state: the operation returns ``value``."""

    value: Value


@dataclass(frozen=True)
class StepOutcome:
    """One atomic transition of a method body."""

    action: str
    local: Any
    shared: Any
    abort: bool = False


@dataclass(frozen=True)
class MethodMachine:
    start: Callable[[Value], Any]
    step: Callable[[Any, Any], tuple[StepOutcome, ...]]


@dataclass
class ObjectModel:
    """An executable fine-grained object."""

    name: str
    methods: dict[str, MethodMachine]
    initial_state: Any
    well_formed: Callable[[Any], bool]
    invariant_ok: Callable[[Any], bool]
    render_state: Callable[[Any], str]
    state_key: Callable[[Any], Hashable]
    seq_spec: SeqSpec
    cells: Optional[CellAccess] = None
    enumerate_states: Optional[Callable[[Sequence[Value]], Iterable[Any]]] = None

    def method_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.methods))

    def seed_state(self, contents: Sequence[Value]) -> Any:
        """Build a start state holding ``contents``, front first."""
        return self.seq_spec.seed_state(contents)


def _cell_render(v: Value) -> str:
    if v is NULL:
        return "·"
    if isinstance(v, str):
        return v
    return render_value(v)


# ---------------------------------------------------------------------------
# HW array queue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HWQueueState:
    back: int
    items: tuple[Value, ...]


def hw_initial(n: int) -> HWQueueState:
    return HWQueueState(1, (NULL,) * n)


def hw_is_state(s: Any) -> bool:
    return (
        isinstance(s, HWQueueState)
        and 1 <= s.back <= len(s.items) + 1
        and all(not isinstance(v, bool) for v in s.items)
    )


def hw_render(s: HWQueueState) -> str:
    cells = ",".join(_cell_render(v) for v in s.items)
    return f"back={s.back} items=[{cells}]"


def _hw_get(s: HWQueueState, i: int) -> Value:
    return s.items[i - 1]


def _hw_set(s: HWQueueState, i: int, v: Value) -> HWQueueState:
    items = list(s.items)
    items[i - 1] = v
    return replace(s, items=tuple(items))


def _hw_enq_start(arg: Value) -> Any:
    return ("inc", arg)


def _hw_enq_step(local: Any, s: HWQueueState) -> tuple[StepOutcome, ...]:
    tag = local[0]
    if tag == "inc":
        _, v = local
        if s.back > len(s.items):
            return (StepOutcome("t:=inc(back): no free slot", local, s, abort=True),)
        t = s.back
        return (
            StepOutcome(f"t:=inc(back)={t}", ("store", v, t), replace(s, back=t + 1)),
        )
    _, v, t = local
    return (StepOutcome(f"items[{t}]:={render_value(v)}", Done(UNIT), _hw_set(s, t, v)),)


def _hw_deq_start(_: Value) -> Any:
    return ("snap",)


def _hw_deq_step(local: Any, s: HWQueueState) -> tuple[StepOutcome, ...]:
    tag = local[0]
    if tag == "snap":
        rng = s.back - 1
        nxt = ("scan", rng, 1) if rng >= 1 else ("snap",)
        return (StepOutcome(f"range:=back-1={rng}", nxt, s),)
    _, rng, i = local
    temp = _hw_get(s, i)
    s2 = _hw_set(s, i, NULL)
    action = f"temp:=swap(items[{i}],null)={render_value(temp)}"
    if temp is not NULL:
        return (StepOutcome(action, Done(temp), s2),)
    nxt = ("scan", rng, i + 1) if i < rng else ("snap",)
    return (StepOutcome(action, nxt, s2),)


def _hw_cell_read(s: HWQueueState, addr: tuple) -> Value:
    if addr == ("back",):
        return s.back
    if len(addr) == 2 and addr[0] == "items" and 1 <= addr[1] <= len(s.items):
        return _hw_get(s, addr[1])
    raise CellError(f"bad cell address {addr!r}")


def _hw_cell_write(s: HWQueueState, addr: tuple, v: Value) -> HWQueueState:
    if addr == ("back",):
        if not isinstance(v, int) or not (1 <= v <= len(s.items) + 1):
            raise CellError(f"bad value for back: {v!r}")
        return replace(s, back=v)
    if len(addr) == 2 and addr[0] == "items" and 1 <= addr[1] <= len(s.items):
        return _hw_set(s, addr[1], v)
    raise CellError(f"bad cell address {addr!r}")


HW_CELLS = CellAccess(_hw_cell_read, _hw_cell_write)


def _hw_seq_enqueue(n: int):
    def rel(s: HWQueueState, v: Value):
        if s.back > n:
            return []
        return [(replace(_hw_set(s, s.back, v), back=s.back + 1), UNIT)]

    return rel


def _hw_seq_dequeue(s: HWQueueState, _: Value):
    # First non-null cell within the swept range; undefined when the sweep
    # finds nothing (the fine-grained loop never exits there).
    for i in range(1, s.back):
        if _hw_get(s, i) is not NULL:
            return [(_hw_set(s, i, NULL), _hw_get(s, i))]
    return []


def enumerate_hw_states(
    n: int,
    alphabet: Sequence[Value],
    max_back: Optional[int] = None,
    reachable_only: bool = True,
) -> Iterable[HWQueueState]:
    """Array states with cells over ``alphabet`` + null.

    With ``reachable_only`` every cell at or past ``back`` is null, which is
    an invariant of the algorithm's own executions (slots are reserved before
    they are written).  Pass ``False`` to sweep the raw state domain, e.g.
    states mutated by direct client writes.
    """
    hi = min(max_back or n + 1, n + 1)
    pool: tuple[Value, ...] = (NULL,) + tuple(alphabet)
    for back in range(1, hi + 1):
        prefix = back - 1
        for used in itertools.product(pool, repeat=prefix if reachable_only else n):
            items = used if not reachable_only else used + (NULL,) * (n - prefix)
            yield HWQueueState(back, tuple(items))


def hw_from_contents(n: int):
    def build(vs: tuple[Value, ...]) -> HWQueueState:
        if len(vs) > n:
            raise ValueError(f"array bound {n} cannot hold {len(vs)} values")
        return HWQueueState(len(vs) + 1, vs + (NULL,) * (n - len(vs)))

    return build


def hw_seq_spec(n: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET) -> SeqSpec:
    return SeqSpec(
        name="hw-queue-seq",
        methods={"Enqueue": _hw_seq_enqueue(n), "Dequeue": _hw_seq_dequeue},
        initial_states=(hw_initial(n),),
        is_state=hw_is_state,
        method_inputs={"Enqueue": tuple(alphabet), "Dequeue": (UNIT,)},
        render_state=hw_render,
        cells=HW_CELLS,
        from_contents=hw_from_contents(n),
    )


def hw_model(n: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET) -> ObjectModel:
    if n < 1:
        raise ValueError("array bound must be >= 1")
    return ObjectModel(
        name="hw-queue",
        methods={
            "Enqueue": MethodMachine(_hw_enq_start, _hw_enq_step),
            "Dequeue": MethodMachine(_hw_deq_start, _hw_deq_step),
        },
        initial_state=hw_initial(n),
        well_formed=hw_is_state,
        invariant_ok=hw_is_state,
        render_state=hw_render,
        state_key=lambda s: s,
        seq_spec=hw_seq_spec(n, alphabet),
        cells=HW_CELLS,
        enumerate_states=lambda alpha: enumerate_hw_states(n, alpha),
    )


# ---------------------------------------------------------------------------
# MS linked queue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    value: Value
    next: Optional[int]
    allocated: bool


FREE_NODE = Node(NULL, None, False)


@dataclass(frozen=True)
class MSQueueState:
    nodes: tuple[Node, ...]
    head: int
    tail: int


def ms_initial(p: int) -> MSQueueState:
    nodes = (Node(NULL, None, True),) + (FREE_NODE,) * (p - 1)
    return MSQueueState(nodes, 0, 0)


def ms_list_indices(s: MSQueueState) -> Optional[list[int]]:
    """Node indices from head, or None when the chain cycles or escapes."""
    out: list[int] = []
    seen: set[int] = set()
    i: Optional[int] = s.head
    while i is not None:
        if i in seen or not (0 <= i < len(s.nodes)) or not s.nodes[i].allocated:
            return None
        seen.add(i)
        out.append(i)
        i = s.nodes[i].next
    return out

def ms_well_formed(s: MSQueueState) -> bool:
    """Quiescent well-formedness: acyclic list and the tail is the last node."""
    idx = ms_list_indices(s)
    return idx is not None and s.tail == idx[-1]


def ms_invariant_ok(s: MSQueueState) -> bool:
    """Structural invariant along executions: acyclic list, tail on the list
    and lagging the end by at most one node (mid-enqueue states)."""
    idx = ms_list_indices(s)
    return idx is not None and s.tail in idx and idx.index(s.tail) >= len(idx) - 2


def ms_state_key(s: MSQueueState) -> Hashable:
    """Canonical identity: node names are renamed away.

    Two states are the same observable state when they have the same value
    sequence along the list, the same tail position, the same multiset of
    values in unreachable allocated nodes, and the same free-node count.
    """
    idx = ms_list_indices(s)
    if idx is None:
        return ("ms-malformed", s.nodes, s.head, s.tail)
    values = tuple(s.nodes[i].value for i in idx)
    garbage = tuple(
        sorted(
            (n.value for j, n in enumerate(s.nodes) if n.allocated and j not in idx),
            key=value_key,
        )
    )
    free = sum(1 for n in s.nodes if not n.allocated)
    return (values, idx.index(s.tail), garbage, free)


def ms_render(s: MSQueueState) -> str:
    idx = ms_list_indices(s)
    if idx is None:
        return f"malformed head=n{s.head} tail=n{s.tail}"
    parts = ",".join(f"n{k}:{_cell_render(s.nodes[i].value)}" for k, i in enumerate(idx))
    out = f"head=n0 list=[{parts}] tail=n{idx.index(s.tail)}"
    garbage = [n.value for j, n in enumerate(s.nodes) if n.allocated and j not in idx]
    if garbage:
        out += " garbage=[" + ",".join(
            _cell_render(v) for v in sorted(garbage, key=value_key)
        ) + "]"
    return out


def _ms_set_node(s: MSQueueState, i: int, node: Node) -> MSQueueState:
    nodes = list(s.nodes)
    nodes[i] = node
    return replace(s, nodes=tuple(nodes))


def _ms_alloc(s: MSQueueState, v: Value) -> Optional[tuple[MSQueueState, int]]:
    for i, node in enumerate(s.nodes):
        if not node.allocated:
            return _ms_set_node(s, i, Node(v, None, True)), i
    return None


def _ms_enq_start(arg: Value) -> Any:
    return ("alloc", arg)


def _ms_enq_step(local: Any, s: MSQueueState) -> tuple[StepOutcome, ...]:
    tag = local[0]
    if tag == "alloc":
        # value/next stores folded in: the node is private until linked
        _, v = local
        got = _ms_alloc(s, v)
        if got is None:
            return (StepOutcome("n:=new_node(): pool exhausted", local, s, abort=True),)
        s2, n = got
        return (StepOutcome(f"n:=new_node({render_value(v)})=n{n}", ("read_tail", n), s2),)
    if tag == "read_tail":
        _, n = local
        return (StepOutcome(f"t:=Tail=n{s.tail}", ("read_next", n, s.tail), s),)
    if tag == "read_next":
        _, n, t = local
        tn = s.nodes[t].next
        return (StepOutcome(f"tn:=t.next={_opt_node(tn)}", ("check_tail", n, t, tn), s),)
    if tag == "check_tail":
        _, n, t, tn = local
        if t != s.tail:
            return (StepOutcome("t=Tail? no", ("read_tail", n), s),)
        if tn is None:
            return (StepOutcome("t=Tail? yes; tn=null", ("cas_next", n, t), s),)
        return (StepOutcome("t=Tail? yes; tn!=null", ("help_tail", n, t, tn), s),)
    if tag == "cas_next":
        _, n, t = local
        if s.nodes[t].next is None:
            s2 = _ms_set_node(s, t, replace(s.nodes[t], next=n))
            return (StepOutcome(f"cas(t.next,null,n{n})=true", ("swing_tail", n, t), s2),)
        return (StepOutcome(f"cas(t.next,null,n{n})=false", ("read_tail", n), s),)
    if tag == "help_tail":
        _, n, t, tn = local
        ok = s.tail == t
        s2 = replace(s, tail=tn) if ok else s
        return (StepOutcome(f"cas(Tail,t,tn)={str(ok).lower()}", ("read_tail", n), s2),)
    _, n, t = local  # swing_tail
    ok = s.tail == t
    s2 = replace(s, tail=n) if ok else s
    return (StepOutcome(f"cas(Tail,t,n{n})={str(ok).lower()}", Done(UNIT), s2),)


def _opt_node(i: Optional[int]) -> str:
    return "null" if i is None else f"n{i}"


def _ms_deq_start(_: Value) -> Any:
    return ("read_head",)


def _ms_deq_step(local: Any, s: MSQueueState) -> tuple[StepOutcome, ...]:
    tag = local[0]
    if tag == "read_head":
        return (StepOutcome(f"h:=Head=n{s.head}", ("read_tail", s.head), s),)
    if tag == "read_tail":
        _, h = local
        return (StepOutcome(f"t:=Tail=n{s.tail}", ("read_next", h, s.tail), s),)
    if tag == "read_next":
        _, h, t = local
        hn = s.nodes[h].next
        return (StepOutcome(f"hn:=h.next={_opt_node(hn)}", ("check_head", h, t, hn), s),)
    if tag == "check_head":
        _, h, t, hn = local
        if h != s.head:
            return (StepOutcome("h=Head? no", ("read_head",), s),)
        if h == t:
            if hn is None:
                return (StepOutcome("h=Head? yes; h=t; hn=null", Done(EMPTY), s),)
            return (StepOutcome("h=Head? yes; h=t; hn!=null", ("help_tail", h, t, hn), s),)
        return (StepOutcome("h=Head? yes; h!=t", ("read_value", h, hn), s),)
    if tag == "help_tail":
        _, h, t, hn = local
        ok = s.tail == t
        s2 = replace(s, tail=hn) if ok else s
        return (StepOutcome(f"cas(Tail,t,hn)={str(ok).lower()}", ("read_head",), s2),)
    if tag == "read_value":
        _, h, hn = local
        v = s.nodes[hn].value
        return (StepOutcome(f"ret:=hn.value={render_value(v)}", ("cas_head", h, hn, v), s),)
    _, h, hn, v = local  # cas_head
    ok = s.head == h
    s2 = replace(s, head=hn) if ok else s
    if ok:
        return (StepOutcome("cas(Head,h,hn)=true", Done(v), s2),)
    return (StepOutcome("cas(Head,h,hn)=false", ("read_head",), s),)


def _ms_seq_enqueue(s: MSQueueState, v: Value):
    got = _ms_alloc(s, v)
    if got is None:
        return []
    s2, n = got
    s3 = _ms_set_node(s2, s2.tail, replace(s2.nodes[s2.tail], next=n))
    return [(replace(s3, tail=n), UNIT)]


def _ms_seq_dequeue(s: MSQueueState, _: Value):
    hn = s.nodes[s.head].next
    if hn is None:
        return [(s, EMPTY)]
    # the old head node stays allocated: no reclamation
    return [(replace(s, head=hn), s.nodes[hn].value)]


def enumerate_ms_states(
    p: int, alphabet: Sequence[Value]
) -> Iterable[MSQueueState]:
    """Canonical well-formed states: every allocated node on the list.

    The head (dummy) value is null or any symbol seen so far; later values
    range over the alphabet.  Node identity carries no information, so one
    representative per value sequence suffices.
    """
    dummy_pool: tuple[Value, ...] = (NULL,) + tuple(alphabet)
    for length in range(1, p + 1):
        for dummy in dummy_pool:
            for rest in itertools.product(tuple(alphabet), repeat=length - 1):
                values = (dummy,) + rest
                nodes = [
                    Node(v, i + 1 if i + 1 < length else None, True)
                    for i, v in enumerate(values)
                ]
                nodes += [FREE_NODE] * (p - length)
                yield MSQueueState(tuple(nodes), 0, length - 1)


def ms_from_contents(p: int):
    def build(vs: tuple[Value, ...]) -> MSQueueState:
        if len(vs) + 1 > p:
            raise ValueError(f"pool of {p} nodes cannot hold {len(vs)} values")
        values = (NULL,) + vs
        nodes = [
            Node(v, i + 1 if i + 1 < len(values) else None, True)
            for i, v in enumerate(values)
        ]
        nodes += [FREE_NODE] * (p - len(values))
        return MSQueueState(tuple(nodes), 0, len(values) - 1)

    return build


def ms_seq_spec(p: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET) -> SeqSpec:
    return SeqSpec(
        name="ms-queue-seq",
        methods={"Enqueue": _ms_seq_enqueue, "Dequeue": _ms_seq_dequeue},
        initial_states=(ms_initial(p),),
        is_state=lambda s: isinstance(s, MSQueueState) and ms_well_formed(s),
        method_inputs={"Enqueue": tuple(alphabet), "Dequeue": (UNIT,)},
        state_key=ms_state_key,
        render_state=ms_render,
        from_contents=ms_from_contents(p),
    )


def ms_model(p: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET) -> ObjectModel:
    if p < 2:
        raise ValueError("node pool must hold the dummy plus one node")
    return ObjectModel(
        name="ms-queue",
        methods={
            "Enqueue": MethodMachine(_ms_enq_start, _ms_enq_step),
            "Dequeue": MethodMachine(_ms_deq_start, _ms_deq_step),
        },
        initial_state=ms_initial(p),
        well_formed=ms_well_formed,
        invariant_ok=ms_invariant_ok,
        render_state=ms_render,
        state_key=ms_state_key,
        seq_spec=ms_seq_spec(p, alphabet),
        enumerate_states=lambda alpha: enumerate_ms_states(p, alpha),
    )


# ---------------------------------------------------------------------------
# Coarse-grained control queue
# ---------------------------------------------------------------------------


def _coarse_enq_start(arg: Value) -> Any:
    return ("do", arg)


def _coarse_enq_step(local: Any, s: tuple) -> tuple[StepOutcome, ...]:
    _, v = local
    if len(s[-1]) >= _coarse_cap(s):
        return (StepOutcome("enqueue: full", local, s, abort=True),)
    return (StepOutcome(f"enqueue({render_value(v)})", Done(UNIT), s[:-1] + (s[-1] + (v,),)),)


def _coarse_deq_start(_: Value) -> Any:
    return ("do",)


def _coarse_deq_step(local: Any, s: tuple) -> tuple[StepOutcome, ...]:
    q = s[-1]
    if not q:
        return (StepOutcome("dequeue: empty", Done(EMPTY), s),)
    return (StepOutcome(f"dequeue={render_value(q[0])}", Done(q[0]), s[:-1] + (q[1:],)),)


# coarse state: (capacity, contents-tuple); capacity rides along so the
# machine and its companion spec agree without closures
def coarse_initial(cap: int) -> tuple:
    return (cap, ())


def _coarse_cap(s: tuple) -> int:
    return s[0]


def _coarse_render(s: tuple) -> str:
    return "queue=<" + ",".join(render_value(v) for v in s[-1]) + ">"


def _coarse_seq_enqueue(s: tuple, v: Value):
    if len(s[-1]) >= _coarse_cap(s):
        return []
    return [((s[0], s[1] + (v,)), UNIT)]


def _coarse_seq_dequeue(s: tuple, _: Value):
    if not s[-1]:
        return [(s, EMPTY)]
    return [((s[0], s[1][1:]), s[1][0])]


def coarse_seq_spec(
    cap: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET
) -> SeqSpec:
    return SeqSpec(
        name="coarse-queue-seq",
        methods={"Enqueue": _coarse_seq_enqueue, "Dequeue": _coarse_seq_dequeue},
        initial_states=(coarse_initial(cap),),
        is_state=lambda s: isinstance(s, tuple) and len(s[-1]) <= _coarse_cap(s),
        method_inputs={"Enqueue": tuple(alphabet), "Dequeue": (UNIT,)},
        render_state=_coarse_render,
        from_contents=lambda vs: (cap, vs),
    )


def coarse_queue_model(
    cap: int = 4, alphabet: Sequence[Value] = specs.DEFAULT_ALPHABET
) -> ObjectModel:
    return ObjectModel(
        name="coarse-queue",
        methods={
            "Enqueue": MethodMachine(_coarse_enq_start, _coarse_enq_step),
            "Dequeue": MethodMachine(_coarse_deq_start, _coarse_deq_step),
        },
        initial_state=coarse_initial(cap),
        well_formed=lambda s: len(s[-1]) <= cap,
        invariant_ok=lambda s: len(s[-1]) <= cap,
        render_state=_coarse_render,
        state_key=lambda s: s,
        seq_spec=coarse_seq_spec(cap, alphabet),
        enumerate_states=lambda alpha: (
            (cap, seq) for seq in specs.enumerate_sequences(tuple(alpha), cap)
        ),
    )


# ---------------------------------------------------------------------------
# Abstraction functions
# ---------------------------------------------------------------------------


def _ms_values(s: MSQueueState) -> tuple[Value, ...]:
    idx = ms_list_indices(s)
    assert idx is not None
    return tuple(s.nodes[i].value for i in idx)


def af_queue() -> AbstractionFunction:
    """List values after the dummy, as a sequence; the dummy value is hidden."""
    return AbstractionFunction("af-queue", lambda s: _ms_values(s)[1:], ms_well_formed)


def af_multiset() -> AbstractionFunction:
    """List values after the dummy, as a multiset."""
    return AbstractionFunction(
        "af-multiset",
        lambda s: tuple(sorted(_ms_values(s)[1:], key=value_key)),
        ms_well_formed,
    )


def af_pseudo() -> AbstractionFunction:
    """The full value sequence including the dummy; injective on canonical
    well-formed states."""
    return AbstractionFunction("af-pseudo", _ms_values, ms_well_formed)


def af_hw_prefix() -> AbstractionFunction:
    """Array queue seen as the sequence of non-null cells in index order."""
    return AbstractionFunction(
        "af-hw-prefix",
        lambda s: tuple(v for v in s.items if v is not NULL),
        hw_is_state,
    )


def abstraction_functions() -> dict[str, AbstractionFunction]:
    return {
        "af-multiset": af_multiset(),
        "af-queue": af_queue(),
        "af-pseudo": af_pseudo(),
    }


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_MODEL_REGISTRY: dict[str, Callable[..., ObjectModel]] = {
    "hw-queue": lambda **kw: hw_model(int(kw.get("N", 4))),
    "ms-queue": lambda **kw: ms_model(int(kw.get("P", 4))),
    "coarse-queue": lambda **kw: coarse_queue_model(int(kw.get("C", 4))),
}


def get_model(name: str, **params: Any) -> ObjectModel:
    try:
        factory = _MODEL_REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}") from None
    return factory(**params)


def model_names() -> tuple[str, ...]:
    return tuple(sorted(_MODEL_REGISTRY))


def parse_model_ref(ref: str) -> ObjectModel:
    """Parse ``name[,param=val,...]`` into a model instance."""
    parts = ref.split(",")
    params: dict[str, str] = {}
    for p in parts[1:]:
        if "=" not in p:
            raise ValueError(f"bad model parameter {p!r}")
        k, v = p.split("=", 1)
        params[k.strip()] = v.strip()
    return get_model(parts[0].strip(), **params)


specs.register_spec("hw-queue-seq", hw_seq_spec)
specs.register_spec("ms-queue-seq", ms_seq_spec)
specs.register_spec("coarse-queue-seq", coarse_seq_spec)
specs.register_af("af-queue", af_queue)
specs.register_af("af-multiset", af_multiset)
specs.register_af("af-pseudo", af_pseudo)
specs.register_af("af-hw-prefix", af_hw_prefix)

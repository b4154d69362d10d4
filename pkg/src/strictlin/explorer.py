"""Exhaustive bounded exploration of client programs over object models.

The explorer interprets a :class:`~strictlin.programs.Program` against either
a fine-grained object model (each method body advances by atomic steps) or
the atomic version of a sequential specification (each call is one atomic
transition, enabled only where the spec relation is non-empty and blocking
otherwise).  It explores *all* schedules of enabled atomic transitions.

The state space is built once as a configuration graph.  Termination,
runtime errors, livelock (every pending thread blocked), and divergence
(reachable configuration cycles) are read off the graph; sets of execution
outcomes are computed per observation projection by dynamic programming over
the graph's strongly connected components.  A naive schedule-by-schedule
enumerator is kept alongside as a cross-check oracle for small programs.

Conventions mirroring the trace model:

* argument evaluation is a client event preceding the invocation, and
  return-value assignment a client event following the response;
* invocation, response, and method-body actions are object events;
* direct cell reads/writes are client events (the only client events allowed
  to touch the object state);
* a divergent execution is client-divergent when some reachable cycle emits
  client events only, object-divergent otherwise.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .history import Act, Event, History, Inv, Ret, RetAbort
from .models import Done, ObjectModel
from .programs import (
    Arith,
    AssignStmt,
    AtomicStmt,
    CallStmt,
    Cmp,
    IfStmt,
    Lit,
    Program,
    ReadCellStmt,
    Var,
    WhileStmt,
    WriteCellStmt,
)
from .specs import CellError, SeqSpec, apply
from .values import UNIT, Value, render_value

MAX_OPS_PER_THREAD = 99


class Kind(enum.Enum):
    TERMINATED = "terminated"
    CLIENT_DIVERGENT = "client-divergent"
    OBJECT_DIVERGENT = "object-divergent"
    ABORTED = "aborted"
    UNKNOWN = "unknown-budget"


@dataclass(frozen=True)
class ExecutionResult:
    """One distinguishable execution outcome under the chosen projection."""

    trace: tuple[Event, ...]
    kind: Kind
    final_client: Optional[tuple[tuple[str, Value], ...]] = None
    final_object: Any = None
    cycle: tuple[Event, ...] = ()
    note: str = ""

    def history(self) -> History:
        return History(tuple(e for e in self.trace if e.is_interface))

    def client_events(self) -> tuple[Event, ...]:
        return tuple(e for e in self.trace if e.is_client)


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreadState:
    tid: int
    frames: tuple  # stack of (statement-block, index)
    mode: str = "run"  # run | invoke | body | assign
    stmt: Optional[CallStmt] = None
    call_arg: Optional[Value] = None
    op_id: Optional[int] = None
    op_local: Any = None
    ret_val: Optional[Value] = None
    ops_started: int = 0

    @property
    def done(self) -> bool:
        return self.mode == "run" and not self.frames


@dataclass(frozen=True)
class Config:
    phase: int
    threads: tuple[ThreadState, ...]
    client: tuple[tuple[str, Value], ...]
    obj: Any


@dataclass(frozen=True)
class Transition:
    thread: int
    events: tuple[Event, ...]
    target: Optional[Config]  # None = runtime error (abort sink)


class ExplorationError(RuntimeError):
    pass


def _advance(frames: tuple) -> tuple:
    """Move past the completed statement at the top of the frame stack."""
    block, idx = frames[-1]
    out = frames[:-1] + ((block, idx + 1),)
    while out:
        block, idx = out[-1]
        if idx < len(block):
            return out
        out = out[:-1]
        if out:
            pblock, pidx = out[-1]
            # a parent frame sitting at a while-statement re-tests it
            if isinstance(pblock[pidx], WhileStmt):
                return out
            out = out[:-1] + ((pblock, pidx + 1),)
            block, idx = out[-1]
            if idx < len(block):
                return out
            continue
    return ()


def _env(config: Config) -> dict[str, Value]:
    return dict(config.client)


def _bind(client: tuple, name: str, v: Value) -> tuple:
    d = dict(client)
    d[name] = v
    return tuple(sorted(d.items()))


class EvalError(ValueError):
    pass


def _eval(expr, env: dict[str, Value]) -> Value:
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        if expr.name not in env:
            raise EvalError(f"unbound client variable {expr.name!r}")
        return env[expr.name]
    if isinstance(expr, Arith):
        if expr.var not in env or not isinstance(env[expr.var], int):
            raise EvalError(f"arithmetic on non-integer {expr.var!r}")
        base = env[expr.var]
        return base + expr.k if expr.op == "+" else base - expr.k
    raise TypeError(f"not an expression: {expr!r}")


def _test(pred: Cmp, env: dict[str, Value]) -> bool:
    l, r = _eval(pred.lhs, env), _eval(pred.rhs, env)
    return (l == r) if pred.op == "==" else (l != r)


# ---------------------------------------------------------------------------
# Interpreter core, parametrized by the object's call semantics
# ---------------------------------------------------------------------------


class _Interp:
    """Shared interpreter; ``atomic_spec`` switches the method-call engine."""

    def __init__(
        self,
        prog: Program,
        model: Optional[ObjectModel],
        spec: Optional[SeqSpec],
        init_client: tuple,
        init_obj: Any,
    ) -> None:
        self.prog = prog
        self.model = model
        self.spec = spec
        self.cells = (model.cells if model else spec.cells) if (model or spec) else None
        self.init = Config(0, self._phase_threads(0, 0), init_client, init_obj)

    def _phase_threads(self, phase: int, tid_base: int) -> tuple[ThreadState, ...]:
        out = []
        for k, code in enumerate(self.prog.phases[phase]):
            frames = ((tuple(code), 0),) if code else ()
            out.append(ThreadState(tid_base + k + 1, frames))
        return tuple(out)

    def object_kind(self) -> str:
        return "atomic" if self.spec is not None else "model"

    # -- transitions --------------------------------------------------------

    def successors(self, c: Config) -> tuple[Transition, ...]:
        if all(t.done for t in c.threads):
            if c.phase + 1 < len(self.prog.phases):
                base = sum(len(self.prog.phases[i]) for i in range(c.phase + 1))
                nxt = Config(
                    c.phase + 1,
                    self._phase_threads(c.phase + 1, base),
                    c.client,
                    c.obj,
                )
                return (Transition(0, (), nxt),)
            return ()
        out: list[Transition] = []
        for i, t in enumerate(c.threads):
            if not t.done:
                out.extend(self._thread_steps(c, i))
        return tuple(out)

    def _with_thread(self, c: Config, i: int, t: ThreadState, **kw) -> Config:
        threads = c.threads[:i] + (t,) + c.threads[i + 1 :]
        return replace(c, threads=threads, **kw)

    def _thread_steps(self, c: Config, i: int) -> list[Transition]:
        t = c.threads[i]
        if t.mode == "run":
            return self._run_stmt(c, i, t)
        if t.mode == "invoke":
            return self._invoke(c, i, t)
        if t.mode == "body":
            return self._body_step(c, i, t)
        if t.mode == "assign":
            assert t.stmt is not None and t.stmt.target is not None
            ev = Event(t.tid, Act(f"{t.stmt.target}:={render_value(t.ret_val)}"))
            t2 = replace(
                t, frames=_advance(t.frames), mode="run", stmt=None, ret_val=None
            )
            c2 = self._with_thread(c, i, t2, client=_bind(c.client, t.stmt.target, t.ret_val))
            return [Transition(t.tid, (ev,), c2)]
        raise AssertionError(t.mode)

    def _run_stmt(self, c: Config, i: int, t: ThreadState) -> list[Transition]:
        block, idx = t.frames[-1]
        s = block[idx]
        env = _env(c)
        tid = t.tid
        if isinstance(s, CallStmt):
            try:
                arg = _eval(s.arg, env) if s.arg is not None else UNIT
            except EvalError as exc:
                return [self._client_abort(tid, str(exc))]
            rendered = s.arg.render() if s.arg is not None else ""
            ev = Event(tid, Act(f"eval {s.method}({rendered})={render_value(arg)}"))
            t2 = replace(t, mode="invoke", stmt=s, call_arg=arg)
            return [Transition(tid, (ev,), self._with_thread(c, i, t2))]
        if isinstance(s, ReadCellStmt):
            assert self.cells is not None, "object exposes no cells"
            try:
                v = self.cells.read(c.obj, s.cell)
            except CellError as exc:
                return [self._client_abort(tid, str(exc))]
            ev = Event(tid, Act(f"{s.target}:=Q.{_cellname(s.cell)}={render_value(v)}"))
            t2 = replace(t, frames=_advance(t.frames))
            c2 = self._with_thread(c, i, t2, client=_bind(c.client, s.target, v))
            return [Transition(tid, (ev,), c2)]
        if isinstance(s, WriteCellStmt):
            assert self.cells is not None, "object exposes no cells"
            try:
                v = _eval(s.expr, env)
                obj2 = self.cells.write(c.obj, s.cell, v)
            except (CellError, EvalError) as exc:
                return [self._client_abort(tid, str(exc))]
            ev = Event(tid, Act(f"Q.{_cellname(s.cell)}:={render_value(v)}"))
            t2 = replace(t, frames=_advance(t.frames))
            return [Transition(tid, (ev,), self._with_thread(c, i, t2, obj=obj2))]
        if isinstance(s, AssignStmt):
            try:
                v = _eval(s.expr, env)
            except EvalError as exc:
                return [self._client_abort(tid, str(exc))]
            ev = Event(tid, Act(f"{s.target}:={render_value(v)}"))
            t2 = replace(t, frames=_advance(t.frames))
            c2 = self._with_thread(c, i, t2, client=_bind(c.client, s.target, v))
            return [Transition(tid, (ev,), c2)]
        if isinstance(s, AtomicStmt):
            try:
                if s.guard is not None and not _test(s.guard, env):
                    return []  # blocked until the guard holds
                client = c.client
                scratch = dict(env)
                for name, e in s.assigns:
                    val = _eval(e, scratch)
                    scratch[name] = val
                    client = _bind(client, name, val)
            except EvalError as exc:
                return [self._client_abort(tid, str(exc))]
            names = ",".join(n for n, _ in s.assigns)
            ev = Event(tid, Act(f"atomic[{names}]"))
            t2 = replace(t, frames=_advance(t.frames))
            return [Transition(tid, (ev,), self._with_thread(c, i, t2, client=client))]
        if isinstance(s, (WhileStmt, IfStmt)):
            try:
                b = _test(s.pred, env)
            except EvalError as exc:
                return [self._client_abort(tid, str(exc))]
            ev = Event(tid, Act(f"test({s.pred.render()})={str(b).lower()}"))
            if isinstance(s, WhileStmt):
                if b and s.body:
                    frames = t.frames + ((s.body, 0),)
                elif b:
                    frames = t.frames  # empty body: spin in place
                else:
                    frames = _advance(t.frames)
            else:
                branch = s.then if b else s.els
                past = _advance(t.frames)
                frames = past + ((branch, 0),) if branch else past
            t2 = replace(t, frames=frames)
            return [Transition(tid, (ev,), self._with_thread(c, i, t2))]
        raise TypeError(f"not a statement: {s!r}")

    def _client_abort(self, tid: int, msg: str) -> Transition:
        return Transition(tid, (Event(tid, Act(f"error: {msg}")),), None)

    def _invoke(self, c: Config, i: int, t: ThreadState) -> list[Transition]:
        assert t.stmt is not None
        method = t.stmt.method
        op = t.tid * 100 + t.ops_started + 1
        if t.ops_started >= MAX_OPS_PER_THREAD:
            raise ExplorationError("operation-id space exhausted for thread")
        if self.spec is not None:
            # atomic version: one transition per spec outcome, blocked if none
            outcomes = apply(self.spec, method, c.obj, t.call_arg)
            out = []
            for obj2, retv in sorted(outcomes, key=repr):
                events = (
                    Event(t.tid, Inv(method, t.call_arg), op),
                    Event(t.tid, Ret(retv), op),
                )
                t2 = self._after_return(t, retv)
                out.append(Transition(t.tid, events, self._with_thread(c, i, t2, obj=obj2)))
            return out
        machine = self.model.methods.get(method)
        if machine is None:
            return [self._client_abort(t.tid, f"unknown method {method!r}")]
        ev = Event(t.tid, Inv(method, t.call_arg), op)
        t2 = replace(
            t,
            mode="body",
            op_id=op,
            op_local=machine.start(t.call_arg),
            ops_started=t.ops_started + 1,
        )
        return [Transition(t.tid, (ev,), self._with_thread(c, i, t2))]

    def _after_return(self, t: ThreadState, retv: Value) -> ThreadState:
        assert t.stmt is not None
        started = t.ops_started + 1 if self.spec is not None else t.ops_started
        if t.stmt.target is not None:
            return replace(
                t, mode="assign", ret_val=retv, op_id=None, op_local=None,
                ops_started=started,
            )
        return replace(
            t, mode="run", frames=_advance(t.frames), stmt=None, op_id=None,
            op_local=None, ops_started=started,
        )

    def _body_step(self, c: Config, i: int, t: ThreadState) -> list[Transition]:
        assert self.model is not None and t.stmt is not None
        if isinstance(t.op_local, Done):
            ev = Event(t.tid, Ret(t.op_local.value), t.op_id)
            t2 = self._after_return(t, t.op_local.value)
            return [Transition(t.tid, (ev,), self._with_thread(c, i, t2))]
        machine = self.model.methods[t.stmt.method]
        out = []
        for step in machine.step(t.op_local, c.obj):
            ev = Event(t.tid, Act(step.action), t.op_id)
            if step.abort:
                out.append(
                    Transition(t.tid, (ev, Event(t.tid, RetAbort(), t.op_id)), None)
                )
                continue
            t2 = replace(t, op_local=step.local)
            out.append(Transition(t.tid, (ev,), self._with_thread(c, i, t2, obj=step.shared)))
        return out


def _cellname(cell: tuple) -> str:
    return cell[0] if len(cell) == 1 else f"{cell[0]}[{cell[1]}]"


# ---------------------------------------------------------------------------
# Configuration graph
# ---------------------------------------------------------------------------


@dataclass
class Exploration:
    """Reachable configuration graph plus derived outcome sets."""

    interp: _Interp
    bound: int
    edges: dict[Config, tuple[Transition, ...]] = field(default_factory=dict)
    terminal_done: set[Config] = field(default_factory=set)
    terminal_livelock: set[Config] = field(default_factory=set)
    truncated: set[Config] = field(default_factory=set)
    order: dict[Config, int] = field(default_factory=dict)
    transitions_explored: int = 0
    approximate: bool = False
    _scc: Optional[dict] = None
    _results: dict[str, frozenset] = field(default_factory=dict)

    @property
    def initial(self) -> Config:
        return self.interp.init

    @property
    def initial_object(self) -> Any:
        return self.interp.init.obj

    def state_key(self) -> Callable[[Any], Any]:
        m = self.interp.model
        if m is not None:
            return m.state_key
        return self.interp.spec.state_key

    def render_object(self, obj: Any) -> str:
        m = self.interp.model
        return m.render_state(obj) if m is not None else self.interp.spec.render_state(obj)

    # -- graph construction -------------------------------------------------

    def build(self) -> "Exploration":
        todo = [self.initial]
        seen = {self.initial}
        self.order[self.initial] = 0
        while todo:
            c = todo.pop()
            if self.transitions_explored >= self.bound:
                self.truncated.add(c)
                continue
            succ = self.interp.successors(c)
            self.transitions_explored += len(succ)
            self.edges[c] = succ
            if not succ:
                if all(t.done for t in c.threads) and c.phase + 1 >= len(
                    self.interp.prog.phases
                ):
                    self.terminal_done.add(c)
                else:
                    self.terminal_livelock.add(c)
            for tr in succ:
                if tr.target is not None and tr.target not in seen:
                    seen.add(tr.target)
                    self.order[tr.target] = len(self.order)
                    todo.append(tr.target)
        return self

    # -- strongly connected components --------------------------------------

    def scc_info(self) -> dict:
        if self._scc is not None:
            return self._scc
        index: dict[Config, int] = {}
        low: dict[Config, int] = {}
        comp: dict[Config, int] = {}
        comps: list[list[Config]] = []
        counter = itertools.count()
        stack: list[Config] = []
        on_stack: set[Config] = set()

        for root in self.edges:
            if root in index:
                continue
            work: list[tuple[Config, int]] = [(root, 0)]
            while work:
                node, ei = work[-1]
                if ei == 0:
                    index[node] = low[node] = next(counter)
                    stack.append(node)
                    on_stack.add(node)
                targets = [
                    tr.target
                    for tr in self.edges.get(node, ())
                    if tr.target is not None
                ]
                advanced = False
                while ei < len(targets):
                    nxt = targets[ei]
                    ei += 1
                    if nxt not in index:
                        work[-1] = (node, ei)
                        work.append((nxt, 0))
                        advanced = True
                        break
                    if nxt in on_stack:
                        low[node] = min(low[node], index[nxt])
                if advanced:
                    continue
                work.pop()
                if low[node] == index[node]:
                    group = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp[w] = len(comps)
                        group.append(w)
                        if w == node:
                            break
                    comps.append(group)
                if work:
                    parent, _ = work[-1]
                    low[parent] = min(low[parent], low[node])

        cyclic: set[int] = set()
        has_object_cycle: set[int] = set()
        client_edges: dict[int, list[tuple[Config, Config, tuple]]] = {}
        for c, trs in self.edges.items():
            for tr in trs:
                if tr.target is None or comp.get(tr.target) != comp[c]:
                    continue
                k = comp[c]
                cyclic.add(k)  # intra-SCC edge certifies a cycle
                objev = any(not e.is_client for e in tr.events)
                if objev:
                    has_object_cycle.add(k)
                else:
                    client_edges.setdefault(k, []).append((c, tr.target, tr.events))
        client_cyclic: set[int] = set()
        for k, ce in client_edges.items():
            # the client-only subgraph certifies a client cycle when it has one
            adj: dict[Config, list[Config]] = {}
            for a, b, _ in ce:
                adj.setdefault(a, []).append(b)
            if _has_cycle(adj):
                client_cyclic.add(k)
        self._scc = {
            "comp": comp,
            "comps": comps,
            "cyclic": cyclic,
            "object_cyclic": has_object_cycle,
            "client_cyclic": client_cyclic,
        }
        return self._scc

    def has_divergence(self) -> bool:
        info = self.scc_info()
        return bool(info["cyclic"]) or bool(self.terminal_livelock)

    def divergence_kinds(self) -> set[Kind]:
        info = self.scc_info()
        out: set[Kind] = set()
        if info["object_cyclic"] or self.terminal_livelock:
            out.add(Kind.OBJECT_DIVERGENT)
        if info["client_cyclic"]:
            out.add(Kind.CLIENT_DIVERGENT)
        return out

    # -- outcome enumeration -------------------------------------------------

    def results(self, projection: str = "interface") -> frozenset[ExecutionResult]:
        """Execution outcomes, deduplicated under the given projection.

        ``interface``: client events plus invocations/responses (default);
        ``history``: invocations/responses only; ``client``: client events
        only.  Internal method-body steps never distinguish outcomes; the
        naive enumerator retains them for cross-checks.
        """
        if projection in self._results:
            return self._results[projection]
        keep = _projector(projection)
        info = self.scc_info()
        comps = info["comps"]
        outcomes: dict[Config, frozenset] = {
            c: frozenset({ExecutionResult((), Kind.UNKNOWN, note="step budget exhausted")})
            for c in self.truncated
        }

        for ci in range(len(comps)):  # Tarjan emits callees first
            group = [c for c in comps[ci] if c not in self.truncated]
            if not group:
                continue
            cyclic = ci in info["cyclic"]
            if not cyclic:
                (c,) = group
                outcomes[c] = frozenset(self._node_outcomes(c, keep, outcomes))
            else:
                if len(group) > 512:
                    self.approximate = True
                    for c in group:
                        outcomes[c] = frozenset(
                            {ExecutionResult((), Kind.UNKNOWN, note="scc too large")}
                        )
                    continue
                for c in group:
                    outcomes[c] = frozenset(
                        self._cyclic_outcomes(c, set(group), keep, outcomes, info)
                    )
        res = outcomes[self.initial]
        self._results[projection] = res
        return res

    def _edge_outcomes(
        self, tr: Transition, keep, outcomes: dict[Config, frozenset]
    ) -> Iterator[ExecutionResult]:
        ev = tuple(e for e in tr.events if keep(e))
        if tr.target is None:
            yield ExecutionResult(ev, Kind.ABORTED, note="runtime error")
            return
        for o in outcomes[tr.target]:
            yield replace(o, trace=ev + o.trace)

    def _node_outcomes(
        self, c: Config, keep, outcomes: dict[Config, frozenset]
    ) -> Iterator[ExecutionResult]:
        if c in self.terminal_done:
            yield ExecutionResult((), Kind.TERMINATED, c.client, c.obj)
            return
        if c in self.terminal_livelock:
            yield ExecutionResult(
                (), Kind.OBJECT_DIVERGENT, note="all pending threads blocked"
            )
            return
        for tr in self.edges[c]:
            yield from self._edge_outcomes(tr, keep, outcomes)

    def _cyclic_outcomes(
        self, start: Config, group: set[Config], keep, outcomes, info
    ) -> Iterator[ExecutionResult]:
        # divergent continuations: one representative lasso per divergence
        # kind this component supports
        k = info["comp"][start]
        observable_cycle = False
        if k in info["object_cyclic"]:
            rep = self._object_lasso(start, group)
            if rep is not None:
                stem, cyc = rep
                observable_cycle |= any(keep(e) for e in cyc)
                yield ExecutionResult(
                    tuple(e for e in stem if keep(e)),
                    Kind.OBJECT_DIVERGENT,
                    cycle=tuple(e for e in cyc if keep(e)),
                )
        if k in info["client_cyclic"]:
            rep = self._client_lasso(start, group)
            if rep is not None:
                stem, cyc = rep
                observable_cycle |= any(keep(e) for e in cyc)
                yield ExecutionResult(
                    tuple(e for e in stem if keep(e)),
                    Kind.CLIENT_DIVERGENT,
                    cycle=tuple(e for e in cyc if keep(e)),
                )
        if observable_cycle and self._scc_has_exit(group):
            # terminating schedules that lap an observable cycle more than
            # once are not enumerated separately
            self.approximate = True
        # terminating / exiting continuations: simple paths inside the
        # component, then whatever follows outside it
        seen = {start}

        def walk(c: Config, acc: tuple) -> Iterator[ExecutionResult]:
            for tr in self.edges.get(c, ()):
                ev = acc + tuple(e for e in tr.events if keep(e))
                if tr.target is None:
                    yield ExecutionResult(ev, Kind.ABORTED, note="runtime error")
                elif tr.target not in group:
                    for o in outcomes[tr.target]:
                        yield replace(o, trace=ev + o.trace)
                elif tr.target not in seen:
                    seen.add(tr.target)
                    yield from walk(tr.target, ev)
                    seen.discard(tr.target)

        yield from walk(start, ())

    def _scc_has_exit(self, group: set[Config]) -> bool:
        for c in group:
            for tr in self.edges.get(c, ()):
                if tr.target is None or tr.target not in group:
                    return True
            if c in self.truncated:
                return True
        return False

    def _intra_edges(self, c: Config, group: set[Config]) -> Iterator[Transition]:
        for tr in self.edges.get(c, ()):
            if tr.target is not None and tr.target in group:
                yield tr

    def _bfs_path(
        self, src: Config, goals: set[Config], group: set[Config]
    ) -> Optional[tuple[tuple[Event, ...], Config]]:
        """Events along a shortest in-component path from ``src`` to a goal."""
        if src in goals:
            return (), src
        prev: dict[Config, tuple[Config, Transition]] = {}
        frontier = [src]
        seen = {src}
        while frontier:
            nxt_frontier = []
            for c in frontier:
                for tr in self._intra_edges(c, group):
                    if tr.target in seen:
                        continue
                    seen.add(tr.target)
                    prev[tr.target] = (c, tr)
                    if tr.target in goals:
                        evs: list[Event] = []
                        node = tr.target
                        while node != src:
                            pc, ptr = prev[node]
                            evs[:0] = ptr.events
                            node = pc
                        return tuple(evs), tr.target
                    nxt_frontier.append(tr.target)
            frontier = nxt_frontier
        return None

    def _object_lasso(
        self, start: Config, group: set[Config]
    ) -> Optional[tuple[tuple[Event, ...], tuple[Event, ...]]]:
        """A lasso whose cycle contains an object event: stem to some
        intra-component object edge, the edge, and a path back to its source."""
        for u in sorted(group, key=self.order.__getitem__):
            for tr in self._intra_edges(u, group):
                if any(not e.is_client for e in tr.events):
                    stem = self._bfs_path(start, {u}, group)
                    if stem is None:
                        continue
                    back = self._bfs_path(tr.target, {u}, group)
                    if back is None:
                        continue
                    return stem[0], tr.events + back[0]
        return None

    def _client_lasso(
        self, start: Config, group: set[Config]
    ) -> Optional[tuple[tuple[Event, ...], tuple[Event, ...]]]:
        """A lasso whose cycle uses client-event edges only (the stem may
        still cross object edges)."""
        adj: dict[Config, list[Transition]] = {}
        for c in group:
            for tr in self._intra_edges(c, group):
                if all(e.is_client for e in tr.events):
                    adj.setdefault(c, []).append(tr)
        on_path: dict[Config, int] = {}
        path_edges: list[Transition] = []
        done: set[Config] = set()

        def dfs(u: Config) -> Optional[tuple[Config, tuple[Event, ...]]]:
            on_path[u] = len(path_edges)
            for tr in adj.get(u, ()):
                v = tr.target
                if v in on_path:
                    evs = [e for tr2 in path_edges[on_path[v]:] for e in tr2.events]
                    evs.extend(tr.events)
                    return v, tuple(evs)
                if v in done:
                    continue
                path_edges.append(tr)
                got = dfs(v)
                if got is not None:
                    return got
                path_edges.pop()
            del on_path[u]
            done.add(u)
            return None

        found = None
        for u in sorted(adj, key=self.order.__getitem__):
            if u not in done:
                path_edges.clear()
                on_path.clear()
                found = dfs(u)
                if found is not None:
                    break
        if found is None:
            return None
        d, cyc = found
        stem = self._bfs_path(start, {d}, group)
        if stem is None:
            return None
        return stem[0], cyc


def _has_cycle(adj: dict) -> bool:
    color: dict = {}

    def visit(u) -> bool:
        color[u] = 1
        for v in adj.get(u, ()):
            if color.get(v) == 1:
                return True
            if v not in color and visit(v):
                return True
        color[u] = 2
        return False

    return any(visit(u) for u in list(adj) if u not in color)


def _projector(projection: str) -> Callable[[Event], bool]:
    if projection == "interface":
        return lambda e: e.is_client or e.is_interface
    if projection == "history":
        return lambda e: e.is_interface
    if projection == "client":
        return lambda e: e.is_client
    if projection == "full":
        return lambda e: True
    raise ValueError(f"unknown projection {projection!r}")


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

DEFAULT_BOUND = 200_000


def explore(
    prog: Program,
    model: ObjectModel,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    bound: int = DEFAULT_BOUND,
) -> Exploration:
    """Explore all schedules of ``prog`` over the fine-grained ``model``."""
    obj = model.initial_state if init_obj is None else init_obj
    if not model.well_formed(obj):
        raise ValueError(f"{model.name}: initial state not well-formed")
    interp = _Interp(prog, model, None, tuple(sorted(init_client)), obj)
    return Exploration(interp, bound).build()


def run_atomic(
    prog: Program,
    spec: SeqSpec,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    bound: int = DEFAULT_BOUND,
) -> Exploration:
    """Explore ``prog`` over the atomic version of ``spec``.

    Each method call is a single transition, enabled exactly where the spec
    relation is non-empty (one transition per outcome) and blocked
    otherwise; a blocked call retries whenever the state changes.  A
    configuration with pending work and no enabled transition anywhere is a
    livelock and classified as object divergence.
    """
    obj = spec.initial_states[0] if init_obj is None else init_obj
    interp = _Interp(prog, None, spec, tuple(sorted(init_client)), obj)
    return Exploration(interp, bound).build()


def enumerate_executions(
    prog: Program,
    model: ObjectModel,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    bound: int = DEFAULT_BOUND,
    projection: str = "interface",
) -> frozenset[ExecutionResult]:
    return explore(prog, model, init_client, init_obj, bound).results(projection)


def enumerate_executions_naive(
    prog: Program,
    model: Optional[ObjectModel] = None,
    spec: Optional[SeqSpec] = None,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    max_steps: int = 10_000,
    projection: str = "full",
) -> frozenset[ExecutionResult]:
    """Schedule-by-schedule enumeration without configuration hashing.

    Exponential; a cross-check oracle for small programs.  Divergence is
    detected by a configuration repeat along the current schedule.
    """
    if model is not None:
        obj = model.initial_state if init_obj is None else init_obj
        interp = _Interp(prog, model, None, tuple(sorted(init_client)), obj)
    else:
        assert spec is not None
        obj = spec.initial_states[0] if init_obj is None else init_obj
        interp = _Interp(prog, None, spec, tuple(sorted(init_client)), obj)
    keep = _projector(projection)
    results: set[ExecutionResult] = set()

    def walk(c: Config, trace: tuple, path: dict, depth: int) -> None:
        if depth > max_steps:
            results.add(ExecutionResult(trace, Kind.UNKNOWN, note="step budget exhausted"))
            return
        succ = interp.successors(c)
        if not succ:
            if all(t.done for t in c.threads) and c.phase + 1 >= len(prog.phases):
                results.add(ExecutionResult(trace, Kind.TERMINATED, c.client, c.obj))
            else:
                results.add(
                    ExecutionResult(
                        trace, Kind.OBJECT_DIVERGENT, note="all pending threads blocked"
                    )
                )
            return
        for tr in succ:
            ev = tuple(e for e in tr.events if keep(e))
            if tr.target is None:
                results.add(ExecutionResult(trace + ev, Kind.ABORTED, note="runtime error"))
                continue
            if tr.target in path:
                cut = path[tr.target]
                cyc = trace[cut:] + ev
                kind = (
                    Kind.CLIENT_DIVERGENT
                    if all(e.is_client for e in cyc)
                    else Kind.OBJECT_DIVERGENT
                )
                results.add(ExecutionResult(trace[:cut], kind, cycle=cyc))
                continue
            path[tr.target] = len(trace + ev)
            walk(tr.target, trace + ev, path, depth + 1)
            del path[tr.target]

    walk(interp.init, (), {interp.init: 0}, 0)
    return frozenset(results)


# ---------------------------------------------------------------------------
# Observables: client traces and final states
# ---------------------------------------------------------------------------


def canonical_lasso(stem: tuple, cycle: tuple) -> tuple[tuple, tuple]:
    """Normalize an eventually-periodic trace: primitive cycle, shortest stem."""
    if not cycle:
        return stem, cycle
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            cycle = cycle[:d]
            break
    while stem and stem[-1] == cycle[-1]:
        stem = stem[:-1]
        cycle = (cycle[-1],) + cycle[:-1]
    return stem, cycle


def client_traces(results: Iterable[ExecutionResult]) -> frozenset:
    """Client-side trace set: projections of terminated and aborted
    executions plus lassos of client-divergent ones.  Object divergence
    contributes nothing."""
    out = set()
    for r in results:
        if r.kind in (Kind.TERMINATED, Kind.ABORTED):
            out.add((r.client_events(), ()))
        elif r.kind is Kind.CLIENT_DIVERGENT:
            stem = r.client_events()
            cyc = tuple(e for e in r.cycle if e.is_client)
            out.add(canonical_lasso(stem, cyc))
    return frozenset(out)


ABORT_MARKER = ("abort",)
BOTTOM_MARKER = ("bottom",)


@dataclass(frozen=True)
class FinalStates:
    """Final-state set: terminated configurations plus the error marker for
    aborting executions and the bottom marker for client divergence."""

    states: frozenset  # of (client-bindings, object-state-key)
    has_abort: bool
    has_bottom: bool
    renderings: tuple[str, ...]

    def markers(self) -> frozenset:
        out = set(self.states)
        if self.has_abort:
            out.add(ABORT_MARKER)
        if self.has_bottom:
            out.add(BOTTOM_MARKER)
        return frozenset(out)

    def object_keys(self) -> frozenset:
        return frozenset(k for (_, k) in self.states)


def final_states(exploration: Exploration) -> FinalStates:
    key = exploration.state_key()
    states = set()
    render: dict = {}
    for c in exploration.terminal_done:
        k = (c.client, key(c.obj))
        states.add(k)
        render[k] = (
            " ".join(f"{n}={render_value(v)}" for n, v in c.client) or "-",
            exploration.render_object(c.obj),
        )
    has_abort = any(
        tr.target is None for trs in exploration.edges.values() for tr in trs
    )
    has_bottom = Kind.CLIENT_DIVERGENT in exploration.divergence_kinds()
    lines = sorted(f"client: {cl} | object: {ob}" for cl, ob in render.values())
    if has_abort:
        lines.append("abort")
    if has_bottom:
        lines.append("bottom (client divergence)")
    return FinalStates(frozenset(states), has_abort, has_bottom, tuple(lines))


# ---------------------------------------------------------------------------
# Observable-equivalence and divergence comparisons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservablesReport:
    """Client-trace and final-state comparison of a model against the atomic
    version of a sequential specification."""

    traces_equal: bool
    states_equal: bool
    trace_diff_model: tuple
    trace_diff_atomic: tuple
    state_lines_model: tuple[str, ...]
    state_lines_atomic: tuple[str, ...]
    unknown_present: bool

    @property
    def equal(self) -> bool:
        return self.traces_equal and self.states_equal


def compare_observables(
    prog: Program,
    model: ObjectModel,
    spec: Optional[SeqSpec] = None,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    bound: int = DEFAULT_BOUND,
    init_obj_atomic: Any = None,
) -> ObservablesReport:
    """Compare client traces and final states of ``prog`` over the model
    against the atomic version of its sequential specification.

    The atomic side starts from ``init_obj_atomic`` when the spec's state
    domain differs from the model's; by default both start from the same
    state (the companion-spec case)."""
    spec = spec or model.seq_spec
    if init_obj_atomic is None:
        init_obj_atomic = init_obj
    ex_m = explore(prog, model, init_client, init_obj, bound)
    ex_a = run_atomic(prog, spec, init_client, init_obj_atomic, bound)
    rm = ex_m.results("client")
    ra = ex_a.results("client")
    mt_m, mt_a = client_traces(rm), client_traces(ra)
    fs_m, fs_a = final_states(ex_m), final_states(ex_a)
    unknown = any(r.kind is Kind.UNKNOWN for r in rm | ra)
    return ObservablesReport(
        traces_equal=mt_m == mt_a,
        states_equal=fs_m.markers() == fs_a.markers(),
        trace_diff_model=tuple(sorted(map(render_client_trace, mt_m - mt_a))),
        trace_diff_atomic=tuple(sorted(map(render_client_trace, mt_a - mt_m))),
        state_lines_model=fs_m.renderings,
        state_lines_atomic=fs_a.renderings,
        unknown_present=unknown,
    )


def render_client_trace(trace: tuple[tuple, tuple]) -> str:
    stem, cycle = trace
    out = "; ".join(e.render() for e in stem)
    if cycle:
        out += " [loop: " + "; ".join(e.render() for e in cycle) + "]"
    return out or "(empty)"


@dataclass(frozen=True)
class DivergenceReport:
    model_diverges: bool
    atomic_diverges: bool
    model_kinds: tuple[str, ...]
    atomic_kinds: tuple[str, ...]


def compare_divergence(
    prog: Program,
    model: ObjectModel,
    spec: Optional[SeqSpec] = None,
    init_client: Sequence[tuple[str, Value]] = (),
    init_obj: Any = None,
    bound: int = DEFAULT_BOUND,
    init_obj_atomic: Any = None,
) -> DivergenceReport:
    """Report whether any divergent schedule exists on each side."""
    spec = spec or model.seq_spec
    if init_obj_atomic is None:
        init_obj_atomic = init_obj
    ex_m = explore(prog, model, init_client, init_obj, bound)
    ex_a = run_atomic(prog, spec, init_client, init_obj_atomic, bound)
    return DivergenceReport(
        ex_m.has_divergence(),
        ex_a.has_divergence(),
        tuple(sorted(k.value for k in ex_m.divergence_kinds())),
        tuple(sorted(k.value for k in ex_a.divergence_kinds())),
    )

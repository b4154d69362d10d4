"""Object models: step machines, companion specs, abstraction functions."""

import pytest

from strictlin import explorer, models
from strictlin.models import (
    Done,
    HWQueueState,
    MSQueueState,
    enumerate_hw_states,
    enumerate_ms_states,
    hw_model,
    ms_model,
    coarse_queue_model,
    ms_state_key,
    ms_well_formed,
)
from strictlin.programs import parse_program
from strictlin.specs import apply
from strictlin.values import EMPTY, NULL, UNIT


def run_in_isolation(model, method, arg, state, max_steps=200):
    """Drive one method alone: (final state, return) on termination, 'abort',
    or 'divergent' when a configuration repeats without a state change."""
    machine = model.methods[method]
    local = machine.start(arg)
    seen = {(repr(local), model.state_key(state))}
    for _ in range(max_steps):
        if isinstance(local, Done):
            return state, local.value
        (step,) = machine.step(local, state)  # deterministic in isolation
        if step.abort:
            return "abort"
        local, state = step.local, step.shared
        key = (repr(local), model.state_key(state))
        if key in seen:
            return "divergent"
        seen.add(key)
    raise AssertionError("isolation run exceeded step cap")


# ---------------------------------------------------------------------------
# array queue
# ---------------------------------------------------------------------------


def test_hw_sequential_enqueue_dequeue():
    m = hw_model(4)
    s1, r1 = run_in_isolation(m, "Enqueue", "c", m.initial_state)
    assert r1 is UNIT and s1 == HWQueueState(2, ("c", NULL, NULL, NULL))
    s2, r2 = run_in_isolation(m, "Dequeue", UNIT, s1)
    assert r2 == "c" and s2.items == (NULL,) * 4


def test_hw_dequeue_spins_on_empty():
    m = hw_model(4)
    assert run_in_isolation(m, "Dequeue", UNIT, m.initial_state) == "divergent"


def test_hw_enqueue_aborts_past_bound():
    m = hw_model(2)
    s = HWQueueState(3, ("a", "b"))
    assert run_in_isolation(m, "Enqueue", "c", s) == "abort"


def test_hw_fig3_final_state_reachable():
    from strictlin.reproductions import TWO_ENQUEUES_ONE_DEQUEUE, FIG3_FINAL

    m = hw_model(4)
    ex = explorer.explore(TWO_ENQUEUES_ONE_DEQUEUE, m)
    finals = {c.obj for c in ex.terminal_done}
    assert FIG3_FINAL in finals


# ---------------------------------------------------------------------------
# linked queue
# ---------------------------------------------------------------------------


def test_ms_sequential_enqueue_dequeue():
    m = ms_model(4)
    s1, r1 = run_in_isolation(m, "Enqueue", 1, m.initial_state)
    assert r1 is UNIT
    s2, r2 = run_in_isolation(m, "Dequeue", UNIT, s1)
    assert r2 == 1


def test_ms_dequeue_fresh_returns_empty():
    m = ms_model(4)
    s, r = run_in_isolation(m, "Dequeue", UNIT, m.initial_state)
    assert r is EMPTY and s == m.initial_state


def test_ms_enqueue_aborts_when_pool_exhausted():
    m = ms_model(2)
    s1, _ = run_in_isolation(m, "Enqueue", "a", m.initial_state)
    assert run_in_isolation(m, "Enqueue", "b", s1) == "abort"


def test_ms_well_formedness_quiescent_vs_lagging():
    states = list(enumerate_ms_states(4, ("a", "b")))
    assert all(ms_well_formed(s) for s in states)
    # mid-enqueue lag: linked but tail not swung
    m = ms_model(3)
    s = m.initial_state
    s = models._ms_set_node(s, 1, models.Node("a", None, True))
    s = models._ms_set_node(s, 0, models.Node(NULL, 1, True))
    lag = s  # tail still points at the dummy
    assert not ms_well_formed(lag)
    assert m.invariant_ok(lag)


def test_ms_state_key_forgets_node_identity():
    # same list through nodes 0->1 vs 0->2; equal canonical keys
    a = MSQueueState(
        (models.Node(NULL, 1, True), models.Node("a", None, True), models.FREE_NODE),
        0, 1,
    )
    b = MSQueueState(
        (models.Node(NULL, 2, True), models.FREE_NODE, models.Node("a", None, True)),
        0, 2,
    )
    assert a != b and ms_state_key(a) == ms_state_key(b)
    assert models.ms_render(a) == models.ms_render(b)


def test_ms_render_shows_garbage():
    s = MSQueueState(
        (models.Node("x", None, True), models.Node("g", None, True)), 0, 0
    )
    assert "garbage=[g]" in models.ms_render(s)


def test_ms_invariant_preserved_during_exploration():
    m = ms_model(3)
    p = parse_program("thread { call Q.Enqueue('a') }\nthread { call y = Q.Dequeue() }")
    ex = explorer.explore(p, m)
    assert all(m.invariant_ok(c.obj) for c in ex.order)
    assert all(ms_well_formed(c.obj) for c in ex.terminal_done)


# ---------------------------------------------------------------------------
# coarse queue
# ---------------------------------------------------------------------------


def test_coarse_queue_matches_adt_semantics():
    m = coarse_queue_model(4)
    s, r = run_in_isolation(m, "Enqueue", "c", m.initial_state)
    assert r is UNIT and s[-1] == ("c",)
    s2, r2 = run_in_isolation(m, "Dequeue", UNIT, s)
    assert r2 == "c" and s2[-1] == ()
    _, r3 = run_in_isolation(m, "Dequeue", UNIT, m.initial_state)
    assert r3 is EMPTY


# ---------------------------------------------------------------------------
# companion-spec agreement: the machine run alone reproduces the spec
# ---------------------------------------------------------------------------


def _agreement_cases():
    hw = hw_model(3, ("a", "b"))
    ms = ms_model(3, ("a", "b"))
    co = coarse_queue_model(2, ("a", "b"))
    yield hw, list(enumerate_hw_states(3, ("a", "b"))), ("a", "b")
    yield ms, list(enumerate_ms_states(3, ("a", "b"))), ("a", "b")
    yield co, [(2, s) for s in [(), ("a",), ("a", "b")]], ("a", "b")


@pytest.mark.parametrize("model,states,alphabet", list(_agreement_cases()),
                         ids=["hw", "ms", "coarse"])
def test_companion_spec_agreement(model, states, alphabet):
    for state in states:
        for method in model.method_names():
            inputs = alphabet if method == "Enqueue" else (UNIT,)
            for arg in inputs:
                outcomes = apply(model.seq_spec, method, state, arg)
                got = run_in_isolation(model, method, arg, state)
                if got in ("abort", "divergent"):
                    # out of the spec's domain exactly when the lone run
                    # cannot terminate normally
                    assert not outcomes
                else:
                    s2, r = got
                    assert (
                        {(model.state_key(a), b) for a, b in outcomes}
                        == {(model.state_key(s2), r)}
                    )


def test_hw_purely_blocking_from_reachable_configurations():
    # every pending method, run alone, terminates or leaves the state as it was
    from strictlin.reproductions import TWO_ENQUEUES_ONE_DEQUEUE

    m = hw_model(4)
    ex = explorer.explore(TWO_ENQUEUES_ONE_DEQUEUE, m)
    for cfg in sorted(ex.order, key=ex.order.__getitem__):
        for ts in cfg.threads:
            if ts.mode != "body" or isinstance(ts.op_local, Done):
                continue
            machine = m.methods[ts.stmt.method]
            local, state = ts.op_local, cfg.obj
            seen = set()
            for _ in range(200):
                if isinstance(local, Done):
                    break
                key = (repr(local), state)
                if key in seen:
                    assert state == cfg.obj  # spinning must not modify state
                    break
                seen.add(key)
                (step,) = machine.step(local, state)
                assert not step.abort
                local, state = step.local, step.shared
            else:
                raise AssertionError("isolation run neither terminated nor looped")


# ---------------------------------------------------------------------------
# abstraction functions
# ---------------------------------------------------------------------------


def _list_state(values, pool=4):
    nodes = [
        models.Node(v, i + 1 if i + 1 < len(values) else None, True)
        for i, v in enumerate(values)
    ]
    nodes += [models.FREE_NODE] * (pool - len(values))
    return MSQueueState(tuple(nodes), 0, len(values) - 1)


def test_af_dummy_only():
    s = _list_state([NULL])
    assert models.af_queue()(s) == ()
    assert models.af_pseudo()(s) == (NULL,)
    assert models.af_multiset()(s) == ()


def test_af_two_elements():
    s = _list_state([NULL, "a", "b"])
    assert models.af_queue()(s) == ("a", "b")
    assert models.af_pseudo()(s) == (NULL, "a", "b")
    assert models.af_multiset()(s) == ("a", "b")


def test_af_dummy_value_distinguishes_pseudo_only():
    s1, s2 = _list_state(["u", "a"]), _list_state(["v", "a"])
    assert models.af_queue()(s1) == models.af_queue()(s2)
    assert models.af_pseudo()(s1) != models.af_pseudo()(s2)


def test_af_rejects_malformed_state():
    s = _list_state([NULL, "a"])
    bad = models.MSQueueState(s.nodes, 0, 0)  # tail lags behind the last node
    with pytest.raises(ValueError):
        models.af_pseudo()(bad)


def test_model_registry():
    assert models.parse_model_ref("hw-queue,N=3").initial_state.items == (NULL,) * 3
    assert models.parse_model_ref("ms-queue,P=2").initial_state.nodes[0].allocated
    with pytest.raises(ValueError):
        models.parse_model_ref("no-such-model")
    with pytest.raises(ValueError):
        models.parse_model_ref("hw-queue,N")

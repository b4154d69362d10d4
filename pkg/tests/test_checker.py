"""Linearization search, strict/general checks, brute-force oracle."""

import random

import pytest

from strictlin import checker, explorer, models, specs
from strictlin.checker import (
    RecordedExecution,
    brute_force_linearizations,
    check_concurrent_implementation,
    check_general,
    check_strict,
    find_linearization,
    find_strict_linearization,
    linearizes_by_bijection,
    recorded_executions,
)
from strictlin.history import (
    History,
    happened_before,
    history,
    inv,
    is_complete,
    is_sequential,
    linearizes,
    pending,
    ret,
    ret_abort,
)
from strictlin.programs import parse_program
from strictlin.reproductions import FIG3_FINAL, FIG3_LEGAL_FINAL, fig3_history
from strictlin.specs import (
    RenamingFunction,
    AbstractionFunction,
    Adt,
    legal_seq_outcomes,
    queue_adt,
)
from strictlin.values import EMPTY, UNIT


QUEUE = queue_adt(("a", "b"))


def test_empty_history_linearizes_to_empty():
    rec = RecordedExecution((), history([]), True, ())
    lin = find_linearization(rec, QUEUE)
    assert lin.witness == history([]) and lin.final_states == {()}


def test_illegal_single_op_has_no_witness():
    h = history([inv(1, 1, "Dequeue", UNIT), ret(1, 1, "x")])
    rec = RecordedExecution((), h, True, ())
    assert find_linearization(rec, QUEUE) is None


def test_fig3_linearization_and_strict_gap():
    m = models.hw_model(4)
    rec = RecordedExecution(m.initial_state, fig3_history(), True, FIG3_FINAL)
    lin = find_linearization(rec, m.seq_spec)
    assert lin is not None
    assert lin.final_states == {FIG3_LEGAL_FINAL}
    assert find_strict_linearization(rec, m.seq_spec) is None


def test_sequential_execution_is_its_own_strict_witness():
    h = history(
        [inv(1, 1, "Enqueue", "a"), ret(1, 1, UNIT),
         inv(1, 2, "Dequeue", UNIT), ret(1, 2, "a")]
    )
    (final,) = legal_seq_outcomes(QUEUE, (), h)
    rec = RecordedExecution((), h, True, final)
    assert find_strict_linearization(rec, QUEUE) == h


def test_witness_validity_properties():
    m = models.hw_model(4)
    rec = RecordedExecution(m.initial_state, fig3_history(), True, FIG3_FINAL)
    lin = find_linearization(rec, m.seq_spec)
    assert is_sequential(lin.witness) and is_complete(lin.witness)
    assert linearizes(lin.completion, lin.witness)
    assert legal_seq_outcomes(m.seq_spec, m.initial_state, lin.witness) == lin.final_states


def test_pending_op_closed_with_spec_allowed_return():
    # a pending dequeue may be closed (returning the enqueued value or EMPTY)
    # or dropped entirely
    h = history(
        [inv(1, 1, "Enqueue", "a"), ret(1, 1, UNIT), inv(2, 2, "Dequeue", UNIT)]
    )
    rec = RecordedExecution((), h, False)
    lin = find_linearization(rec, QUEUE)
    assert lin is not None
    assert pending(lin.completion) == frozenset()


def test_aborted_operation_blocks_linearization():
    h = history([inv(1, 1, "Enqueue", "a"), ret_abort(1, 1)])
    rec = RecordedExecution((), h, False)
    assert find_linearization(rec, QUEUE) is None


def test_strict_requires_terminated():
    h = history([inv(1, 1, "Enqueue", "a")])
    rec = RecordedExecution((), h, False)
    with pytest.raises(ValueError):
        find_strict_linearization(rec, QUEUE)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def test_two_overlapping_ops_two_linearizations():
    h = history(
        [inv(1, 1, "Enqueue", "a"), inv(2, 2, "Enqueue", "b"),
         ret(1, 1, UNIT), ret(2, 2, UNIT)]
    )
    assert len(brute_force_linearizations(h)) == 2


def test_two_non_overlapping_ops_one_linearization():
    h = history(
        [inv(1, 1, "Enqueue", "a"), ret(1, 1, UNIT),
         inv(2, 2, "Enqueue", "b"), ret(2, 2, UNIT)]
    )
    assert len(brute_force_linearizations(h)) == 1


def test_fig3_has_three_order_consistent_permutations():
    perms = brute_force_linearizations(fig3_history())
    assert len(perms) == 3
    hb = happened_before(fig3_history())
    for p in perms:
        assert hb.issubset(happened_before(p))


def test_bijection_check_agrees_with_canonical_on_samples():
    h = fig3_history()
    for cand in brute_force_linearizations(h):
        assert linearizes(h, cand) and linearizes_by_bijection(h, cand)


def test_oracle_size_guard():
    ev = []
    for i in range(1, 9):
        ev += [inv(1, i, "Enqueue", "a"), ret(1, i, UNIT)]
    with pytest.raises(ValueError):
        brute_force_linearizations(history(ev))


# ---------------------------------------------------------------------------
# oracle agreement on random workloads
# ---------------------------------------------------------------------------


def random_queue_history(rng: random.Random, max_ops=4):
    streams = []
    opid = 0
    budget = max_ops
    for t in (1, 2):
        ops = []
        take = rng.randint(1, max(1, budget - (2 - t)))
        budget -= take
        for _ in range(take):
            opid += 1
            if rng.random() < 0.5:
                ops.append((inv(t, opid, "Enqueue", rng.choice("ab")), ret(t, opid, UNIT)))
            else:
                ops.append(
                    (inv(t, opid, "Dequeue", UNIT), ret(t, opid, rng.choice(["a", "b", EMPTY])))
                )
        flat = [e for p in ops for e in p]
        if rng.random() < 0.35:
            flat = flat[:-1]
        streams.append(flat)
    merged = []
    while any(streams):
        s = rng.choice([s for s in streams if s])
        merged.append(s.pop(0))
    return history(merged)


def oracle_says_linearizable(h: History) -> bool:
    from strictlin.history import completions

    cands = {}
    for e in h:
        if e.op in pending(h):
            cands[e.op] = (
                (UNIT,) if getattr(e.label, "method", "") == "Enqueue"
                else ("a", "b", EMPTY)
            )
    pool = completions(h, cands) if pending(h) else [h]
    for hc in pool:
        for perm in brute_force_linearizations(hc):
            if legal_seq_outcomes(QUEUE, (), perm):
                return True
    return False


def test_search_agrees_with_oracle_on_random_histories():
    rng = random.Random(7)
    for _ in range(150):
        h = random_queue_history(rng)
        got = find_linearization(RecordedExecution((), h, False), QUEUE)
        assert (got is not None) == oracle_says_linearizable(h), h


# ---------------------------------------------------------------------------
# whole-execution-set checks
# ---------------------------------------------------------------------------


def _coarse_recs():
    p = parse_program(
        "thread { call Q.Enqueue('a') ; call y1 = Q.Dequeue() }\n"
        "thread { call y2 = Q.Dequeue() }"
    )
    m = models.coarse_queue_model(4, ("a", "b"))
    return m, recorded_executions(explorer.explore(p, m))


def test_check_strict_coarse_queue_passes():
    m, recs = _coarse_recs()
    rep = check_strict(recs, m.seq_spec)
    assert rep.passed
    assert all(e.witness is not None for e in rep.entries)


def test_check_strict_empty_execution_set_passes():
    m = models.coarse_queue_model()
    assert check_strict([], m.seq_spec).passed


def test_monotonicity_strict_implies_general_with_identity_abstraction():
    m, recs = _coarse_recs()
    assert check_strict(recs, m.seq_spec).passed
    ident_adt = Adt(
        name="coarse-as-adt",
        methods=dict(m.seq_spec.methods),
        initial_states=m.seq_spec.initial_states,
        method_inputs=dict(m.seq_spec.method_inputs),
        render_state=m.seq_spec.render_state,
    )
    af = AbstractionFunction("identity", lambda s: s)
    rf = RenamingFunction.identity(m.method_names())
    assert check_general(recs, ident_adt, af, rf).passed


def test_check_general_fails_on_lost_element():
    # a model that drops every second enqueue has histories no queue allows
    h = history(
        [inv(1, 1, "Enqueue", "a"), ret(1, 1, UNIT),
         inv(1, 2, "Enqueue", "b"), ret(1, 2, UNIT),
         inv(2, 3, "Dequeue", UNIT), ret(2, 3, "b")]
    )
    rec = RecordedExecution((), h, True, ())
    af = AbstractionFunction("identity", lambda s: s)
    rf = RenamingFunction.identity(("Enqueue", "Dequeue"))
    rep = check_general([rec], QUEUE, af, rf)
    assert not rep.passed and rep.failing()


def test_check_reports_are_deterministic():
    m, recs = _coarse_recs()
    a = check_strict(recs, m.seq_spec)
    b = check_strict(recs, m.seq_spec)
    assert a == b
    assert a.lines(m.seq_spec.render_state) == b.lines(m.seq_spec.render_state)


def test_recorded_executions_canonicalize_ms_node_names():
    p = parse_program(
        "thread { call Q.Enqueue('a') }\nthread { call Q.Enqueue('b') }"
    )
    m = models.ms_model(4)
    recs = recorded_executions(explorer.explore(p, m))
    keys = {
        (checker.serialize_history(r.history), models.ms_state_key(r.final_state))
        for r in recs
    }
    assert len(keys) == len(recs)


def test_concurrent_implementation_check_coarse_vs_queue():
    m, recs = _coarse_recs()
    af = AbstractionFunction("contents", lambda s: s[-1])
    rf = RenamingFunction.identity(("Enqueue", "Dequeue"))
    states = [(4, s) for s in [(), ("a",), ("b", "a")]]
    rep = check_concurrent_implementation(recs, m.seq_spec, QUEUE, af, rf, states)
    assert rep.passed and rep.impl.ok


# ---------------------------------------------------------------------------
# the array queue over its whole bounded execution set
# ---------------------------------------------------------------------------


def _hw_recs():
    from strictlin.reproductions import TWO_ENQUEUES_ONE_DEQUEUE

    m = models.hw_model(4)
    return m, recorded_executions(explorer.explore(TWO_ENQUEUES_ONE_DEQUEUE, m))


def test_hw_bounded_executions_fail_strict_with_contrast_witness():
    m, recs = _hw_recs()
    rep = check_strict(recs, m.seq_spec)
    assert not rep.passed
    # every failing execution exhibits the slot/value mismatch: the recorded
    # final state is never among the legal sequential finals
    for e in rep.failing():
        lin = find_linearization(e.execution, m.seq_spec)
        assert lin is not None  # linearizable in the classical sense
        assert e.execution.final_state not in lin.final_states
    assert any(e.execution.history == fig3_history() for e in rep.failing())


def test_hw_bounded_executions_pass_general_vs_queue_adt():
    m, recs = _hw_recs()
    rf = RenamingFunction.identity(("Enqueue", "Dequeue"))
    rep = check_general(recs, queue_adt(("c", "d")), models.af_hw_prefix(), rf)
    assert rep.passed


def test_strict_witness_final_state_membership():
    # for every strict witness the recorded final state is a legal outcome
    p = parse_program(
        "thread { call Q.Enqueue('a') ; call y1 = Q.Dequeue() }\n"
        "thread { call Q.Enqueue('b') ; call y2 = Q.Dequeue() }"
    )
    m = models.ms_model(4)
    recs = recorded_executions(explorer.explore(p, m))
    rep = check_strict(recs, m.seq_spec)
    assert rep.passed
    key = m.seq_spec.state_key
    for e in rep.entries:
        finals = legal_seq_outcomes(m.seq_spec, e.execution.initial_state, e.witness)
        assert key(e.execution.final_state) in {key(s) for s in finals}

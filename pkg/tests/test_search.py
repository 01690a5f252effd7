import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egbtt import (
    Criterion,
    EvalParams,
    Position,
    egb_run,
    evaluate,
    local_search,
    sort_events,
)
from egbtt import _kernels, search
from egbtt.grouping import max_groups
from egbtt.search import trace_csv

from conftest import make_instance, small_instance
from oracles import greedy_oracle, rotation_oracle

PARAMS = [EvalParams(), EvalParams(w_gap=2.0, w_single=0.5, w_last=1.5), EvalParams(w_last=0.0)]


def test_single_event_goes_first_slot():
    inst = make_instance([(1.3, 2, "L1", ["S1"])], days=2, slots=4)
    tt, ev = local_search(inst, [0])
    assert tt.assignments == {"e0": Position(0, 0, "R1")}
    # Exhaustive: every position's single-event cost; the earliest minimum is (0, 0).
    costs = {(d, t): evaluate(inst, tt.__class__({"e0": Position(d, t, "R1")}, frozenset())).total
             for d in range(2) for t in range(3)}
    assert min(costs, key=lambda k: (costs[k], k)) == (0, 0)
    assert ev.total == 1.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(4, 8), pi=st.integers(0, 2),
       data=st.data())
def test_local_search_matches_stepwise_oracle(seed, n, pi, data):
    inst = small_instance(n, seed)
    order = data.draw(st.permutations(list(range(n))))
    tt, ev = local_search(inst, order, PARAMS[pi])
    assert tt == greedy_oracle(inst, order, PARAMS[pi])
    assert ev == evaluate(inst, tt, PARAMS[pi])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(4, 40), data=st.data())
def test_backends_agree(seed, n, data):
    inst = small_instance(n, seed, students=30, rooms=4, days=3, slots=6)
    order = np.array(data.draw(st.permutations(list(range(n)))))
    a = _kernels.greedy_construct(order, inst.arrays, 1.0, 0.7, 2.0, backend="numba")
    b = _kernels.greedy_construct(order, inst.arrays, 1.0, 0.7, 2.0, backend="numpy")
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_backend_env_flag(monkeypatch):
    monkeypatch.setenv("EGBTT_BACKEND", "numpy")
    assert _kernels.default_backend() == "numpy"
    monkeypatch.setenv("EGBTT_BACKEND", "fortran")
    with pytest.raises(ValueError):
        _kernels.default_backend()
    monkeypatch.delenv("EGBTT_BACKEND")
    assert _kernels.default_backend() == "numba"


def test_local_search_deterministic_and_feasible(ds90):
    order = sort_events(ds90, Criterion.NUMBER)
    a = local_search(ds90, order)
    b = local_search(ds90, order)
    assert a == b
    assert a[1].hard_total == 0


def test_local_search_rejects_non_permutation():
    inst = small_instance(6, 0)
    with pytest.raises(ValueError):
        local_search(inst, [0, 1, 2, 3, 4, 4])


def test_unplaced_when_nothing_fits():
    # One slot, one room, three events: only the first can be placed.
    inst = make_instance([(1.0, 1, "L1", ["S1"]), (1.0, 1, "L1", ["S2"]), (1.0, 1, "L1", ["S3"])],
                         slots=1)
    tt, ev = local_search(inst, [2, 0, 1])
    assert list(tt.assignments) == ["e2"]
    assert tt.unplaced == {"e0", "e1"}
    assert ev.total == 20.0 + (1 + 1.0) / 3


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(8, 12), crit=st.sampled_from(list(Criterion)))
def test_egb_matches_rotation_oracle(seed, n, crit):
    inst = small_instance(n, seed)
    for m in range(2, max_groups(n) + 1):
        run = egb_run(inst, m, crit)
        evals, rots, p = rotation_oracle(inst, m, crit, EvalParams())
        assert [t.best_eval for t in run.traces] == evals
        assert [t.best_rotation for t in run.traces] == rots
        assert list(run.final_permutation) == p
        assert run.best_eval == evals[-1]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(4, 40), crit=st.sampled_from(list(Criterion)))
def test_egb_invariants(seed, n, crit):
    inst = small_instance(n, seed, students=30, rooms=4, days=3, slots=6)
    for m in range(2, max_groups(n) + 1):
        run = egb_run(inst, m, crit)
        ev = [t.best_eval for t in run.traces]
        assert all(b <= a for a, b in zip(ev, ev[1:]))
        assert run.local_search_calls == n
        assert len(run.traces) == m
        assert all(0 <= t.best_rotation <= t.window[1] - t.window[0] for t in run.traces)
        assert run.best_eval == ev[-1] == evaluate(inst, run.best_timetable).total
        assert run.best_evaluation.hard_total == 0
        assert sorted(run.final_permutation) == list(range(n))


def test_call_count_instrumented(monkeypatch, ds90):
    calls = []
    real = search.local_search

    def counting(*args, **kw):
        calls.append(1)
        return real(*args, **kw)

    monkeypatch.setattr(search, "local_search", counting)
    run = egb_run(ds90, 13, Criterion.DURATION)
    # n scan calls plus the one re-derivation of the final timetable.
    assert len(calls) == 90 + 1
    assert run.local_search_calls == 90


def test_identity_rotations_keep_sorted_order():
    # Disjoint students and lecturers, plenty of rooms: every order scores the same.
    inst = make_instance([(float(i + 1), 1, f"L{i}", [f"S{i}"]) for i in range(6)],
                         lecturers=tuple(f"L{i}" for i in range(6)),
                         rooms=tuple((f"R{i}", 5) for i in range(6)))
    for crit in Criterion:
        run = egb_run(inst, 3, crit)
        assert [t.best_rotation for t in run.traces] == [0, 0, 0]
        assert list(run.final_permutation) == sort_events(inst, crit)


def test_egb_deterministic(ds90):
    assert egb_run(ds90, 7, Criterion.WEIGHT) == egb_run(ds90, 7, Criterion.WEIGHT)


def test_egb_m_out_of_range():
    inst = small_instance(11, 0)
    with pytest.raises(ValueError, match="out of range"):
        egb_run(inst, 6, Criterion.INDEX)


def test_trace_csv(ds90):
    run = egb_run(ds90, 13, Criterion.DURATION)
    lines = trace_csv(run).splitlines()
    assert lines[0] == "m,criterion,group,from,to,best_rotation,best_eval"
    assert len(lines) == 14
    first = lines[1].split(",")
    assert first[:5] == ["13", "duration", "0", "0", "6"]
    col = [float(l.split(",")[-1]) for l in lines[1:]]
    assert col == sorted(col, reverse=True)
    assert all(len(l.split(",")[-1].split(".")[1]) == 3 for l in lines[1:])

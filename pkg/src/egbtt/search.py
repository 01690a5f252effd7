"""Greedy local search for a fixed event order, and the event-grouping search."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .evaluation import EvalParams, EvalResult, evaluate_arrays
from .grouping import Criterion, partition, rotate_window, sort_events
from .model import Instance, Position, Timetable


class InvariantError(RuntimeError):
    """An internal search invariant did not hold."""


def decode_placement(inst: Instance, day, start, room) -> Timetable:
    assignments = {}
    unplaced = []
    for e in inst.by_index:
        k = e.index
        if day[k] < 0:
            unplaced.append(e.id)
        else:
            assignments[e.id] = Position(int(day[k]), int(start[k]), inst.rooms[room[k]].id)
    return Timetable(assignments, frozenset(unplaced))


def local_search(inst: Instance, p: Sequence[int], params: EvalParams = EvalParams(),
                 backend: Optional[str] = None) -> Tuple[Timetable, EvalResult]:
    """Build a timetable by placing events in permutation order.

    Each event goes to the feasible (day, start_slot, room) with the smallest
    increase in the objective; the lexicographically earliest position wins
    ties. Events with no feasible position are left unplaced.
    """
    if sorted(p) != list(range(inst.n)):
        raise ValueError("p must be a permutation of 0..n-1")
    day, start, room = _kernels.greedy_construct(
        p, inst.arrays, params.w_gap, params.w_single, params.w_last, backend
    )
    tt = decode_placement(inst, day, start, room)
    start = np.where(day >= 0, start, 0)
    return tt, evaluate_arrays(inst.arrays, day, start, room, len(tt.unplaced), params)


@dataclass(frozen=True)
class GroupTrace:
    group_index: int
    window: Tuple[int, int]
    best_rotation: int
    best_eval: float


@dataclass(frozen=True)
class RunResult:
    m: int
    criterion: Criterion
    traces: Tuple[GroupTrace, ...]
    final_permutation: Tuple[int, ...]
    best_timetable: Timetable
    best_evaluation: EvalResult
    best_eval: float
    local_search_calls: int


def egb_run(inst: Instance, m: int, c: Criterion, params: EvalParams = EvalParams(),
            backend: Optional[str] = None) -> RunResult:
    """Scan every cyclic rotation of each group in turn, keeping the best one.

    The permutation starts from ``sort_events(inst, c)``. For each window the
    incoming order is rotation 0; the window is shifted left one position at a
    time until it returns to its incoming state, and the smallest rotation
    with the lowest evaluation is then applied before moving on. Since the
    incoming order is always a candidate, best evaluations never get worse
    from one group to the next.
    """
    c = Criterion(c)
    grouping = partition(inst.n, m)
    p = sort_events(inst, c)
    calls = 0
    traces: List[GroupTrace] = []
    for gi, (lo, hi) in enumerate(grouping.windows):
        incoming = p[lo:hi + 1]
        best_eval = float("inf")
        best_rot = 0
        for rot in range(hi - lo + 1):
            _, ev = local_search(inst, p, params, backend)
            calls += 1
            if ev.total < best_eval:
                best_eval = ev.total
                best_rot = rot
            p = rotate_window(p, lo, hi, 1)
        if p[lo:hi + 1] != incoming:
            raise InvariantError(f"group {gi}: rotation scan did not restore the window")
        p = rotate_window(p, lo, hi, best_rot)
        if traces and best_eval > traces[-1].best_eval:
            raise InvariantError(f"group {gi}: best evaluation increased")
        traces.append(GroupTrace(gi, (lo, hi), best_rot, best_eval))

    tt, ev = local_search(inst, p, params, backend)
    if ev.total != traces[-1].best_eval:
        raise InvariantError("re-derived timetable does not match the best evaluation")
    return RunResult(
        m=m,
        criterion=c,
        traces=tuple(traces),
        final_permutation=tuple(p),
        best_timetable=tt,
        best_evaluation=ev,
        best_eval=ev.total,
        local_search_calls=calls,
    )


TRACE_HEADER = ("m", "criterion", "group", "from", "to", "best_rotation", "best_eval")


def trace_csv(run: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for t in run.traces:
        w.writerow([run.m, run.criterion.value, t.group_index, t.window[0], t.window[1],
                    t.best_rotation, f"{t.best_eval:.3f}"])
    return buf.getvalue()

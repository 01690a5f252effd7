"""Greedy placement kernel, compiled with numba when available.

Set ``EGBTT_BACKEND=numpy`` to force the vectorised numpy path; the default
is ``numba`` and silently degrades to numpy if numba cannot be imported.
Both paths perform the same floating point operations in the same order, so
they return identical placements.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    want = os.environ.get("EGBTT_BACKEND", "numba").strip().lower()
    if want not in BACKENDS:
        raise ValueError(f"EGBTT_BACKEND must be one of {BACKENDS}, got {want!r}")
    if want == "numba" and not HAVE_NUMBA:
        return "numpy"
    return want


def _greedy_py(order, duration, weight, lecturer, stud_ptr, stud_idx, capacity,
               n_students, n_lecturers, days, slots, w_gap, w_single, w_last):
    n = order.shape[0]
    n_rooms = capacity.shape[0]
    s_occ = np.zeros((n_students, days, slots), dtype=np.bool_)
    s_cnt = np.zeros((n_students, days), dtype=np.int64)
    s_first = np.zeros((n_students, days), dtype=np.int64)
    s_last = np.zeros((n_students, days), dtype=np.int64)
    s_used = np.zeros((n_students, days), dtype=np.int64)
    l_occ = np.zeros((n_lecturers, days, slots), dtype=np.bool_)
    r_occ = np.zeros((n_rooms, days, slots), dtype=np.bool_)
    out_day = np.full(n, -1, dtype=np.int64)
    out_start = np.full(n, -1, dtype=np.int64)
    out_room = np.full(n, -1, dtype=np.int64)
    norm = float(n_students)

    for k in range(n):
        e = order[k]
        dur = duration[e]
        a = stud_ptr[e]
        b = stud_ptr[e + 1]
        size = b - a
        lec = lecturer[e]
        best = np.inf
        bd = -1
        bt = -1
        br = -1
        for d in range(days):
            for t in range(slots - dur + 1):
                ok = True
                for u in range(t, t + dur):
                    if l_occ[lec, d, u]:
                        ok = False
                        break
                if not ok:
                    continue
                for j in range(a, b):
                    s = stud_idx[j]
                    for u in range(t, t + dur):
                        if s_occ[s, d, u]:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                dg = 0
                ds = 0
                for j in range(a, b):
                    s = stud_idx[j]
                    c = s_cnt[s, d]
                    if c == 0:
                        ds += 1
                    else:
                        f = s_first[s, d]
                        la = s_last[s, d]
                        used = s_used[s, d]
                        old_gap = la - f + 1 - used
                        new_gap = max(la, t + dur - 1) - min(f, t) + 1 - used - dur
                        dg += new_gap - old_gap
                        if c == 1:
                            ds -= 1
                delta = w_gap * dg + w_single * ds
                if t + dur == slots:
                    delta += w_last * weight[e]
                delta /= norm
                if not delta < best:
                    continue
                room = -1
                for r in range(n_rooms):
                    if capacity[r] < size:
                        continue
                    free = True
                    for u in range(t, t + dur):
                        if r_occ[r, d, u]:
                            free = False
                            break
                    if free:
                        room = r
                        break
                if room < 0:
                    continue
                best = delta
                bd = d
                bt = t
                br = room
        if bd < 0:
            continue
        out_day[e] = bd
        out_start[e] = bt
        out_room[e] = br
        for u in range(bt, bt + dur):
            l_occ[lec, bd, u] = True
            r_occ[br, bd, u] = True
        for j in range(a, b):
            s = stud_idx[j]
            for u in range(bt, bt + dur):
                s_occ[s, bd, u] = True
            if s_cnt[s, bd] == 0:
                s_first[s, bd] = bt
                s_last[s, bd] = bt + dur - 1
            else:
                s_first[s, bd] = min(s_first[s, bd], bt)
                s_last[s, bd] = max(s_last[s, bd], bt + dur - 1)
            s_cnt[s, bd] += 1
            s_used[s, bd] += dur
    return out_day, out_start, out_room


if HAVE_NUMBA:
    _greedy_numba = njit(cache=True, nogil=True)(_greedy_py)
else:  # pragma: no cover
    _greedy_numba = None


def _window_busy(occ, dur):
    """occ (..., T) bool -> (..., T-dur+1) bool: any busy slot in [t, t+dur)."""
    cs = np.zeros(occ.shape[:-1] + (occ.shape[-1] + 1,), dtype=np.int64)
    np.cumsum(occ, axis=-1, out=cs[..., 1:])
    win = occ.shape[-1] - dur + 1
    return (cs[..., dur:dur + win] - cs[..., :win]) > 0


def _greedy_numpy(order, duration, weight, lecturer, stud_ptr, stud_idx, capacity,
                  n_students, n_lecturers, days, slots, w_gap, w_single, w_last):
    n = order.shape[0]
    s_occ = np.zeros((n_students, days, slots), dtype=np.bool_)
    s_cnt = np.zeros((n_students, days), dtype=np.int64)
    s_first = np.zeros((n_students, days), dtype=np.int64)
    s_last = np.zeros((n_students, days), dtype=np.int64)
    s_used = np.zeros((n_students, days), dtype=np.int64)
    l_occ = np.zeros((n_lecturers, days, slots), dtype=np.bool_)
    r_occ = np.zeros((capacity.shape[0], days, slots), dtype=np.bool_)
    out_day = np.full(n, -1, dtype=np.int64)
    out_start = np.full(n, -1, dtype=np.int64)
    out_room = np.full(n, -1, dtype=np.int64)
    norm = float(n_students)

    for e in order:
        dur = int(duration[e])
        studs = stud_idx[stud_ptr[e]:stud_ptr[e + 1]]
        lec = lecturer[e]
        win = slots - dur + 1
        if win <= 0:
            continue
        blocked = _window_busy(s_occ[studs].any(axis=0) | l_occ[lec], dur)  # (D, win)
        fits = capacity >= studs.shape[0]
        room_free = ~_window_busy(r_occ, dur) & fits[:, None, None]  # (R, D, win)
        feasible = ~blocked & room_free.any(axis=0)
        if not feasible.any():
            continue
        first_room = room_free.argmax(axis=0)

        t = np.arange(win)
        cnt = s_cnt[studs][:, :, None]
        f = s_first[studs][:, :, None]
        la = s_last[studs][:, :, None]
        used = s_used[studs][:, :, None]
        old_gap = la - f + 1 - used
        new_gap = np.maximum(la, t + dur - 1) - np.minimum(f, t) + 1 - used - dur
        dg = np.where(cnt > 0, new_gap - old_gap, 0).sum(axis=0)  # (D, win)
        ds = ((cnt == 0).astype(np.int64) - (cnt == 1)).sum(axis=0)  # (D, 1)
        delta = w_gap * dg + w_single * ds
        delta = delta + np.where(t + dur == slots, w_last * weight[e], 0.0)
        delta = delta / norm
        delta[~feasible] = np.inf
        flat = int(np.argmin(delta))
        bd, bt = divmod(flat, win)
        br = int(first_room[bd, bt])

        out_day[e] = bd
        out_start[e] = bt
        out_room[e] = br
        l_occ[lec, bd, bt:bt + dur] = True
        r_occ[br, bd, bt:bt + dur] = True
        s_occ[studs, bd, bt:bt + dur] = True
        fresh = s_cnt[studs, bd] == 0
        s_first[studs, bd] = np.where(fresh, bt, np.minimum(s_first[studs, bd], bt))
        s_last[studs, bd] = np.where(fresh, bt + dur - 1, np.maximum(s_last[studs, bd], bt + dur - 1))
        s_cnt[studs, bd] += 1
        s_used[studs, bd] += dur
    return out_day, out_start, out_room


def greedy_construct(order, arrays, w_gap, w_single, w_last, backend=None):
    """Place events in ``order``; returns (day, start, room) arrays, -1 where unplaced.

    Arrays are indexed by event ordinal index, not by position in ``order``.
    """
    backend = backend or default_backend()
    if backend == "numba" and HAVE_NUMBA:
        fn = _greedy_numba
    elif backend in BACKENDS:
        fn = _greedy_numpy
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return fn(
        np.ascontiguousarray(order, dtype=np.int64),
        arrays.duration, arrays.weight, arrays.lecturer,
        arrays.stud_ptr, arrays.stud_idx, arrays.capacity,
        arrays.n_students, arrays.n_lecturers, arrays.days, arrays.slots,
        float(w_gap), float(w_single), float(w_last),
    )

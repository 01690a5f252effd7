"""Hard/soft constraint model and the scalar objective.

Hard constraints (penalised with ``hard_penalty`` per violation count):

* student_clash  - a student in two events during the same slot
* lecturer_clash - a lecturer in two events during the same slot
* room_clash     - a room hosting two events during the same slot
* capacity       - enrolment larger than the room
* out_of_grid    - an event running past the end of its day

Soft components, summed and divided by the number of students:

* gap_slots          - idle slots between a student's first and last busy slot of a day
* single_event_days  - student-days with exactly one event
* last_slot_weighted - sum of weights of events occupying a day's final slot
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .model import Event, Instance, Position, Timetable, check_timetable

HARD_KINDS = ("student_clash", "lecturer_clash", "room_clash", "capacity", "out_of_grid")


@dataclass(frozen=True)
class EvalParams:
    w_gap: float = 1.0
    w_single: float = 1.0
    w_last: float = 1.0
    unplaced_penalty: float = 10.0
    hard_penalty: float = 100.0

    def __post_init__(self):
        for name in ("w_gap", "w_single", "w_last"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.unplaced_penalty > 0:
            raise ValueError("unplaced_penalty must be > 0")
        if not self.hard_penalty > 0:
            raise ValueError("hard_penalty must be > 0")

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalParams":
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown eval parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in doc.items()})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EvalResult:
    hard: Dict[str, int]
    gap_slots: int
    single_event_days: int
    last_slot_weighted: float
    unplaced: int
    total: float
    n_students: int = field(default=1, repr=False)

    @property
    def hard_total(self) -> int:
        return sum(self.hard.values())

    @property
    def soft(self) -> Dict[str, float]:
        return {
            "gap_slots": self.gap_slots,
            "single_event_days": self.single_event_days,
            "last_slot_weighted": self.last_slot_weighted,
        }

    def to_dict(self) -> dict:
        return {
            "hard": dict(self.hard),
            "soft": self.soft,
            "unplaced": self.unplaced,
            "total": self.total,
        }


def combine(gap: int, single: int, last_weighted: float, unplaced: int, hard: int,
            n_students: int, p: EvalParams) -> float:
    """The objective as a function of the component counts."""
    soft = (p.w_gap * gap + p.w_single * single + p.w_last * last_weighted) / n_students
    return soft + p.unplaced_penalty * unplaced + p.hard_penalty * hard


def _expand(keys, start, length):
    """Per-slot (key, slot) pairs for runs ``[start, start+length)``."""
    total = int(length.sum())
    offsets = np.arange(total) - np.repeat(np.cumsum(length) - length, length)
    return np.repeat(keys, length), np.repeat(start, length) + offsets


def _clash(keys, day, start, length, n_keys, days, slots) -> int:
    k, t = _expand(keys, start, length)
    d = np.repeat(day, length)
    occ = np.bincount((k * days + d) * slots + t, minlength=n_keys * days * slots)
    return int(np.maximum(occ - 1, 0).sum())


def evaluate_arrays(a, day, start, room, n_unplaced: int, p: EvalParams) -> EvalResult:
    """Score a placement given as per-event (day, start, room) arrays, -1 = not placed."""
    D, T = a.days, a.slots
    placed = day >= 0
    ends = start + a.duration
    out_of_grid = int((placed & (ends > T)).sum())
    length = np.where(placed, np.minimum(ends, T) - start, 0)
    capacity = int((placed & (a.capacity[np.maximum(room, 0)] < a.size)).sum())
    last_weighted = float(a.weight[placed & (ends >= T)].sum())

    ev = a.stud_event[placed[a.stud_event]]
    studs = a.stud_idx[placed[a.stud_event]]
    s_ln = length[ev]
    hard = {
        "student_clash": _clash(studs, day[ev], start[ev], s_ln, a.n_students, D, T),
        "lecturer_clash": _clash(a.lecturer[placed], day[placed], start[placed], length[placed],
                                 a.n_lecturers, D, T),
        "room_clash": _clash(room[placed], day[placed], start[placed], length[placed],
                             a.capacity.shape[0], D, T),
        "capacity": capacity,
        "out_of_grid": out_of_grid,
    }
    cnt = np.bincount(studs * D + day[ev], minlength=a.n_students * D)
    k, t = _expand(studs * D + day[ev], start[ev], s_ln)
    busy = np.zeros(a.n_students * D * T, dtype=np.bool_)
    busy[k * T + t] = True
    busy = busy.reshape(a.n_students * D, T)
    any_busy = busy.any(axis=1)
    first = busy.argmax(axis=1)
    last = T - 1 - busy[:, ::-1].argmax(axis=1)
    span = np.where(any_busy, last - first + 1, 0)
    gap = int((span - busy.sum(axis=1)).sum())
    single = int((cnt == 1).sum())
    total = combine(gap, single, last_weighted, n_unplaced, sum(hard.values()), a.n_students, p)
    return EvalResult(hard, gap, single, last_weighted, n_unplaced, total, a.n_students)


def evaluate(inst: Instance, tt: Timetable, p: EvalParams = EvalParams()) -> EvalResult:
    """Score a timetable; arbitrary (even clashing or partial) timetables are accepted."""
    check_timetable(inst, tt, complete=False)
    n = inst.n
    day = np.full(n, -1, dtype=np.int64)
    start = np.zeros(n, dtype=np.int64)
    room = np.full(n, -1, dtype=np.int64)
    for e in inst.events:
        pos = tt.assignments.get(e.id)
        if pos is not None:
            day[e.index] = pos.day
            start[e.index] = pos.start_slot
            room[e.index] = inst.room_index[pos.room]
    return evaluate_arrays(inst.arrays, day, start, room, len(tt.unplaced), p)


def _overlaps(pos: Position, dur: int, other: Position, other_dur: int) -> bool:
    return (
        pos.day == other.day
        and pos.start_slot < other.start_slot + other_dur
        and other.start_slot < pos.start_slot + dur
    )


def is_feasible_position(inst: Instance, tt: Timetable, e: Event, pos: Position) -> bool:
    """True iff placing ``e`` at ``pos`` breaks no hard constraint against ``tt``."""
    if e.id in tt.assignments:
        raise ValueError(f"event {e.id!r} is already placed")
    g = inst.grid
    if not (0 <= pos.day < g.days and 0 <= pos.start_slot
            and pos.start_slot + e.duration <= g.slots_per_day):
        return False
    r = inst.room_index.get(pos.room)
    if r is None or inst.rooms[r].capacity < len(e.students):
        return False
    studs = set(e.students)
    for oid, opos in tt.assignments.items():
        o = inst.event_by_id[oid]
        if not _overlaps(pos, e.duration, opos, o.duration):
            continue
        if opos.room == pos.room or o.lecturer == e.lecturer or studs.intersection(o.students):
            return False
    return True


def _student_day_stats(inst: Instance, tt: Timetable, day: int, students) -> Dict[str, Tuple[int, int, int, int]]:
    """Per student: (event count, first slot, last slot, busy slots) on ``day``."""
    wanted = set(students)
    stats: Dict[str, List[int]] = {}
    for oid, opos in tt.assignments.items():
        if opos.day != day:
            continue
        o = inst.event_by_id[oid]
        end = opos.start_slot + o.duration - 1
        for s in wanted.intersection(o.students):
            st = stats.get(s)
            if st is None:
                stats[s] = [1, opos.start_slot, end, o.duration]
            else:
                st[0] += 1
                st[1] = min(st[1], opos.start_slot)
                st[2] = max(st[2], end)
                st[3] += o.duration
    return {s: tuple(v) for s, v in stats.items()}


def placement_delta(inst: Instance, tt: Timetable, e: Event, pos: Position,
                    p: EvalParams = EvalParams()) -> float:
    """Change in total caused by placing ``e`` at ``pos``, computed incrementally.

    Only the student-days touched by ``e`` are inspected. Assumes ``tt`` is
    free of student clashes, which holds for anything built from feasible
    placements.
    """
    if not is_feasible_position(inst, tt, e, pos):
        raise ValueError(f"infeasible position {pos} for event {e.id!r}")
    t0, t1 = pos.start_slot, pos.start_slot + e.duration - 1
    stats = _student_day_stats(inst, tt, pos.day, e.students)
    dgap = dsingle = 0
    for s in e.students:
        st = stats.get(s)
        if st is None:
            dsingle += 1
            continue
        cnt, first, last, used = st
        old_gap = last - first + 1 - used
        new_gap = max(last, t1) - min(first, t0) + 1 - used - e.duration
        dgap += new_gap - old_gap
        if cnt == 1:
            dsingle -= 1
    last_term = e.weight if t1 == inst.grid.slots_per_day - 1 else 0.0
    soft = p.w_gap * dgap + p.w_single * dsingle + p.w_last * last_term
    # Unplaced count drops by one when a previously unplaced event is placed.
    unplaced_term = -p.unplaced_penalty if e.id in tt.unplaced else 0.0
    return soft / len(inst.students) + unplaced_term

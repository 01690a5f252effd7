"""Domain types, JSON instance/timetable formats and instance validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Tuple

import numpy as np


class InstanceError(ValueError):
    """Raised for malformed or invalid instance/timetable documents."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


@dataclass(frozen=True)
class Event:
    id: str
    index: int
    weight: float
    duration: int
    lecturer: str
    students: Tuple[str, ...]


@dataclass(frozen=True)
class Room:
    id: str
    capacity: int


@dataclass(frozen=True)
class TimeGrid:
    days: int = 5
    slots_per_day: int = 8

    @property
    def n_slots(self) -> int:
        return self.days * self.slots_per_day


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str
    level: str = "error"  # "error" | "warning"

    def __str__(self) -> str:
        return f"{self.level}: {self.path}: {self.message}"


@dataclass(frozen=True)
class InstanceArrays:
    """Integer-indexed view of an instance used by the numeric kernels."""

    duration: np.ndarray  # (n,) int64
    weight: np.ndarray  # (n,) float64
    lecturer: np.ndarray  # (n,) int64
    size: np.ndarray  # (n,) int64, enrolment
    stud_ptr: np.ndarray  # (n+1,) CSR offsets into stud_idx
    stud_idx: np.ndarray  # student indices per event
    stud_event: np.ndarray  # event index owning each stud_idx entry
    capacity: np.ndarray  # (rooms,) int64
    n_students: int
    n_lecturers: int
    days: int
    slots: int


@dataclass(frozen=True)
class Instance:
    name: str
    grid: TimeGrid
    rooms: Tuple[Room, ...]
    lecturers: Tuple[str, ...]
    students: Tuple[str, ...]
    events: Tuple[Event, ...]

    @property
    def n(self) -> int:
        return len(self.events)

    @cached_property
    def event_by_id(self) -> Dict[str, Event]:
        return {e.id: e for e in self.events}

    @cached_property
    def room_index(self) -> Dict[str, int]:
        return {r.id: i for i, r in enumerate(self.rooms)}

    @cached_property
    def by_index(self) -> Tuple[Event, ...]:
        """Events ordered by their ordinal index (position k holds index k)."""
        return tuple(sorted(self.events, key=lambda e: e.index))

    @cached_property
    def arrays(self) -> InstanceArrays:
        # Assumes a validated instance.
        evs = self.by_index
        s_pos = {s: i for i, s in enumerate(self.students)}
        l_pos = {lec: i for i, lec in enumerate(self.lecturers)}
        ptr = np.zeros(len(evs) + 1, dtype=np.int64)
        idx: List[int] = []
        for k, e in enumerate(evs):
            idx.extend(s_pos[s] for s in e.students)
            ptr[k + 1] = len(idx)
        return InstanceArrays(
            duration=np.array([e.duration for e in evs], dtype=np.int64),
            weight=np.array([e.weight for e in evs], dtype=np.float64),
            lecturer=np.array([l_pos[e.lecturer] for e in evs], dtype=np.int64),
            size=np.array([len(e.students) for e in evs], dtype=np.int64),
            stud_ptr=ptr,
            stud_idx=np.array(idx, dtype=np.int64),
            stud_event=np.repeat(np.arange(len(evs), dtype=np.int64), np.diff(ptr)),
            capacity=np.array([r.capacity for r in self.rooms], dtype=np.int64),
            n_students=len(self.students),
            n_lecturers=len(self.lecturers),
            days=self.grid.days,
            slots=self.grid.slots_per_day,
        )


@dataclass(frozen=True)
class Position:
    day: int
    start_slot: int
    room: str


@dataclass(frozen=True)
class Timetable:
    assignments: Mapping[str, Position] = field(default_factory=dict)
    unplaced: FrozenSet[str] = frozenset()

    @classmethod
    def empty(cls, inst: Instance) -> "Timetable":
        return cls({}, frozenset(e.id for e in inst.events))

    def place(self, event_id: str, pos: Position) -> "Timetable":
        """Return a copy with ``event_id`` moved from unplaced to ``pos``."""
        assignments = dict(self.assignments)
        assignments[event_id] = pos
        return Timetable(assignments, self.unplaced - {event_id})


def check_timetable(inst: Instance, tt: Timetable, complete: bool = True) -> None:
    """Raise InstanceError unless ``tt`` is structurally consistent with ``inst``.

    Positions whose event runs past the end of the day are allowed here; they
    are scored as out-of-grid hard violations by the evaluator. With
    ``complete=False`` events missing from both assignments and unplaced are
    tolerated (a partial timetable under construction).
    """
    ids = inst.event_by_id
    for eid, pos in tt.assignments.items():
        if eid not in ids:
            raise InstanceError(f"unknown event {eid!r}", f"$.assignments[{eid}]")
        if pos.room not in inst.room_index:
            raise InstanceError(f"unknown room {pos.room!r}", f"$.assignments[{eid}].room")
        if not 0 <= pos.day < inst.grid.days:
            raise InstanceError(f"day {pos.day} outside grid", f"$.assignments[{eid}].day")
        if not 0 <= pos.start_slot < inst.grid.slots_per_day:
            raise InstanceError(
                f"start_slot {pos.start_slot} outside grid", f"$.assignments[{eid}].start_slot"
            )
    for eid in tt.unplaced:
        if eid not in ids:
            raise InstanceError(f"unknown event {eid!r}", "$.unplaced")
        if eid in tt.assignments:
            raise InstanceError(f"event {eid!r} both placed and unplaced", "$.unplaced")
    missing = set(ids) - set(tt.assignments) - set(tt.unplaced)
    if complete and missing:
        raise InstanceError(f"events neither placed nor unplaced: {sorted(missing)}")


def validate_instance(inst: Instance) -> List[Diagnostic]:
    """Return diagnostics for every violated instance invariant.

    Errors make the instance unusable; warnings (an event larger than every
    room) are reported but tolerated.
    """
    out: List[Diagnostic] = []

    def err(path: str, msg: str) -> None:
        out.append(Diagnostic(path, msg))

    g = inst.grid
    if g.days < 1:
        err("$.days", "must be >= 1")
    if g.slots_per_day < 1:
        err("$.slots_per_day", "must be >= 1")

    def dupes(path: str, ids) -> None:
        seen = set()
        for i, x in enumerate(ids):
            if x in seen:
                err(f"{path}[{i}]", f"duplicate id {x!r}")
            seen.add(x)

    dupes("$.rooms", [r.id for r in inst.rooms])
    dupes("$.lecturers", inst.lecturers)
    dupes("$.students", inst.students)
    dupes("$.events", [e.id for e in inst.events])
    if not inst.rooms:
        err("$.rooms", "at least one room required")
    for i, r in enumerate(inst.rooms):
        if r.capacity < 1:
            err(f"$.rooms[{i}].capacity", "must be >= 1")

    n = len(inst.events)
    if n < 4:
        err("$.events", f"at least 4 events required, got {n}")
    indices = sorted(e.index for e in inst.events)
    if indices != list(range(n)):
        err("$.events", "event indices must be unique and form 0..n-1")

    lecturers = set(inst.lecturers)
    students = set(inst.students)
    max_cap = max((r.capacity for r in inst.rooms), default=0)
    for i, e in enumerate(inst.events):
        p = f"$.events[{i}]"
        if not e.weight > 0:
            err(f"{p}.weight", "must be > 0")
        if e.duration < 1:
            err(f"{p}.duration", "must be >= 1")
        elif e.duration > g.slots_per_day:
            err(f"{p}.duration", f"duration {e.duration} exceeds slots_per_day {g.slots_per_day}")
        if e.lecturer not in lecturers:
            err(f"{p}.lecturer", f"dangling lecturer reference {e.lecturer!r}")
        if not e.students:
            err(f"{p}.students", "must be non-empty")
        if len(set(e.students)) != len(e.students):
            err(f"{p}.students", "duplicate student in enrolment")
        for j, s in enumerate(e.students):
            if s not in students:
                err(f"{p}.students[{j}]", f"dangling student reference {s!r}")
        if inst.rooms and len(e.students) > max_cap:
            out.append(
                Diagnostic(
                    p,
                    f"enrolment {len(e.students)} exceeds every room capacity (max {max_cap})",
                    "warning",
                )
            )
    return out


# --- JSON -------------------------------------------------------------------


def _require(obj: dict, key: str, kind, path: str):
    if not isinstance(obj, dict):
        raise InstanceError("expected an object", path)
    if key not in obj:
        raise InstanceError(f"missing required field {key!r}", path)
    val = obj[key]
    ok = isinstance(val, kind) and not (kind is not bool and isinstance(val, bool))
    if not ok:
        raise InstanceError(f"field {key!r} has wrong type {type(val).__name__}", f"{path}.{key}")
    return val


def _str_list(obj: dict, key: str, path: str) -> Tuple[str, ...]:
    vals = _require(obj, key, list, path)
    for i, v in enumerate(vals):
        if not isinstance(v, str):
            raise InstanceError("expected a string", f"{path}.{key}[{i}]")
    return tuple(vals)


def instance_from_dict(doc: dict) -> Instance:
    """Build an (unvalidated) Instance from a decoded JSON document."""
    rooms = []
    for i, r in enumerate(_require(doc, "rooms", list, "$")):
        p = f"$.rooms[{i}]"
        rooms.append(Room(_require(r, "id", str, p), _require(r, "capacity", int, p)))
    events = []
    for i, e in enumerate(_require(doc, "events", list, "$")):
        p = f"$.events[{i}]"
        events.append(
            Event(
                id=_require(e, "id", str, p),
                index=_require(e, "index", int, p),
                weight=float(_require(e, "weight", (int, float), p)),
                duration=_require(e, "duration", int, p),
                lecturer=_require(e, "lecturer", str, p),
                students=_str_list(e, "students", p),
            )
        )
    return Instance(
        name=_require(doc, "name", str, "$"),
        grid=TimeGrid(_require(doc, "days", int, "$"), _require(doc, "slots_per_day", int, "$")),
        rooms=tuple(rooms),
        lecturers=_str_list(doc, "lecturers", "$"),
        students=_str_list(doc, "students", "$"),
        events=tuple(events),
    )


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance JSON document.

    Raises InstanceError on the first error-level diagnostic.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    inst = instance_from_dict(doc)
    for d in validate_instance(inst):
        if d.level == "error":
            raise InstanceError(d.message, d.path)
    return inst


def instance_to_dict(inst: Instance) -> dict:
    return {
        "name": inst.name,
        "days": inst.grid.days,
        "slots_per_day": inst.grid.slots_per_day,
        "rooms": [{"id": r.id, "capacity": r.capacity} for r in inst.rooms],
        "lecturers": list(inst.lecturers),
        "students": list(inst.students),
        "events": [
            {
                "id": e.id,
                "index": e.index,
                "weight": e.weight,
                "duration": e.duration,
                "lecturer": e.lecturer,
                "students": list(e.students),
            }
            for e in inst.events
        ],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def serialize_timetable(inst: Instance, tt: Timetable, ev=None) -> str:
    """Render a timetable (and optionally its EvalResult) as JSON.

    Assignments and unplaced ids are sorted by event id so output is
    byte-stable.
    """
    check_timetable(inst, tt)
    doc = {
        "instance": inst.name,
        "assignments": [
            {"event": eid, "day": p.day, "start_slot": p.start_slot, "room": p.room}
            for eid, p in sorted(tt.assignments.items())
        ],
        "unplaced": sorted(tt.unplaced),
    }
    if ev is not None:
        doc["evaluation"] = ev.to_dict()
    return json.dumps(doc, indent=1) + "\n"


def parse_timetable(inst: Instance, text: str) -> Timetable:
    """Parse a timetable document against ``inst``; the evaluation block is ignored."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    name = _require(doc, "instance", str, "$")
    if name != inst.name:
        raise InstanceError(f"timetable is for instance {name!r}, not {inst.name!r}", "$.instance")
    assignments: Dict[str, Position] = {}
    for i, a in enumerate(_require(doc, "assignments", list, "$")):
        p = f"$.assignments[{i}]"
        eid = _require(a, "event", str, p)
        if eid in assignments:
            raise InstanceError(f"event {eid!r} assigned twice", p)
        assignments[eid] = Position(
            _require(a, "day", int, p), _require(a, "start_slot", int, p), _require(a, "room", str, p)
        )
    tt = Timetable(assignments, frozenset(_str_list(doc, "unplaced", "$")))
    check_timetable(inst, tt)
    return tt


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


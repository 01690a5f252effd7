import dataclasses
import json

import pytest
from hypothesis import given, settings, strategies as st

from egbtt import (
    GenShape,
    InstanceError,
    Position,
    Timetable,
    evaluate,
    generate_instance,
    local_search,
    parse_instance,
    parse_timetable,
    serialize_instance,
    serialize_timetable,
    sort_events,
    validate_instance,
)
from egbtt.grouping import Criterion
from egbtt.model import Room, TimeGrid, instance_from_dict

from conftest import make_instance, small_instance


def test_minimal_document_parses(minimal_doc):
    inst = parse_instance(json.dumps(minimal_doc))
    assert inst.n == 4
    assert inst.grid == TimeGrid(1, 4)
    assert validate_instance(inst) == []


def test_dangling_lecturer(minimal_doc):
    minimal_doc["events"][2]["lecturer"] = "L9"
    with pytest.raises(InstanceError, match="dangling lecturer reference") as info:
        parse_instance(json.dumps(minimal_doc))
    assert info.value.path == "$.events[2].lecturer"


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("slots_per_day"), "missing required field 'slots_per_day'"),
    (lambda d: d["events"].pop(), "at least 4 events"),
    (lambda d: d["events"][1].update(id="E0"), "duplicate id"),
    (lambda d: d["events"][1].update(index=7), "indices"),
    (lambda d: d["events"][0].update(weight=0), "must be > 0"),
    (lambda d: d["events"][0].update(duration=0), "must be >= 1"),
    (lambda d: d["rooms"][0].update(capacity=0), "must be >= 1"),
    (lambda d: d["events"][0].update(students=["S7"]), "dangling student"),
    (lambda d: d["events"][0].update(students=[]), "non-empty"),
    (lambda d: d["events"][0].update(duration="2"), "wrong type"),
])
def test_parse_errors(minimal_doc, mutate, fragment):
    mutate(minimal_doc)
    with pytest.raises(InstanceError, match=fragment):
        parse_instance(json.dumps(minimal_doc))


def test_malformed_json():
    with pytest.raises(InstanceError, match="malformed JSON"):
        parse_instance("{not json")


def test_duration_longer_than_day(minimal_doc):
    minimal_doc["days"] = 2
    minimal_doc["events"][3]["duration"] = 5
    inst = instance_from_dict(minimal_doc)
    diags = validate_instance(inst)
    assert [d.path for d in diags] == ["$.events[3].duration"]


def test_capacity_warning_is_not_fatal(minimal_doc):
    minimal_doc["rooms"][0]["capacity"] = 1
    inst = parse_instance(json.dumps(minimal_doc))
    diags = validate_instance(inst)
    assert diags and all(d.level == "warning" for d in diags)
    assert {d.path for d in diags} == {"$.events[1]", "$.events[3]"}


def test_capacity_warning_fifty_students():
    students = [f"S{i}" for i in range(50)]
    inst = make_instance([(1.0, 1, "L1", students[:3])] * 3 + [(1.0, 1, "L1", students)],
                         rooms=(("R", 40),))
    diags = validate_instance(inst)
    assert len(diags) == 1 and diags[0].level == "warning" and diags[0].path == "$.events[3]"


@pytest.mark.parametrize("shape", [GenShape(90, 175, 29, 18, 5, 8, seed=42),
                                   GenShape(4, 2, 1, 1, 1, 4, seed=0)])
def test_generated_round_trip(shape):
    inst = generate_instance(shape)
    assert validate_instance(inst) == []
    assert parse_instance(serialize_instance(inst)) == inst


def _mutations(inst):
    e0 = inst.events[0]
    yield dataclasses.replace(inst, events=inst.events[:3])  # n < 4
    yield dataclasses.replace(inst, grid=TimeGrid(0, 8))
    yield dataclasses.replace(inst, grid=TimeGrid(5, 0))
    yield dataclasses.replace(inst, rooms=())
    yield dataclasses.replace(inst, rooms=(Room(inst.rooms[0].id, 0),) + inst.rooms[1:])
    yield dataclasses.replace(inst, rooms=inst.rooms + (inst.rooms[0],))
    yield dataclasses.replace(inst, lecturers=inst.lecturers + (inst.lecturers[0],))
    yield dataclasses.replace(inst, students=inst.students + (inst.students[0],))
    for field, value in [("weight", 0.0), ("weight", -1.0), ("duration", 0),
                         ("duration", inst.grid.slots_per_day + 1), ("lecturer", "nobody"),
                         ("students", ()), ("students", ("ghost",)),
                         ("students", e0.students + e0.students[:1]),
                         ("index", inst.n + 3), ("id", inst.events[1].id)]:
        yield dataclasses.replace(inst, events=(dataclasses.replace(e0, **{field: value}),)
                                  + inst.events[1:])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(4, 30))
def test_single_corruption_is_diagnosed(seed, n):
    inst = generate_instance(GenShape(n, 20, 4, 3, seed=seed))
    assert validate_instance(inst) == []
    for bad in _mutations(inst):
        assert any(d.level == "error" for d in validate_instance(bad))


def test_serialize_empty_timetable():
    inst = small_instance(6, 1)
    doc = json.loads(serialize_timetable(inst, Timetable.empty(inst)))
    assert doc["assignments"] == []
    assert doc["unplaced"] == sorted(e.id for e in inst.events)


def test_serialize_one_placed_event():
    inst = small_instance(6, 1)
    e = inst.events[2]
    room = next(r for r in inst.rooms if r.capacity >= len(e.students))
    tt = Timetable.empty(inst).place(e.id, Position(1, 0, room.id))
    doc = json.loads(serialize_timetable(inst, tt))
    assert doc["assignments"] == [{"event": e.id, "day": 1, "start_slot": 0, "room": room.id}]
    assert len(doc["unplaced"]) == 5


def test_serialize_includes_evaluation_and_sorted_keys():
    inst = small_instance(10, 3)
    tt, ev = local_search(inst, sort_events(inst, Criterion.INDEX))
    text = serialize_timetable(inst, tt, ev)
    doc = json.loads(text)
    assert doc["evaluation"]["total"] == ev.total
    assert set(doc["evaluation"]["hard"]) == {"student_clash", "lecturer_clash", "room_clash",
                                              "capacity", "out_of_grid"}
    ids = [a["event"] for a in doc["assignments"]]
    assert ids == sorted(ids)
    assert serialize_timetable(inst, tt, ev) == text


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 14), crit=st.sampled_from(list(Criterion)))
def test_timetable_round_trip(seed, n, crit):
    inst = small_instance(n, seed)
    tt, ev = local_search(inst, sort_events(inst, crit))
    back = parse_timetable(inst, serialize_timetable(inst, tt, ev))
    assert back == tt
    assert evaluate(inst, back) == ev


def test_serialize_rejects_unknown_room():
    inst = small_instance(6, 1)
    tt = Timetable.empty(inst).place(inst.events[0].id, Position(0, 0, "nowhere"))
    with pytest.raises(InstanceError, match="unknown room"):
        serialize_timetable(inst, tt)


def test_serialize_rejects_unknown_event():
    inst = small_instance(6, 1)
    tt = Timetable({"ghost": Position(0, 0, inst.rooms[0].id)},
                   frozenset(e.id for e in inst.events))
    with pytest.raises(InstanceError, match="unknown event"):
        serialize_timetable(inst, tt)


def test_parse_timetable_rejects_other_instance():
    inst = small_instance(6, 1)
    text = serialize_timetable(inst, Timetable.empty(inst)).replace(inst.name, "other")
    with pytest.raises(InstanceError, match="timetable is for instance"):
        parse_timetable(inst, text)

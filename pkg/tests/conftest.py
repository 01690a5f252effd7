import json
import sys

import pytest

from egbtt import GenShape, generate_instance
from egbtt.model import Event, Instance, Room, TimeGrid


def small_instance(n, seed, students=12, lecturers=4, rooms=3, days=2, slots=4):
    """Tight random instance: few slots so clashes and unplaced events happen."""
    return generate_instance(GenShape(n, students, lecturers, rooms, days, slots, seed,
                                      min_capacity=3, max_capacity=8, cohort_size=6))


def make_instance(events, *, days=1, slots=4, rooms=(("R1", 40),), lecturers=("L1",),
                  students=None, name="hand"):
    """events: list of (weight, duration, lecturer, students) tuples."""
    evs = tuple(Event(f"e{i}", i, float(w), d, lec, tuple(st))
                for i, (w, d, lec, st) in enumerate(events))
    if students is None:
        students = sorted({s for e in evs for s in e.students})
    return Instance(name, TimeGrid(days, slots), tuple(Room(r, c) for r, c in rooms),
                    tuple(lecturers), tuple(students), evs)


MINIMAL_DOC = {
    "name": "minimal",
    "days": 1,
    "slots_per_day": 4,
    "rooms": [{"id": "R1", "capacity": 10}],
    "lecturers": ["L1"],
    "students": ["S1", "S2"],
    "events": [
        {"id": f"E{i}", "index": i, "weight": 1.0, "duration": 1, "lecturer": "L1",
         "students": ["S1", "S2"] if i % 2 else ["S1"]}
        for i in range(4)
    ],
}


@pytest.fixture
def minimal_doc():
    return json.loads(json.dumps(MINIMAL_DOC))


@pytest.fixture(scope="session")
def ds90():
    return generate_instance(GenShape(90, 175, 29, 18, seed=42))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

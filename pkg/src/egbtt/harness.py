"""Seeded instance generator and the (m x criterion) sweep."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .evaluation import EvalParams
from .grouping import CRITERIA, Criterion, max_groups, partition, signature
from .model import Event, Instance, Room, TimeGrid
from .reporting import ReportRow, SweepReport
from .search import egb_run


@dataclass(frozen=True)
class GenShape:
    events: int
    students: int
    lecturers: int
    rooms: int
    days: int = 5
    slots_per_day: int = 8
    seed: int = 0
    min_capacity: int = 10
    max_capacity: int = 30
    cohort_size: int = 30

    @property
    def name(self) -> str:
        return f"DS_E{self.events}S{self.students}L{self.lecturers}A{self.rooms}"


def generate_instance(shape: GenShape) -> Instance:
    """Draw a random instance with exactly the requested cardinalities.

    Durations are uniform on {1, 2, 3} (capped at the day length), weights
    uniform on [0.5, 2.0] rounded to 3 decimals, lecturers uniform. Students
    are split into contiguous cohorts of about ``cohort_size``; each event
    picks a cohort uniformly and enrols a uniform number of its members,
    between 3 and the largest room capacity (both capped at the cohort size).
    """
    for name in ("events", "students", "lecturers", "rooms", "days", "slots_per_day",
                 "min_capacity", "cohort_size"):
        if getattr(shape, name) < 1:
            raise ValueError(f"{name} must be positive")
    if shape.events < 4:
        raise ValueError("at least 4 events required")
    if shape.max_capacity < shape.min_capacity:
        raise ValueError("max_capacity must be >= min_capacity")
    rng = np.random.default_rng(shape.seed)
    caps = rng.integers(shape.min_capacity, shape.max_capacity + 1, size=shape.rooms)
    cohorts = np.array_split(np.arange(shape.students), math.ceil(shape.students / shape.cohort_size))
    smallest = min(len(c) for c in cohorts)
    if int(caps.max()) < min(3, smallest):
        raise ValueError(
            f"largest room ({int(caps.max())} seats) cannot hold the minimum enrolment of "
            f"{min(3, smallest)}"
        )

    def ids(prefix: str, count: int) -> List[str]:
        width = len(str(count))
        return [f"{prefix}{i + 1:0{width}d}" for i in range(count)]

    room_ids = ids("A", shape.rooms)
    lect_ids = ids("L", shape.lecturers)
    stud_ids = ids("S", shape.students)
    event_ids = ids("E", shape.events)
    events = []
    for k in range(shape.events):
        duration = min(int(rng.integers(1, 4)), shape.slots_per_day)
        weight = round(float(rng.uniform(0.5, 2.0)), 3)
        lecturer = lect_ids[int(rng.integers(shape.lecturers))]
        cohort = cohorts[int(rng.integers(len(cohorts)))]
        lo = min(3, len(cohort))
        hi = min(int(caps.max()), len(cohort))
        size = int(rng.integers(lo, hi + 1))
        members = np.sort(rng.choice(cohort, size=size, replace=False))
        events.append(Event(event_ids[k], k, weight, duration, lecturer,
                            tuple(stud_ids[i] for i in members)))
    return Instance(
        name=shape.name,
        grid=TimeGrid(shape.days, shape.slots_per_day),
        rooms=tuple(Room(r, int(c)) for r, c in zip(room_ids, caps)),
        lecturers=tuple(lect_ids),
        students=tuple(stud_ids),
        events=tuple(events),
    )


class EmptyRangeError(ValueError):
    pass


def prune_range(n: int, low_div: float = 33.3, high_div: float = 6.67) -> Tuple[int, int]:
    """Reduced group-count range ``[ceil(n / low_div), floor(n / high_div)]``.

    Clamped to [2, floor(n/2)]; raises EmptyRangeError when nothing is left.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    if not low_div > high_div > 0:
        raise ValueError("need low_div > high_div > 0")
    lo = max(2, math.ceil(n / low_div))
    hi = min(max_groups(n), math.floor(n / high_div))
    if lo > hi:
        raise EmptyRangeError(f"pruned range for n={n} is empty: ({lo}, {hi})")
    return lo, hi


def _cell(args) -> float:
    inst, m, c, params, backend = args
    return egb_run(inst, m, c, params, backend).best_eval


def sweep(inst: Instance, m_set: Optional[Iterable[int]] = None,
          criteria: Optional[Sequence[Criterion]] = None,
          params: EvalParams = EvalParams(), workers: int = 1,
          backend: Optional[str] = None) -> SweepReport:
    """Run egb_run for every (m, criterion) cell; defaults to m = 2..floor(n/2), all criteria."""
    n = inst.n
    ms = sorted(set(m_set)) if m_set is not None else list(range(2, max_groups(n) + 1))
    for m in ms:
        partition(n, m)
    crits = [Criterion(c) for c in (criteria or CRITERIA)]
    crits = [c for c in CRITERIA if c in crits]
    jobs = [(inst, m, c, params, backend) for m in ms for c in crits]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        values = [_cell(j) for j in jobs]
    rows = []
    it = iter(values)
    for m in ms:
        vals = {c: next(it) for c in crits}
        rows.append(ReportRow(m, signature(partition(n, m)), vals))
    return SweepReport(inst.name, n, tuple(rows), params.to_dict())

"""Event-grouping search for university course timetabling."""

from .evaluation import EvalParams, EvalResult, evaluate, is_feasible_position, placement_delta
from .grouping import CRITERIA, Criterion, Grouping, partition, rotate_window, signature, sort_events
from .harness import GenShape, generate_instance, prune_range, sweep
from .model import (
    Event,
    Instance,
    InstanceError,
    Position,
    Room,
    TimeGrid,
    Timetable,
    load_instance,
    parse_instance,
    parse_timetable,
    serialize_instance,
    serialize_timetable,
    validate_instance,
)
from .reporting import (
    SweepReport,
    best_by_criterion,
    criterion_share,
    emit_plot_series,
    emit_report_csv,
    parse_report_csv,
    range_analysis,
    top_k,
)
from .search import RunResult, egb_run, local_search

__version__ = "0.1.0"

"""Command-line entry point: generate, solve, sweep, report.

Exit codes: 0 success, 1 usage error, 2 invalid input file, 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .evaluation import EvalParams
from .grouping import CRITERIA, Criterion, max_groups
from .harness import EmptyRangeError, GenShape, generate_instance, prune_range, sweep
from .model import InstanceError, load_instance, serialize_instance, serialize_timetable
from .reporting import (
    emit_plot_series,
    emit_report_csv,
    format_share,
    format_summary,
    parse_report_csv,
    top_k,
)
from .search import InvariantError, egb_run, trace_csv

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("evaluation parameters")
    g.add_argument("--config", type=Path, help='JSON file with an optional "eval" object')
    for name in ("w_gap", "w_single", "w_last", "unplaced_penalty", "hard_penalty"):
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=float)


def _criteria(value: str) -> List[Criterion]:
    if value == "all":
        return list(CRITERIA)
    return [Criterion.parse(v.strip()) for v in value.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="egbtt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--events", type=int, required=True)
    g.add_argument("--students", type=int, required=True)
    g.add_argument("--lecturers", type=int, required=True)
    g.add_argument("--rooms", type=int, required=True)
    g.add_argument("--days", type=int, default=5)
    g.add_argument("--slots", type=int, default=8, help="slots per day")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--output", type=Path, required=True)

    s = sub.add_parser("solve", help="one grouping run")
    s.add_argument("--instance", type=Path, required=True)
    s.add_argument("--groups", type=int, required=True, help="number of groups m")
    s.add_argument("--sort", default="index", choices=[c.value for c in CRITERIA])
    s.add_argument("-o", "--output", type=Path, required=True, help="timetable JSON")
    s.add_argument("--trace", type=Path, help="trace CSV (default: <output stem>.trace.csv)")
    _add_eval_flags(s)

    w = sub.add_parser("sweep", help="run every (m, criterion) cell")
    w.add_argument("--instance", type=Path, required=True)
    w.add_argument("--m-min", type=int)
    w.add_argument("--m-max", default=None, help="integer or 'auto' (= floor(n/2))")
    w.add_argument("--sort", default="all", help="'all' or comma-separated criteria")
    w.add_argument("--prune", action="store_true", help="restrict m to the pruned range")
    w.add_argument("--prune-low", type=float, default=33.3)
    w.add_argument("--prune-high", type=float, default=6.67)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("-o", "--output", type=Path, required=True, help="report CSV")
    w.add_argument("--plots", type=Path, help="directory for per-criterion m,value series")
    _add_eval_flags(w)

    r = sub.add_parser("report", help="summarise one or more report CSVs")
    r.add_argument("--report", type=Path, action="append", required=True)
    r.add_argument("--top", type=int, default=5)
    return ap


def _eval_params(args) -> EvalParams:
    doc = {}
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            doc = dict(json.load(fh).get("eval", {}))
    for name in EvalParams.__dataclass_fields__:
        val = getattr(args, name)
        if val is not None:
            doc[name] = val
    try:
        return EvalParams.from_dict(doc)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cmd_generate(args) -> int:
    shape = GenShape(args.events, args.students, args.lecturers, args.rooms,
                     args.days, args.slots, args.seed)
    try:
        inst = generate_instance(shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.output, serialize_instance(inst))
    print(f"wrote {inst.name} ({inst.n} events) to {args.output}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    params = _eval_params(args)
    if not 2 <= args.groups <= max_groups(inst.n):
        raise UsageError(f"--groups must be in [2, {max_groups(inst.n)}]")
    run = egb_run(inst, args.groups, Criterion(args.sort), params)
    trace = args.trace or args.output.with_suffix(".trace.csv")
    _write(args.output, serialize_timetable(inst, run.best_timetable, run.best_evaluation))
    _write(trace, trace_csv(run))
    print(f"m={run.m} sort={run.criterion.value} best_eval={run.best_eval:.3f} "
          f"unplaced={run.best_evaluation.unplaced} local_searches={run.local_search_calls}")
    return EXIT_OK


def _sweep_range(args, n: int) -> List[int]:
    if args.prune:
        if args.m_min is not None or args.m_max is not None:
            raise UsageError("--prune cannot be combined with --m-min/--m-max")
        try:
            lo, hi = prune_range(n, args.prune_low, args.prune_high)
        except EmptyRangeError as exc:
            print(f"warning: {exc}; sweeping the full range", file=sys.stderr)
            lo, hi = 2, max_groups(n)
        return list(range(lo, hi + 1))
    lo = 2 if args.m_min is None else args.m_min
    if args.m_max in (None, "auto"):
        hi = max_groups(n)
    else:
        try:
            hi = int(args.m_max)
        except ValueError:
            raise UsageError("--m-max must be an integer or 'auto'") from None
    if lo > hi:
        raise UsageError(f"--m-min {lo} is greater than --m-max {hi}")
    if lo < 2 or hi > max_groups(n):
        raise UsageError(f"m range must lie within [2, {max_groups(n)}]")
    return list(range(lo, hi + 1))


def _cmd_sweep(args) -> int:
    if args.m_min is not None and args.m_max not in (None, "auto"):
        try:
            if args.m_min > int(args.m_max):
                raise UsageError(f"--m-min {args.m_min} is greater than --m-max {args.m_max}")
        except ValueError:
            raise UsageError("--m-max must be an integer or 'auto'") from None
    try:
        crits = _criteria(args.sort)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    inst = load_instance(args.instance)
    params = _eval_params(args)
    ms = _sweep_range(args, inst.n)
    report = sweep(inst, ms, crits, params, workers=args.workers)
    _write(args.output, emit_report_csv(report))
    if args.plots is not None:
        for c in report.criteria:
            _write(args.plots / f"{c.value}.csv", emit_plot_series(report, c))
    print(f"{len(ms)} groupings x {len(crits)} criteria = {len(ms) * len(crits)} runs "
          f"-> {args.output}")
    return EXIT_OK


def _cmd_report(args) -> int:
    if args.top < 1:
        raise UsageError("--top must be >= 1")
    all_tops = []
    blocks = []
    for path in args.report:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            rep = parse_report_csv(text, name=path.stem)
        except ValueError as exc:
            raise InstanceError(str(exc), str(path)) from exc
        blocks.append(format_summary(rep, args.top))
        all_tops.extend(top_k(rep, args.top))
    blocks.append(format_share(all_tops))
    print("\n\n".join(blocks))
    return EXIT_OK


COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceError, OSError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_cli())

"""Sweep report container, its CSV form, and the table/figure reductions."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .grouping import CRITERIA, Criterion, parse_signature, partition, signature

REPORT_HEADER = ("m", "groups") + tuple(c.value for c in CRITERIA)


@dataclass(frozen=True)
class ReportRow:
    m: int
    signature: str
    values: Mapping[Criterion, float]


@dataclass(frozen=True)
class SweepReport:
    instance_name: str
    n: int
    rows: Tuple[ReportRow, ...]
    params: Optional[dict] = field(default=None, compare=False)

    @property
    def m_values(self) -> List[int]:
        return [r.m for r in self.rows]

    @property
    def criteria(self) -> List[Criterion]:
        present = {c for r in self.rows for c in r.values}
        return [c for c in CRITERIA if c in present]

    def cells(self):
        """Yield (criterion, m, value) for every filled cell."""
        for r in self.rows:
            for c in CRITERIA:
                if c in r.values:
                    yield c, r.m, r.values[c]


@dataclass(frozen=True)
class TopResult:
    criterion: Criterion
    m: int
    value: float


@dataclass(frozen=True)
class RangeResult:
    m_low: int
    m_high: int
    m_max: int
    low_divisor: float
    high_divisor: float


def _ratio(num: int, den: int, places: int = 1) -> float:
    q = Decimal(1).scaleb(-places)
    return float((Decimal(num) / Decimal(den)).quantize(q, rounding=ROUND_HALF_UP))


def best_by_criterion(r: SweepReport) -> Dict[Criterion, TopResult]:
    """Per criterion the lowest value; ties go to the smaller m."""
    best: Dict[Criterion, TopResult] = {}
    for c, m, v in r.cells():
        cur = best.get(c)
        if cur is None or (v, m) < (cur.value, cur.m):
            best[c] = TopResult(c, m, v)
    if not best:
        raise ValueError("empty report")
    return {c: best[c] for c in CRITERIA if c in best}


def top_k(r: SweepReport, k: int) -> List[TopResult]:
    """The k lowest cells; ties by smaller m, then criterion order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    order = {c: i for i, c in enumerate(CRITERIA)}
    cells = sorted(r.cells(), key=lambda t: (t[2], t[1], order[t[0]]))
    if k > len(cells):
        raise ValueError(f"k={k} exceeds the {len(cells)} cells in the report")
    return [TopResult(c, m, v) for c, m, v in cells[:k]]


def range_analysis(tops: Sequence[TopResult], n: int) -> RangeResult:
    if not tops:
        raise ValueError("no results")
    lo = min(t.m for t in tops)
    hi = max(t.m for t in tops)
    m_max = n // 2
    return RangeResult(lo, hi, m_max, _ratio(m_max, lo), _ratio(m_max, hi))


def criterion_share(tops: Sequence[TopResult]) -> Dict[Criterion, Tuple[int, float]]:
    """Count and percentage (1 decimal, half-up) of results per criterion."""
    if not tops:
        raise ValueError("no results")
    counts = {c: 0 for c in CRITERIA}
    for t in tops:
        counts[t.criterion] += 1
    total = len(tops)
    return {c: (k, _ratio(100 * k, total)) for c, k in counts.items()}


def emit_report_csv(r: SweepReport) -> str:
    lines = [",".join(REPORT_HEADER)]
    for row in r.rows:
        vals = [f"{row.values[c]:.3f}" if c in row.values else "" for c in CRITERIA]
        lines.append(",".join([str(row.m), f'"{row.signature}"'] + vals))
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str, name: str = "report") -> SweepReport:
    """Read a report CSV; n is recovered from the group signatures.

    Blank value cells are treated as missing. Every signature must agree with
    the partition of the inferred n.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip().lower() for h in header) != REPORT_HEADER:
        raise ValueError(f"report header must be {','.join(REPORT_HEADER)}")
    rows = []
    n = None
    for lineno, rec in enumerate(reader, start=2):
        if not rec or not any(x.strip() for x in rec):
            continue
        if len(rec) != len(REPORT_HEADER):
            raise ValueError(f"line {lineno}: expected {len(REPORT_HEADER)} fields")
        m = int(rec[0])
        sig = rec[1].strip()
        row_n = sum(count * size for count, size in parse_signature(sig))
        if n is None:
            n = row_n
        if row_n != n or signature(partition(n, m)) != sig:
            raise ValueError(f"line {lineno}: groups {sig!r} inconsistent with m={m}, n={n}")
        vals = {}
        for c, cell in zip(CRITERIA, rec[2:]):
            if cell.strip():
                vals[c] = float(cell)
        rows.append(ReportRow(m, sig, vals))
    if n is None:
        raise ValueError("report has no rows")
    if len({r.m for r in rows}) != len(rows):
        raise ValueError("duplicate m rows in report")
    return SweepReport(name, n, tuple(sorted(rows, key=lambda r: r.m)))


def emit_plot_series(r: SweepReport, c: Criterion) -> str:
    """Two-column ``m,value`` CSV for one criterion, ordered by m."""
    if not isinstance(c, Criterion):
        c = Criterion.parse(c)
    if c not in r.criteria:
        raise ValueError(f"criterion {c} not present in report")
    lines = ["m,value"]
    for row in sorted(r.rows, key=lambda x: x.m):
        if c in row.values:
            lines.append(f"{row.m},{row.values[c]:.3f}")
    return "\n".join(lines) + "\n"


def format_summary(r: SweepReport, k: int = 5) -> str:
    """Human-readable best-by-criterion, top-k and range block for one report."""
    out = [f"== {r.instance_name} (n={r.n}, {len(r.rows)} groupings) =="]
    best = best_by_criterion(r)
    out.append("best by criterion:")
    for c, t in best.items():
        out.append(f"  {c.value:<9} m={t.m:<4} {t.value:.3f}")
    tops = top_k(r, k)
    out.append(f"top {k}:")
    for i, t in enumerate(tops, 1):
        out.append(f"  {i}. {t.criterion.value:<9} m={t.m:<4} {t.value:.3f}")
    rng = range_analysis(tops, r.n)
    out.append(
        f"range: [{rng.m_low}, ..., {rng.m_high}]  m_max={rng.m_max}  "
        f"[m / {rng.low_divisor:.1f}, ..., m / {rng.high_divisor:.1f}]"
    )
    return "\n".join(out)


def format_share(tops: Sequence[TopResult]) -> str:
    out = [f"criterion share over {len(tops)} results:"]
    for c, (count, pct) in criterion_share(tops).items():
        out.append(f"  {c.value:<9} {count:>3}  {pct:.1f}%")
    return "\n".join(out)

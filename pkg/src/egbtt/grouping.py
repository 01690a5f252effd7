"""Event ordering, partition into commensurate contiguous groups, rotation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from typing import List, Sequence, Tuple

from .model import Instance


class Criterion(str, Enum):
    INDEX = "index"
    WEIGHT = "weight"
    NUMBER = "number"
    DURATION = "duration"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Criterion":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(
                f"unknown criterion {name!r}; expected one of {[c.value for c in cls]}"
            ) from None


CRITERIA: Tuple[Criterion, ...] = tuple(Criterion)


@dataclass(frozen=True)
class Grouping:
    n: int
    m: int
    windows: Tuple[Tuple[int, int], ...]  # inclusive (from, to)

    @property
    def sizes(self) -> List[int]:
        return [hi - lo + 1 for lo, hi in self.windows]


def max_groups(n: int) -> int:
    return n // 2


def partition(n: int, m: int) -> Grouping:
    """Split positions 0..n-1 into m contiguous windows whose sizes differ by at most one.

    The ``n mod m`` larger windows (size ``n // m + 1``) come first.
    """
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    if not 2 <= m <= max_groups(n):
        raise ValueError(f"m={m} out of range: need 2 <= m <= floor(n/2) = {max_groups(n)}")
    q, r = divmod(n, m)
    windows = []
    lo = 0
    for i in range(m):
        size = q + 1 if i < r else q
        windows.append((lo, lo + size - 1))
        lo += size
    return Grouping(n, m, tuple(windows))


def signature(g: Grouping) -> str:
    """Compact rendering such as ``"12x7; 1x6"`` (largest size first)."""
    sizes = sorted(g.sizes, reverse=True)
    return "; ".join(f"{len(list(run))}x{size}" for size, run in groupby(sizes))


def parse_signature(sig: str) -> List[Tuple[int, int]]:
    """``"2x23; 2x22"`` -> [(2, 23), (2, 22)]."""
    out = []
    for part in sig.split(";"):
        count, _, size = part.strip().partition("x")
        if not (count.isdigit() and size.isdigit()):
            raise ValueError(f"bad group signature {sig!r}")
        out.append((int(count), int(size)))
    return out


def sort_events(inst: Instance, c: Criterion) -> List[int]:
    """Event indices ordered by criterion; ties go to the lower index."""
    evs = inst.by_index
    if c is Criterion.INDEX:
        key = lambda e: e.index
    elif c is Criterion.WEIGHT:
        key = lambda e: (-e.weight, e.index)
    elif c is Criterion.NUMBER:
        key = lambda e: (-len(e.students), e.index)
    elif c is Criterion.DURATION:
        key = lambda e: (-e.duration, e.index)
    else:
        raise ValueError(f"unknown criterion {c!r}")
    return [e.index for e in sorted(evs, key=key)]


def rotate_window(p: Sequence, lo: int, hi: int, k: int) -> list:
    """Cyclically shift ``p[lo..hi]`` (inclusive) left by ``k``."""
    if not 0 <= lo <= hi < len(p):
        raise IndexError(f"window [{lo}, {hi}] outside permutation of length {len(p)}")
    if k < 0:
        raise ValueError("k must be >= 0")
    out = list(p)
    w = out[lo:hi + 1]
    k %= len(w)
    out[lo:hi + 1] = w[k:] + w[:k]
    return out

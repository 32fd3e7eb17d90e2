"""Brute-force expansion of BPESs into explicit tick sets.

This is the ground truth the symbolic algebra is tested against, so it
shares nothing with it beyond the data types: interval starts are found by
walking the calendar units one level at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator, Tuple

from ..errors import DomainError, ResourceError
from .calendars import UNIT_TICKS
from .expressions import ALL, BPES, BoundedPE, SimplePE

DEFAULT_CAP = 10 ** 6


@dataclass(frozen=True)
class InstantSet:
    horizon: Tuple[int, int]
    ticks: FrozenSet[int]

    def __post_init__(self):
        lo, hi = self.horizon
        if any(t < lo or t >= hi for t in self.ticks):
            raise DomainError("tick outside the horizon")

    def __len__(self):
        return len(self.ticks)

    def __contains__(self, t):
        return t in self.ticks


def _starts(pe, lo: int, hi: int) -> Iterator[int]:
    """Start ticks of the PE's intervals that may touch [lo, hi)."""
    if isinstance(pe, SimplePE):
        first = (lo - 24) // 24
        for day in range(first, hi // 24 + 1):
            yield day * 24 + pe.start
        return
    names = pe.calendars.names
    top = UNIT_TICKS[names[0]]

    def walk(level: int, base: int):
        if level == len(names):
            yield base
            return
        size = UNIT_TICKS[names[level]]
        parent = UNIT_TICKS[names[level - 1]]
        sel = pe.selectors[level]
        idx = range(1, parent // size + 1) if sel is ALL else sorted(sel)
        for i in idx:
            yield from walk(level + 1, base + (i - 1) * size)

    first = (lo - pe.duration) // top - 1
    for unit in range(first, hi // top + 1):
        yield from walk(1, unit * top)


def _expand_bpe(bpe: BoundedPE, lo: int, hi: int, out: set) -> None:
    a = lo if bpe.begin is None else max(lo, bpe.begin)
    b = hi if bpe.end is None else min(hi, bpe.end)
    if a >= b:
        return
    d = bpe.pe.duration
    for s in _starts(bpe.pe, a, b):
        for t in range(max(s, a), min(s + d, b)):
            out.add(t)


def expand_instants(bpes: BPES, horizon: Tuple[int, int], cap: int = DEFAULT_CAP) -> InstantSet:
    """Every tick in ``[horizon[0], horizon[1])`` at which ``bpes`` is active."""
    lo, hi = horizon
    if hi - lo < 1:
        raise DomainError("horizon must contain at least one tick")
    if hi - lo > cap:
        raise ResourceError(f"horizon of {hi - lo} ticks exceeds the cap of {cap}")
    out: set = set()
    for m in bpes.members:
        _expand_bpe(m, lo, hi, out)
    return InstantSet((lo, hi), frozenset(out))


def one_period(bpes: BPES) -> Tuple[int, int]:
    return (0, bpes.calendars.period if bpes.members else 1)

"""Periodic expressions, bounded periodic expressions and BPE sets.

Text forms (all round-trip exactly through ``parse_*``/``str``)::

    PE        all.Quadweeks+{1,3}.Weeks+{1,2,3,4,5}.Days+{10}.Hours>8.Hours
    SimplePE  [9,17]
    BPE       [<begin>,<end>]<pe>      '*' marks an open bound
    BPES      BPEs joined by ';'

Hour selectors are 1-based as in the usual PE notation ({1}.Hours is the
hour starting at midnight); simple PEs use clock hours, so [9,17] is
9am-5pm. A bound [b,e] keeps the ticks t with b <= t < e, i.e. the hours
lying entirely inside the closed date-time interval [b, e].
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple, Union

from ..errors import DomainError, ParseError
from .calendars import HOURS, SIMPLE_CALENDARS, UNIT_TICKS, CalendarSequence


class _All(enum.Enum):
    ALL = "all"

    def __repr__(self):
        return "ALL"


ALL = _All.ALL
Selector = Union[_All, FrozenSet[int]]


@dataclass(frozen=True)
class PeriodicExpression:
    calendars: CalendarSequence
    selectors: Tuple[Selector, ...]
    duration: int

    def __post_init__(self):
        sels = tuple(s if s is ALL else frozenset(s) for s in self.selectors)
        object.__setattr__(self, "selectors", sels)
        if len(sels) != len(self.calendars.names):
            raise DomainError("one selector per calendar is required")
        if sels[0] is not ALL:
            raise DomainError("the selector of C_1 must be 'all'")
        for sel, count in zip(sels[1:], self.calendars.counts):
            if sel is ALL:
                continue
            if not sel:
                raise DomainError("explicit selectors must be non-empty")
            if min(sel) < 1 or max(sel) > count:
                raise DomainError(f"selector {sorted(sel)} outside 1..{count}")
        if self.duration < 1:
            raise DomainError("duration must be at least one hour")

    def start_offsets(self) -> Iterator[int]:
        """Tick offsets, within one C_1 unit, at which intervals start."""
        ticks = self.calendars.unit_ticks
        choices = []
        for k, (sel, count) in enumerate(zip(self.selectors[1:], self.calendars.counts), 1):
            idx = range(1, count + 1) if sel is ALL else sorted(sel)
            choices.append([(i - 1) * ticks[k] for i in idx])
        for combo in itertools.product(*choices):
            yield sum(combo)

    def __str__(self):
        terms = []
        for sel, name in zip(self.selectors, self.calendars.names):
            if sel is ALL:
                terms.append(f"all.{name}")
            else:
                terms.append("{" + ",".join(map(str, sorted(sel))) + "}." + name)
        return "+".join(terms) + f">{self.duration}.{HOURS}"


@dataclass(frozen=True, order=True)
class SimplePE:
    """A daily range of clock hours [start, end)."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end <= 24):
            raise DomainError(f"bad simple PE [{self.start},{self.end}]")

    @property
    def calendars(self) -> CalendarSequence:
        return SIMPLE_CALENDARS

    def start_offsets(self) -> Iterator[int]:
        yield self.start

    @property
    def duration(self) -> int:
        return self.end - self.start

    def __str__(self):
        return f"[{self.start},{self.end}]"


PE = Union[PeriodicExpression, SimplePE]


@dataclass(frozen=True)
class BoundedPE:
    """A PE clipped to the ticks ``begin <= t < end``; None means unbounded."""

    begin: Optional[int]
    end: Optional[int]
    pe: PE

    def __post_init__(self):
        if self.begin is not None and self.end is not None and self.begin > self.end:
            raise DomainError(f"bound begins after it ends: [{self.begin},{self.end}]")

    @property
    def calendars(self) -> CalendarSequence:
        return self.pe.calendars

    @property
    def unbounded(self) -> bool:
        return self.begin is None and self.end is None

    def __str__(self):
        b = "*" if self.begin is None else str(self.begin)
        e = "*" if self.end is None else str(self.end)
        return f"[{b},{e}]{self.pe}"


def unbounded(pe: PE) -> BoundedPE:
    return BoundedPE(None, None, pe)


class BPES:
    """A set of bounded periodic expressions over one calendar sequence.

    Equality is structural (set equality of members); use
    :func:`trbacminer.temporal.sem_equal` for semantic equality.
    """

    __slots__ = ("members", "_sem", "_hash")

    def __init__(self, members: Iterable[Union[BoundedPE, PE]] = ()):
        seen = {}
        for m in members:
            if not isinstance(m, BoundedPE):
                m = unbounded(m)
            seen.setdefault(m, None)
        self.members: Tuple[BoundedPE, ...] = tuple(seen)
        self._sem = None
        self._hash = None
        cals = {m.calendars for m in self.members}
        if len(cals) > 1:
            raise DomainError("BPES members use different calendar sequences: "
                              + "; ".join(sorted(map(str, cals))))

    @property
    def calendars(self) -> Optional[CalendarSequence]:
        return self.members[0].calendars if self.members else None

    @property
    def is_simple(self) -> bool:
        return bool(self.members) and all(isinstance(m.pe, SimplePE) for m in self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __bool__(self):
        return bool(self.members)

    def __eq__(self, other):
        if not isinstance(other, BPES):
            return NotImplemented
        return frozenset(self.members) == frozenset(other.members)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.members))
        return self._hash

    def __str__(self):
        return ";".join(map(str, self.members))

    def __repr__(self):
        return f"BPES({str(self)!r})"


def wsc_size(x: Union[BPES, BoundedPE, PE]) -> int:
    """Symbolic size of the stored form; bounds are not counted."""
    if isinstance(x, BPES):
        return sum(wsc_size(m) for m in x.members)
    if isinstance(x, BoundedPE):
        return wsc_size(x.pe)
    if isinstance(x, SimplePE):
        return 1
    return sum(1 if s is ALL else len(s) for s in x.selectors) + 1


def period_mask(pe: PE) -> int:
    """Bit i is set iff tick i (mod the fundamental period) is covered."""
    period = pe.calendars.period
    if pe.duration >= period:
        return (1 << period) - 1
    full = (1 << period) - 1
    run = (1 << pe.duration) - 1
    mask = 0
    for off in pe.start_offsets():
        mask |= run << off
    while mask >> period:
        mask = (mask & full) | (mask >> period)
    return mask


# -- parsing -----------------------------------------------------------------

_TERM = re.compile(r"^(all|\{\s*\d+(?:\s*,\s*\d+)*\s*\})\.([A-Za-z]+)$")
_DUR = re.compile(r"^(\d+)\.([A-Za-z]+)$")
_PAIR = re.compile(r"^\[\s*(\*|-?\d+)\s*,\s*(\*|-?\d+)\s*\]")


def parse_pe(text: str) -> PE:
    text = text.strip()
    if text.startswith("["):
        m = _PAIR.match(text)
        if not m or m.end() != len(text) or "*" in m.groups():
            raise ParseError(f"bad simple PE {text!r}")
        try:
            return SimplePE(int(m.group(1)), int(m.group(2)))
        except DomainError as exc:
            raise ParseError(str(exc)) from exc
    if text.count(">") != 1:
        raise ParseError(f"PE needs exactly one '>': {text!r}")
    left, right = text.split(">")
    dm = _DUR.match(right.strip())
    if not dm:
        raise ParseError(f"bad duration {right!r}")
    if dm.group(2) != HOURS:
        raise ParseError(f"duration must be in {HOURS}, got {dm.group(2)!r}")
    names, sels = [], []
    for term in left.split("+"):
        tm = _TERM.match(term.strip())
        if not tm:
            raise ParseError(f"bad PE term {term!r}")
        sel, name = tm.groups()
        if name not in UNIT_TICKS:
            raise ParseError(f"unknown calendar {name!r}")
        names.append(name)
        sels.append(ALL if sel == "all" else frozenset(int(v) for v in sel.strip("{} ").split(",")))
    try:
        return PeriodicExpression(CalendarSequence(tuple(names)), tuple(sels), int(dm.group(1)))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def parse_bpe(text: str) -> BoundedPE:
    text = text.strip()
    m = _PAIR.match(text)
    if not m:
        # bare PE, shorthand for an unbounded one
        return unbounded(parse_pe(text))
    rest = text[m.end():]
    if not rest:
        return unbounded(parse_pe(text))
    b, e = (None if g == "*" else int(g) for g in m.groups())
    try:
        return BoundedPE(b, e, parse_pe(rest))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def parse_bpes(text: str) -> BPES:
    text = text.strip()
    if not text:
        return BPES()
    try:
        return BPES(parse_bpe(part) for part in text.split(";"))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc

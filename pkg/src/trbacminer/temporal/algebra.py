"""Semantic operations on BPESs.

Every BPES denotes a set of ticks. Because each PE is periodic in the
length ``P`` of one C_1 unit, that set is described exactly by a normal
form :class:`Sem`: a periodic bit mask ``left`` that holds for all ticks
before ``lo``, an explicit bit string on ``[lo, hi)`` and a periodic mask
``right`` from ``hi`` on. Unbounded BPESs have ``lo = hi = None`` and a
single mask. The normal form is unique, so it doubles as a hash key for
semantic equality.

Results of intersection, union and canonicalisation are turned back into
PEs greedily: split the covered ticks into maximal hour ranges inside each
unit of the calendar just above Hours (usually Days), group the units that
share a range, and factor each group of unit indices into a product of
per-calendar selectors.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

from ..errors import DomainError
from .calendars import SIMPLE_CALENDARS, CalendarSequence
from .expressions import (
    ALL,
    BPES,
    BoundedPE,
    PeriodicExpression,
    SimplePE,
    period_mask,
)


class Sem(NamedTuple):
    period: int
    left: int
    right: int
    lo: Optional[int]
    hi: Optional[int]
    bits: int

    @property
    def periodic(self) -> bool:
        return self.lo is None

    def is_empty(self) -> bool:
        return not (self.left or self.right or self.bits)


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


def _ones(n: int) -> int:
    return (1 << n) - 1 if n > 0 else 0


def _tile(mask: int, period: int, start: int, n: int) -> int:
    """Bits of the periodic set ``mask`` over the ticks [start, start+n)."""
    if n <= 0 or not mask:
        return 0
    full = (1 << period) - 1
    if mask == full:
        return _ones(n)
    r = start % period
    rot = ((mask >> r) | (mask << (period - r))) & full
    reps = n // period + 1
    rep = rot * (((1 << (period * reps)) - 1) // full)
    return rep & _ones(n)


def _periodic(period: int, mask: int) -> Sem:
    return Sem(period, mask, mask, None, None, 0)


def _window(s: Sem, start: int, n: int) -> int:
    """Bits of ``s`` over the ticks [start, start+n)."""
    if n <= 0:
        return 0
    if s.lo is None:
        return _tile(s.left, s.period, start, n)
    end = start + n
    out = 0
    a, b = start, min(end, s.lo)
    if b > a:
        out |= _tile(s.left, s.period, a, b - a)
    a, b = max(start, s.lo), min(end, s.hi)
    if b > a:
        out |= ((s.bits >> (a - s.lo)) & _ones(b - a)) << (a - start)
    a = max(start, s.hi)
    if end > a:
        out |= _tile(s.right, s.period, a, end - a) << (a - start)
    return out


def _normalize(period: int, left: int, right: int, a: int, n: int, bits: int) -> Sem:
    """Normal form of: ``left`` before a, ``bits`` on [a, a+n), ``right`` after."""
    if left == right:
        diff = bits ^ _tile(left, period, a, n)
        if not diff:
            return _periodic(period, left)
        lo = a + _low(diff)
        hi = a + diff.bit_length()
        return Sem(period, left, right, lo, hi, (bits >> (lo - a)) & _ones(hi - lo))
    diff_l = bits ^ _tile(left, period, a, n)
    if diff_l:
        lo = a + _low(diff_l)
    else:
        lo = a + n + _low(_tile(left, period, a + n, period) ^ _tile(right, period, a + n, period))
    diff_r = bits ^ _tile(right, period, a, n)
    if diff_r:
        hi = a + diff_r.bit_length()
    else:
        back = _tile(left, period, a - period, period) ^ _tile(right, period, a - period, period)
        hi = a - period + back.bit_length()
    if lo >= hi:
        return Sem(period, left, right, hi, hi, 0)
    return Sem(period, left, right, lo, hi, (bits >> (lo - a)) & _ones(hi - lo))


def _build(bpes: BPES, period: int) -> Sem:
    if not bpes.members:
        return _periodic(period, 0)
    if all(m.unbounded for m in bpes.members):
        mask = 0
        for m in bpes.members:
            mask |= period_mask(m.pe)
        return _periodic(period, mask)
    left = right = 0
    points = []
    for m in bpes.members:
        pm = period_mask(m.pe)
        if m.begin is None:
            left |= pm
        if m.end is None:
            right |= pm
        points.extend(p for p in (m.begin, m.end) if p is not None)
    a, n = min(points), max(points) - min(points)
    bits = 0
    for m in bpes.members:
        s = a if m.begin is None else max(m.begin, a)
        e = a + n if m.end is None else min(m.end, a + n)
        if e > s:
            bits |= _tile(period_mask(m.pe), period, s, e - s) << (s - a)
    return _normalize(period, left, right, a, n, bits)


def semantic_form(bpes: BPES, period: Optional[int] = None) -> Sem:
    if not bpes.members:
        return _periodic(period or 1, 0)
    if bpes._sem is None:
        bpes._sem = _build(bpes, bpes.calendars.period)
    return bpes._sem


def _shared_calendars(*items: BPES) -> Optional[CalendarSequence]:
    cals = {b.calendars for b in items if b.members}
    if len(cals) > 1:
        raise DomainError("operands use different calendar sequences: "
                          + "; ".join(sorted(map(str, cals))))
    return next(iter(cals), None)


_OPS = {
    "and": lambda x, y: x & y,
    "or": lambda x, y: x | y,
    "andnot": lambda x, y: x & ~y,
}


def combine(s1: Sem, s2: Sem, op: str) -> Sem:
    f = _OPS[op]
    period = s1.period
    full = (1 << period) - 1
    if s1.lo is None and s2.lo is None:
        return _periodic(period, f(s1.left, s2.left) & full)
    points = [v for s in (s1, s2) if s.lo is not None for v in (s.lo, s.hi)]
    a = min(points)
    n = max(points) - a
    bits = f(_window(s1, a, n), _window(s2, a, n)) & _ones(n)
    return _normalize(period, f(s1.left, s2.left) & full, f(s1.right, s2.right) & full,
                      a, n, bits)


def shift(s: Sem, k: int) -> Sem:
    """The set {t + k : t in s}."""
    p = s.period
    full = (1 << p) - 1
    r = k % p

    def rot(m):
        return ((m << r) | (m >> (p - r))) & full

    if s.lo is None:
        return _periodic(p, rot(s.left))
    return Sem(p, rot(s.left), rot(s.right), s.lo + k, s.hi + k, s.bits)


def _pair(a: BPES, b: BPES) -> Tuple[Optional[CalendarSequence], Sem, Sem]:
    cal = _shared_calendars(a, b)
    period = cal.period if cal else 1
    return cal, semantic_form(a, period), semantic_form(b, period)


# -- public operations --------------------------------------------------------

def contains_sem(a: BPES, b: BPES) -> bool:
    """True iff every instant of ``b`` is an instant of ``a`` (b ⊑ a)."""
    if a is b:
        return True
    _, sa, sb = _pair(a, b)
    if sa == sb:
        return True
    return combine(sb, sa, "andnot").is_empty()


def sem_equal(a: BPES, b: BPES) -> bool:
    _, sa, sb = _pair(a, b)
    return sa == sb


def is_empty_sem(a: BPES) -> bool:
    return semantic_form(a).is_empty()


def intersect_sem(a: BPES, b: BPES) -> BPES:
    cal, sa, sb = _pair(a, b)
    if cal is None:
        return BPES()
    return symbolize(combine(sa, sb, "and"), cal)


def union_sem(*items: BPES) -> BPES:
    """Canonical BPES denoting the union of ``items``."""
    cal = _shared_calendars(*items)
    if cal is None:
        return BPES()
    acc = _periodic(cal.period, 0)
    for b in items:
        acc = combine(acc, semantic_form(b, cal.period), "or")
    return symbolize(acc, cal)


def union_merge(a: BPES, b: BPES) -> BPES:
    """Semantic union; BPEs are merged when the operands overlap or touch.

    Operands whose intervals are disjoint and not consecutive are combined
    by plain set union of their members.
    """
    cal, sa, sb = _pair(a, b)
    if cal is None:
        return BPES()
    if not a.members:
        return b
    if not b.members:
        return a
    touching = (
        not combine(sa, sb, "and").is_empty()
        or not combine(shift(sa, 1), sb, "and").is_empty()
        or not combine(shift(sb, 1), sa, "and").is_empty()
    )
    if not touching:
        out = BPES(a.members + b.members)
        out._sem = combine(sa, sb, "or")
        return out
    return symbolize(combine(sa, sb, "or"), cal)


def canonicalize(a: BPES) -> BPES:
    if not a.members:
        return a
    return symbolize(semantic_form(a), a.calendars)


def duration_fraction(a: BPES) -> Fraction:
    """Fraction of one C_1 unit covered by ``a``.

    Bounded BPESs are averaged over the whole C_1 units inside the hull of
    their bounds (over the hull itself if it holds no whole unit); an open
    side contributes the density of its periodic tail.
    """
    if not a.members:
        return Fraction(0)
    s = semantic_form(a)
    p = s.period
    if s.lo is None:
        return Fraction(s.left.bit_count(), p)
    begins = [m.begin for m in a.members]
    ends = [m.end for m in a.members]
    b = None if None in begins else min(begins)
    e = None if None in ends else max(ends)
    if b is None and e is None:
        return Fraction(s.left.bit_count() + s.right.bit_count(), 2 * p)
    if e is None:
        return Fraction(s.right.bit_count(), p)
    if b is None:
        return Fraction(s.left.bit_count(), p)
    k0, k1 = -(-b // p), e // p
    if k1 > k0:
        return Fraction(_window(s, k0 * p, (k1 - k0) * p).bit_count(), (k1 - k0) * p)
    if e <= b:
        return Fraction(0)
    return Fraction(_window(s, b, e - b).bit_count(), e - b)


def _runs(bits: int) -> List[Tuple[int, int]]:
    out = []
    while bits:
        s = _low(bits)
        t = bits >> s
        n = ((t ^ (t + 1)).bit_length()) - 1
        out.append((s, s + n))
        bits &= ~(_ones(n) << s)
    return out


def translate_to_simple(a: BPES, one_based: Optional[bool] = None) -> List[Tuple[int, int]]:
    """Maximal hour ranges of ``a`` within the fundamental period starting at tick 0.

    Ranges are reported in the hour convention of the input notation:
    1-based hour indices for general PEs, clock hours for simple PEs.
    """
    if not a.members:
        return []
    if one_based is None:
        one_based = not a.is_simple
    s = semantic_form(a)
    base = 1 if one_based else 0
    return [(x + base, y + base) for x, y in _runs(_window(s, 0, s.period))]


# -- re-symbolisation -----------------------------------------------------------

def _factor(tuples: frozenset) -> List[Tuple[frozenset, ...]]:
    """Cover a set of equal-length digit tuples by disjoint products of digit sets."""
    if not tuples:
        return []
    if len(next(iter(tuples))) == 1:
        return [(frozenset(t[0] for t in tuples),)]
    rests: Dict[int, set] = defaultdict(set)
    for t in tuples:
        rests[t[0]].add(t[1:])
    by_rest: Dict[frozenset, List[int]] = defaultdict(list)
    for first in sorted(rests):
        by_rest[frozenset(rests[first])].append(first)
    out = []
    for rest, firsts in sorted(by_rest.items(), key=lambda kv: kv[1][0]):
        for sub in _factor(rest):
            out.append((frozenset(firsts),) + sub)
    return out


@lru_cache(maxsize=65536)
def _mask_to_pes(mask: int, cal: CalendarSequence) -> Tuple:
    if not mask:
        return ()
    ticks = cal.unit_ticks
    unit = ticks[-2]
    n_units = cal.period // unit
    if cal == SIMPLE_CALENDARS:
        return tuple(SimplePE(s, e) for s, e in _runs(mask))
    ranges: Dict[Tuple[int, int], List[int]] = defaultdict(list)
    for j in range(n_units):
        seg = (mask >> (j * unit)) & _ones(unit)
        for r in _runs(seg):
            ranges[r].append(j)
    groups: Dict[Tuple[int, Tuple[int, ...]], List[int]] = defaultdict(list)
    for (s, e), units in ranges.items():
        groups[(e - s, tuple(units))].append(s)
    counts = cal.counts[:-1]
    pes = []
    for (dur, units), starts in groups.items():
        if counts:
            digits = []
            for j in units:
                d = []
                for c in reversed(counts):
                    j, r = divmod(j, c)
                    d.append(r + 1)
                digits.append(tuple(reversed(d)))
            products = _factor(frozenset(digits))
        else:
            products = [()]
        hours = frozenset(s + 1 for s in starts)
        for prod in products:
            sels = [ALL]
            for digit_set, c in zip(prod, counts):
                sels.append(ALL if len(digit_set) == c else digit_set)
            sels.append(hours)
            first_unit = 0
            for digit_set, c in zip(prod, counts):
                first_unit = first_unit * c + (min(digit_set) - 1)
            pes.append(((min(starts), first_unit), PeriodicExpression(cal, tuple(sels), dur)))
    pes.sort(key=lambda kv: (kv[0], str(kv[1])))
    return tuple(pe for _, pe in pes)


def _always(cal: CalendarSequence):
    if cal == SIMPLE_CALENDARS:
        return SimplePE(0, 24)
    return PeriodicExpression(cal, (ALL,) * len(cal.names), 1)


def symbolize(s: Sem, cal: CalendarSequence) -> BPES:
    """A BPES over ``cal`` denoting exactly the tick set ``s``."""
    if s.lo is None:
        members = [BoundedPE(None, None, pe) for pe in _mask_to_pes(s.left, cal)]
    else:
        members = [BoundedPE(None, s.lo, pe) for pe in _mask_to_pes(s.left, cal)]
        always = _always(cal)
        members += [BoundedPE(s.lo + x, s.lo + y, always) for x, y in _runs(s.bits)]
        members += [BoundedPE(s.hi, None, pe) for pe in _mask_to_pes(s.right, cal)]
    out = BPES(members)
    out._sem = s
    return out

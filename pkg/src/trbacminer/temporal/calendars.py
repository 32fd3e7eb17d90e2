"""Calendars and calendar sequences.

Time is discretised into one-hour ticks counted from a fixed epoch: Monday
00:00 of week 1 of quadweek 1 (which is also day 1 of year 1). Every
calendar is a uniform-length unit measured in ticks, so a Year is always
365 days and a Quadweek always 28 days.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from ..errors import DomainError

HOURS = "Hours"

UNIT_TICKS: Dict[str, int] = {
    "Hours": 1,
    "Days": 24,
    "Weeks": 7 * 24,
    "Quadweeks": 28 * 24,
    "Years": 365 * 24,
}


@dataclass(frozen=True)
class CalendarSequence:
    """Calendars C_1..C_n, larger to smaller; C_n and C_d are Hours."""

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 2:
            raise DomainError(f"calendar sequence needs at least two calendars: {names}")
        for name in names:
            if name not in UNIT_TICKS:
                raise DomainError(f"unknown calendar {name!r}")
        if names[-1] != HOURS:
            raise DomainError(f"smallest calendar must be {HOURS}, got {names[-1]!r}")
        for big, small in zip(names, names[1:]):
            b, s = UNIT_TICKS[big], UNIT_TICKS[small]
            if b <= s or b % s:
                raise DomainError(f"{big} is not a multiple of {small}")

    @property
    def unit_ticks(self) -> Tuple[int, ...]:
        return tuple(UNIT_TICKS[n] for n in self.names)

    @property
    def period(self) -> int:
        """Ticks in one unit of C_1, the fundamental period."""
        return UNIT_TICKS[self.names[0]]

    @property
    def counts(self) -> Tuple[int, ...]:
        """Number of C_k units per C_{k-1} unit, for k = 2..n."""
        t = self.unit_ticks
        return tuple(t[k - 1] // t[k] for k in range(1, len(t)))

    def __str__(self):
        return ",".join(self.names)


SIMPLE_CALENDARS = CalendarSequence(("Days", "Hours"))
QUADWEEK_CALENDARS = CalendarSequence(("Quadweeks", "Days", "Hours"))
WEEKLY_CALENDARS = CalendarSequence(("Weeks", "Days", "Hours"))

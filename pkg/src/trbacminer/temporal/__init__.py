from .algebra import (
    Sem,
    canonicalize,
    contains_sem,
    duration_fraction,
    intersect_sem,
    is_empty_sem,
    sem_equal,
    semantic_form,
    translate_to_simple,
    union_merge,
    union_sem,
)
from .calendars import (
    QUADWEEK_CALENDARS,
    SIMPLE_CALENDARS,
    WEEKLY_CALENDARS,
    CalendarSequence,
)
from .expressions import (
    ALL,
    BPES,
    BoundedPE,
    PeriodicExpression,
    SimplePE,
    parse_bpe,
    parse_bpes,
    parse_pe,
    period_mask,
    unbounded,
    wsc_size,
)
from .oracle import InstantSet, expand_instants

__all__ = [
    "ALL", "BPES", "BoundedPE", "CalendarSequence", "InstantSet", "PeriodicExpression",
    "QUADWEEK_CALENDARS", "SIMPLE_CALENDARS", "Sem", "SimplePE", "WEEKLY_CALENDARS",
    "canonicalize", "contains_sem", "duration_fraction", "expand_instants", "intersect_sem",
    "is_empty_sem", "parse_bpe", "parse_bpes", "parse_pe", "period_mask", "sem_equal",
    "semantic_form", "translate_to_simple", "unbounded", "union_merge", "union_sem",
    "wsc_size",
]

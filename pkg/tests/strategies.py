"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from trbacminer.temporal import (
    ALL,
    BPES,
    WEEKLY_CALENDARS,
    BoundedPE,
    PeriodicExpression,
    SimplePE,
)


@st.composite
def simple_pes(draw):
    s = draw(st.integers(0, 23))
    e = draw(st.integers(s + 1, 24))
    return SimplePE(s, e)


@st.composite
def weekly_pes(draw):
    days = draw(st.one_of(st.just(ALL), st.frozensets(st.integers(1, 7), min_size=1, max_size=4)))
    hours = draw(st.frozensets(st.integers(1, 24), min_size=1, max_size=3))
    dur = draw(st.integers(1, 30))
    return PeriodicExpression(WEEKLY_CALENDARS, (ALL, days, hours), dur)


@st.composite
def bounds(draw, span):
    if draw(st.booleans()):
        return None, None
    b = draw(st.one_of(st.none(), st.integers(-span, 2 * span)))
    e = draw(st.one_of(st.none(), st.integers(-span, 2 * span)))
    if b is not None and e is not None and b > e:
        b, e = e, b
    return b, e


@st.composite
def bpes_values(draw, style=None, bounded=True, max_size=3):
    style = style or draw(st.sampled_from(["simple", "weekly"]))
    pes = simple_pes() if style == "simple" else weekly_pes()
    span = 72 if style == "simple" else 400
    members = []
    for pe in draw(st.lists(pes, min_size=0, max_size=max_size)):
        b, e = draw(bounds(span)) if bounded else (None, None)
        members.append(BoundedPE(b, e, pe))
    return BPES(members)


@st.composite
def bpes_pairs(draw, bounded=True):
    style = draw(st.sampled_from(["simple", "weekly"]))
    return (draw(bpes_values(style, bounded)), draw(bpes_values(style, bounded)))


@st.composite
def bpes_triples(draw):
    style = draw(st.sampled_from(["simple", "weekly"]))
    return tuple(draw(bpes_values(style)) for _ in range(3))

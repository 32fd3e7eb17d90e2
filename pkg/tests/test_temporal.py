from fractions import Fraction

import pytest
from hypothesis import given, settings

from strategies import bpes_pairs, bpes_triples, bpes_values
from trbacminer.errors import DomainError, ParseError, ResourceError
from trbacminer.temporal import (
    ALL,
    BPES,
    QUADWEEK_CALENDARS,
    SIMPLE_CALENDARS,
    BoundedPE,
    CalendarSequence,
    PeriodicExpression,
    SimplePE,
    canonicalize,
    contains_sem,
    duration_fraction,
    expand_instants,
    intersect_sem,
    parse_bpes,
    parse_pe,
    sem_equal,
    translate_to_simple,
    union_merge,
    wsc_size,
)

ORACLE = settings(max_examples=1000, deadline=None)


def horizon(*items):
    points = [v for b in items for m in b.members for v in (m.begin, m.end) if v is not None]
    period = next((b.calendars.period for b in items if b.members), 24)
    lo = min(points, default=0) - 2 * period
    hi = max(points, default=0) + 2 * period
    return lo, hi


def ticks(b, h):
    return expand_instants(b, h).ticks


def weekly(days, hour, dur):
    return PeriodicExpression(CalendarSequence(("Weeks", "Days", "Hours")),
                              (ALL, frozenset(days), frozenset({hour})), dur)


# -- worked examples ------------------------------------------------------------

def test_intersection_gives_monday_1pm_to_2pm():
    a = BPES([weekly({1, 3}, 10, 8)])   # 9am-5pm Mon & Wed
    b = BPES([weekly({1, 5}, 14, 1)])   # 1pm-2pm Mon & Fri
    got = intersect_sem(a, b)
    assert got == BPES([weekly({1}, 14, 1)])
    assert sorted(ticks(got, (0, 168))) == [13]


def test_consecutive_weekday_ranges_merge_into_one_bpe():
    a = BPES([weekly({1, 2, 3, 4, 5}, 10, 3)])
    b = BPES([weekly({1, 2, 3, 4, 5}, 13, 5)])
    got = union_merge(a, b)
    assert got == BPES([weekly({1, 2, 3, 4, 5}, 10, 8)])
    assert wsc_size(got) <= wsc_size(a) + wsc_size(b)


def test_duration_of_daily_9_to_5_over_years_is_one_third():
    pe = PeriodicExpression(CalendarSequence(("Years", "Days", "Hours")),
                            (ALL, ALL, frozenset({10})), 8)
    assert duration_fraction(BPES([pe])) == Fraction(1, 3)


def test_weekly_pe_translates_to_hours_of_week():
    pe = parse_pe("all.Weeks+{1,2,7}.Days+{1}.Hours>8.Hours")
    assert translate_to_simple(BPES([pe])) == [(1, 9), (25, 33), (145, 153)]


def test_simple_pe_translates_to_itself():
    assert translate_to_simple(BPES([SimplePE(6, 11)])) == [(6, 11)]


def test_wsc_sizes():
    assert wsc_size(SimplePE(6, 11)) == 1
    pe = parse_pe("all.Quadweeks+{1,3}.Weeks+{1,2,3,4,5}.Days+{10}.Hours>8.Hours")
    assert wsc_size(pe) == 10
    assert wsc_size(BPES()) == 0
    assert wsc_size(BPES([BoundedPE(5, 100, pe)])) == 10


def test_quadweek_example_expands_to_80_ticks():
    pe = parse_pe("all.Quadweeks+{1,3}.Weeks+{1,2,3,4,5}.Days+{10}.Hours>8.Hours")
    got = ticks(BPES([pe]), (0, 672))
    assert len(got) == 80
    assert min(got) == 9 and 16 in got and 17 not in got


def test_hospital_shift_duration():
    days = frozenset({1, 3, 5, 8, 10, 12, 15, 17, 19, 22, 24, 26})
    pe = PeriodicExpression(QUADWEEK_CALENDARS, (ALL, days, frozenset({8})), 12)
    b = BPES([pe])
    assert len(ticks(b, (0, 672))) == 144
    assert duration_fraction(b) == Fraction(3, 14)


def test_expand_small_cases():
    assert ticks(BPES([SimplePE(8, 9)]), (0, 24)) == {8}
    assert ticks(BPES(), (0, 24)) == frozenset()
    with pytest.raises(ResourceError):
        expand_instants(BPES([SimplePE(8, 9)]), (0, 10 ** 6 + 1))
    with pytest.raises(DomainError):
        expand_instants(BPES([SimplePE(8, 9)]), (5, 5))


def test_trivial_containment():
    a, b = parse_bpes("[10,17]"), parse_bpes("[10,12]")
    assert contains_sem(a, b) and not contains_sem(b, a)
    assert contains_sem(a, a)
    # containment can hold although member inclusion fails
    assert contains_sem(parse_bpes("[9,13];[12,17]"), parse_bpes("[10,15]"))


def test_union_identity_and_plain_union_when_apart():
    a = parse_bpes("[9,11]")
    assert union_merge(a, BPES()) == a
    assert union_merge(a, parse_bpes("[12,17]")) == parse_bpes("[9,11];[12,17]")


def test_mismatched_calendars_rejected():
    q = BPES([parse_pe("all.Quadweeks+{1}.Days+{1}.Hours>1.Hours")])
    with pytest.raises(DomainError):
        contains_sem(q, parse_bpes("[1,2]"))


def test_duration_of_bounded_sets():
    assert duration_fraction(BPES()) == 0
    # two whole days inside [0, 60): 9-17 each day
    assert duration_fraction(parse_bpes("[0,60][9,17]")) == Fraction(1, 3)
    # shorter than a day: average over the hull
    assert duration_fraction(parse_bpes("[0,12][9,17]")) == Fraction(3, 12)
    assert duration_fraction(parse_bpes("[100,*][0,6]")) == Fraction(1, 4)


@pytest.mark.parametrize("text", [
    "all.Quadweeks+{1,3}.Weeks+{1,2,3,4,5}.Days+{10}.Hours>8.Hours",
    "[3,17]all.Weeks+all.Days+{1,5}.Hours>2.Hours",
    "[*,40][6,11];[50,*][7,10]",
    "[6,11]",
])
def test_text_round_trip(text):
    b = parse_bpes(text)
    assert parse_bpes(str(b)) == b


@pytest.mark.parametrize("text", [
    "[5,3]", "all.Days+{1}.Hours", "{1}.Days+{1}.Hours>1.Hours", "all.Days+{25}.Hours>1.Hours",
    "all.Days+{1}.Hours>1.Days", "[1,2]all.Fortnights+{1}.Hours>1.Hours", "[x,2][1,2]",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_bpes(text)


def test_calendar_sequence_validation():
    with pytest.raises(DomainError):
        CalendarSequence(("Days",))
    with pytest.raises(DomainError):
        CalendarSequence(("Hours", "Days"))
    with pytest.raises(DomainError):
        CalendarSequence(("Weeks", "Quadweeks", "Hours"))
    assert SIMPLE_CALENDARS.period == 24
    assert QUADWEEK_CALENDARS.counts == (28, 24)


# -- oracle equivalence ------------------------------------------------------------

@ORACLE
@given(bpes_pairs())
def test_contains_matches_oracle(pair):
    a, b = pair
    h = horizon(a, b)
    assert contains_sem(a, b) == (ticks(b, h) <= ticks(a, h))


@ORACLE
@given(bpes_pairs())
def test_intersection_matches_oracle(pair):
    a, b = pair
    h = horizon(a, b)
    assert ticks(intersect_sem(a, b), h) == ticks(a, h) & ticks(b, h)


@ORACLE
@given(bpes_pairs())
def test_union_matches_oracle(pair):
    a, b = pair
    h = horizon(a, b)
    assert ticks(union_merge(a, b), h) == ticks(a, h) | ticks(b, h)


@ORACLE
@given(bpes_values())
def test_canonicalize_preserves_instants(a):
    h = horizon(a)
    c = canonicalize(a)
    assert ticks(c, h) == ticks(a, h)
    assert canonicalize(c) == c


@ORACLE
@given(bpes_values(bounded=False))
def test_translation_matches_oracle(a):
    if not a:
        assert translate_to_simple(a) == []
        return
    base = 0 if a.is_simple else 1
    got = set()
    for s, e in translate_to_simple(a):
        got.update(range(s - base, e - base))
    assert got == ticks(a, (0, a.calendars.period))


@ORACLE
@given(bpes_values(bounded=False))
def test_duration_matches_oracle(a):
    if not a:
        assert duration_fraction(a) == 0
        return
    p = a.calendars.period
    assert duration_fraction(a) == Fraction(len(ticks(a, (0, p))), p)


@settings(max_examples=300, deadline=None)
@given(bpes_pairs())
def test_semantic_equality_is_canonical(pair):
    a, b = pair
    h = horizon(a, b)
    same = ticks(a, h) == ticks(b, h)
    assert sem_equal(a, b) == same
    assert (canonicalize(a) == canonicalize(b)) == same


@settings(max_examples=300, deadline=None)
@given(bpes_triples())
def test_lattice_laws(trip):
    a, b, c = trip
    assert sem_equal(intersect_sem(a, b), intersect_sem(b, a))
    assert sem_equal(union_merge(a, b), union_merge(b, a))
    assert sem_equal(intersect_sem(intersect_sem(a, b), c), intersect_sem(a, intersect_sem(b, c)))
    assert sem_equal(union_merge(union_merge(a, b), c), union_merge(a, union_merge(b, c)))
    assert contains_sem(union_merge(a, b), a)
    assert contains_sem(a, intersect_sem(a, b))
    if contains_sem(a, b) and contains_sem(b, c):
        assert contains_sem(a, c)

"""Policy and role quality metrics, attribute expressions and role suggestions."""
from __future__ import annotations

import csv
import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import ConfigError, DomainError, ParseError
from .policy import TRBACPolicy, authorized_perms, authorized_users
from .temporal import BPES, contains_sem, duration_fraction, wsc_size

Quality = Tuple[Fraction, ...]

EXACT_SEARCH_LIMIT = 10 ** 4

# weights of role size, covEntit, permission popularity and PE popularity
UI_WEIGHTS = (Fraction("-2.7357"), Fraction("-1.6484"), Fraction("2.3417"), Fraction("-0.6017"))


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class WscWeights:
    w1: Fraction = Fraction(1)
    w2: Fraction = Fraction(1)
    w3: Fraction = Fraction(1)
    w4: Fraction = Fraction(1)
    w5: Fraction = Fraction(1)

    def __post_init__(self):
        ws = [_frac(w) for w in (self.w1, self.w2, self.w3, self.w4, self.w5)]
        for name, w in zip(("w1", "w2", "w3", "w4", "w5"), ws):
            object.__setattr__(self, name, w)
        if any(w < 0 for w in ws):
            raise ConfigError("WSC weights must be non-negative")
        if not any(ws):
            raise ConfigError("at least one WSC weight must be positive")

    @classmethod
    def parse(cls, text: str) -> "WscWeights":
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 5:
            raise ConfigError(f"expected five comma-separated weights, got {text!r}")
        try:
            return cls(*(Fraction(p.strip()) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"bad weight in {text!r}") from exc


# -- attribute data -------------------------------------------------------------

class AttributeData:
    """Natural-valued attributes of users, with per-value user bitsets."""

    def __init__(self, attributes: Sequence[str], values: Mapping[str, Sequence[int]]):
        self.attributes: Tuple[str, ...] = tuple(attributes)
        self.users: Tuple[str, ...] = tuple(sorted(values))
        self.index = {u: i for i, u in enumerate(self.users)}
        self.values: Dict[str, Tuple[int, ...]] = {}
        for u in self.users:
            row = tuple(int(v) for v in values[u])
            if len(row) != len(self.attributes):
                raise DomainError(f"user {u} has {len(row)} values for {len(self.attributes)} attributes")
            if any(v < 0 for v in row):
                raise DomainError(f"user {u} has a negative attribute value")
            self.values[u] = row
        # holders[a][v] = bitset of users with f(u, a) = v
        self.holders: List[Dict[int, int]] = [dict() for _ in self.attributes]
        for u in self.users:
            bit = 1 << self.index[u]
            for k, v in enumerate(self.values[u]):
                self.holders[k][v] = self.holders[k].get(v, 0) | bit
        self.all_users = (1 << len(self.users)) - 1

    def value(self, user: str, attribute: str) -> int:
        return self.values[user][self.attributes.index(attribute)]

    def bitset(self, users: Iterable[str]) -> int:
        out = 0
        for u in users:
            try:
                out |= 1 << self.index[u]
            except KeyError:
                raise DomainError(f"no attribute data for user {u}") from None
        return out

    def members(self, bits: int) -> Set[str]:
        return {u for i, u in enumerate(self.users) if bits >> i & 1}


def read_attributes(path) -> AttributeData:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0].strip() != "user":
        raise ParseError(f"{path}: header must start with 'user'")
    attrs = [a.strip() for a in rows[0][1:]]
    values = {}
    for lineno, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != len(attrs) + 1:
            raise ParseError(f"{path}:{lineno}: expected {len(attrs) + 1} fields")
        try:
            values[row[0]] = [int(v) for v in row[1:]]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    try:
        return AttributeData(attrs, values)
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def format_attributes(data: AttributeData) -> str:
    lines = [",".join(("user",) + data.attributes)]
    for u in data.users:
        lines.append(",".join([u] + [str(v) for v in data.values[u]]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AttributeExpression:
    """Conjunction of ``attribute in values``; absent attributes are unconstrained."""

    conjuncts: Mapping[str, FrozenSet[int]] = field(default_factory=dict)

    def __post_init__(self):
        norm = {a: frozenset(v) for a, v in self.conjuncts.items()}
        if any(not v for v in norm.values()):
            raise DomainError("explicit conjuncts must be non-empty")
        object.__setattr__(self, "conjuncts", norm)

    def satisfied_by(self, row: Mapping[str, int]) -> bool:
        return all(row.get(a) in vals for a, vals in self.conjuncts.items())

    def satisfying(self, data: AttributeData) -> int:
        bits = data.all_users
        for a, vals in self.conjuncts.items():
            k = data.attributes.index(a)
            sub = 0
            for v in vals:
                sub |= data.holders[k].get(v, 0)
            bits &= sub
        return bits

    def __str__(self):
        if not self.conjuncts:
            return "true"
        return " & ".join(f"{a} in {{{','.join(map(str, sorted(v)))}}}"
                          for a, v in sorted(self.conjuncts.items()))


def mismatch(e: AttributeExpression, users: Iterable[str], data: AttributeData) -> int:
    return bin(e.satisfying(data) ^ data.bitset(users)).count("1")


def _nonempty_subsets(values: Sequence[int]):
    """Non-empty subsets, largest first."""
    for k in range(len(values), 0, -1):
        yield from itertools.combinations(values, k)


def best_fit_expression(users: Iterable[str], data: AttributeData,
                        limit: int = EXACT_SEARCH_LIMIT) -> Tuple[Optional[AttributeExpression], int]:
    """An attribute expression whose satisfying set best matches ``users``.

    Per attribute the candidates are "unconstrained" and the non-empty
    subsets of the values held by the users. The product space is searched
    exhaustively when it has at most ``limit`` elements; ties go to fewer
    and wider conjuncts. Larger spaces use a greedy descent that starts
    unconstrained and removes one value at a time while that lowers the
    mismatch, falling back to the member-value union when that is better.
    An empty user set has mismatch 0 and no expression.
    """
    target = data.bitset(users)
    if not target:
        return None, 0
    held = []
    for k in range(len(data.attributes)):
        held.append(sorted(v for v, bits in data.holders[k].items() if bits & target))

    def sat(k, vals):
        out = 0
        for v in vals:
            out |= data.holders[k][v]
        return out

    space = 1
    for h in held:
        space *= 1 << len(h)
        if space > limit:
            break
    chosen: List[Optional[Tuple[int, ...]]]
    if space <= limit:
        choices = [[(None, data.all_users)] + [(vals, sat(k, vals)) for vals in _nonempty_subsets(h)]
                   for k, h in enumerate(held)]
        best, best_sel = None, None
        # depth-first product search; the partial AND only shrinks
        stack = [(0, data.all_users, ())]
        while stack:
            k, bits, sel = stack.pop()
            if k == len(choices):
                mm = bin(bits ^ target).count("1")
                if best is None or mm < best or (mm == best and sel < best_sel):
                    best, best_sel = mm, sel
                continue
            for i in range(len(choices[k]) - 1, -1, -1):
                vals, b = choices[k][i]
                stack.append((k + 1, bits & b, sel + (i,)))
        chosen = [choices[k][i][0] for k, i in enumerate(best_sel)]
    else:
        domains = [tuple(sorted(h)) for h in data.holders]
        current = [set(d) for d in domains]
        sats = [data.all_users] * len(domains)

        def total(s):
            bits = data.all_users
            for b in s:
                bits &= b
            return bits

        best = bin(total(sats) ^ target).count("1")
        while True:
            move = None
            for k, vals in enumerate(current):
                if len(vals) == 1:
                    continue
                for v in sorted(vals):
                    trial = list(sats)
                    trial[k] = sats[k] & ~data.holders[k][v]
                    mm = bin(total(trial) ^ target).count("1")
                    if mm < best:
                        best, move = mm, (k, v, trial)
            if move is None:
                break
            k, v, sats = move
            current[k].discard(v)
        chosen = [None if len(c) == len(d) else tuple(sorted(c)) for c, d in zip(current, domains)]
        # the member-value union is always feasible; never return worse
        union_mm = bin(total([sat(k, h) for k, h in enumerate(held)]) ^ target).count("1")
        if union_mm < best:
            best, chosen = union_mm, [tuple(h) for h in held]
    conj = {}
    for k, vals in enumerate(chosen):
        if vals is not None and len(vals) < len(data.holders[k]):
            conj[data.attributes[k]] = frozenset(vals)
    return AttributeExpression(conj), best


class BestFitCache:
    """Memoized best-fit search keyed by member set."""

    def __init__(self, data: AttributeData):
        self.data = data
        self._memo: Dict[FrozenSet[str], Tuple[Optional[AttributeExpression], int]] = {}

    def __call__(self, users: Iterable[str]) -> Tuple[Optional[AttributeExpression], int]:
        key = frozenset(users)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = best_fit_expression(key, self.data)
        return hit

    def mismatch(self, users: Iterable[str]) -> int:
        return self(users)[1]


def interpretability(policy: TRBACPolicy, data: AttributeData, cache: Optional[BestFitCache] = None) -> int:
    cache = cache or BestFitCache(data)
    return sum(cache.mismatch(r.users) for r in policy.roles.values())


# -- structural metrics ----------------------------------------------------------

@dataclass
class PolicyStats:
    """Additive counts from which every policy metric is computed."""

    roles: int = 0
    ua: int = 0
    pa: int = 0
    rh: int = 0
    ta_size: int = 0
    ta_count: int = 0
    int_: int = 0


def policy_stats(policy: TRBACPolicy, data: Optional[AttributeData] = None,
                 cache: Optional[BestFitCache] = None) -> PolicyStats:
    s = PolicyStats()
    for r in policy.roles.values():
        s.roles += 1
        s.ua += len(r.users)
        s.pa += len(r.perms)
        s.rh += len(r.parents)
        s.ta_size += wsc_size(r.ta)
        s.ta_count += len(r.ta)
    if data is not None:
        s.int_ = interpretability(policy, data, cache)
    return s


def wsc_from_stats(s: PolicyStats, w: WscWeights) -> Fraction:
    return w.w1 * s.roles + w.w2 * s.ua + w.w3 * s.pa + w.w4 * s.rh + w.w5 * s.ta_size


def wsc(policy: TRBACPolicy, weights: WscWeights = WscWeights()) -> Fraction:
    return wsc_from_stats(policy_stats(policy), weights)


def co_trap(policy: TRBACPolicy, w_ta=1, w_pa=1) -> Fraction:
    s = policy_stats(policy)
    return _frac(w_ta) * s.ta_count + _frac(w_pa) * s.pa


class MetricKind(enum.Enum):
    ROLES = "roles"
    WSC = "wsc"
    INT = "int"
    WSC_INT = "wsc-int"
    CO_TRAP = "co-trap"


@dataclass(frozen=True)
class MetricSpec:
    kind: MetricKind = MetricKind.WSC_INT
    weights: WscWeights = WscWeights()
    w_ta: Fraction = Fraction(1)
    w_pa: Fraction = Fraction(1)

    @property
    def needs_attributes(self) -> bool:
        return self.kind in (MetricKind.INT, MetricKind.WSC_INT)

    def from_stats(self, s: PolicyStats) -> Quality:
        k = self.kind
        if k is MetricKind.ROLES:
            return (Fraction(s.roles),)
        if k is MetricKind.WSC:
            return (wsc_from_stats(s, self.weights),)
        if k is MetricKind.INT:
            return (Fraction(s.int_),)
        if k is MetricKind.WSC_INT:
            return (wsc_from_stats(s, self.weights), Fraction(s.int_))
        return (_frac(self.w_ta) * s.ta_count + _frac(self.w_pa) * s.pa,)

    def evaluate(self, policy: TRBACPolicy, data: Optional[AttributeData] = None) -> Quality:
        if self.needs_attributes and data is None:
            raise ConfigError(f"metric {self.kind.value} needs attribute data")
        return self.from_stats(policy_stats(policy, data if self.needs_attributes else None))


def scale(q: Quality, delta) -> Quality:
    """Componentwise product with the tolerance factor."""
    d = _frac(delta)
    return tuple(d * x for x in q)


# -- role quality -------------------------------------------------------------------

def cov_entit(users: Iterable[str], perms: Iterable[str], ta: BPES, T: Mapping) -> Fraction:
    """Sum over assigned (u, p) of the share of T(u, p)'s time covered by ``ta``."""
    d = duration_fraction(ta)
    total = Fraction(0)
    for u in users:
        for p in perms:
            want = T.get((u, p))
            if want is not None:
                dw = duration_fraction(want)
                if dw:
                    total += d / dw
    return total


def entitlement_count(users: Iterable[str], T: Mapping) -> int:
    us = set(users)
    return sum(1 for (u, _) in T if u in us)


def clustered_size(users, perms, ta: BPES, T: Mapping) -> Fraction:
    n = entitlement_count(users, T)
    return cov_entit(users, perms, ta, T) / n if n else Fraction(0)


def role_quality(policy: TRBACPolicy, rid: int, T: Mapping, removable: Iterable[int]) -> Tuple[Fraction, Fraction]:
    """(redun, clsSz) of a role, computed from authorized users and permissions.

    A role x covers the triple (u, p, b) of role r when x grants p to u at
    all times in b. redun(r) is minus the fewest removable roles covering
    any triple of r; a role granting nothing gets the lowest redundancy
    value, -(number of roles) - 1.
    """
    removable = set(removable)
    children = policy.children()
    grants = {}
    for x in sorted(policy.roles):
        grants[x] = (authorized_users(policy, x, children), authorized_perms(policy, x))
    au, ap = grants[rid]
    counts = []
    for u in sorted(au):
        for p, b in ap.items():
            c = 0
            for x in removable:
                xu, xp = grants[x]
                if u in xu and p in xp and contains_sem(xp[p], b):
                    c += 1
            counts.append(c)
    redun = -Fraction(min(counts)) if counts else Fraction(-len(policy.roles) - 1)
    r = policy.roles[rid]
    return redun, clustered_size(r.users, r.perms, r.ta, T)


def popularity(roles: Sequence[Tuple[Set[str], Set[str], BPES]]) -> List[Tuple[Fraction, Fraction]]:
    """(permission popularity, PE popularity) of each role in ``roles``."""
    n = len(roles)
    perm_count: Dict[str, int] = {}
    pe_count: Dict[object, int] = {}
    for _, perms, ta in roles:
        for p in perms:
            perm_count[p] = perm_count.get(p, 0) + 1
        for m in set(ta.members):
            pe_count[m] = pe_count.get(m, 0) + 1
    out = []
    for _, perms, ta in roles:
        pp = sum((Fraction(perm_count[p], n) for p in perms), Fraction(0))
        ep = sum((Fraction(pe_count[m], n) for m in set(ta.members)), Fraction(0))
        out.append((pp, ep))
    return out


def ui_scores(roles: Sequence[Tuple[Set[str], Set[str], BPES]], T: Mapping) -> List[Fraction]:
    """Usefulness-for-intersection score of each initial role."""
    a, b, c, d = UI_WEIGHTS
    out = []
    for (users, perms, ta), (pp, ep) in zip(roles, popularity(roles)):
        size = len(users) + len(perms) + wsc_size(ta)
        out.append(a * size + b * cov_entit(users, perms, ta, T) + c * pp + d * ep)
    return out


# -- suggestions --------------------------------------------------------------------------

def suggest_roles(policy: TRBACPolicy, attrs: Sequence[str], row: Mapping[str, int]) -> List[Tuple[int, int]]:
    """Roles whose stored best-fit expression the new user satisfies, by mismatch."""
    unknown = set(row) - set(attrs)
    if unknown:
        raise DomainError(f"unknown attributes: {sorted(unknown)}")
    out = []
    for rid, (conj, mm) in policy.expressions.items():
        if AttributeExpression(conj).satisfied_by(row):
            out.append((mm, rid))
    return [(rid, mm) for mm, rid in sorted(out)]

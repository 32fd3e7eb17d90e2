"""Seeded synthetic datasets: planted RBAC policies, attribute data and
temporal extensions with simple or hospital-schedule PEs.

Randomness comes from numpy's PCG64 seeded with ``[seed, role_id, tag]``,
so every role draws from its own stream and results do not depend on the
order in which roles are processed.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import ConfigError, ParseError
from .metrics import AttributeData
from .policy import TUPA, InheritanceType, RBACPolicy, Role, TRBACPolicy, policy_meaning
from .temporal import ALL, BPES, QUADWEEK_CALENDARS, PeriodicExpression, SimplePE

SIMPLE_POOL: Tuple[Tuple[int, int], ...] = (
    (6, 11), (7, 10), (8, 9), (8, 11), (9, 11), (10, 11), (10, 12), (11, 13), (14, 15), (16, 17),
)
BPES_SIZE_PROBS = (0.78, 0.20, 0.02)

# (days per week, hours per shift, start hour); 8.5-hour shifts use 9 hours
SCHEDULE_TYPES: Tuple[Tuple[int, int, int], ...] = (
    (3, 12, 7), (3, 12, 19), (5, 9, 7), (5, 9, 15), (5, 9, 23),
)
SCHEDULE_PROBS = (0.144, 0.094, 0.284, 0.284, 0.194)

_TAG_RBAC, _TAG_ATTR, _TAG_SIMPLE, _TAG_SCHEDULES, _TAG_COMPLEX = range(5)


def _rng(seed: int, stream: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, tag])


@dataclass(frozen=True)
class GenParams:
    n_users: int = 30
    n_perms: int = 30
    n_roles: int = 10
    roles_per_user: Tuple[int, int] = (1, 2)
    perms_per_role: Tuple[int, int] = (2, 5)
    n_attrs: int = 3
    attr_values: int = 5
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "roles_per_user", tuple(self.roles_per_user))
        object.__setattr__(self, "perms_per_role", tuple(self.perms_per_role))
        for name in ("n_users", "n_perms", "n_roles"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        for name, cap in (("roles_per_user", self.n_roles), ("perms_per_role", self.n_perms)):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ConfigError(f"{name} must satisfy 1 <= min <= max")
            if hi > cap:
                raise ConfigError(f"{name} max {hi} exceeds the available {cap}")
        if self.n_attrs < 0 or self.attr_values < 1:
            raise ConfigError("bad attribute shape")
        if not 0 <= self.noise <= 1:
            raise ConfigError("noise must lie in [0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit natural number")

    @classmethod
    def from_dict(cls, data: dict) -> "GenParams":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown generation parameters: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["roles_per_user"] = list(self.roles_per_user)
        d["perms_per_role"] = list(self.perms_per_role)
        return d


def _names(prefix: str, n: int) -> List[str]:
    width = len(str(n))
    return [f"{prefix}{i:0{width}d}" for i in range(1, n + 1)]


def gen_synthetic_rbac(params: GenParams) -> Tuple[RBACPolicy, AttributeData]:
    """A planted flat RBAC policy and attribute data that explains its roles.

    Attribute k records, as a bitmask, the user's membership in the roles
    j with j = k (mod n_attrs); attributes beyond the number of roles are
    uniform noise. With ``noise`` > 0 each user-attribute value is replaced
    by a random value with that probability.
    """
    rng = _rng(params.seed, 0, _TAG_RBAC)
    users = _names("u", params.n_users)
    perms = _names("p", params.n_perms)
    role_perms = []
    for _ in range(params.n_roles):
        k = int(rng.integers(params.perms_per_role[0], params.perms_per_role[1] + 1))
        role_perms.append({perms[i] for i in rng.choice(params.n_perms, size=k, replace=False)})
    members: List[set] = [set() for _ in range(params.n_roles)]
    for u in users:
        k = int(rng.integers(params.roles_per_user[0], params.roles_per_user[1] + 1))
        for j in rng.choice(params.n_roles, size=k, replace=False):
            members[int(j)].add(u)
    for j in range(params.n_roles):
        if not members[j]:
            members[j].add(users[int(rng.integers(params.n_users))])
    roles = {j + 1: Role(j + 1, members[j], role_perms[j], BPES()) for j in range(params.n_roles)}
    rbac = RBACPolicy(set(users), set(perms), roles)
    return rbac, _attributes(params, users, members)


def _attributes(params: GenParams, users: Sequence[str], members: Sequence[set]) -> AttributeData:
    rng = _rng(params.seed, 0, _TAG_ATTR)
    n = params.n_attrs
    attrs = [f"a{k + 1}" for k in range(n)]
    values: Dict[str, List[int]] = {}
    for u in users:
        row = []
        for k in range(n):
            planted = [j for j in range(len(members)) if j % n == k]
            if planted:
                row.append(sum(1 << i for i, j in enumerate(planted) if u in members[j]))
            else:
                row.append(int(rng.integers(params.attr_values)))
        values[u] = row
    if params.noise > 0:
        top = max([v for row in values.values() for v in row] + [params.attr_values - 1]) + 1
        for u in users:
            for k in range(n):
                if rng.random() < params.noise:
                    values[u][k] = int(rng.integers(top))
    return AttributeData(attrs, values)


# -- temporal extension ----------------------------------------------------------------

def sample_bpes_sizes(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.choice(np.array([1, 2, 3]), size=n, p=BPES_SIZE_PROBS)


def sample_schedule_types(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.choice(len(SCHEDULE_TYPES), size=n, p=SCHEDULE_PROBS)


def simple_bpes(seed: int, role_id: int) -> BPES:
    rng = _rng(seed, role_id, _TAG_SIMPLE)
    k = int(sample_bpes_sizes(rng, 1)[0])
    picks = sorted(rng.choice(len(SIMPLE_POOL), size=k, replace=False))
    return BPES([SimplePE(*SIMPLE_POOL[i]) for i in picks])


def _with_times(rbac: RBACPolicy, tas: Dict[int, BPES], it: InheritanceType) -> TRBACPolicy:
    roles = {rid: Role(rid, set(r.users), set(r.perms), tas[rid], set(r.parents))
             for rid, r in rbac.roles.items()}
    return TRBACPolicy(set(rbac.users), set(rbac.perms), roles, it)


def extend_simple(rbac: RBACPolicy, seed: int, it: InheritanceType = InheritanceType.WR) -> TRBACPolicy:
    return _with_times(rbac, {rid: simple_bpes(seed, rid) for rid in rbac.roles}, it)


@dataclass(frozen=True)
class WorkSchedule:
    kind: int
    days: Tuple[int, ...]      # 1-based days of the quadweek on which a shift starts
    start: int                 # clock hour
    hours: int

    def bpes(self) -> BPES:
        first = min(self.hours, 24 - self.start)
        pes = [PeriodicExpression(QUADWEEK_CALENDARS, (ALL, frozenset(self.days), frozenset({self.start + 1})), first)]
        rest = self.hours - first
        if rest:
            nxt = frozenset(d % 28 + 1 for d in self.days)
            pes.append(PeriodicExpression(QUADWEEK_CALENDARS, (ALL, nxt, frozenset({1})), rest))
        return BPES(pes)


def build_schedules(seed: int) -> List[WorkSchedule]:
    """Two instances of each schedule type; instance i of type t is at index 2t+i."""
    rng = _rng(seed, 0, _TAG_SCHEDULES)
    out = []
    for kind, (per_week, hours, start) in enumerate(SCHEDULE_TYPES):
        for _ in range(2):
            days = []
            for week in range(4):
                picks = rng.choice(7, size=per_week, replace=False)
                days.extend(7 * week + int(d) + 1 for d in sorted(picks))
            out.append(WorkSchedule(kind, tuple(days), start, hours))
    return out


def complex_schedule(seed: int, role_id: int, schedules: Sequence[WorkSchedule]) -> WorkSchedule:
    rng = _rng(seed, role_id, _TAG_COMPLEX)
    kind = int(sample_schedule_types(rng, 1)[0])
    return schedules[2 * kind + int(rng.integers(2))]


def extend_complex(rbac: RBACPolicy, seed: int, it: InheritanceType = InheritanceType.WR) -> TRBACPolicy:
    schedules = build_schedules(seed)
    tas = {rid: complex_schedule(seed, rid, schedules).bpes() for rid in rbac.roles}
    return _with_times(rbac, tas, it)


def expand_to_tupa(policy: TRBACPolicy) -> TUPA:
    return policy_meaning(policy)


def generate(params: GenParams, style: str = "simple", it: InheritanceType = InheritanceType.WR
             ) -> Tuple[TRBACPolicy, TUPA, AttributeData]:
    """Planted TRBAC policy, its TUPA and attribute data for one seed."""
    rbac, attrs = gen_synthetic_rbac(params)
    if style == "simple":
        policy = extend_simple(rbac, params.seed, it)
    elif style == "complex":
        policy = extend_complex(rbac, params.seed, it)
    else:
        raise ConfigError(f"unknown PE style {style!r}")
    return policy, expand_to_tupa(policy), attrs


def load_rbac(path) -> RBACPolicy:
    """Read an externally produced RBAC policy (policy JSON without times)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    try:
        roles = {int(e["id"]): Role(int(e["id"]), set(e["asgndU"]), set(e["asgndP"]), BPES(),
                                    {int(p) for p in e.get("parents", [])})
                 for e in data["roles"]}
        return RBACPolicy(set(data["users"]), set(data["perms"]), roles)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed RBAC policy: {exc}") from exc

"""TUPAs and TRBAC policies: data model, meaning, authorization and file IO.

Hierarchy edges point from a role to the roles it inherits permissions
from. Following the convention of the mining algorithm those are called
the role's *parents*: a parent has a subset of the role's permissions and
a superset of its users, i.e. it is the junior role. ``RH`` as a set of
``(senior, junior)`` pairs is therefore ``{(r, p) : p in parents(r)}``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Set, Tuple

from .errors import DomainError, ParseError
from .temporal import BPES, contains_sem, is_empty_sem, parse_bpes, sem_equal, union_sem

User = str
Perm = str
Pair = Tuple[User, Perm]


class InheritanceType(enum.Enum):
    WR = "WR"
    SR = "SR"

    @classmethod
    def parse(cls, text: str) -> "InheritanceType":
        try:
            return cls(text.upper())
        except ValueError:
            raise DomainError(f"unknown inheritance type {text!r}") from None


class TUPA(Mapping):
    """Map from (user, permission) to a non-empty BPES."""

    def __init__(self, entries: Optional[Mapping[Pair, BPES]] = None):
        self._d: Dict[Pair, BPES] = {}
        for key, bpes in (entries or {}).items():
            if not bpes:
                raise DomainError(f"empty BPES for {key}")
            self._d[key] = bpes

    def __getitem__(self, key: Pair) -> BPES:
        return self._d[key]

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self._d))

    def __len__(self):
        return len(self._d)

    def users(self) -> List[User]:
        return sorted({u for u, _ in self._d})

    def perms(self) -> List[Perm]:
        return sorted({p for _, p in self._d})

    def by_user(self) -> Dict[User, Dict[Perm, BPES]]:
        out: Dict[User, Dict[Perm, BPES]] = {}
        for (u, p) in sorted(self._d):
            out.setdefault(u, {})[p] = self._d[(u, p)]
        return out

    def __repr__(self):
        return f"TUPA({len(self)} triples)"


def tupa_equal(a: Mapping[Pair, BPES], b: Mapping[Pair, BPES]) -> bool:
    """Semantic equality of two TUPAs."""
    if set(a) != set(b):
        return False
    return all(sem_equal(a[k], b[k]) for k in a)


@dataclass
class Role:
    id: int
    users: Set[User]
    perms: Set[Perm]
    ta: BPES
    parents: Set[int] = field(default_factory=set)


@dataclass
class TRBACPolicy:
    users: Set[User]
    perms: Set[Perm]
    roles: Dict[int, Role]
    it: InheritanceType = InheritanceType.WR
    # role id -> (attribute -> allowed values, mismatch), set by the miner when
    # attribute data is available
    expressions: Dict[int, Tuple[Dict[str, FrozenSet[int]], int]] = field(default_factory=dict)
    # attribute names the expressions were fitted against
    attributes: Tuple[str, ...] = ()

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for r in self.roles.values():
            if not r.ta:
                raise DomainError(f"role {r.id} has an empty role-time assignment")
            if not r.users <= self.users:
                raise DomainError(f"role {r.id} assigns undeclared users")
            if not r.perms <= self.perms:
                raise DomainError(f"role {r.id} assigns undeclared permissions")
            for p in r.parents:
                if p not in self.roles:
                    raise DomainError(f"role {r.id} inherits from unknown role {p}")
        _check_acyclic(self.roles)

    @property
    def UA(self) -> Set[Tuple[User, int]]:
        return {(u, r.id) for r in self.roles.values() for u in r.users}

    @property
    def PA(self) -> Set[Tuple[int, Perm]]:
        return {(r.id, p) for r in self.roles.values() for p in r.perms}

    @property
    def RH(self) -> Set[Tuple[int, int]]:
        return {(r.id, p) for r in self.roles.values() for p in r.parents}

    @property
    def TA(self) -> Dict[int, BPES]:
        return {r.id: r.ta for r in self.roles.values()}

    def role(self, rid: int) -> Role:
        try:
            return self.roles[rid]
        except KeyError:
            raise DomainError(f"unknown role {rid}") from None

    def children(self) -> Dict[int, Set[int]]:
        out: Dict[int, Set[int]] = {rid: set() for rid in self.roles}
        for r in self.roles.values():
            for p in r.parents:
                out[p].add(r.id)
        return out


@dataclass
class RBACPolicy:
    users: Set[User]
    perms: Set[Perm]
    roles: Dict[int, Role]

    def __post_init__(self):
        _check_acyclic(self.roles)


def _check_acyclic(roles: Mapping[int, Role]) -> None:
    state: Dict[int, int] = {}
    for start in sorted(roles):
        if start in state:
            continue
        stack = [(start, iter(sorted(roles[start].parents)))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise DomainError(f"role hierarchy has a cycle through role {nxt}")
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(roles[nxt].parents))))


# -- authorization and meaning ------------------------------------------------------

def juniors(policy, rid: int) -> Set[int]:
    """Roles reachable through parent links (RH+ juniors of ``rid``)."""
    out: Set[int] = set()
    todo = list(policy.roles[rid].parents)
    while todo:
        x = todo.pop()
        if x not in out:
            out.add(x)
            todo.extend(policy.roles[x].parents)
    return out


def seniors(policy, rid: int, children=None) -> Set[int]:
    children = children if children is not None else policy.children()
    out: Set[int] = set()
    todo = list(children[rid])
    while todo:
        x = todo.pop()
        if x not in out:
            out.add(x)
            todo.extend(children[x])
    return out


def authorized_users(policy, rid: int, children=None) -> Set[User]:
    r = policy.role(rid)
    out = set(r.users)
    for s in seniors(policy, rid, children):
        out |= policy.roles[s].users
    return out


def authorized_perms(policy, rid: int) -> Dict[Perm, BPES]:
    """Permissions available to members of ``rid`` and when.

    Under WR every permission, own or inherited, is paired with TA(r).
    Under SR an inherited permission is paired with the union of the TAs of
    the junior roles it comes from.
    """
    r = policy.role(rid)
    jun = sorted(juniors(policy, rid))
    if policy.it is InheritanceType.WR:
        perms = set(r.perms)
        for j in jun:
            perms |= policy.roles[j].perms
        return {p: r.ta for p in sorted(perms)}
    sources: Dict[Perm, List[BPES]] = {p: [r.ta] for p in r.perms}
    for j in jun:
        for p in policy.roles[j].perms:
            sources.setdefault(p, []).append(policy.roles[j].ta)
    return {p: (b[0] if len(b) == 1 else union_sem(*b)) for p, b in sorted(sources.items())}


def role_meaning(policy, rid: int) -> Dict[Pair, BPES]:
    users = authorized_users(policy, rid)
    perms = authorized_perms(policy, rid)
    return {(u, p): b for u in sorted(users) for p, b in perms.items()}


def policy_meaning(policy) -> TUPA:
    children = policy.children()
    parts: Dict[Pair, List[BPES]] = {}
    for rid in sorted(policy.roles):
        users = authorized_users(policy, rid, children)
        if not users:
            continue
        for p, b in authorized_perms(policy, rid).items():
            for u in users:
                parts.setdefault((u, p), []).append(b)
    merged = {k: union_sem(*v) for k, v in parts.items()}
    # a TA that is never enabled grants nothing
    return TUPA({k: b for k, b in merged.items() if not is_empty_sem(b)})


def flatten(policy: TRBACPolicy) -> TRBACPolicy:
    """Materialize inherited memberships and drop the hierarchy."""
    children = policy.children()
    roles = {
        rid: Role(rid, authorized_users(policy, rid, children), set(r.perms), r.ta)
        for rid, r in policy.roles.items()
    }
    return TRBACPolicy(set(policy.users), set(policy.perms), roles, policy.it,
                       dict(policy.expressions))


def uncovered_triples(T: Mapping[Pair, BPES], policy, meaning=None) -> List[Pair]:
    """Triples of T that the policy does not grant, or grants at fewer times."""
    meaning = meaning if meaning is not None else policy_meaning(policy)
    out = []
    for key in sorted(T):
        got = meaning.get(key)
        if got is None or not contains_sem(got, T[key]):
            out.append(key)
    return out


def over_granted(T: Mapping[Pair, BPES], policy, meaning=None) -> List[Pair]:
    """Pairs the policy grants outside T, or at times outside T."""
    meaning = meaning if meaning is not None else policy_meaning(policy)
    out = []
    for key in sorted(meaning):
        want = T.get(key)
        if want is None or not contains_sem(want, meaning[key]):
            out.append(key)
    return out


def check_full_inheritance(policy: TRBACPolicy) -> bool:
    """Every pair of roles that could be related by inheritance is related.

    A role r could inherit from r' when r has no more users and at least the
    permissions of r' (and, under SR, r's times cover those of r'). Each such
    pair must be connected in the reflexive-transitive hierarchy.
    """
    children = policy.children()
    ids = sorted(policy.roles)
    au = {r: frozenset(authorized_users(policy, r, children)) for r in ids}
    ap = {r: frozenset(authorized_perms(policy, r)) for r in ids}
    jun = {r: juniors(policy, r) for r in ids}
    sr = policy.it is InheritanceType.SR
    for r in ids:
        for r2 in ids:
            if r == r2 or r2 in jun[r]:
                continue
            if au[r] <= au[r2] and ap[r2] <= ap[r]:
                if sr and not contains_sem(policy.roles[r].ta, policy.roles[r2].ta):
                    continue
                return False
    return True


# -- file formats ----------------------------------------------------------------------

def read_tupa(path) -> TUPA:
    entries: Dict[Pair, BPES] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected user<TAB>perm<TAB>bpes")
            u, p, text = parts
            if (u, p) in entries:
                raise ParseError(f"{path}:{lineno}: duplicate triple for ({u}, {p})")
            try:
                bpes = parse_bpes(text)
            except ParseError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if not bpes:
                raise ParseError(f"{path}:{lineno}: empty BPES")
            entries[(u, p)] = bpes
    return TUPA(entries)


def format_tupa(T: Mapping[Pair, BPES]) -> str:
    return "".join(f"{u}\t{p}\t{T[(u, p)]}\n" for u, p in sorted(T))


def write_tupa(T: Mapping[Pair, BPES], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_tupa(T))


def policy_to_dict(policy: TRBACPolicy) -> dict:
    roles = []
    for rid in sorted(policy.roles):
        r = policy.roles[rid]
        entry = {
            "id": rid,
            "asgndU": sorted(r.users),
            "asgndP": sorted(r.perms),
            "ta": str(r.ta),
            "parents": sorted(r.parents),
        }
        if rid in policy.expressions:
            expr, mm = policy.expressions[rid]
            entry["expression"] = {a: sorted(v) for a, v in sorted(expr.items())}
            entry["mismatch"] = mm
        roles.append(entry)
    out = {
        "it": policy.it.value,
        "users": sorted(policy.users),
        "perms": sorted(policy.perms),
        "roles": roles,
    }
    if policy.attributes:
        out["attributes"] = list(policy.attributes)
    return out


def policy_from_dict(data: dict) -> TRBACPolicy:
    try:
        roles = {}
        expressions = {}
        for e in data["roles"]:
            rid = int(e["id"])
            if rid in roles:
                raise ParseError(f"duplicate role id {rid}")
            roles[rid] = Role(rid, set(e["asgndU"]), set(e["asgndP"]), parse_bpes(e["ta"]),
                              {int(p) for p in e.get("parents", [])})
            if "expression" in e:
                expr = {a: frozenset(int(v) for v in vals) for a, vals in e["expression"].items()}
                expressions[rid] = (expr, int(e["mismatch"]))
        return TRBACPolicy(set(data["users"]), set(data["perms"]), roles,
                           InheritanceType.parse(data.get("it", "WR")), expressions,
                           tuple(data.get("attributes", ())))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed policy: {exc}") from exc


def format_policy(policy: TRBACPolicy) -> str:
    return json.dumps(policy_to_dict(policy), indent=1) + "\n"


def write_policy(policy: TRBACPolicy, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_policy(policy))


def read_policy(path) -> TRBACPolicy:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return policy_from_dict(data)

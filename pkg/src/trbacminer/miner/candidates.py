"""Candidate roles: initial generation, pairwise intersection and merging."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from .. import kernels
from ..metrics import ui_scores
from ..temporal import BPES, contains_sem, intersect_sem, semantic_form, union_merge
from .config import InitVariant


@dataclass(eq=False)
class CandidateRole:
    id: int
    users0: Set[str]
    perms0: Set[str]
    ta: BPES
    asgnd_u: Set[str] = field(default_factory=set)
    asgnd_p: Set[str] = field(default_factory=set)
    # roles this role inherits permissions from, and the roles inheriting from it
    parents: Set[int] = field(default_factory=set)
    children: Set[int] = field(default_factory=set)

    @property
    def key(self):
        return (frozenset(self.perms0), semantic_form(self.ta))

    def __repr__(self):
        return (f"CandidateRole({self.id}, U={sorted(self.users0)}, "
                f"P={sorted(self.perms0)}, ta={str(self.ta)!r})")


class RoleSet:
    """Live candidate roles, indexed by (permissions, semantic BPES)."""

    def __init__(self, start_id: int = 1):
        self.roles: Dict[int, CandidateRole] = {}
        self._by_key: Dict[tuple, int] = {}
        self._next = start_id

    def __len__(self):
        return len(self.roles)

    def __iter__(self):
        return iter([self.roles[i] for i in sorted(self.roles)])

    def __contains__(self, rid):
        return rid in self.roles

    def find(self, perms: Iterable[str], ta: BPES) -> Optional[CandidateRole]:
        rid = self._by_key.get((frozenset(perms), semantic_form(ta)))
        return None if rid is None else self.roles[rid]

    def add_role(self, users: Iterable[str], perms: Iterable[str], ta: BPES) -> Optional[CandidateRole]:
        """Add a role, or add the users to an existing role with the same P and BPES."""
        users, perms = set(users), set(perms)
        if not users or not perms or not ta:
            return None
        existing = self.find(perms, ta)
        if existing is not None:
            existing.users0 |= users
            return existing
        r = CandidateRole(self._next, users, perms, ta)
        self._next += 1
        self.insert(r)
        return r

    def insert(self, r: CandidateRole) -> None:
        self.roles[r.id] = r
        self._by_key.setdefault(r.key, r.id)

    def remove(self, r: CandidateRole) -> None:
        del self.roles[r.id]
        if self._by_key.get(r.key) == r.id:
            del self._by_key[r.key]
            # another live role may share the key
            for other in self:
                if other.key == r.key:
                    self._by_key[r.key] = other.id
                    break

    @property
    def next_id(self) -> int:
        return self._next


# -- initial roles --------------------------------------------------------------

def perm_bpes(perms: Mapping[str, BPES], exact: bool = False) -> List[Tuple[Set[str], BPES]]:
    """Group a user's permissions by the BPESs they are held for.

    For each distinct BPES b of the user, the group holds every permission
    whose BPES contains b (or equals b when ``exact``).
    """
    seen = {}
    for p in sorted(perms):
        seen.setdefault(semantic_form(perms[p]), perms[p])
    out = []
    for sem, b in seen.items():
        if exact:
            group = {p for p, bp in perms.items() if semantic_form(bp) == sem}
        else:
            group = {p for p, bp in perms.items() if contains_sem(bp, b)}
        out.append((group, b))
    return out


def generate_initial_roles(T, variant: InitVariant = InitVariant.PERM_BPES) -> RoleSet:
    rinit = RoleSet()
    for u, perms in T.by_user().items():
        groups = []
        if variant in (InitVariant.PERM_BPES, InitVariant.BOTH):
            groups += perm_bpes(perms)
        if variant in (InitVariant.PERM_BPES_MINUS, InitVariant.BOTH):
            groups += perm_bpes(perms, exact=True)
        for P, b in groups:
            rinit.add_role({u}, P, b)
            if len(b) > 1:
                for m in b.members:
                    rinit.add_role({u}, P, BPES([m]))
    return rinit


# -- intersections --------------------------------------------------------------

@dataclass
class IntersectionStats:
    initial: int = 0
    participants: int = 0
    pairs_tested: int = 0
    candidates: int = 0
    seconds: float = 0.0


def intersect_initial_roles(rinit: RoleSet, T, ric=1, stats: Optional[IntersectionStats] = None) -> RoleSet:
    """Add pairwise intersections of the top ``ric`` fraction of initial roles.

    Roles are ranked by the usefulness-for-intersection score. Each unordered
    pair of participating initial roles is intersected once; intersections
    are not intersected further.
    """
    t0 = time.perf_counter()
    init = list(rinit)
    k = math.ceil(ric * len(init))
    if k >= 2:
        scores = ui_scores([(r.users0, r.perms0, r.ta) for r in init], T)
        ranked = sorted(range(len(init)), key=lambda i: (-scores[i], init[i].id))
        top = sorted(ranked[:k], key=lambda i: init[i].id)
    else:
        top = []
    rcand = RoleSet(rinit.next_id)
    # snapshot operands: additions to Rcand must not feed back into later pairs
    ops = [(frozenset(init[i].users0), frozenset(init[i].perms0), init[i].ta) for i in top]
    perm_index = {p: n for n, p in enumerate(sorted({p for _, P, _ in ops for p in P}))}
    pbits = [sum(1 << perm_index[p] for p in P) for _, P, _ in ops]
    pairs = kernels.overlap_pairs(pbits) if len(ops) > 1 else []
    for r in init:
        rcand.add_role(r.users0, r.perms0, r.ta)
    for a, b in pairs:
        ua, pa, ta = ops[a]
        ub, pb, tb = ops[b]
        bpes = intersect_sem(ta, tb)
        if bpes:
            rcand.add_role(ua | ub, pa & pb, bpes)
    if stats is not None:
        stats.initial = len(init)
        stats.participants = len(top)
        stats.pairs_tested = len(pairs)
        stats.candidates = len(rcand)
        stats.seconds = time.perf_counter() - t0
    return rcand


# -- merging ------------------------------------------------------------------

def _merge_same_users_bpes(rs: RoleSet, r: CandidateRole, r2: CandidateRole) -> bool:
    if r.perms0 <= r2.perms0:
        rs.remove(r)
    elif r2.perms0 <= r.perms0:
        rs.remove(r2)
    else:
        rs.remove(r)
        rs.remove(r2)
        rs.add_role(r.users0, r.perms0 | r2.perms0, r.ta)
    return True


def _merge_same_users_perms(rs: RoleSet, r: CandidateRole, r2: CandidateRole) -> bool:
    if contains_sem(r2.ta, r.ta):
        rs.remove(r)
    elif contains_sem(r.ta, r2.ta):
        rs.remove(r2)
    else:
        rs.remove(r)
        rs.remove(r2)
        rs.add_role(r.users0, r.perms0, union_merge(r.ta, r2.ta))
    return True


def merge_roles(rs: RoleSet) -> RoleSet:
    """Apply the two merge rules until neither applies to any pair."""
    changed = True
    while changed:
        changed = False
        groups: Dict[FrozenSet[str], List[int]] = {}
        for r in rs:
            groups.setdefault(frozenset(r.users0), []).append(r.id)
        for ids in groups.values():
            for i, a in enumerate(ids):
                for b in ids[i + 1:]:
                    if a not in rs or b not in rs:
                        continue
                    r, r2 = rs.roles[a], rs.roles[b]
                    if r.users0 != r2.users0:
                        continue
                    if semantic_form(r.ta) == semantic_form(r2.ta):
                        changed |= _merge_same_users_bpes(rs, r, r2)
                    elif r.perms0 == r2.perms0:
                        changed |= _merge_same_users_perms(rs, r, r2)
    return rs

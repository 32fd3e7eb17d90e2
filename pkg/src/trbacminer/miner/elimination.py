"""Greedy role elimination.

Every live role r keeps the meaning users0(r) x perms0(r) x TA(r): removing
a role re-links its children to its parents and pushes its direct users
up and its direct permissions down exactly where they would otherwise be
lost. The policy meaning is therefore the union of the live roles'
meanings, and coverage of T can be tracked per (user, permission) pair
without re-deriving authorizations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Set, Tuple

from ..errors import TrbacError
from ..metrics import BestFitCache, MetricSpec, PolicyStats, Quality, clustered_size, scale
from ..policy import InheritanceType
from ..temporal import contains_sem, semantic_form, union_sem, wsc_size
from .candidates import CandidateRole, RoleSet

Pair = Tuple[str, str]


@dataclass
class TraceStep:
    role: int
    before: Quality
    after: Quality
    accepted: bool


@dataclass
class Snapshot:
    role: CandidateRole
    fields: Dict[int, tuple]
    newly_uncovered: List[Pair]
    stats: PolicyStats


class Eliminator:
    def __init__(self, rs: RoleSet, T: Mapping, it: InheritanceType, metric: MetricSpec,
                 epsilon: int = 0, delta=Fraction("1.001"),
                 best_fit: Optional[BestFitCache] = None, debug: bool = False):
        self.rs = rs
        self.T = T
        self.it = it
        self.metric = metric
        self.epsilon = epsilon
        self.delta = delta
        self.best_fit = best_fit if metric.needs_attributes else None
        self.debug = debug
        self.trace: List[TraceStep] = []
        self._contains: Dict[tuple, bool] = {}
        self.cover: Dict[Pair, Set[int]] = {}
        for r in rs:
            for u in r.users0:
                for p in r.perms0:
                    self.cover.setdefault((u, p), set()).add(r.id)
        self.uncovered: Set[Pair] = {k for k in T if not self._covered(k, None)}
        self.stats = self._full_stats()
        self.user_entitlements: Dict[str, int] = {}
        for u, _ in T:
            self.user_entitlements[u] = self.user_entitlements.get(u, 0) + 1

    # -- coverage ---------------------------------------------------------------

    def _le(self, small, big) -> bool:
        key = (semantic_form(small), semantic_form(big))
        hit = self._contains.get(key)
        if hit is None:
            hit = self._contains[key] = contains_sem(big, small)
        return hit

    def _covered(self, pair: Pair, without: Optional[int]) -> bool:
        want = self.T[pair]
        tas = [self.rs.roles[x].ta for x in sorted(self.cover.get(pair, ())) if x != without]
        if not tas:
            return False
        if any(self._le(want, ta) for ta in tas):
            return True
        return len(tas) > 1 and contains_sem(union_sem(*tas), want)

    def newly_uncovered(self, r: CandidateRole) -> List[Pair]:
        out = []
        for u in sorted(r.users0):
            for p in sorted(r.perms0):
                key = (u, p)
                if key in self.T and key not in self.uncovered and not self._covered(key, r.id):
                    out.append(key)
        return out

    def removable(self, r: CandidateRole) -> bool:
        return len(self.uncovered) + len(self.newly_uncovered(r)) <= self.epsilon

    # -- quality ------------------------------------------------------------------

    def _am(self, r: CandidateRole) -> int:
        return self.best_fit.mismatch(r.asgnd_u) if self.best_fit else 0

    def _contrib(self, r: CandidateRole) -> PolicyStats:
        return PolicyStats(1, len(r.asgnd_u), len(r.asgnd_p), len(r.parents),
                           wsc_size(r.ta), len(r.ta), self._am(r))

    def _full_stats(self) -> PolicyStats:
        s = PolicyStats()
        for r in self.rs:
            _add(s, self._contrib(r), 1)
        return s

    def quality(self) -> Quality:
        return self.metric.from_stats(self.stats)

    def role_quality(self, r: CandidateRole, removable: Set[int]) -> Tuple[Fraction, Fraction]:
        counts = []
        for u in r.users0:
            for p in r.perms0:
                c = 0
                for x in self.cover.get((u, p), ()):
                    if x in removable and self._le(r.ta, self.rs.roles[x].ta):
                        c += 1
                counts.append(c)
        redun = -Fraction(min(counts)) if counts else Fraction(-len(self.rs) - 1)
        return redun, clustered_size(r.asgnd_u, r.asgnd_p, r.ta, self.T)

    # -- hierarchy surgery ----------------------------------------------------------

    def is_descendant(self, rid: int, of: int) -> bool:
        seen, todo = set(), [of]
        while todo:
            x = todo.pop()
            for c in self.rs.roles[x].children:
                if c == rid:
                    return True
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return False

    def _perm_authorized(self, child: CandidateRole, p: str) -> bool:
        if p in child.asgnd_p:
            return True
        holders = [self.rs.roles[j] for j in sorted(child.parents) if p in self.rs.roles[j].perms0]
        if self.it is InheritanceType.WR:
            return bool(holders)
        if not holders:
            return False
        return contains_sem(union_sem(*(h.ta for h in holders)), child.ta)

    def remove(self, r: CandidateRole) -> Snapshot:
        roles = self.rs.roles
        hood = [r.id] + sorted(r.parents) + sorted(r.children)
        fields = {x: (set(roles[x].asgnd_u), set(roles[x].asgnd_p),
                      set(roles[x].parents), set(roles[x].children)) for x in hood}
        before = PolicyStats()
        for x in hood:
            _add(before, self._contrib(roles[x]), 1)
        newly = self.newly_uncovered(r)
        snap = Snapshot(r, fields, newly, PolicyStats(**vars(self.stats)))

        for pid in sorted(r.parents):
            par = roles[pid]
            par.children.discard(r.id)
            for cid in sorted(r.children):
                if not self.is_descendant(cid, pid):
                    par.children.add(cid)
                    roles[cid].parents.add(pid)
            have = set(par.asgnd_u)
            for cid in par.children:
                have |= roles[cid].users0
            par.asgnd_u |= r.asgnd_u - have
        for cid in sorted(r.children):
            child = roles[cid]
            child.parents.discard(r.id)
            for p in sorted(r.asgnd_p):
                if not self._perm_authorized(child, p):
                    child.asgnd_p.add(p)
        self.rs.remove(r)
        for u in r.users0:
            for p in r.perms0:
                self.cover[(u, p)].discard(r.id)
        self.uncovered.update(newly)

        after = PolicyStats()
        for x in hood[1:]:
            _add(after, self._contrib(roles[x]), 1)
        _add(self.stats, before, -1)
        _add(self.stats, after, 1)
        if self.debug:
            self.check()
        return snap

    def restore(self, snap: Snapshot) -> None:
        r = snap.role
        self.rs.insert(r)
        for x, (au, ap, par, ch) in snap.fields.items():
            role = self.rs.roles[x]
            role.asgnd_u, role.asgnd_p, role.parents, role.children = set(au), set(ap), set(par), set(ch)
        for u in r.users0:
            for p in r.perms0:
                self.cover[(u, p)].add(r.id)
        self.uncovered.difference_update(snap.newly_uncovered)
        self.stats = snap.stats
        if self.debug:
            self.check()

    # -- main loop ---------------------------------------------------------------------

    def run(self) -> List[TraceStep]:
        q = self.quality()
        work = [r.id for r in self.rs if self.removable(r)]
        changed = True
        while work and changed:
            removable = {r.id for r in self.rs if self.removable(r)}
            keyed = {rid: self.role_quality(self.rs.roles[rid], removable) for rid in work}
            work.sort(key=lambda rid: (keyed[rid], rid))
            changed = False
            for rid in list(work):
                r = self.rs.roles[rid]
                if not self.removable(r):
                    work.remove(rid)
                    continue
                snap = self.remove(r)
                q2 = self.quality()
                if q2 < scale(q, self.delta):
                    self.trace.append(TraceStep(rid, q, q2, True))
                    changed = True
                    q = q2
                    work.remove(rid)
                else:
                    self.trace.append(TraceStep(rid, q, q2, False))
                    self.restore(snap)
        return self.trace

    # -- consistency checks ---------------------------------------------------------------

    def check(self) -> None:
        """Re-derive incremental state from scratch (debug mode)."""
        full = self._full_stats()
        if vars(full) != vars(self.stats):
            raise TrbacError(f"incremental stats drifted: {self.stats} != {full}")
        for r in self.rs:
            for c in r.children:
                if r.id not in self.rs.roles[c].parents:
                    raise TrbacError(f"inconsistent links {r.id} -> {c}")
            auth_u = set(r.asgnd_u)
            todo, seen = list(r.children), set()
            while todo:
                x = todo.pop()
                if x in seen:
                    continue
                seen.add(x)
                auth_u |= self.rs.roles[x].asgnd_u
                todo.extend(self.rs.roles[x].children)
            if auth_u != r.users0:
                raise TrbacError(f"role {r.id} authorizes {sorted(auth_u)} not {sorted(r.users0)}")
            for p in r.perms0:
                if not self._perm_authorized_deep(r, p):
                    raise TrbacError(f"role {r.id} lost permission {p}")
        uncovered = {k for k in self.T if not self._covered(k, None)}
        if uncovered != self.uncovered:
            raise TrbacError("coverage bookkeeping drifted")

    def _perm_authorized_deep(self, r: CandidateRole, p: str) -> bool:
        if p in r.asgnd_p:
            return True
        sources, todo, seen = [], list(r.parents), set()
        while todo:
            x = todo.pop()
            if x in seen:
                continue
            seen.add(x)
            j = self.rs.roles[x]
            if p in j.asgnd_p:
                sources.append(j.ta)
            todo.extend(j.parents)
        if not sources:
            return False
        return self.it is InheritanceType.WR or contains_sem(union_sem(*sources), r.ta)


def _add(acc: PolicyStats, s: PolicyStats, sign: int) -> None:
    acc.roles += sign * s.roles
    acc.ua += sign * s.ua
    acc.pa += sign * s.pa
    acc.rh += sign * s.rh
    acc.ta_size += sign * s.ta_size
    acc.ta_count += sign * s.ta_count
    acc.int_ += sign * s.int_

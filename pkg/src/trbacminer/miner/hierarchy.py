"""Role hierarchy with full inheritance, and direct assignments."""
from __future__ import annotations

from typing import List, Sequence

from .. import kernels
from ..policy import InheritanceType
from ..temporal import contains_sem, sem_equal, union_sem
from .candidates import CandidateRole, RoleSet


def is_ancestor_full_inher(a: CandidateRole, r: CandidateRole, it: InheritanceType) -> bool:
    """Whether ``a`` may be an ancestor (junior) of ``r`` under full inheritance."""
    if not (a.perms0 <= r.perms0 and r.users0 <= a.users0):
        return False
    if it is InheritanceType.SR and not contains_sem(r.ta, a.ta):
        return False
    if it is InheritanceType.WR and r.perms0 < a.perms0 and a.users0 < r.users0:
        return False
    return True


def _index_bits(roles: Sequence[CandidateRole], attr: str) -> List[int]:
    universe = sorted({x for r in roles for x in getattr(r, attr)})
    pos = {x: i for i, x in enumerate(universe)}
    return [sum(1 << pos[x] for x in getattr(r, attr)) for r in roles]


def ancestor_relation(roles: Sequence[CandidateRole], it: InheritanceType) -> List[List[int]]:
    """adj[i] lists the indices j such that roles[i] is an ancestor of roles[j]."""
    adj = kernels.subset_relation(_index_bits(roles, "perms0"), _index_bits(roles, "users0"))
    if it is InheritanceType.SR:
        adj = [[j for j in js if contains_sem(roles[j].ta, roles[i].ta)] for i, js in enumerate(adj)]
    # equal (P, U) pairs would relate both ways; keep the lower id as ancestor
    sets = [set(js) for js in adj]
    return [[j for j in js if not (i in sets[j] and roles[i].id > roles[j].id)]
            for i, js in enumerate(adj)]


def build_hierarchy(rs: RoleSet, it: InheritanceType) -> None:
    """Link each role to its nearest ancestors (a transitive reduction)."""
    roles = list(rs)
    for r in roles:
        r.parents.clear()
        r.children.clear()
    adj = ancestor_relation(roles, it)
    for i, j in kernels.hasse_edges(len(roles), adj):
        roles[j].parents.add(roles[i].id)
        roles[i].children.add(roles[j].id)


def compute_direct_assignments(rs: RoleSet, it: InheritanceType) -> None:
    """Drop users inherited from children and permissions inherited from parents.

    Under SR a permission p stays directly assigned unless the parents
    holding p together cover exactly TA(r).
    """
    for r in rs:
        inherited_u = set()
        for c in r.children:
            inherited_u |= rs.roles[c].users0
        r.asgnd_u = r.users0 - inherited_u
        if it is InheritanceType.WR:
            inherited_p = set()
            for p in r.parents:
                inherited_p |= rs.roles[p].perms0
            r.asgnd_p = r.perms0 - inherited_p
        else:
            r.asgnd_p = set(r.perms0)
            for perm in sorted(r.perms0):
                sources = [rs.roles[j].ta for j in sorted(r.parents) if perm in rs.roles[j].perms0]
                if sources and sem_equal(union_sem(*sources), r.ta):
                    r.asgnd_p.discard(perm)


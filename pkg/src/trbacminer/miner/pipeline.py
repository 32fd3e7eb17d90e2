from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..errors import ConfigError
from ..metrics import AttributeData, BestFitCache, Quality
from ..policy import TUPA, Role, TRBACPolicy
from .candidates import IntersectionStats, RoleSet, generate_initial_roles, intersect_initial_roles, merge_roles
from .config import MinerConfig
from .elimination import Eliminator, TraceStep
from .hierarchy import build_hierarchy, compute_direct_assignments


@dataclass
class MiningResult:
    policy: TRBACPolicy
    trace: List[TraceStep]
    quality: Quality
    uncovered: int
    intersection: IntersectionStats
    stage_counts: Dict[str, int] = field(default_factory=dict)
    seconds: Dict[str, float] = field(default_factory=dict)


def to_policy(rs: RoleSet, T: TUPA, config: MinerConfig, best_fit: Optional[BestFitCache] = None) -> TRBACPolicy:
    """Freeze mined roles into a policy with ids 1..n in creation order."""
    renum = {rid: n for n, rid in enumerate(sorted(rs.roles), 1)}
    roles = {}
    for r in rs:
        roles[renum[r.id]] = Role(renum[r.id], set(r.asgnd_u), set(r.asgnd_p), r.ta,
                                  {renum[p] for p in r.parents})
    policy = TRBACPolicy(set(T.users()), set(T.perms()), roles, config.it)
    if best_fit is not None:
        policy.attributes = best_fit.data.attributes
        for rid, role in roles.items():
            expr, mm = best_fit(role.users)
            if expr is not None:
                policy.expressions[rid] = (dict(expr.conjuncts), mm)
    return policy


def build_candidates(T: TUPA, config: MinerConfig, stats: Optional[IntersectionStats] = None) -> RoleSet:
    """Initial roles, pairwise intersections and merges."""
    rinit = generate_initial_roles(T, config.init_variant)
    rcand = intersect_initial_roles(rinit, T, config.ric, stats)
    return merge_roles(rcand)


def mine(T: TUPA, config: MinerConfig = MinerConfig(), attrs: Optional[AttributeData] = None) -> MiningResult:
    if config.metric.needs_attributes and attrs is None:
        raise ConfigError(f"metric {config.metric.kind.value} needs attribute data")
    seconds = {}
    counts = {}
    t = time.perf_counter()
    rinit = generate_initial_roles(T, config.init_variant)
    counts["initial"] = len(rinit)
    seconds["initial"] = time.perf_counter() - t

    t = time.perf_counter()
    istats = IntersectionStats()
    rcand = intersect_initial_roles(rinit, T, config.ric, istats)
    counts["candidates"] = len(rcand)
    seconds["intersect"] = time.perf_counter() - t

    t = time.perf_counter()
    merge_roles(rcand)
    counts["merged"] = len(rcand)
    seconds["merge"] = time.perf_counter() - t

    t = time.perf_counter()
    build_hierarchy(rcand, config.it)
    compute_direct_assignments(rcand, config.it)
    seconds["hierarchy"] = time.perf_counter() - t

    t = time.perf_counter()
    best_fit = BestFitCache(attrs) if attrs is not None else None
    elim = Eliminator(rcand, T, config.it, config.metric, config.epsilon, config.delta,
                      best_fit, config.debug)
    if config.debug:
        elim.check()
    trace = elim.run()
    counts["final"] = len(rcand)
    seconds["eliminate"] = time.perf_counter() - t

    policy = to_policy(rcand, T, config, best_fit)
    return MiningResult(policy, trace, elim.quality(), len(elim.uncovered), istats, counts, seconds)

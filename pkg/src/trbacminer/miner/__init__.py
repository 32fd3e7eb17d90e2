from .candidates import (
    CandidateRole,
    IntersectionStats,
    RoleSet,
    generate_initial_roles,
    intersect_initial_roles,
    merge_roles,
    perm_bpes,
)
from .config import InitVariant, MinerConfig
from .elimination import Eliminator, TraceStep
from .hierarchy import ancestor_relation, build_hierarchy, compute_direct_assignments, is_ancestor_full_inher
from .pipeline import MiningResult, build_candidates, mine, to_policy

__all__ = [
    "CandidateRole", "Eliminator", "InitVariant", "IntersectionStats", "MinerConfig", "MiningResult",
    "RoleSet", "TraceStep", "ancestor_relation", "build_candidates", "build_hierarchy",
    "compute_direct_assignments", "generate_initial_roles", "intersect_initial_roles",
    "is_ancestor_full_inher", "merge_roles", "mine", "perm_bpes", "to_policy",
]

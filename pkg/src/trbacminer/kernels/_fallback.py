"""Pure-Python bitset kernels; sets are Python ints."""
from typing import List, Sequence, Tuple


def subset_relation(pbits: Sequence[int], ubits: Sequence[int]) -> List[List[int]]:
    """adj[i] lists the j != i with P_i subset of P_j and U_j subset of U_i."""
    n = len(pbits)
    out = []
    for i in range(n):
        pi, ui = pbits[i], ubits[i]
        row = []
        for j in range(n):
            if j != i and not (pi & ~pbits[j]) and not (ubits[j] & ~ui):
                row.append(j)
        out.append(row)
    return out


def hasse_edges(n: int, adj: Sequence[Sequence[int]]) -> List[Tuple[int, int]]:
    """Edges (i, j) of adj with no k such that i->k and k->j."""
    rows = [0] * n
    cols = [0] * n
    for i, js in enumerate(adj):
        for j in js:
            rows[i] |= 1 << j
            cols[j] |= 1 << i
    return [(i, j) for i, js in enumerate(adj) for j in js if not rows[i] & cols[j]]


def overlap_pairs(pbits: Sequence[int]) -> List[Tuple[int, int]]:
    """Pairs i < j whose sets intersect."""
    n = len(pbits)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if pbits[i] & pbits[j]]

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bitset kernels over packed uint64 words; same contract as _fallback."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cnp.import_array()


def _words(bits):
    top = max((b.bit_length() for b in bits), default=0)
    return max(1, (top + 63) // 64)


def _pack(bits, Py_ssize_t words):
    arr = np.zeros((len(bits), words), dtype=np.uint64)
    for i, b in enumerate(bits):
        if b:
            arr[i, :] = np.frombuffer(b.to_bytes(words * 8, "little"), dtype="<u8")
    return arr


def subset_relation(pbits, ubits):
    cdef Py_ssize_t n = len(pbits)
    cdef Py_ssize_t pw = _words(pbits), uw = _words(ubits)
    cdef uint64_t[:, ::1] P = _pack(pbits, pw)
    cdef uint64_t[:, ::1] U = _pack(ubits, uw)
    cdef Py_ssize_t i, j, w
    cdef bint ok
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                continue
            ok = True
            for w in range(pw):
                if P[i, w] & ~P[j, w]:
                    ok = False
                    break
            if ok:
                for w in range(uw):
                    if U[j, w] & ~U[i, w]:
                        ok = False
                        break
            if ok:
                row.append(j)
        out.append(row)
    return out


def hasse_edges(Py_ssize_t n, adj):
    cdef Py_ssize_t nw = max(1, (n + 63) // 64)
    rows_np = np.zeros((n, nw), dtype=np.uint64)
    cols_np = np.zeros((n, nw), dtype=np.uint64)
    cdef uint64_t[:, ::1] R = rows_np
    cdef uint64_t[:, ::1] C = cols_np
    cdef Py_ssize_t i, j, w
    cdef uint64_t one = 1
    for i in range(n):
        for j in adj[i]:
            R[i, j >> 6] |= one << (j & 63)
            C[j, i >> 6] |= one << (i & 63)
    out = []
    cdef bint between
    for i in range(n):
        for j in adj[i]:
            between = False
            for w in range(nw):
                if R[i, w] & C[j, w]:
                    between = True
                    break
            if not between:
                out.append((i, j))
    return out


def overlap_pairs(pbits):
    cdef Py_ssize_t n = len(pbits)
    cdef Py_ssize_t pw = _words(pbits)
    cdef uint64_t[:, ::1] P = _pack(pbits, pw)
    cdef Py_ssize_t i, j, w
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for w in range(pw):
                if P[i, w] & P[j, w]:
                    out.append((i, j))
                    break
    return out

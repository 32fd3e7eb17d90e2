import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trbacminer import kernels
from trbacminer.kernels import fallback

native = pytest.mark.skipif(kernels.native is None, reason="compiled kernels not built")

bitsets = st.lists(st.integers(0, 2 ** 150 - 1), min_size=0, max_size=25)


def test_backend_selected():
    assert kernels.BACKEND_NAME in ("native", "python")


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_fallback_subset_relation_definition(data):
    n = data.draw(st.integers(0, 8))
    p = data.draw(st.lists(st.integers(0, 15), min_size=n, max_size=n))
    u = data.draw(st.lists(st.integers(0, 15), min_size=n, max_size=n))
    adj = fallback.subset_relation(p, u)
    for i in range(n):
        want = [j for j in range(n) if j != i and p[i] | p[j] == p[j] and u[j] | u[i] == u[i]]
        assert adj[i] == want


def test_fallback_hasse_edges():
    # chain 0 -> 1 -> 2 plus the shortcut 0 -> 2
    assert sorted(fallback.hasse_edges(3, [[1, 2], [2], []])) == [(0, 1), (1, 2)]


@native
@given(bitsets, st.data())
@settings(max_examples=300, deadline=None)
def test_native_matches_fallback(p, data):
    u = data.draw(st.lists(st.integers(0, 2 ** 70 - 1), min_size=len(p), max_size=len(p)))
    adj_py = fallback.subset_relation(p, u)
    adj_c = kernels.native.subset_relation(p, u)
    assert [sorted(x) for x in adj_c] == adj_py
    assert sorted(kernels.native.hasse_edges(len(p), adj_py)) == sorted(fallback.hasse_edges(len(p), adj_py))
    assert sorted(kernels.native.overlap_pairs(p)) == fallback.overlap_pairs(p)


@native
def test_native_handles_empty_and_zero_sets():
    assert kernels.native.subset_relation([], []) == []
    assert kernels.native.overlap_pairs([0, 0]) == []
    assert [sorted(x) for x in kernels.native.subset_relation([0, 0], [0, 0])] == [[1], [0]]


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TRBACMINER_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from trbacminer import kernels; print(kernels.BACKEND_NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

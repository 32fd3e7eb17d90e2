"""Hot bitset kernels: compiled when available, pure Python otherwise.

Set ``TRBACMINER_PURE=1`` to force the fallback.
"""
import os

from . import _fallback as fallback

native = None
if not os.environ.get("TRBACMINER_PURE"):
    try:
        from . import _native as native
    except ImportError:
        native = None

backend = native if native is not None else fallback
BACKEND_NAME = "native" if native is not None else "python"

subset_relation = backend.subset_relation
hasse_edges = backend.hasse_edges
overlap_pairs = backend.overlap_pairs

__all__ = ["BACKEND_NAME", "fallback", "hasse_edges", "native", "overlap_pairs", "subset_relation"]

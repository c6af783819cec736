"""Kernel selection: compiled int64 kernels when available, Python otherwise.

Set ``FLAGVORTEX_PURE_PYTHON=1`` to force the fallback.  The compiled path is
only taken when inputs are plain ints and a magnitude bound shows that the
int64 arithmetic cannot overflow; everything else runs in Python integers.
"""

import os

from . import _pykernels

try:
    if os.environ.get("FLAGVORTEX_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

_LIMIT = 2**62


def _all_int(xs) -> bool:
    return all(type(x) is int for x in xs)


def reflect_dominant(labels, cartan, nodes):
    if _ckernels is not None and _all_int(labels):
        bound = max((abs(x) for x in labels), default=0)
        # each reflection is bounded by the W-orbit, |w v|_inf <= 4 * |v|_1 * max|a_ij|
        if 12 * len(labels) * (bound + 1) < 2**40:
            return _ckernels.reflect_dominant(labels, cartan, nodes)
    return _pykernels.reflect_dominant(labels, cartan, nodes)


def freudenthal_dominant(highest, cartan, gram, roots, heights, nodes, dim_bound):
    """``dim_bound`` bounds every multiplicity (the Weyl dimension works)."""
    if _ckernels is not None and _all_int(highest):
        shifted = [x + 1 for x in highest]
        n = len(highest)
        norm = sum(shifted[i] * gram[i][j] * shifted[j] for i in range(n) for j in range(n))
        rmax = max((sum(r[i] * gram[i][j] * r[j] for i in range(n) for j in range(n)) for r in roots), default=1)
        pair = int((abs(norm) * rmax) ** 0.5) + 1
        if 2 * (len(roots) + 1) * pair * pair * (dim_bound + 1) < _LIMIT and norm < _LIMIT // 4:
            return _ckernels.freudenthal_dominant(highest, cartan, gram, roots, heights, nodes)
    return _pykernels.freudenthal_dominant(highest, cartan, gram, roots, heights, nodes)

import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagvortex.lie import LieType, _backend, _pykernels, build_root_system
from flagvortex.lie.reps import _levi_root_data
from strategies import SMALL_TYPES, lie_types

ckernels = pytest.importorskip("flagvortex.lie._ckernels")


@given(t=lie_types, data=st.data())
def test_reflect_dominant_parity(t, data):
    rs = build_root_system(t)
    v = tuple(data.draw(st.integers(-12, 12)) for _ in range(t.rank))
    nodes = tuple(sorted(data.draw(st.sets(st.integers(0, t.rank - 1), min_size=1))))
    assert ckernels.reflect_dominant(v, rs.cartan_matrix, nodes) == _pykernels.reflect_dominant(v, rs.cartan_matrix, nodes)


@given(t=st.sampled_from(SMALL_TYPES), data=st.data())
def test_freudenthal_parity(t, data):
    rs = build_root_system(t)
    nodes = tuple(sorted(data.draw(st.sets(st.integers(0, t.rank - 1), min_size=1))))
    lam = tuple(data.draw(st.integers(0, 2)) if i in nodes else data.draw(st.integers(-3, 3)) for i in range(t.rank))
    roots, heights = _levi_root_data(rs, nodes)
    args = (lam, rs.cartan_matrix, rs.gram_int, roots, heights, nodes)
    assert ckernels.freudenthal_dominant(*args) == _pykernels.freudenthal_dominant(*args)


def test_dispatch_falls_back_for_big_integers():
    rs = build_root_system(LieType("A", 2))
    big = (10**30, -(10**30))
    assert _backend.reflect_dominant(big, rs.cartan_matrix, (0, 1)) == _pykernels.reflect_dominant(big, rs.cartan_matrix, (0, 1))


def test_backend_reports_compiled():
    if os.environ.get("FLAGVORTEX_PURE_PYTHON"):
        assert _backend.BACKEND == "python"
    else:
        assert _backend.BACKEND == "cython"

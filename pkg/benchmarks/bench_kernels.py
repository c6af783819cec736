"""Compare the compiled and pure-Python Weyl-group kernels on identical inputs.

Run: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

from flagvortex.lie import LieType, build_root_system
from flagvortex.lie import _pykernels
from flagvortex.lie.reps import _levi_root_data

try:
    from flagvortex.lie import _ckernels
except ImportError:
    _ckernels = None


def _reflect_workload(rng):
    cases = []
    for t in (LieType("A", 6), LieType("D", 6), LieType("E", 7), LieType("E", 8)):
        rs = build_root_system(t)
        nodes = tuple(range(t.rank))
        for _ in range(400):
            v = tuple(rng.randint(-9, 9) for _ in range(t.rank))
            cases.append((v, rs.cartan_matrix, nodes))
    return cases


def _freudenthal_workload():
    cases = []
    for t, lam in ((LieType("A", 5), (2, 1, 1, 1, 2)), (LieType("B", 4), (2, 1, 1, 2)), (LieType("C", 4), (2, 1, 1, 1)), (LieType("G", 2), (6, 6)), (LieType("F", 4), (1, 1, 0, 1))):
        rs = build_root_system(t)
        nodes = tuple(range(t.rank))
        roots, heights = _levi_root_data(rs, nodes)
        cases.append((lam, rs.cartan_matrix, rs.gram_int, roots, heights, nodes))
    return cases


def _time(fn, cases, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [fn(*c) for c in cases]
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(0)
    rows = []
    for name, cases, py, cy in (
        ("reflect_dominant", _reflect_workload(rng), _pykernels.reflect_dominant, _ckernels.reflect_dominant),
        ("freudenthal_dominant", _freudenthal_workload(), _pykernels.freudenthal_dominant, _ckernels.freudenthal_dominant),
    ):
        tp, op = _time(py, cases, args.repeat)
        tc, oc = _time(cy, cases, args.repeat)
        if op != oc:
            raise SystemExit(f"{name}: backends disagree")
        rows.append((name, len(cases), tp, tc))
    print(f"{'kernel':<22} {'calls':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, n, tp, tc in rows:
        print(f"{name:<22} {n:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()

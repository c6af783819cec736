"""Brute-force references that share no code with the library."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb

import numpy as np


def symmetrizer_from_cartan(A) -> list:
    """Smallest positive integers with ``d_i A_ij = d_j A_ji``, by propagation."""
    n = len(A)
    d = [None] * n
    d[0] = Fraction(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(n):
            if j != i and A[i][j] != 0 and d[j] is None:
                d[j] = d[i] * A[i][j] / A[j][i]
                todo.append(j)
    m = min(d)
    d = [x / m for x in d]
    lcm = 1
    for x in d:
        lcm = lcm * x.denominator // np.gcd(lcm, x.denominator)
    return [int(x * lcm) for x in d]


def roots_by_closure(A) -> set:
    """All roots (simple-root coordinates) as the Weyl orbit of the simple roots."""
    n = len(A)

    def reflect(i, c):
        # <alpha, alpha_i^vee> = sum_j c_j A[i][j]
        p = sum(c[j] * A[i][j] for j in range(n))
        return tuple(c[j] - (p if j == i else 0) for j in range(n))

    start = {tuple(1 if j == i else 0 for j in range(n)) for i in range(n)}
    seen = set(start)
    todo = list(start)
    while todo:
        c = todo.pop()
        for i in range(n):
            r = reflect(i, c)
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def bott_length(A, lam) -> tuple:
    """``(singular, l(w))`` by counting positive roots that pair negatively with ``lam + rho``."""
    n = len(A)
    d = symmetrizer_from_cartan(A)
    pos = [c for c in roots_by_closure(A) if all(x >= 0 for x in c)]
    v = [x + 1 for x in lam]
    neg = 0
    for c in pos:
        # (alpha, alpha) / 2 = sum_ij c_i c_j d_i A_ij / 2
        norm = Fraction(sum(c[i] * c[j] * d[i] * A[i][j] for i in range(n) for j in range(n)), 2)
        pair = Fraction(sum(c[i] * d[i] * v[i] for i in range(n))) / norm
        if pair == 0:
            return True, None
        neg += pair < 0
    return False, neg


def partition_from_labels(labels) -> list:
    """Row lengths of the Young diagram of an sl(n+1) highest weight."""
    n = len(labels)
    return [sum(labels[i:]) for i in range(n)]


def hook_content_dimension(labels) -> int:
    """Dimension of the sl(n+1) module via the hook-content formula."""
    N = len(labels) + 1
    shape = [r for r in partition_from_labels(labels) if r > 0]
    num, den = 1, 1
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0])] if shape else []
    for i, r in enumerate(shape):
        for j in range(r):
            num *= N + j - i
            den *= (r - j - 1) + (cols[j] - i - 1) + 1
    return num // den


def ssyt_count(shape, N) -> int:
    """Enumerate semistandard tableaux with entries in 1..N (small shapes only)."""
    cells = [(i, j) for i, r in enumerate(shape) for j in range(r)]
    count = 0
    for vals in product(range(1, N + 1), repeat=len(cells)):
        t = dict(zip(cells, vals))
        if all(
            (j == 0 or t[(i, j - 1)] <= t[(i, j)]) and (i == 0 or t[(i - 1, j)] < t[(i, j)])
            for (i, j) in cells
        ):
            count += 1
    return count


def cech_cp1(d: int, window: int = 40) -> tuple:
    """``(h0, h1)`` of O(d) on CP^1 from the Cech complex of the standard cover.

    Everything is written in the frame over U0.  Sections over U0 are z^n with
    n >= 0; sections over U1 become z^e with e <= d after the frame change.
    C^1 is spanned by Laurent monomials, truncated to exponents in
    [-window, window]; no truncation artefacts arise while |d| < window.
    """
    if abs(d) >= window:
        raise ValueError("window too small")
    exps = list(range(-window, window + 1))
    idx = {e: i for i, e in enumerate(exps)}
    cols = []
    for n in range(0, window + 1):
        v = np.zeros(len(exps))
        v[idx[n]] = 1
        cols.append(v)
    for e in range(-window, d + 1):
        v = np.zeros(len(exps))
        v[idx[e]] = -1
        cols.append(v)
    M = np.array(cols).T
    rank = int(np.linalg.matrix_rank(M))
    return M.shape[1] - rank, len(exps) - rank


def euler_characteristic_cpn(n: int, d: int) -> int:
    """chi(CP^n, O(d)) = binom(n + d, n) as a polynomial in d."""
    num = 1
    for j in range(1, n + 1):
        num *= d + j
    den = 1
    for j in range(1, n + 1):
        den *= j
    return num // den


def weyl_dim_type_a_product(labels) -> int:
    """Direct product formula over pairs i < j for sl(n+1)."""
    N = len(labels) + 1
    num = den = 1
    for i in range(N):
        for j in range(i + 1, N):
            num *= sum(labels[i:j]) + (j - i)
            den *= j - i
    return num // den


__all__ = [
    "bott_length",
    "cech_cp1",
    "comb",
    "euler_characteristic_cpn",
    "hook_content_dimension",
    "partition_from_labels",
    "roots_by_closure",
    "ssyt_count",
    "symmetrizer_from_cartan",
    "weyl_dim_type_a_product",
]

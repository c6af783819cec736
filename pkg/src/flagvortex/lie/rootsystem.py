"""Cartan data and root systems for the simple Lie algebras.

Weights are tuples in the fundamental-weight basis (Dynkin labels).  The
Cartan matrix follows Bourbaki numbering with ``A[i][j] = <alpha_i^vee, alpha_j>``,
so the simple root ``alpha_j`` in label coordinates is column ``j`` of ``A``.
The invariant form is normalised so that short roots have squared length 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence


_RANK_RULES = {
    "A": (1, None),
    "B": (2, None),
    "C": (2, None),
    "D": (4, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}

_POSITIVE_ROOT_COUNT = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E": lambda n: {6: 36, 7: 63, 8: 120}[n],
    "F": lambda n: 24,
    "G": lambda n: 6,
}


@dataclass(frozen=True, order=True)
class LieType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _RANK_RULES:
            raise ValueError(f"unknown Lie family {self.family!r}")
        lo, hi = _RANK_RULES[self.family]
        if not isinstance(self.rank, int) or self.rank < lo or (hi is not None and self.rank > hi):
            raise ValueError(f"invalid rank {self.rank} for family {self.family}")

    @classmethod
    def parse(cls, text: str) -> "LieType":
        text = text.strip()
        if len(text) < 2 or not text[1:].isdigit():
            raise ValueError(f"cannot parse Lie type {text!r}")
        return cls(text[0].upper(), int(text[1:]))

    def __str__(self):
        return f"{self.family}{self.rank}"

    @property
    def expected_positive_roots(self) -> int:
        return _POSITIVE_ROOT_COUNT[self.family](self.rank)


def cartan_matrix(t: LieType) -> tuple:
    n, f = t.rank, t.family
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = 2
    if f in "ABC":
        for i in range(n - 1):
            A[i][i + 1] = A[i + 1][i] = -1
        if f == "B":
            A[n - 1][n - 2] = -2
        elif f == "C":
            A[n - 2][n - 1] = -2
    elif f == "D":
        for i in range(n - 2):
            A[i][i + 1] = A[i + 1][i] = -1
        A[n - 3][n - 1] = A[n - 1][n - 3] = -1
    elif f == "E":
        # Bourbaki: 1-3-4-5-6-7-8 with node 2 hanging off node 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for i, j in edges:
            A[i][j] = A[j][i] = -1
    elif f == "F":
        A[0][1] = A[1][0] = -1
        A[1][2] = -1
        A[2][1] = -2
        A[2][3] = A[3][2] = -1
    elif f == "G":
        A[0][1] = -3
        A[1][0] = -1
    return tuple(tuple(r) for r in A)


def symmetrizer(t: LieType) -> tuple:
    """Half squared lengths of the simple roots (short roots -> 1)."""
    n, f = t.rank, t.family
    if f == "B":
        return (2,) * (n - 1) + (1,)
    if f == "C":
        return (1,) * (n - 1) + (2,)
    if f == "F":
        return (2, 2, 1, 1)
    if f == "G":
        return (1, 3)
    return (1,) * n


def _inverse(M: Sequence[Sequence[int]]) -> list:
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class RootSystemData:
    lie_type: LieType
    cartan_matrix: tuple
    symmetrizer: tuple
    positive_roots: tuple  # simple-root coordinates, sorted by height
    rho: tuple
    gram: tuple  # Fraction matrix of the form on fundamental weights
    positive_roots_labels: tuple = field(repr=False)
    gram_scale: int = field(repr=False)  # common denominator of ``gram``
    gram_int: tuple = field(repr=False)  # gram * gram_scale, integers

    @property
    def rank(self) -> int:
        return self.lie_type.rank

    def simple_root(self, i: int) -> tuple:
        """Label vector of the simple root ``alpha_i`` (0-based index)."""
        return tuple(self.cartan_matrix[j][i] for j in range(self.rank))

    def inner(self, x: Sequence, y: Sequence) -> Fraction:
        g = self.gram_int
        n = self.rank
        s = sum(x[i] * g[i][j] * y[j] for i in range(n) for j in range(n))
        return Fraction(s, self.gram_scale)

    def inner_scaled(self, x: Sequence, y: Sequence):
        """``gram_scale * (x, y)``; an integer for integral weights."""
        g = self.gram_int
        n = self.rank
        return sum(x[i] * g[i][j] * y[j] for i in range(n) for j in range(n))

    def root_to_labels(self, c: Sequence) -> tuple:
        A = self.cartan_matrix
        n = self.rank
        return tuple(sum(A[i][j] * c[j] for j in range(n)) for i in range(n))

    def labels_to_root(self, v: Sequence) -> tuple:
        inv = _inverse_cartan(self.lie_type)
        n = self.rank
        return tuple(sum(inv[i][j] * v[j] for j in range(n)) for i in range(n))

    def levi_roots(self, nodes) -> tuple:
        """Indices of positive roots supported on the given (0-based) nodes."""
        allowed = set(nodes)
        return tuple(
            k
            for k, c in enumerate(self.positive_roots)
            if all(c[i] == 0 for i in range(self.rank) if i not in allowed)
        )


@lru_cache(maxsize=None)
def _inverse_cartan(t: LieType) -> tuple:
    return tuple(tuple(r) for r in _inverse(cartan_matrix(t)))


def _positive_roots(A: tuple) -> list:
    n = len(A)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = list(simple)
    known = set(roots)
    k = 0
    while k < len(roots):
        beta = roots[k]
        k += 1
        for i in range(n):
            if beta == simple[i]:
                continue
            pairing = sum(A[i][j] * beta[j] for j in range(n))
            q = 0
            down = list(beta)
            while True:
                down[i] -= 1
                if tuple(down) in known:
                    q += 1
                else:
                    break
            if q - pairing > 0:
                up = list(beta)
                up[i] += 1
                up = tuple(up)
                if up not in known:
                    known.add(up)
                    roots.append(up)
    roots.sort(key=lambda c: (sum(c), tuple(-x for x in c)))
    return roots


@lru_cache(maxsize=None)
def build_root_system(t: LieType) -> RootSystemData:
    """Assemble Cartan matrix, positive roots, rho and the invariant form."""
    if not isinstance(t, LieType):
        t = LieType.parse(str(t))
    A = cartan_matrix(t)
    d = symmetrizer(t)
    n = t.rank
    for i in range(n):
        for j in range(n):
            if d[i] * A[i][j] != d[j] * A[j][i]:
                raise AssertionError("symmetrizer does not symmetrize the Cartan matrix")
    roots = _positive_roots(A)
    if len(roots) != t.expected_positive_roots:
        raise AssertionError(f"{t}: generated {len(roots)} positive roots")
    inv = _inverse(A)
    gram = tuple(tuple(d[i] * inv[i][j] for j in range(n)) for i in range(n))
    scale = math.lcm(*(x.denominator for row in gram for x in row))
    gram_int = tuple(tuple(int(x * scale) for x in row) for row in gram)

    labels = tuple(tuple(sum(A[i][j] * c[j] for j in range(n)) for i in range(n)) for c in roots)
    twice_rho = [sum(v[i] for v in labels) for i in range(n)]
    rho = tuple(x // 2 for x in twice_rho)
    if any(x != 2 for x in twice_rho):
        raise AssertionError(f"{t}: rho does not have all labels 1")
    return RootSystemData(
        lie_type=t,
        cartan_matrix=A,
        symmetrizer=d,
        positive_roots=tuple(roots),
        rho=rho,
        gram=gram,
        positive_roots_labels=labels,
        gram_scale=scale,
        gram_int=gram_int,
    )

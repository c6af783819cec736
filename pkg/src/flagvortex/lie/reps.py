"""Weyl-group actions and finite-dimensional representations, exactly.

Every function accepts an optional ``nodes`` argument (0-based simple nodes).
``None`` means the whole algebra; a proper subset means the semisimple part
of the corresponding Levi subalgebra, which is how the flag-variety layer
reuses these routines for parabolic modules.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import _backend
from .rootsystem import RootSystemData


def _nodes(rs: RootSystemData, nodes) -> tuple:
    return tuple(range(rs.rank)) if nodes is None else tuple(sorted(nodes))


def _check(rs: RootSystemData, v: Sequence) -> tuple:
    v = tuple(v)
    if len(v) != rs.rank:
        raise ValueError(f"weight {v} has length {len(v)}, expected rank {rs.rank}")
    return v


def _is_integral(v) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def _as_int(v) -> tuple:
    return tuple(int(x) for x in v)


def simple_reflection(rs: RootSystemData, i: int, v: Sequence) -> tuple:
    """``s_i(v) = v - <v, alpha_i^vee> alpha_i`` with 1-based node ``i``."""
    v = _check(rs, v)
    if not 1 <= i <= rs.rank:
        raise IndexError(f"node {i} out of range 1..{rs.rank}")
    k = i - 1
    c = v[k]
    return tuple(x - c * rs.cartan_matrix[j][k] for j, x in enumerate(v))


def is_dominant(rs: RootSystemData, v: Sequence, nodes=None) -> bool:
    return all(v[i] >= 0 for i in _nodes(rs, nodes))


@dataclass(frozen=True)
class ShiftedDominant:
    """Outcome of the rho-shifted (dot) action reduction.

    ``dominant`` is ``w(lambda + rho)``; for singular weights it is the chamber
    representative reached, which lies on a wall.
    """

    singular: bool
    length: int
    dominant: tuple

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    def highest_weight(self, rs: RootSystemData) -> Optional[tuple]:
        if self.singular:
            return None
        return tuple(a - b for a, b in zip(self.dominant, rs.rho))


def dominantize_shifted(rs: RootSystemData, lam: Sequence, nodes=None, rng: Optional[random.Random] = None) -> ShiftedDominant:
    """Bring ``lam + rho`` into the dominant chamber by simple reflections.

    The number of reflections is the Bott index ``l(w)``.  ``rng`` picks a
    random negative node at each step instead of the first one; the result
    is path independent, which the tests exploit.
    """
    lam = _check(rs, lam)
    if not _is_integral(lam):
        raise ValueError(f"weight {lam} is not integral")
    nodes = _nodes(rs, nodes)
    shifted = tuple(int(x) + 1 for x in lam)
    if rng is None:
        dom, length = _backend.reflect_dominant(shifted, rs.cartan_matrix, nodes)
    else:
        v = list(shifted)
        length = 0
        while True:
            neg = [i for i in nodes if v[i] < 0]
            if not neg:
                break
            k = rng.choice(neg)
            c = v[k]
            for j in range(rs.rank):
                v[j] -= c * rs.cartan_matrix[j][k]
            length += 1
        dom = tuple(v)
    singular = any(dom[i] == 0 for i in nodes)
    return ShiftedDominant(singular=singular, length=length, dominant=tuple(dom))


def reflect_to_dominant(rs: RootSystemData, v: Sequence, nodes=None) -> tuple:
    """Linear action: the dominant element of the Weyl orbit and the length used."""
    v = _as_int(_check(rs, v))
    return _backend.reflect_dominant(v, rs.cartan_matrix, _nodes(rs, nodes))


def weyl_dimension(rs: RootSystemData, lam: Sequence, nodes=None) -> int:
    lam = _check(rs, lam)
    if not is_dominant(rs, lam, nodes):
        raise ValueError(f"weight {lam} is not dominant")
    return _weyl_dimension(rs, _as_int(lam), _nodes(rs, nodes))


@lru_cache(maxsize=4096)
def _weyl_dimension(rs: RootSystemData, lam: tuple, nodes: tuple) -> int:
    d = rs.symmetrizer
    num = den = 1
    for k in rs.levi_roots(nodes):
        c = rs.positive_roots[k]
        # (v, alpha) = sum_j c_j d_j v_j
        num *= sum(cj * dj * (lj + 1) for cj, dj, lj in zip(c, d, lam))
        den *= sum(cj * dj for cj, dj in zip(c, d))
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("Weyl dimension is not an integer")
    return q


def _levi_root_data(rs: RootSystemData, nodes: tuple):
    idx = rs.levi_roots(nodes)
    roots = tuple(rs.positive_roots_labels[k] for k in idx)
    heights = tuple(sum(rs.positive_roots[k]) for k in idx)
    return roots, heights


@lru_cache(maxsize=1024)
def _dominant_character(rs: RootSystemData, lam: tuple, nodes: tuple) -> dict:
    roots, heights = _levi_root_data(rs, nodes)
    dim = _weyl_dimension(rs, lam, nodes)
    return _backend.freudenthal_dominant(lam, rs.cartan_matrix, rs.gram_int, roots, heights, nodes, dim)


def dominant_character(rs: RootSystemData, lam: Sequence, nodes=None) -> dict:
    """Multiplicities of the dominant weights of ``V(lam)`` (Freudenthal)."""
    lam = _check(rs, lam)
    if not is_dominant(rs, lam, nodes):
        raise ValueError(f"weight {lam} is not dominant")
    return dict(_dominant_character(rs, _as_int(lam), _nodes(rs, nodes)))


def weyl_orbit(rs: RootSystemData, v: Sequence, nodes=None) -> list:
    nodes = _nodes(rs, nodes)
    start = _as_int(v)
    seen = {start}
    todo = [start]
    A = rs.cartan_matrix
    while todo:
        w = todo.pop()
        for i in nodes:
            c = w[i]
            if c == 0:
                continue
            u = tuple(x - c * A[j][i] for j, x in enumerate(w))
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return sorted(seen, reverse=True)


def freudenthal_multiplicities(rs: RootSystemData, lam: Sequence, nodes=None) -> dict:
    """All weights of the irreducible module ``V(lam)`` with multiplicities."""
    dom = dominant_character(rs, lam, nodes)
    out = {}
    for mu, m in dom.items():
        for w in weyl_orbit(rs, mu, nodes):
            out[w] = m
    return out


def dual_weight(rs: RootSystemData, lam: Sequence, nodes=None) -> tuple:
    """Highest weight of the dual module, ``-w0(lam)``.

    For a Levi (``nodes`` proper) the central part is negated along with it.
    """
    lam = _check(rs, lam)
    if not is_dominant(rs, lam, nodes):
        raise ValueError(f"weight {lam} is not dominant")
    dom, _ = reflect_to_dominant(rs, tuple(-int(x) for x in lam), nodes)
    return dom


def klimyk_tensor(rs: RootSystemData, lam1: Sequence, lam2: Sequence, nodes=None) -> Counter:
    """Decompose ``V(lam1) (x) V(lam2)``; returns a Counter of highest weights."""
    lam1, lam2 = _check(rs, lam1), _check(rs, lam2)
    for lam in (lam1, lam2):
        if not is_dominant(rs, lam, nodes):
            raise ValueError(f"weight {lam} is not dominant")
    nodes_t = _nodes(rs, nodes)
    lam1, lam2 = _as_int(lam1), _as_int(lam2)
    if _weyl_dimension(rs, lam1, nodes_t) > _weyl_dimension(rs, lam2, nodes_t):
        lam1, lam2 = lam2, lam1
    out = Counter()
    for mu, m in freudenthal_multiplicities(rs, lam1, nodes).items():
        shifted = tuple(a + b + 1 for a, b in zip(lam2, mu))
        dom, length = _backend.reflect_dominant(shifted, rs.cartan_matrix, nodes_t)
        if any(dom[i] == 0 for i in nodes_t):
            continue
        hw = tuple(x - 1 for x in dom)
        out[hw] += -m if length % 2 else m
    out = Counter({k: v for k, v in out.items() if v != 0})
    if any(v < 0 for v in out.values()):
        raise ArithmeticError("Klimyk cancellation left a negative multiplicity")
    return out

"""Flag manifolds G/P from crossed Dynkin diagrams and Bott-Borel-Weil cohomology.

Node indices in the public API are 1-based, as written in diagrams.  The
notation is ``A4[x,o,o,o]``: family, rank, then one mark per node with ``x``
for a crossed (non-Levi) node and ``o`` for a Levi node.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .lie import (
    LieType,
    RootSystemData,
    build_root_system,
    dominantize_shifted,
    dual_weight,
    klimyk_tensor,
    weyl_dimension,
)

# slope(O(d) on CP^1, unit Kaehler coefficient) == d
SLOPE_NORMALIZATION = 2

_DIAGRAM_RE = re.compile(r"^\s*([A-Ga-g])(\d+)\s*\[\s*([oxOX](?:\s*,\s*[oxOX])*)\s*\]\s*$")
_WEIGHT_RE = re.compile(r"^\s*\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)\s*$")


@dataclass(frozen=True)
class CrossedDiagram:
    lie_type: LieType
    crossed: frozenset

    def __post_init__(self):
        crossed = frozenset(int(i) for i in self.crossed)
        object.__setattr__(self, "crossed", crossed)
        if not crossed:
            raise ValueError("a crossed diagram needs at least one crossed node (P = G is excluded)")
        bad = [i for i in crossed if not 1 <= i <= self.lie_type.rank]
        if bad:
            raise ValueError(f"crossed nodes {sorted(bad)} outside 1..{self.lie_type.rank}")

    @property
    def rank(self) -> int:
        return self.lie_type.rank

    @property
    def root_system(self) -> RootSystemData:
        return build_root_system(self.lie_type)

    @property
    def levi_nodes(self) -> tuple:
        """0-based indices of the uncrossed nodes."""
        return tuple(i - 1 for i in range(1, self.rank + 1) if i not in self.crossed)

    def __str__(self):
        marks = ",".join("x" if i in self.crossed else "o" for i in range(1, self.rank + 1))
        return f"{self.lie_type}[{marks}]"


def parse_diagram(text: str) -> CrossedDiagram:
    m = _DIAGRAM_RE.match(text)
    if not m:
        raise ValueError(f"malformed diagram {text!r}; expected e.g. 'A4[x,o,o,o]'")
    t = LieType(m.group(1).upper(), int(m.group(2)))
    marks = [s.strip().lower() for s in m.group(3).split(",")]
    if len(marks) != t.rank:
        raise ValueError(f"diagram {text!r} has {len(marks)} marks for rank {t.rank}")
    return CrossedDiagram(t, frozenset(i + 1 for i, s in enumerate(marks) if s == "x"))


def parse_weight(text: str) -> tuple:
    m = _WEIGHT_RE.match(text)
    if not m:
        raise ValueError(f"malformed weight {text!r}; expected e.g. '(-2,1,0,0)'")
    return tuple(int(s) for s in m.group(1).split(","))


def format_weight(w: Sequence) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def fiber_dimension(d: CrossedDiagram) -> int:
    """Complex dimension of G/P: positive roots outside the Levi."""
    rs = d.root_system
    return len(rs.positive_roots) - len(rs.levi_roots(d.levi_nodes))


@dataclass(frozen=True)
class ParabolicModule:
    diagram: CrossedDiagram
    highest_weight: tuple

    def __post_init__(self):
        w = tuple(int(x) for x in self.highest_weight)
        object.__setattr__(self, "highest_weight", w)
        if len(w) != self.diagram.rank:
            raise ValueError(f"weight {w} does not match rank {self.diagram.rank}")
        bad = [i + 1 for i in self.diagram.levi_nodes if w[i] < 0]
        if bad:
            raise ValueError(f"weight {format_weight(w)} is negative on uncrossed nodes {bad} (not Levi-dominant)")

    @property
    def rank(self) -> int:
        """Rank of the homogeneous bundle, i.e. the Levi dimension."""
        d = self.diagram
        return weyl_dimension(d.root_system, self.highest_weight, d.levi_nodes)

    def __str__(self):
        return f"{self.diagram}{format_weight(self.highest_weight)}"


ModuleLike = Union[ParabolicModule, Sequence[ParabolicModule]]


def components(m: ModuleLike) -> tuple:
    if isinstance(m, ParabolicModule):
        return (m,)
    comps = tuple(m)
    if not comps:
        raise ValueError("empty module")
    return comps


@dataclass(frozen=True)
class KahlerClass:
    coeffs: Mapping

    def __post_init__(self):
        c = {int(k): Fraction(v) for k, v in dict(self.coeffs).items()}
        if any(v <= 0 for v in c.values()):
            raise ValueError("Kaehler coefficients must be strictly positive")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def uniform(cls, d: CrossedDiagram, value=1) -> "KahlerClass":
        return cls({i: Fraction(value) for i in sorted(d.crossed)})

    def check(self, d: CrossedDiagram):
        if set(self.coeffs) != set(d.crossed):
            raise ValueError(f"Kaehler class nodes {sorted(self.coeffs)} differ from crossed nodes {sorted(d.crossed)}")

    def weight(self, d: CrossedDiagram) -> tuple:
        return tuple(self.coeffs.get(i + 1, Fraction(0)) for i in range(d.rank))


@dataclass(frozen=True)
class CohomologyEntry:
    degree: int
    highest_weight: tuple
    dimension: int
    multiplicity: int = 1


@dataclass(frozen=True)
class CohomologyReport:
    entries: tuple = ()
    total_vanishing: bool = False

    def in_degree(self, q: int) -> tuple:
        return tuple(e for e in self.entries if e.degree == q)

    def dim(self, q: int) -> int:
        return sum(e.dimension * e.multiplicity for e in self.in_degree(q))

    def degrees(self) -> tuple:
        return tuple(sorted({e.degree for e in self.entries}))

    def as_dict(self) -> dict:
        return {
            "total_vanishing": self.total_vanishing,
            "entries": [
                {
                    "degree": e.degree,
                    "highest_weight": list(e.highest_weight),
                    "dimension": e.dimension,
                    "multiplicity": e.multiplicity,
                }
                for e in self.entries
            ],
        }


def bbw_cohomology(m: ParabolicModule) -> CohomologyReport:
    """Bott-Borel-Weil: at most one nonzero degree, carrying an irreducible G-module."""
    if not isinstance(m, ParabolicModule):
        raise TypeError("bbw_cohomology takes an irreducible ParabolicModule")
    rs = m.diagram.root_system
    res = dominantize_shifted(rs, m.highest_weight)
    if res.singular:
        return CohomologyReport((), True)
    hw = res.highest_weight(rs)
    return CohomologyReport((CohomologyEntry(res.length, hw, weyl_dimension(rs, hw)),), False)


def bott_index(m: ParabolicModule) -> Optional[int]:
    r = bbw_cohomology(m)
    return None if r.total_vanishing else r.entries[0].degree


def dual_module(m: ParabolicModule) -> ParabolicModule:
    d = m.diagram
    return ParabolicModule(d, dual_weight(d.root_system, m.highest_weight, d.levi_nodes))


def canonical_weight(d: CrossedDiagram) -> tuple:
    """Weight of K_F: minus the sum of the positive roots outside the Levi."""
    rs = d.root_system
    levi = set(rs.levi_roots(d.levi_nodes))
    out = [0] * d.rank
    for k, lab in enumerate(rs.positive_roots_labels):
        if k not in levi:
            for i in range(d.rank):
                out[i] -= lab[i]
    return tuple(out)


def twist(m: ParabolicModule, character: Sequence) -> ParabolicModule:
    """Tensor with a line bundle whose weight vanishes on the Levi nodes."""
    if any(character[i] for i in m.diagram.levi_nodes):
        raise ValueError("twisting weight is not a character of P")
    return ParabolicModule(m.diagram, tuple(a + b for a, b in zip(m.highest_weight, character)))


def serre_partner(m: ParabolicModule) -> ParabolicModule:
    """``V* (x) K_F``, so that ``H^q(V)`` is dual to ``H^{n-q}`` of the partner."""
    return twist(dual_module(m), canonical_weight(m.diagram))


def tensor_modules(m1: ParabolicModule, m2: ParabolicModule) -> Counter:
    """Levi decomposition of ``m1 (x) m2`` as a Counter of ParabolicModules."""
    if m1.diagram != m2.diagram:
        raise ValueError(f"diagram mismatch: {m1.diagram} vs {m2.diagram}")
    d = m1.diagram
    parts = klimyk_tensor(d.root_system, m1.highest_weight, m2.highest_weight, d.levi_nodes)
    return Counter({ParabolicModule(d, w): c for w, c in parts.items()})


def hom_components(m1: ModuleLike, m2: ModuleLike) -> Counter:
    """Irreducible constituents of ``Hom(V2, V1) = V1 (x) V2*``."""
    out = Counter()
    for a in components(m1):
        for b in components(m2):
            out.update(tensor_modules(a, dual_module(b)))
    return out


def _aggregate(reports: Iterable[tuple]) -> CohomologyReport:
    acc = Counter()
    dims = {}
    for mult, rep in reports:
        for e in rep.entries:
            key = (e.degree, e.highest_weight)
            acc[key] += mult * e.multiplicity
            dims[key] = e.dimension
    entries = tuple(
        CohomologyEntry(q, w, dims[(q, w)], acc[(q, w)]) for (q, w) in sorted(acc, key=lambda k: (k[0], tuple(-x for x in k[1])))
    )
    return CohomologyReport(entries, not entries)


def module_cohomology(m: ModuleLike) -> CohomologyReport:
    """BBW summed over the irreducible constituents of a (reducible) module."""
    return _aggregate((1, bbw_cohomology(c)) for c in components(m))


def hom_bundle_cohomology(m1: ModuleLike, m2: ModuleLike, q: Optional[int] = None) -> CohomologyReport:
    """Cohomology of ``Hom(V2, V1)``, restricted to degree ``q`` if given."""
    parts = hom_components(m1, m2)
    rep = _aggregate((c, bbw_cohomology(p)) for p, c in sorted(parts.items(), key=lambda kv: kv[0].highest_weight))
    if q is None:
        return rep
    entries = rep.in_degree(q)
    return CohomologyReport(entries, not rep.entries)


def slope(m: ModuleLike, k: KahlerClass) -> Fraction:
    """Slope of a homogeneous bundle against the invariant Kaehler class.

    Pairs the central projection of the highest weight with the weight
    ``sum_i k_i w_i`` over crossed nodes.  Those fundamental weights are
    already orthogonal to the Levi roots, so the projection drops out.
    Reducible modules must have constituents of equal slope.
    """
    comps = components(m)
    d = comps[0].diagram
    k.check(d)
    rs = d.root_system
    xi = k.weight(d)
    values = {SLOPE_NORMALIZATION * rs.inner(c.highest_weight, xi) for c in comps}
    if any(c.diagram != d for c in comps):
        raise ValueError("constituents live on different diagrams")
    if len(values) != 1:
        raise ValueError(f"constituents have unequal slopes {sorted(values)}")
    return values.pop()


def module_rank(m: ModuleLike) -> int:
    return sum(c.rank for c in components(m))


def invariant_multiplicity(m1: ModuleLike, m2: ModuleLike) -> int:
    """Multiplicity of the trivial G-module in ``H^1(F, Hom(V2, V1))``."""
    rep = hom_bundle_cohomology(m1, m2, 1)
    zero = (0,) * components(m1)[0].diagram.rank
    return sum(e.multiplicity for e in rep.entries if e.highest_weight == zero)

"""Reduction data: calibration, extension counts, vortex parameters, sigma windows.

Slopes on the base follow ``mu_X(W) = deg(W) / (rank(W) * vol(X))`` and the
pulled-back bundles obey ``mu_sigma(pi^*W (x) V~) = mu_X(W) + mu_rho / sigma``.
All arithmetic here is rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .flag import (
    KahlerClass,
    ModuleLike,
    components,
    hom_bundle_cohomology,
    invariant_multiplicity,
    module_rank,
    slope,
)


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class BaseBundle:
    name: str
    rank: int
    degree: Fraction
    h0_dim: Optional[int] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"{self.name}: rank must be >= 1")
        object.__setattr__(self, "degree", Fraction(self.degree))
        if self.h0_dim is not None and self.h0_dim < 0:
            raise ValueError(f"{self.name}: h0_dim must be >= 0")

    def slope(self, volume=1) -> Fraction:
        return self.degree / (self.rank * Fraction(volume))


@dataclass(frozen=True)
class TripleRecord:
    w1: BaseBundle
    w2: BaseBundle
    k: int
    phi_count: int
    h0_dim: int = 0  # dim H^0(X, Hom(W2, W1))

    def __post_init__(self):
        if self.k < 0 or self.phi_count < 0:
            raise ValueError("k and phi_count must be non-negative")
        if self.phi_count > self.k * self.h0_dim:
            raise ValueError(
                f"{self.phi_count} sections exceed k * h0 = {self.k} * {self.h0_dim}: "
                "a k-tuple of sections of Hom(W2, W1) has at most that many independent entries"
            )


@dataclass(frozen=True)
class QuadrupleRecord:
    triple: TripleRecord
    beta_X_dim: int = 0

    @property
    def degenerate(self) -> bool:
        return self.beta_X_dim == 0 and self.triple.phi_count == 0


@dataclass(frozen=True)
class Calibration:
    calibrated: bool
    mu_rho: Fraction
    h0_vanishes: bool
    findings: tuple = ()

    @property
    def consistent(self) -> bool:
        return not self.findings


def check_calibration(rho1: ModuleLike, rho2: ModuleLike, k: KahlerClass) -> Calibration:
    """Slope test ``mu_rho1 - mu_rho2 < 0`` cross-checked against BBW ``H^0 = 0``."""
    mu = slope(rho1, k) - slope(rho2, k)
    h0 = hom_bundle_cohomology(rho1, rho2, 0).dim(0)
    findings = []
    if mu < 0 and h0 != 0:
        findings.append(f"inconsistency: mu_rho = {mu} < 0 but dim H^0(F, Hom(V2, V1)) = {h0}")
    return Calibration(calibrated=(mu < 0 and h0 == 0), mu_rho=mu, h0_vanishes=(h0 == 0), findings=tuple(findings))


def fiber_extension_dimension(rho1: ModuleLike, rho2: ModuleLike) -> int:
    """``k = dim H^{0,1}(F, Hom(V2, V1))``."""
    return hom_bundle_cohomology(rho1, rho2, 1).dim(1)


def ext1_dimension(t: TripleRecord, q: Optional[QuadrupleRecord] = None, *, calibration: Calibration) -> int:
    """Kuenneth count ``h0(X, Hom(W2, W1)) * k`` plus the base component."""
    if not calibration.calibrated:
        raise CalibrationError("extension classification needs a calibrated pair (mu_rho < 0, H^0 = 0)")
    n = t.h0_dim * t.k
    if q is not None:
        n += q.beta_X_dim
    return n


@dataclass(frozen=True)
class VortexParameters:
    sigma: Fraction
    lambda_slope: Fraction
    tau1: Fraction
    tau2: Fraction
    mu_sigma_E1: Fraction
    mu_sigma_E2: Fraction
    rank_E1: int
    rank_E2: int

    @property
    def rank_E(self) -> int:
        return self.rank_E1 + self.rank_E2


def vortex_parameters(mu_rho1, mu_rho2, r_V1: int, r_V2: int, w1: BaseBundle, w2: BaseBundle, sigma, volume=1) -> VortexParameters:
    """``tau_i = mu_sigma(E) - mu_rho_i / sigma``."""
    sigma = Fraction(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    m1, m2 = Fraction(mu_rho1), Fraction(mu_rho2)
    e1 = w1.slope(volume) + m1 / sigma
    e2 = w2.slope(volume) + m2 / sigma
    rk1, rk2 = w1.rank * r_V1, w2.rank * r_V2
    lam = (rk1 * e1 + rk2 * e2) / (rk1 + rk2)
    return VortexParameters(sigma, lam, lam - m1 / sigma, lam - m2 / sigma, e1, e2, rk1, rk2)


@dataclass(frozen=True)
class SigmaWindow:
    """A set of sigma > 0: an interval, a point, everything, or nothing.

    ``status`` is ``"unknown"`` when no closed form is available (rank > 1).
    ``hi = None`` means unbounded above.
    """

    lo: Fraction = Fraction(0)
    hi: Optional[Fraction] = None
    lo_closed: bool = False
    hi_closed: bool = False
    empty: bool = False
    status: str = "ok"

    def contains(self, sigma) -> bool:
        if self.status != "ok":
            raise ValueError("window unknown")
        if self.empty:
            return False
        s = Fraction(sigma)
        if s <= 0:
            return False
        if s < self.lo or (s == self.lo and not self.lo_closed):
            return False
        if self.hi is not None and (s > self.hi or (s == self.hi and not self.hi_closed)):
            return False
        return True

    def classify(self, sigma) -> str:
        """``interior``, ``boundary`` or ``exterior``."""
        s = Fraction(sigma)
        if not self.empty and (s == self.lo and self.lo > 0 or s == self.hi):
            return "boundary"
        return "interior" if self.contains(s) else "exterior"

    def as_dict(self) -> dict:
        if self.status != "ok":
            return {"status": self.status}
        if self.empty:
            return {"status": "ok", "empty": True}
        return {
            "status": "ok",
            "empty": False,
            "lo": str(self.lo),
            "hi": None if self.hi is None else str(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    def __str__(self):
        if self.status != "ok":
            return "unknown"
        if self.empty:
            return "empty"
        if self.hi is not None and self.lo == self.hi:
            return f"{{{self.lo}}}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {'inf' if self.hi is None else self.hi}{right}"


def _affine_in_t(fn):
    """Coefficients ``(a, b)`` of ``fn(t) = a + b t`` (exact, from two samples)."""
    f1, f2 = fn(Fraction(1)), fn(Fraction(2))
    b = f2 - f1
    return f1 - b, b


def _t_set(a, b, rel):
    """Solve ``a + b t (rel) 0`` for t > 0, as (lo, hi, lo_closed, hi_closed) or None."""
    inf = None
    if b == 0:
        ok = {">": a > 0, "<": a < 0, "=": a == 0}[rel]
        return (Fraction(0), inf, False, False) if ok else None
    root = -a / b
    if rel == "=":
        return (root, root, True, True) if root > 0 else None
    positive_side = (rel == ">") == (b > 0)  # solution is t > root
    if positive_side:
        return (max(root, Fraction(0)), inf, False, False)
    if root <= 0:
        return None
    return (Fraction(0), root, False, False)


def _intersect(x, y):
    if x is None or y is None:
        return None
    lo, lo_c = (x[0], x[2]) if (x[0] > y[0] or (x[0] == y[0] and not x[2])) else (y[0], y[2])
    if x[1] is None:
        hi, hi_c = y[1], y[3]
    elif y[1] is None:
        hi, hi_c = x[1], x[3]
    else:
        hi, hi_c = (x[1], x[3]) if (x[1] < y[1] or (x[1] == y[1] and not x[3])) else (y[1], y[3])
    if hi is not None and (lo > hi or (lo == hi and not (lo_c and hi_c))):
        return None
    return (lo, hi, lo_c, hi_c)


def sigma_window(mu_rho1, mu_rho2, r_V1: int, r_V2: int, w1: BaseBundle, w2: BaseBundle, phi_nonzero: bool, volume=1) -> SigmaWindow:
    """Integrated Gauss-constraint window for line bundles ``W1``, ``W2``.

    With sections present: ``tau_1 > mu_X(W1)`` and ``tau_2 < mu_X(W2)``.
    Without: both equalities (the split Hermitian-Einstein condition).
    """
    if w1.rank != 1 or w2.rank != 1:
        return SigmaWindow(status="unknown")
    mu1, mu2 = w1.slope(volume), w2.slope(volume)

    def tau(t, i):
        p = vortex_parameters(mu_rho1, mu_rho2, r_V1, r_V2, w1, w2, 1 / t, volume)
        return p.tau1 if i == 1 else p.tau2

    a1, b1 = _affine_in_t(lambda t: tau(t, 1) - mu1)
    a2, b2 = _affine_in_t(lambda t: mu2 - tau(t, 2))
    rel = ">" if phi_nonzero else "="
    tset = _intersect(_t_set(a1, b1, rel), _t_set(a2, b2, rel))
    if tset is None:
        return SigmaWindow(empty=True)
    tlo, thi, tlo_c, thi_c = tset
    # sigma = 1 / t reverses the interval
    lo = Fraction(0) if thi is None else 1 / thi
    hi = None if tlo == 0 else 1 / tlo
    return SigmaWindow(lo=lo, hi=hi, lo_closed=thi_c and thi is not None, hi_closed=tlo_c and tlo > 0)


@dataclass(frozen=True)
class InvariantCase:
    invariant: bool
    k_invariant: int
    reason: str = ""


def detect_invariant_case(rho1: ModuleLike, rho2: ModuleLike, k: KahlerClass) -> InvariantCase:
    if len(components(rho1)) != 1 or len(components(rho2)) != 1:
        return InvariantCase(False, 0, "reducible fiber representation")
    if slope(rho1, k) - slope(rho2, k) >= 0:
        return InvariantCase(False, 0, "slope condition fails")
    m = invariant_multiplicity(rho1, rho2)
    if m == 0:
        return InvariantCase(False, 0, "no invariant class in H^{0,1}")
    if m > 1:
        return InvariantCase(False, 0, f"invariant multiplicity {m} > 1")
    return InvariantCase(True, 1, "")


@dataclass(frozen=True)
class ReductionPlan:
    rho1: ModuleLike
    rho2: ModuleLike
    kahler: KahlerClass
    w1: BaseBundle
    w2: BaseBundle
    sigma: Fraction
    volume: Fraction
    calibration: Calibration
    k: int
    r_V1: int
    r_V2: int
    mu_rho1: Fraction
    mu_rho2: Fraction
    params: VortexParameters
    invariant: InvariantCase
    window: SigmaWindow
    phi_count: int
    ext1: Optional[int]
    findings: tuple = field(default=())

    @property
    def fiber(self):
        return components(self.rho1)[0].diagram

    @property
    def mu_rho(self) -> Fraction:
        return self.calibration.mu_rho

    @property
    def calibrated(self) -> bool:
        return self.calibration.calibrated

    @property
    def tau1(self) -> Fraction:
        return self.params.tau1

    @property
    def tau2(self) -> Fraction:
        return self.params.tau2

    @property
    def lambda_slope(self) -> Fraction:
        return self.params.lambda_slope

    @property
    def coupling_ratio(self) -> Fraction:
        """``r_V1 / r_V2``: weight of the section term in the second equation."""
        return Fraction(self.r_V1, self.r_V2)

    def at_sigma(self, sigma) -> VortexParameters:
        return vortex_parameters(self.mu_rho1, self.mu_rho2, self.r_V1, self.r_V2, self.w1, self.w2, sigma, self.volume)


def torus_h0(d1, d2) -> int:
    """Riemann-Roch on an elliptic curve for ``Hom(W2, W1)`` of degree ``d1 - d2``.

    Degree zero is counted as 1 (the trivial bundle); a non-trivial degree-0
    bundle would give 0.
    """
    d = Fraction(d1) - Fraction(d2)
    if d.denominator != 1:
        raise ValueError("line bundle degrees must be integers")
    return int(d) if d > 0 else (1 if d == 0 else 0)


def build_reduction_plan(
    rho1: ModuleLike,
    rho2: ModuleLike,
    kahler: KahlerClass,
    w1: BaseBundle,
    w2: BaseBundle,
    sigma,
    volume=1,
    phi_count: Optional[int] = None,
    h0_dim: Optional[int] = None,
) -> ReductionPlan:
    """``h0_dim`` is ``dim H^0(X, Hom(W2, W1))``; defaults to ``w1.h0_dim`` or 0."""
    cal = check_calibration(rho1, rho2, kahler)
    k = fiber_extension_dimension(rho1, rho2)
    r1, r2 = module_rank(rho1), module_rank(rho2)
    m1, m2 = slope(rho1, kahler), slope(rho2, kahler)
    params = vortex_parameters(m1, m2, r1, r2, w1, w2, sigma, volume)
    h0 = h0_dim if h0_dim is not None else (w1.h0_dim or 0)
    if phi_count is None:
        phi_count = min(k, h0)
    ext1 = None
    findings = list(cal.findings)
    if cal.calibrated:
        triple = TripleRecord(w1, w2, k, phi_count, h0)
        ext1 = ext1_dimension(triple, calibration=cal)
    window = sigma_window(m1, m2, r1, r2, w1, w2, phi_count > 0, volume)
    return ReductionPlan(
        rho1=rho1,
        rho2=rho2,
        kahler=kahler,
        w1=w1,
        w2=w2,
        sigma=Fraction(sigma),
        volume=Fraction(volume),
        calibration=cal,
        k=k,
        r_V1=r1,
        r_V2=r2,
        mu_rho1=m1,
        mu_rho2=m2,
        params=params,
        invariant=detect_invariant_case(rho1, rho2, kahler),
        window=window,
        phi_count=phi_count,
        ext1=ext1,
        findings=tuple(findings),
    )

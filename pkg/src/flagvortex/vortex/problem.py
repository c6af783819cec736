"""Discrete twisted coupled vortex problems and their integral certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .geometry import BaseGeometry


@dataclass(frozen=True)
class VortexProblem:
    """Equations for ``u1, u2`` with ``h_i = h_i^0 exp(2 u_i)``::

        f1 - Lap u1 + (1/sigma)       Phi - 2 pi tau1 = 0
        f2 - Lap u2 - (kappa/sigma)   Phi - 2 pi tau2 = 0
        Phi = sum_j exp(2 (v_j + u1 - u2))

    ``f_i`` is the background curvature density (grid mean ``2 pi d_i / area``),
    ``v_j = log |phi_j|_0`` is the regularised section potential, and
    ``kappa = r_V1 / r_V2`` weights the section term in the second equation.
    """

    geometry: BaseGeometry
    d1: int
    d2: int
    sigma: float
    tau1: float
    tau2: float
    kappa: float = 1.0
    log_sections: np.ndarray = None  # (k_eff, n, n)
    background1: np.ndarray = None
    background2: np.ndarray = None
    divisors: tuple = ()
    findings: tuple = field(default=())

    def __post_init__(self):
        g = self.geometry
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.kappa <= 0:
            raise ValueError("coupling ratio must be positive")
        if self.log_sections is None:
            object.__setattr__(self, "log_sections", np.zeros((0, g.n, g.n)))
        ls = np.asarray(self.log_sections, dtype=float)
        if ls.ndim != 3 or ls.shape[1:] != (g.n, g.n):
            raise ValueError(f"section potentials must have shape (k, {g.n}, {g.n})")
        object.__setattr__(self, "log_sections", ls)
        for name, d in (("background1", self.d1), ("background2", self.d2)):
            f = getattr(self, name)
            if f is None:
                f = np.full((g.n, g.n), 2 * math.pi * d / g.area)
            f = np.asarray(f, dtype=float)
            if f.shape != (g.n, g.n):
                raise ValueError(f"{name} has the wrong shape")
            if abs(g.integrate(f) - 2 * math.pi * d) > 1e-9 * max(1.0, abs(d)):
                raise ValueError(f"{name} does not integrate to 2 pi * degree")
            object.__setattr__(self, name, f)

    @property
    def k_eff(self) -> int:
        return self.log_sections.shape[0]

    @property
    def mu1(self) -> float:
        return self.d1 / self.geometry.area

    @property
    def mu2(self) -> float:
        return self.d2 / self.geometry.area

    def scaled(self, eps: float) -> "VortexProblem":
        """Sections scaled by ``eps`` and ``tau_i - mu_i`` by ``eps^2``.

        Since ``tau_i`` is affine in ``1/sigma``, this is the same as moving
        sigma toward the window endpoint where the integral constraint closes.
        """
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if eps == 0:
            ls = np.zeros((0,) + self.log_sections.shape[1:])
        else:
            ls = self.log_sections + math.log(eps)
        return replace(
            self,
            log_sections=ls,
            tau1=self.mu1 + eps**2 * (self.tau1 - self.mu1),
            tau2=self.mu2 + eps**2 * (self.tau2 - self.mu2),
        )

    def as_dict(self) -> dict:
        return {
            "geometry": self.geometry.as_dict(),
            "d1": self.d1,
            "d2": self.d2,
            "sigma": self.sigma,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "kappa": self.kappa,
            "k_eff": self.k_eff,
            "divisors": [[list(p) for p in d] for d in self.divisors],
        }


def section_potential(geometry: BaseGeometry, divisor: Sequence, density: np.ndarray) -> np.ndarray:
    """Mean-zero ``v`` with ``Lap v = 2 pi sum_p m_p delta_p - density``.

    ``delta_p`` is the grid delta ``1 / cell_area`` at index ``p``, so ``exp(2v)``
    vanishes to order ``2m`` at each zero; ``density`` is the curvature of
    ``W1 (x) W2^*`` and must integrate to ``2 pi`` times the divisor degree.
    """
    rhs = -np.asarray(density, dtype=float).copy()
    for i, j, m in divisor:
        rhs[i % geometry.n, j % geometry.n] += 2 * math.pi * m / geometry.cell_area
    if abs(geometry.integrate(rhs)) > 1e-8 * (1 + np.abs(rhs).max() * geometry.cell_area):
        raise ValueError("divisor degree does not match the curvature of Hom(W2, W1)")
    return geometry.poisson(rhs)


def _normalize_divisor(div) -> tuple:
    out = []
    for pt in div:
        pt = tuple(int(x) for x in pt)
        if len(pt) == 2:
            pt = pt + (1,)
        if len(pt) != 3 or pt[2] < 1:
            raise ValueError(f"divisor point {pt} must be (i, j) or (i, j, multiplicity >= 1)")
        out.append(pt)
    return tuple(out)


@dataclass(frozen=True)
class Certificate:
    """Why no ``(u1, u2)`` can solve the problem; decided from integrals alone."""

    kind: str
    value: float
    message: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "message": self.message}


def gauss_targets(p: VortexProblem) -> tuple:
    """``(1/sigma) int Phi`` demanded by each integrated equation, and the topological gap.

    Integrating the equations over the torus kills the Laplacian, leaving
    ``2 pi d1 + I - 2 pi tau1 A = 0`` and ``2 pi d2 - kappa I - 2 pi tau2 A = 0``
    for ``I = (1/sigma) int Phi``.
    """
    A = p.geometry.area
    need1 = 2 * math.pi * (p.tau1 * A - p.d1)
    need2 = 2 * math.pi * (p.d2 - p.tau2 * A) / p.kappa
    return need1, need2, need1 - need2


def infeasibility_certificate(p: VortexProblem, rtol: float = 1e-12) -> Optional[Certificate]:
    need1, need2, gap = gauss_targets(p)
    scale = 2 * math.pi * (abs(p.d1) + abs(p.d2) + abs(p.tau1) * p.geometry.area + abs(p.tau2) * p.geometry.area + 1)
    tol = rtol * scale
    if abs(gap) > tol:
        return Certificate("gauss-consistency", gap, "integrated equations demand different section masses; no u can satisfy both")
    if p.k_eff == 0:
        if abs(need1) > tol:
            return Certificate("split-mismatch", need1, "without sections each tau_i must equal the slope d_i / area")
        return None
    if need1 <= tol:
        return Certificate(
            "integral-inequality",
            need1,
            "integral of the section term must equal this value, which is not positive, but the term is positive everywhere",
        )
    return None


def assemble_problem(plan, geometry: BaseGeometry, divisors: Sequence = (), amplitudes: Optional[Sequence] = None, sigma=None) -> VortexProblem:
    """Build the discrete problem from a reduction plan with line-bundle base data.

    ``divisors`` holds one list of grid points ``(i, j[, mult])`` per section;
    each must have total multiplicity ``d1 - d2``.
    """
    if plan.w1.rank != 1 or plan.w2.rank != 1:
        raise ValueError("the numerical solver handles line bundles W1, W2 only")
    for w in (plan.w1, plan.w2):
        if Fraction(w.degree).denominator != 1:
            raise ValueError("line bundle degrees must be integers")
    if abs(float(plan.volume) - geometry.area) > 1e-12 * geometry.area:
        raise ValueError(f"plan volume {float(plan.volume)} differs from torus area {geometry.area}")
    d1, d2 = int(plan.w1.degree), int(plan.w2.degree)
    params = plan.params if sigma is None else plan.at_sigma(sigma)
    divs = tuple(_normalize_divisor(d) for d in divisors)
    findings = []
    for j, d in enumerate(divs):
        deg = sum(m for _, _, m in d)
        if deg != d1 - d2:
            raise ValueError(f"divisor {j} has degree {deg}, expected d1 - d2 = {d1 - d2}")
    if divs and d1 - d2 < 0:
        raise ValueError("Hom(W2, W1) has negative degree and no sections")
    if len(divs) > plan.k:
        findings.append(f"{len(divs)} sections exceed the fiber extension dimension k = {plan.k}")
    amps = [1.0] * len(divs) if amplitudes is None else [float(a) for a in amplitudes]
    if len(amps) != len(divs) or any(a <= 0 for a in amps):
        raise ValueError("need one positive amplitude per divisor")
    f1 = np.full((geometry.n, geometry.n), 2 * math.pi * d1 / geometry.area)
    f2 = np.full((geometry.n, geometry.n), 2 * math.pi * d2 / geometry.area)
    ls = np.array([section_potential(geometry, d, f1 - f2) + math.log(a) for d, a in zip(divs, amps)]).reshape(len(divs), geometry.n, geometry.n)
    p = VortexProblem(
        geometry=geometry,
        d1=d1,
        d2=d2,
        sigma=float(params.sigma),
        tau1=float(params.tau1),
        tau2=float(params.tau2),
        kappa=float(plan.coupling_ratio),
        log_sections=ls,
        background1=f1,
        background2=f2,
        divisors=divs,
    )
    cert = infeasibility_certificate(p)
    if cert is not None:
        findings.append(f"tau outside the solvable range ({cert.kind})")
    return replace(p, findings=tuple(findings))

"""Moment-map flow for the discrete coupled vortex equations.

The residual pair ``(r1, r2 / kappa)`` is the gradient of a convex functional
on ``(u1, u2)`` modulo the common-constant gauge mode, so the flow is a
preconditioned descent on ``E = ||r1||^2 + ||r2||^2`` followed by a damped
Newton finish on a bordered system that removes the gauge null space.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .problem import Certificate, VortexProblem, gauss_targets, infeasibility_certificate


@dataclass
class SolverState:
    u1: np.ndarray
    u2: np.ndarray
    status: str = "initial"  # converged | infeasible | not-converged | diverged | initial
    iterations: int = 0
    residual_sup: tuple = (math.inf, math.inf)
    residual_l2: tuple = (math.inf, math.inf)
    gauss_gaps: tuple = (math.inf, math.inf)
    energy: float = math.inf
    certificate: Optional[Certificate] = None
    history: list = field(default_factory=list)
    message: str = ""

    @property
    def sup_residual(self) -> float:
        return max(self.residual_sup)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def summary(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "residual_sup": list(self.residual_sup),
            "residual_l2": list(self.residual_l2),
            "gauss_gaps": list(self.gauss_gaps),
            "energy": self.energy,
            "certificate": None if self.certificate is None else self.certificate.as_dict(),
            "message": self.message,
        }


def section_density(p: VortexProblem, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """``Phi = sum_j |phi_j|^2`` in the metric ``h1 (x) h2^*``."""
    if p.k_eff == 0:
        return np.zeros_like(u1)
    return np.exp(2 * (p.log_sections + (u1 - u2)[None])).sum(axis=0)


def moment_map_residual(p: VortexProblem, u1: np.ndarray, u2: np.ndarray) -> tuple:
    g = p.geometry
    phi = section_density(p, u1, u2) / p.sigma
    r1 = p.background1 - g.laplacian(u1) + phi - 2 * math.pi * p.tau1
    r2 = p.background2 - g.laplacian(u2) - p.kappa * phi - 2 * math.pi * p.tau2
    return r1, r2


def energy(p: VortexProblem, u1: np.ndarray, u2: np.ndarray) -> float:
    r1, r2 = moment_map_residual(p, u1, u2)
    return p.geometry.cell_area * float(np.sum(r1 * r1) + np.sum(r2 * r2))


def _apply_jt(p: VortexProblem, c: np.ndarray, r1: np.ndarray, r2: np.ndarray) -> tuple:
    """Transpose Jacobian applied to ``(r1, r2)``; ``c = 2 Phi / sigma``."""
    g = p.geometry
    a = -g.laplacian(r1) + c * r1 - p.kappa * c * r2
    b = -c * r1 - g.laplacian(r2) + p.kappa * c * r2
    return a, b


def energy_gradient(p: VortexProblem, u1: np.ndarray, u2: np.ndarray) -> tuple:
    r1, r2 = moment_map_residual(p, u1, u2)
    c = 2 * section_density(p, u1, u2) / p.sigma
    a, b = _apply_jt(p, c, r1, r2)
    s = 2 * p.geometry.cell_area
    return s * a, s * b


def _jacobian(p: VortexProblem, c: np.ndarray) -> sp.csr_matrix:
    L = -p.geometry.laplacian_matrix
    C = sp.diags(c.ravel())
    return sp.bmat([[L + C, -C], [-p.kappa * C, L + p.kappa * C]], format="csc")


def _newton_direction(p: VortexProblem, c: np.ndarray, r1: np.ndarray, r2: np.ndarray) -> tuple:
    """Solve ``J d = -r`` with a border fixing the gauge mode ``(1, 1)``.

    The left null vector ``(kappa, 1)`` spans the complement of the range;
    its multiplier absorbs any topological inconsistency in ``r``.
    """
    m = r1.size
    J = _jacobian(p, c)
    y = np.concatenate([np.full(m, p.kappa), np.ones(m)])[:, None]
    z = np.ones((1, 2 * m))
    K = sp.bmat([[J, sp.csc_matrix(y)], [sp.csr_matrix(z), None]], format="csc")
    rhs = np.concatenate([-r1.ravel(), -r2.ravel(), [0.0]])
    sol = spla.spsolve(K, rhs)
    if not np.all(np.isfinite(sol)):
        raise FloatingPointError("singular Newton system")
    return sol[:m].reshape(r1.shape), sol[m : 2 * m].reshape(r1.shape)


def _gauge_fix(u1, u2):
    s = 0.5 * (u1.mean() + u2.mean())
    return u1 - s, u2 - s


def initial_guess(p: VortexProblem) -> tuple:
    """Constant potentials that already satisfy both integrated equations."""
    n = p.geometry.n
    u1 = np.zeros((n, n))
    u2 = np.zeros((n, n))
    if p.k_eff:
        need, _, _ = gauss_targets(p)
        mass = p.geometry.integrate(section_density(p, u1, u2)) / p.sigma
        if need > 0 and mass > 0:
            w = 0.5 * math.log(need / mass)
            u1 += w / 2
            u2 -= w / 2
    return u1, u2


def finalize(p: VortexProblem, s: SolverState) -> SolverState:
    """Recompute every reported diagnostic from the potentials alone."""
    g = p.geometry
    r1, r2 = moment_map_residual(p, s.u1, s.u2)
    s.residual_sup = (float(np.abs(r1).max()), float(np.abs(r2).max()))
    s.residual_l2 = (math.sqrt(g.integrate(r1 * r1)), math.sqrt(g.integrate(r2 * r2)))
    s.gauss_gaps = (abs(g.integrate(r1)), abs(g.integrate(r2)))
    s.energy = g.cell_area * float(np.sum(r1 * r1) + np.sum(r2 * r2))
    return s


def solve_split(p: VortexProblem) -> SolverState:
    """No sections: two independent discrete Poisson solves."""
    g = p.geometry
    u1 = g.poisson(p.background1 - 2 * math.pi * p.tau1)
    u2 = g.poisson(p.background2 - 2 * math.pi * p.tau2)
    s = finalize(p, SolverState(u1, u2, iterations=1))
    s.status = "converged"
    s.message = "split case: direct Poisson solves"
    return s


def _armijo(p, u1, u2, d1, d2, e0, slope, alpha, max_halvings=40):
    for _ in range(max_halvings):
        v1, v2 = u1 + alpha * d1, u2 + alpha * d2
        with np.errstate(over="ignore", invalid="ignore"):
            e = energy(p, v1, v2)
        if np.isfinite(e) and e <= e0 + 1e-4 * alpha * slope:
            return v1, v2, e, alpha
        alpha *= 0.5
    return None


def solve(
    p: VortexProblem,
    tol: float = 1e-8,
    max_iter: int = 200,
    method: str = "flow-newton",
    switch_residual: float = 1e-3,
    max_flow: int = 400,
    u0: Optional[tuple] = None,
) -> SolverState:
    """Drive the moment-map residual below ``tol`` in the sup norm.

    ``method``: ``"flow-newton"`` (preconditioned Barzilai-Borwein descent,
    then Newton once the sup residual drops below ``switch_residual`` or the
    flow budget ``max_flow`` is spent), ``"flow"`` or ``"newton"``.
    Infeasible problems return at once with a certificate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("flow-newton", "flow", "newton"):
        raise ValueError(f"unknown method {method!r}")
    g = p.geometry
    n = g.n
    cert = infeasibility_certificate(p)
    if cert is not None:
        s = finalize(p, SolverState(np.zeros((n, n)), np.zeros((n, n))))
        s.status = "infeasible"
        s.certificate = cert
        s.message = cert.message
        return s
    if p.k_eff == 0:
        return solve_split(p)
    u1, u2 = (np.array(u0[0], dtype=float), np.array(u0[1], dtype=float)) if u0 is not None else initial_guess(p)
    s = SolverState(u1, u2)
    e = energy(p, u1, u2)
    phase = "newton" if method == "newton" else "flow"
    prev = None
    alpha = 1.0
    flow_steps = 0
    for it in range(1, max_iter + max_flow + 1):
        r1, r2 = moment_map_residual(p, u1, u2)
        sup = max(np.abs(r1).max(), np.abs(r2).max())
        s.history.append((it - 1, phase, e, float(sup)))
        if sup < tol:
            s.u1, s.u2 = _gauge_fix(u1, u2)
            s.iterations = it - 1
            s.status = "converged"
            return finalize(p, s)
        c = 2 * section_density(p, u1, u2) / p.sigma
        if phase == "flow" and method == "flow-newton" and (sup < switch_residual or flow_steps >= max_flow):
            phase = "newton"
        if phase == "flow":
            if method == "flow" and flow_steps >= max_flow + max_iter:
                break
            a, b = _apply_jt(p, c, r1, r2)
            ga, gb = 2 * g.cell_area * a, 2 * g.cell_area * b
            d1 = -g.shifted_inverse(g.shifted_inverse(ga))
            d2 = -g.shifted_inverse(g.shifted_inverse(gb))
            if prev is not None:
                sx = np.concatenate([(u1 - prev[0]).ravel(), (u2 - prev[1]).ravel()])
                sy = np.concatenate([(ga - prev[2]).ravel(), (gb - prev[3]).ravel()])
                sty = float(sx @ sy)
                if sty > 0:
                    # BB2 step in the preconditioned metric
                    py1 = g.shifted_inverse(g.shifted_inverse(ga - prev[2]))
                    py2 = g.shifted_inverse(g.shifted_inverse(gb - prev[3]))
                    ypy = float(np.sum((ga - prev[2]) * py1) + np.sum((gb - prev[3]) * py2))
                    alpha = min(max(sty / ypy, 1e-8), 1e8) if ypy > 0 else alpha
            slope = float(np.sum(ga * d1) + np.sum(gb * d2))
            prev = (u1, u2, ga, gb)
            step = _armijo(p, u1, u2, d1, d2, e, slope, alpha)
            flow_steps += 1
        else:
            try:
                d1, d2 = _newton_direction(p, c, r1, r2)
            except (FloatingPointError, RuntimeError) as exc:
                s.u1, s.u2, s.iterations, s.status = u1, u2, it - 1, "not-converged"
                s.message = f"Newton system failed: {exc}"
                return finalize(p, s)
            step = _armijo(p, u1, u2, d1, d2, e, -2 * e, 1.0)
        if step is None:
            s.u1, s.u2, s.iterations, s.status = u1, u2, it - 1, "diverged"
            s.message = f"line search could not decrease the energy in the {phase} phase"
            return finalize(p, s)
        u1, u2, e_new, used = step
        if e_new > e:
            s.u1, s.u2, s.iterations, s.status = u1, u2, it, "diverged"
            s.message = "energy increased across a safeguarded step"
            return finalize(p, s)
        e = e_new
        if phase == "flow":
            alpha = used
    s.u1, s.u2 = _gauge_fix(u1, u2)
    s.iterations = max_iter + max_flow
    s.status = "not-converged"
    s.message = "iteration budget exhausted"
    return finalize(p, s)


@dataclass(frozen=True)
class DegenerationReport:
    eps: tuple
    distances: tuple
    rates: tuple
    split_residual: float
    statuses: tuple
    monotone: bool

    def as_dict(self) -> dict:
        return {
            "eps": list(self.eps),
            "distances": list(self.distances),
            "rates": list(self.rates),
            "split_residual": self.split_residual,
            "statuses": list(self.statuses),
            "monotone": self.monotone,
        }


def split_distance(p: VortexProblem, s: SolverState, split: SolverState) -> float:
    """Sup distance of the potentials to the split solution, modulo constants."""
    d1 = (s.u1 - s.u1.mean()) - (split.u1 - split.u1.mean())
    d2 = (s.u2 - s.u2.mean()) - (split.u2 - split.u2.mean())
    return float(max(np.abs(d1).max(), np.abs(d2).max()))


def degeneration_check(p: VortexProblem, eps=(1.0, 0.5, 0.25, 0.125), tol: float = 1e-10) -> DegenerationReport:
    """Solve the ``eps``-scaled family and measure convergence to the ``eps = 0`` solution."""
    split = solve_split(p.scaled(0.0))
    dists, statuses = [], []
    for e in eps:
        s = solve(p.scaled(e), tol=tol)
        statuses.append(s.status)
        dists.append(split_distance(p, s, split) if s.converged else math.inf)
    rates = tuple(
        math.log(dists[i] / dists[i + 1]) / math.log(eps[i] / eps[i + 1]) if dists[i + 1] > 0 and math.isfinite(dists[i]) else math.nan
        for i in range(len(eps) - 1)
    )
    mono = all(dists[i + 1] < dists[i] for i in range(len(dists) - 1))
    return DegenerationReport(tuple(eps), tuple(dists), rates, split.sup_residual, tuple(statuses), mono)


def write_history_csv(s: SolverState, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "phase", "energy", "sup_residual"])
        for row in s.history:
            w.writerow([row[0], row[1], repr(row[2]), repr(row[3])])


def write_potentials_csv(p: VortexProblem, s: SolverState, path) -> None:
    x, y = p.geometry.coords
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "u1", "u2"])
        for row in zip(x.ravel(), y.ravel(), s.u1.ravel(), s.u2.ravel()):
            w.writerow([repr(float(v)) for v in row])

"""End-to-end orchestration: BBW, calibration, plan, solve, fiber checks, sweeps."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .config import PipelineConfig
from .fiber import FiberChart, build_harmonic_basis, verify_reduction_identity
from .flag import (
    bbw_cohomology,
    canonical_weight,
    dual_module,
    fiber_dimension,
    format_weight,
    hom_bundle_cohomology,
    module_cohomology,
)
from .plan import BaseBundle, ReductionPlan, build_reduction_plan, torus_h0
from .report import Report, exact, measured
from .vortex import BaseGeometry, assemble_problem, solve, write_history_csv, write_potentials_csv

THREADS_ENV = "FLAGVORTEX_THREADS"

FIBER_TOLERANCES = {
    "pointwise1": 1e-6,
    "pointwise2": 1e-6,
    "phi1": 1e-6,
    "phi2": 1e-6,
    "perturbation": 1e-8,
    "orthonormality": 1e-8,
    "harmonicity": 1e-6,
    "dbar_star_beta": 1e-6,
}


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def base_bundles(cfg: PipelineConfig) -> tuple:
    b = cfg.base
    w1 = BaseBundle("W1", b.rank1, b.degree1)
    w2 = BaseBundle("W2", b.rank2, b.degree2)
    if b.h0_dim is not None:
        h0 = b.h0_dim
    elif b.mode == "torus":
        h0 = torus_h0(b.degree1, b.degree2)
    else:
        h0 = 0
    return w1, w2, h0


def make_plan(cfg: PipelineConfig, sigma=None) -> ReductionPlan:
    w1, w2, h0 = base_bundles(cfg)
    phi_count = len(cfg.base.divisors) if cfg.base.mode == "torus" else None
    return build_reduction_plan(
        cfg.rho1,
        cfg.rho2,
        cfg.kahler,
        w1,
        w2,
        cfg.sigma if sigma is None else sigma,
        volume=cfg.base.volume,
        phi_count=phi_count,
        h0_dim=h0,
    )


def _cohomology_section(cfg: PipelineConfig) -> dict:
    d = cfg.diagram
    out = {
        "diagram": str(d),
        "fiber_dimension": fiber_dimension(d),
        "canonical_weight": format_weight(canonical_weight(d)),
        "modules": [],
    }
    for label, mods in (("rho1", cfg.rho1), ("rho2", cfg.rho2)):
        for m in mods:
            dual = dual_module(m)
            out["modules"].append(
                {
                    "role": label,
                    "weight": format_weight(m.highest_weight),
                    "rank": m.rank,
                    "cohomology": bbw_cohomology(m).as_dict(),
                    "dual_weight": format_weight(dual.highest_weight),
                    "dual_cohomology": bbw_cohomology(dual).as_dict(),
                }
            )
    out["hom_V2_V1"] = hom_bundle_cohomology(cfg.rho1, cfg.rho2).as_dict()
    out["rho1_total"] = module_cohomology(cfg.rho1).as_dict()
    return out


def _calibration_section(plan: ReductionPlan) -> dict:
    c = plan.calibration
    return {
        "mu_rho": exact(c.mu_rho),
        "mu_rho1": exact(plan.mu_rho1),
        "mu_rho2": exact(plan.mu_rho2),
        "calibrated": c.calibrated,
        "h0_vanishes": c.h0_vanishes,
        "consistent": c.consistent,
        "findings": list(c.findings),
    }


def _plan_section(plan: ReductionPlan, cfg: PipelineConfig) -> dict:
    p = plan.params
    return {
        "k": plan.k,
        "r_V1": plan.r_V1,
        "r_V2": plan.r_V2,
        "coupling_ratio": exact(plan.coupling_ratio),
        "sigma": exact(plan.sigma),
        "volume": exact(plan.volume),
        "lambda_slope": exact(p.lambda_slope),
        "tau1": exact(p.tau1),
        "tau2": exact(p.tau2),
        "mu_sigma_E1": exact(p.mu_sigma_E1),
        "mu_sigma_E2": exact(p.mu_sigma_E2),
        "window": plan.window.as_dict(),
        "sigma_position": plan.window.classify(plan.sigma) if plan.window.status == "ok" else "unknown",
        "phi_count": plan.phi_count,
        "ext1_dimension": plan.ext1,
        "invariant_case": {"invariant": plan.invariant.invariant, "k_invariant": plan.invariant.k_invariant, "reason": plan.invariant.reason},
        "findings": list(plan.findings),
    }


def _solve_one(cfg: PipelineConfig, sigma, tol=None, grid=None):
    plan = make_plan(cfg, sigma)
    g = BaseGeometry(cfg.base.periods, grid or cfg.solver.grid)
    prob = assemble_problem(plan, g, cfg.base.divisors, cfg.base.amplitudes)
    state = solve(prob, tol=tol or cfg.solver.tol, max_iter=cfg.solver.max_iter, method=cfg.solver.method)
    return plan, prob, state


def _solver_section(prob, state, tol: float) -> dict:
    return {
        "problem": prob.as_dict(),
        "status": state.status,
        "iterations": state.iterations,
        "residual_sup": [measured(x, tol) for x in state.residual_sup],
        "residual_l2": [measured(x, tol * math.sqrt(prob.geometry.area)) for x in state.residual_l2],
        "gauss_gaps": [measured(x, 1e-6 * prob.geometry.area) for x in state.gauss_gaps],
        "energy": measured(state.energy, tol * tol * prob.geometry.area * 2),
        "certificate": None if state.certificate is None else state.certificate.as_dict(),
        "message": state.message,
        "findings": list(prob.findings),
    }


def verify_fiber(cfg: PipelineConfig) -> tuple:
    """Fiber-level identity checks with seeded random section coefficients."""
    fc = cfg.fiber_check
    rng = np.random.default_rng(cfg.seed)
    rows, findings = [], []
    for k in fc.k_values:
        basis = build_harmonic_basis(FiberChart(k, fc.n))
        if basis.dim == 0:
            rows.append({"k": k, "dim": 0})
            continue
        shape = (basis.dim,) + tuple(fc.shape)
        for s in fc.sigmas:
            phis = rng.normal(size=shape) + 1j * rng.normal(size=shape)
            rep = verify_reduction_identity(phis, basis, float(s)).as_dict()
            row = {"k": k, "dim": basis.dim, "sigma": exact(s), "positive": rep["positive"]}
            for key, tol in FIBER_TOLERANCES.items():
                row[key] = measured(rep[key], tol)
                if not rep[key] < tol:
                    findings.append(f"fiber check k={k} sigma={s}: {key} = {rep[key]:.3e} exceeds {tol:g}")
            if not rep["positive"]:
                findings.append(f"fiber check k={k} sigma={s}: positivity failed")
            rows.append(row)
    return rows, findings


@dataclass(frozen=True)
class SweepRow:
    sigma: Fraction
    tau1: Fraction
    tau2: Fraction
    window_position: str
    feasible: Optional[bool]
    status: str
    residual: Optional[float]
    certificate: Optional[str]

    def as_dict(self, tol: float) -> dict:
        return {
            "sigma": exact(self.sigma),
            "tau1": exact(self.tau1),
            "tau2": exact(self.tau2),
            "window_position": self.window_position,
            "feasible": self.feasible,
            "status": self.status,
            "residual": None if self.residual is None else measured(self.residual, tol),
            "certificate": self.certificate,
        }


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    window: object
    brackets: tuple  # ((last_in, first_out) or (first_in, last_out) around each observed switch)
    agrees: bool

    def as_dict(self, tol: float) -> dict:
        return {
            "rows": [r.as_dict(tol) for r in self.rows],
            "window": self.window.as_dict(),
            "brackets": [[exact(a), exact(b)] for a, b in self.brackets],
            "agrees_with_window": self.agrees,
        }


def _sweep_point(cfg: PipelineConfig, sigma: Fraction) -> SweepRow:
    plan = make_plan(cfg, sigma)
    pos = plan.window.classify(sigma) if plan.window.status == "ok" else "unknown"
    if cfg.exact_only:
        feasible = None if pos in ("boundary", "unknown") else pos == "interior"
        return SweepRow(sigma, plan.tau1, plan.tau2, pos, feasible, "not-solved", None, None)
    _, _, state = _solve_one(cfg, sigma)
    cert = state.certificate.kind if state.certificate else None
    feasible = True if state.converged else (False if state.status == "infeasible" else None)
    return SweepRow(sigma, plan.tau1, plan.tau2, pos, feasible, state.status, None if cert else state.sup_residual, cert)


def sweep_sigma(cfg: PipelineConfig, threads: Optional[int] = None) -> SweepTable:
    """Evaluate the plan (and the solver, for torus bases) along the sigma grid.

    Points are independent and run on a thread pool; the table keeps grid order.
    """
    if cfg.sweep is None:
        raise ValueError("configuration has no [sigma.sweep] range")
    grid = cfg.sweep.grid()
    n = threads or thread_count()
    if n == 1:
        rows = [_sweep_point(cfg, s) for s in grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            rows = list(ex.map(lambda s: _sweep_point(cfg, s), grid))
    window = make_plan(cfg, grid[0]).window
    brackets = []
    for a, b in zip(rows, rows[1:]):
        if a.feasible is not None and b.feasible is not None and a.feasible != b.feasible:
            brackets.append((a.sigma, b.sigma))
    agrees = True
    if window.status == "ok":
        for r in rows:
            if r.window_position == "boundary":
                continue
            if r.feasible is not None and r.feasible != (r.window_position == "interior"):
                agrees = False
        ends = [e for e in (window.lo if window.lo > 0 else None, window.hi) if e is not None and grid[0] < e < grid[-1]]
        for e in ends:
            if not any(a <= e <= b for a, b in brackets) and not any(r.sigma == e for r in rows):
                agrees = False
    return SweepTable(tuple(rows), window, tuple(brackets), agrees)


def run_pipeline(cfg: PipelineConfig, stages=None) -> Report:
    stages = tuple(stages) if stages is not None else cfg.stages
    findings, errors = [], []
    sections = {}
    if "bbw" in stages:
        sections["cohomology"] = _cohomology_section(cfg)
    plan = None
    if any(s in stages for s in ("calibrate", "plan", "solve")):
        plan = make_plan(cfg)
        sections["calibration"] = _calibration_section(plan)
        findings.extend(plan.calibration.findings)
    if plan is not None and "plan" in stages:
        sections["plan"] = _plan_section(plan, cfg)
        findings.extend(f for f in plan.findings if f not in plan.calibration.findings)
    if "solve" in stages and not cfg.exact_only:
        try:
            _, prob, state = _solve_one(cfg, cfg.sigma)
            sections["solver"] = _solver_section(prob, state, cfg.solver.tol)
            if "history_csv" in cfg.outputs:
                write_history_csv(state, cfg.outputs["history_csv"])
            if "potentials_csv" in cfg.outputs:
                write_potentials_csv(prob, state, cfg.outputs["potentials_csv"])
            findings.extend(f for f in prob.findings if "outside the solvable range" not in f)
            if state.status in ("not-converged", "diverged"):
                findings.append(f"solver {state.status}: {state.message}")
        except ValueError as e:
            errors.append(f"solve: {e}")
    if "verify-fiber" in stages:
        rows, fnd = verify_fiber(cfg)
        sections["fiber_verification"] = {"n": cfg.fiber_check.n, "checks": rows}
        findings.extend(fnd)
    if cfg.sweep is not None and "sweep" in (stages or ()):
        table = sweep_sigma(cfg)
        sections["sweep"] = table.as_dict(cfg.solver.tol)
        if not table.agrees:
            findings.append("sweep feasibility disagrees with the closed-form sigma window")
    provenance = {"config_sha256": cfg.digest(), "version": __version__, "seed": cfg.seed, "config": cfg.name}
    return Report(sections=sections, findings=tuple(findings), errors=tuple(errors), provenance=provenance)

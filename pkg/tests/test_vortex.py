import csv
import math
from importlib.resources import files

import numpy as np
import pytest
from scipy.optimize import newton_krylov

from flagvortex.config import load_config
from flagvortex.pipeline import make_plan
from flagvortex.vortex import (
    BaseGeometry,
    VortexProblem,
    assemble_problem,
    degeneration_check,
    energy,
    energy_gradient,
    gauss_targets,
    infeasibility_certificate,
    moment_map_residual,
    section_density,
    section_potential,
    solve,
    solve_split,
    write_history_csv,
    write_potentials_csv,
)

EXAMPLES = files("flagvortex") / "examples"


def _vortex_problem(n=32, sigma=2, divisors=None):
    cfg = load_config(EXAMPLES / "torus_single_vortex.toml")
    plan = make_plan(cfg, sigma)
    g = BaseGeometry(cfg.base.periods, n)
    return assemble_problem(plan, g, divisors or [[(n // 2, n // 2, 1)]])


@pytest.fixture(scope="module")
def vortex():
    p = _vortex_problem()
    return p, solve(p, tol=1e-10)


def _smooth_problem(n, kappa=1.0):
    """Zero-degree bundles with one nowhere-vanishing smooth section."""
    g = BaseGeometry((1.0, 1.0), n)
    x, y = g.coords
    v = 0.3 * np.cos(2 * np.pi * x) + 0.2 * np.sin(2 * np.pi * y) * np.cos(2 * np.pi * x)
    tau1 = 0.25
    return VortexProblem(g, 0, 0, sigma=1.0, tau1=tau1, tau2=-kappa * tau1, kappa=kappa, log_sections=v[None])


def test_gauss_identity_is_exact_on_the_grid(vortex):
    p, _ = vortex
    rng = np.random.default_rng(0)
    u1, u2 = rng.normal(size=(2, p.geometry.n, p.geometry.n))
    r1, r2 = moment_map_residual(p, u1, u2)
    g = p.geometry
    mass = g.integrate(section_density(p, u1, u2)) / p.sigma
    need1, need2, _ = gauss_targets(p)
    assert abs(g.integrate(r1) - (mass - need1)) < 1e-9
    assert abs(g.integrate(r2) - (need2 - mass) * p.kappa) < 1e-9


def test_residual_is_gauge_invariant(vortex):
    p, s = vortex
    a = moment_map_residual(p, s.u1, s.u2)
    b = moment_map_residual(p, s.u1 + 3.7, s.u2 + 3.7)
    assert max(np.abs(a[0] - b[0]).max(), np.abs(a[1] - b[1]).max()) < 1e-12


def test_section_mass_increases_with_u1(vortex):
    p, s = vortex
    masses = [p.geometry.integrate(section_density(p, s.u1 + t, s.u2)) for t in (-1.0, -0.5, 0.0, 0.5)]
    assert all(b > a for a, b in zip(masses, masses[1:]))


def test_energy_gradient_matches_finite_differences():
    p = _vortex_problem(16)
    rng = np.random.default_rng(1)
    u1, u2 = 0.1 * rng.normal(size=(2, 16, 16))
    d1, d2 = rng.normal(size=(2, 16, 16))
    g1, g2 = energy_gradient(p, u1, u2)
    h = 1e-6
    fd = (energy(p, u1 + h * d1, u2 + h * d2) - energy(p, u1 - h * d1, u2 - h * d2)) / (2 * h)
    an = float(np.sum(g1 * d1) + np.sum(g2 * d2))
    assert abs(fd - an) < 1e-6 * max(1.0, abs(an))


def test_single_vortex_converges(vortex):
    p, s = vortex
    assert s.status == "converged"
    assert s.sup_residual < 1e-10
    assert max(s.gauss_gaps) < 1e-8
    # the section vanishes only at the divisor point
    phi = section_density(p, s.u1, s.u2)
    assert np.unravel_index(np.argmin(phi), phi.shape) == (16, 16)


def test_newton_only_agrees_with_flow_newton(vortex):
    p, s = vortex
    t = solve(p, tol=1e-10, method="newton")
    assert t.converged
    assert np.abs((t.u1 - t.u2) - (s.u1 - s.u2)).max() < 1e-8


def _laplacian(u, h):
    return (np.roll(u, 1, 0) + np.roll(u, -1, 0) + np.roll(u, 1, 1) + np.roll(u, -1, 1) - 4 * u) / h**2


def test_against_scalar_taubes_reduction():
    # u1 - u2 obeys one scalar equation, solved here by a generic Krylov method
    kappa = 2.0
    cfg = load_config(EXAMPLES / "torus_single_vortex.toml")
    n = 24
    g = BaseGeometry(cfg.base.periods, n)
    p0 = assemble_problem(make_plan(cfg, 2), g, [[(5, 7, 1)]])
    need = 2 * math.pi * (p0.tau1 * g.area - p0.d1)
    tau2 = (p0.d2 - kappa * need / (2 * math.pi)) / g.area
    p = VortexProblem(g, p0.d1, p0.d2, p0.sigma, p0.tau1, tau2, kappa, p0.log_sections, p0.background1, p0.background2)
    s = solve(p, tol=1e-11)
    assert s.converged
    h = g.spacing[0]
    v = p.log_sections[0]
    b = 2 * math.pi * (p.tau1 - p.tau2) - (p.background1 - p.background2)

    def F(w):
        return -_laplacian(w, h) + (1 + kappa) / p.sigma * np.exp(2 * (v + w)) - b

    w = newton_krylov(F, np.zeros((n, n)), f_tol=1e-12, maxiter=200)
    assert np.abs(w - (s.u1 - s.u2)).max() < 1e-6


def test_mesh_convergence_is_second_order():
    sols = {}
    for n in (16, 32, 64, 128):
        s = solve(_smooth_problem(n), tol=1e-9)
        assert s.converged
        sols[n] = s.u1 - s.u2
    # successive differences on the coarse points shrink by h^2
    diffs = [np.abs(sols[n] - sols[2 * n][::2, ::2]).max() for n in (16, 32, 64)]
    ratios = [a / b for a, b in zip(diffs, diffs[1:])]
    assert all(3.6 < r < 4.4 for r in ratios), ratios


def test_split_case_with_non_constant_background():
    g = BaseGeometry((2.0, 1.0), 32)
    x, y = g.coords
    f1 = 2 * math.pi * 3 / g.area + np.cos(math.pi * x) * np.sin(2 * math.pi * y)
    f2 = np.full_like(f1, -2 * math.pi / g.area)
    p = VortexProblem(g, 3, -1, 1.0, 3 / g.area, -1 / g.area, background1=f1, background2=f2)
    s = solve(p)
    assert s.status == "converged" and s.sup_residual < 1e-10
    assert s.message.startswith("split")


def test_background_must_match_degree():
    g = BaseGeometry((1.0, 1.0), 8)
    with pytest.raises(ValueError, match="integrate"):
        VortexProblem(g, 1, 0, 1.0, 1.0, 0.0, background1=np.zeros((8, 8)))
    with pytest.raises(ValueError):
        VortexProblem(g, 1, 0, 0.0, 1.0, 0.0)


def test_certificates():
    g = BaseGeometry((1.0, 1.0), 8)
    c = infeasibility_certificate(VortexProblem(g, 1, 0, 1.0, 2.0, -1.0))
    assert c.kind == "split-mismatch"
    c = infeasibility_certificate(VortexProblem(g, 1, 0, 1.0, 2.0, 0.5))
    assert c.kind == "gauss-consistency"
    ls = np.zeros((1, 8, 8))
    c = infeasibility_certificate(VortexProblem(g, 1, 0, 1.0, 0.5, 0.5, log_sections=ls))
    assert c.kind == "integral-inequality" and c.value < 0
    assert infeasibility_certificate(VortexProblem(g, 1, 0, 1.0, 1.5, -0.5, log_sections=ls)) is None


@pytest.mark.parametrize("sigma", [8, 9])
def test_outside_window_returns_certificate(sigma):
    p = _vortex_problem(16, sigma=sigma)
    assert p.findings
    s = solve(p)
    assert s.status == "infeasible" and s.certificate.kind == "integral-inequality"


def test_divisor_degree_checked():
    cfg = load_config(EXAMPLES / "torus_single_vortex.toml")
    g = BaseGeometry(cfg.base.periods, 16)
    with pytest.raises(ValueError, match="degree"):
        assemble_problem(make_plan(cfg), g, [[(1, 1, 2)]])
    with pytest.raises(ValueError, match="volume"):
        assemble_problem(make_plan(cfg), BaseGeometry((1, 1), 16), [[(1, 1)]])
    with pytest.raises(ValueError, match="degree"):
        section_potential(g, [(1, 1, 1)], np.zeros((16, 16)))


def test_degeneration_family_approaches_split_solution():
    rep = degeneration_check(_vortex_problem(32))
    assert rep.monotone
    assert all(s == "converged" for s in rep.statuses)
    assert rep.split_residual < 1e-10
    assert 1.8 < rep.rates[-1] < 2.2


def test_split_solution_of_zero_scaling():
    p = _vortex_problem(16).scaled(0.0)
    assert p.k_eff == 0
    assert infeasibility_certificate(p) is None
    assert solve_split(p).sup_residual < 1e-10


def test_csv_dumps(vortex, tmp_path):
    p, s = vortex
    write_history_csv(s, tmp_path / "h.csv")
    write_potentials_csv(p, s, tmp_path / "u.csv")
    with open(tmp_path / "h.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == s.iterations + 1
    assert float(rows[-1]["sup_residual"]) < 1e-10
    with open(tmp_path / "u.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == p.geometry.n**2
    assert float(rows[0]["u1"]) == float(s.u1[0, 0])


def test_solver_rejects_bad_options(vortex):
    p, _ = vortex
    with pytest.raises(ValueError):
        solve(p, tol=0)
    with pytest.raises(ValueError):
        solve(p, method="bfgs")

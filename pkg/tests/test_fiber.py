import numpy as np
import pytest

from flagvortex.fiber import (
    VOLUME,
    FiberChart,
    build_harmonic_basis,
    candidate_forms,
    fiber_integrate,
    harmonic_residual,
    lambda_maps,
    lambda_sigma_direct,
    lambda_sigma_terms,
    pointwise_products,
    perturbation_terms,
    verify_reduction_identity,
)
from oracles import cech_cp1


@pytest.fixture(scope="module")
def basis3():
    return build_harmonic_basis(FiberChart(3, 64))


def test_quadrature_volume():
    for n in (16, 64, 128):
        c = FiberChart(2, n)
        assert abs(c.weights.sum() - VOLUME) < 1e-10
        assert abs(fiber_integrate(c, np.ones(c.weights.shape)) - 1) < 1e-12


def test_quadrature_against_closed_form():
    # average of |z|^2/(1+|z|^2) over the round sphere is 1/2
    c = FiberChart(2, 64)
    r2 = np.abs(c.coords) ** 2
    f = np.stack([r2[0] / (1 + r2[0]), 1 / (1 + r2[1])])
    assert abs(fiber_integrate(c, f) - 0.5) < 1e-12


@pytest.mark.parametrize("k", range(1, 9))
def test_basis_dimension_matches_cech(k):
    b = build_harmonic_basis(FiberChart(k, 48))
    assert b.dim == cech_cp1(-k)[1] == max(k - 1, 0)
    if b.dim:
        assert b.orthonormality_error < 1e-8
        assert b.residuals.max() < 1e-6


def test_non_harmonic_form_detected():
    c = FiberChart(3, 64)
    z = c.coords
    f = np.conj(z) * (1 + np.abs(z) ** 2) ** -2  # wrong weight: not dbar*-closed
    assert harmonic_residual(c, f[None])[0] > 1e-2


def test_chart_transport_preserves_pointwise_norm():
    # |eta_m|^2 = r^(2m) (1 + r^2)^(2 - k) / 2 in the z coordinate, a global function
    k = 4
    c = FiberChart(k, 24)
    norms = np.einsum("ii...->i...", pointwise_products(c, candidate_forms(c))).real
    rz = 1.0 / c.r[:, None] * np.ones(c.n_theta)
    for m in range(k - 1):
        far = rz ** (2 * m) * (1 + rz**2) ** (2 - k) / 2
        near = (c.r[:, None] ** (2 * m) * (1 + c.r[:, None] ** 2) ** (2 - k) / 2) * np.ones(c.n_theta)
        assert np.allclose(norms[m, 0], near, rtol=1e-12)
        assert np.allclose(norms[m, 1], far, rtol=1e-12)


def test_gram_stability_under_refinement():
    def raw_gram(n):
        c = FiberChart(5, n)
        return c.integrate(pointwise_products(c, candidate_forms(c)))

    ref = raw_gram(128)
    gaps = [np.abs(raw_gram(n) - ref).max() for n in (4, 8, 16, 32)]
    assert gaps[-1] < 1e-12
    assert all(b <= a + 1e-14 for a, b in zip(gaps, gaps[1:]))
    for n in (8, 16, 32):
        assert build_harmonic_basis(FiberChart(5, n)).orthonormality_error < 1e-12


def test_lambda_diagonal_integrals_are_one(basis3):
    lam = lambda_maps(basis3)
    assert np.allclose(lam.lambda1_integral, np.eye(basis3.dim), atol=1e-12)
    assert np.allclose(lam.lambda2_integral, np.eye(basis3.dim), atol=1e-12)


def test_lambda_conjugate_symmetry(basis3):
    lam = lambda_maps(basis3)
    rng = np.random.default_rng(3)
    xi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    for apply in (lam.apply1, lam.apply2):
        assert np.abs(np.conj(apply(xi)) - apply(np.conj(xi.T))).max() < 1e-8
    assert np.abs(lam.apply1(np.zeros((2, 2)))).max() == 0


def test_lambda_maps_reject_empty():
    with pytest.raises(ValueError):
        lambda_maps(build_harmonic_basis(FiberChart(1, 8)))


def test_fiber_integrate_rejects_nan():
    c = FiberChart(2, 8)
    f = np.ones(c.weights.shape)
    f[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        fiber_integrate(c, f)


def test_fiber_integrate_traceless_is_zero():
    c = FiberChart(2, 16)
    f = np.zeros((2, 2) + c.weights.shape)
    f[0, 0] = c.g
    f[1, 1] = -c.g
    assert np.abs(np.trace(fiber_integrate(c, f))) < 1e-14


def test_perturbation_terms(basis3):
    zero = perturbation_terms(np.zeros(2), basis3, 1.0)
    assert np.abs(zero.d1).max() == 0 and np.abs(zero.d2).max() == 0
    rng = np.random.default_rng(5)
    phis = rng.normal(size=(2, 2, 3)) + 1j * rng.normal(size=(2, 2, 3))
    t = perturbation_terms(phis, basis3, 0.5)
    assert np.abs(t.d1_integral).max() < 1e-8 and np.abs(t.d2_integral).max() < 1e-8
    c = 1.5 - 2j
    t2 = perturbation_terms(c * phis, basis3, 0.5)
    assert np.allclose(t2.d1, abs(c) ** 2 * t.d1, atol=1e-12)
    assert np.allclose(t2.d2, abs(c) ** 2 * t.d2, atol=1e-12)
    with pytest.raises(ValueError):
        perturbation_terms(phis, basis3, 0.0)


def test_perturbation_traces_shrink_with_refinement():
    vals = []
    for n in (6, 12, 48):
        b = build_harmonic_basis(FiberChart(2, n))
        vals.append(np.abs(perturbation_terms(np.array([1.0]), b, 1.0).d1_integral).max())
    assert vals[-1] < 1e-12 and vals[0] > vals[1]


def test_single_section_k2():
    b = build_harmonic_basis(FiberChart(2, 128))
    rep = verify_reduction_identity(np.array([0.7 - 0.2j]), b, 1.0)
    # (1/i) * fiber average of Lambda(beta ^ beta*) equals |phi|^2
    assert rep.phi1 < 1e-6 and rep.phi2 < 1e-6
    a, _ = lambda_sigma_direct(np.array([0.7 - 0.2j]), b, 1.0)
    assert abs(fiber_integrate(b.chart, a)[0, 0] / 1j - abs(0.7 - 0.2j) ** 2) < 1e-6


def test_beta_zero_gives_zero():
    b = build_harmonic_basis(FiberChart(3, 32))
    rep = verify_reduction_identity(np.zeros(2), b, 1.0)
    d = rep.as_dict()
    assert all(d[k] == 0 for k in ("pointwise1", "pointwise2", "phi1", "phi2", "perturbation", "dbar_star_beta"))
    assert rep.positive


def test_phi_additive_over_orthogonal_sections(basis3):
    p1 = np.array([1.0 + 0j, 0.0])
    p2 = np.array([0.0, 2.0 + 1j])
    a1, _ = lambda_sigma_direct(p1, basis3, 1.0)
    a2, _ = lambda_sigma_direct(p2, basis3, 1.0)
    a12, _ = lambda_sigma_direct(p1 + p2, basis3, 1.0)
    c = basis3.chart
    assert abs(fiber_integrate(c, a12) - fiber_integrate(c, a1) - fiber_integrate(c, a2)).max() < 1e-12


@pytest.mark.parametrize("sigma", [0.5, 1.0, 4.0])
def test_reduction_identities_matrix_sections(basis3, sigma):
    rng = np.random.default_rng(11)
    phis = rng.normal(size=(2, 3, 2)) + 1j * rng.normal(size=(2, 3, 2))
    rep = verify_reduction_identity(phis, basis3, sigma)
    assert rep.pointwise1 < 1e-6 and rep.pointwise2 < 1e-6
    assert rep.phi1 < 1e-6 and rep.phi2 < 1e-6
    assert rep.perturbation < 1e-8
    assert rep.dbar_star_beta < 1e-6
    assert rep.positive


def test_lambda_route_equals_direct_route(basis3):
    rng = np.random.default_rng(2)
    phis = rng.normal(size=(2, 1, 1)) + 1j * rng.normal(size=(2, 1, 1))
    a, b = lambda_sigma_terms(phis, lambda_maps(basis3), 2.0)
    ad, bd = lambda_sigma_direct(phis, basis3, 2.0)
    assert np.abs(a - ad).max() < 1e-12 and np.abs(b - bd).max() < 1e-12


def test_wrong_number_of_sections_rejected(basis3):
    with pytest.raises(ValueError):
        verify_reduction_identity(np.ones(3), basis3, 1.0)

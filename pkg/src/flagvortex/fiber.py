"""Numerical Dolbeault calculus on the fiber CP^1 for the bundle O(-k).

The sphere is covered by two closed unit disks, ``|z| <= 1`` and
``|w| <= 1`` with ``w = 1/z``.  Each disk carries a polar tensor rule:
Gauss-Legendre in the radius and the periodic trapezoid rule in the angle,
so smooth integrands converge spectrally.  The metric is the round
Fubini-Study metric ``4 |dz|^2 / (1 + |z|^2)^2`` (volume ``4 pi``), and O(-k)
carries the invariant metric with ``|e|^2 = (1 + |z|^2)^k`` in either chart.

A (0,1)-form with values in O(-k) is stored chart-wise as the coefficient
``f`` of ``dz_bar (x) e``; arrays have trailing shape ``(2, n_r, n_theta)``.
Conventions: ``omega = (i/2) g dz ^ dz_bar``, so ``|dz_bar|^2 = 2/g`` and
``Lambda(dz_bar ^ dz) = 2i/g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

VOLUME = 4 * np.pi


def _bary_diff_matrix(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Spectral differentiation matrix on Gauss-Legendre nodes ``x`` in [-1, 1]."""
    bw = (-1.0) ** np.arange(len(x)) * np.sqrt((1 - x**2) * w)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D = (bw[None, :] / bw[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class FiberChart:
    """Quadrature grid on CP^1 together with the twist ``k`` of O(-k)."""

    k: int
    n: int = 128
    n_theta: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 radial nodes per chart")
        if self.n_theta == 0:
            object.__setattr__(self, "n_theta", self.n)

    @cached_property
    def _radial(self):
        x, w = np.polynomial.legendre.leggauss(self.n)
        return (x + 1) / 2, w / 2, 2 * _bary_diff_matrix(x, w)

    @property
    def r(self) -> np.ndarray:
        return self._radial[0]

    @cached_property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    @cached_property
    def coords(self) -> np.ndarray:
        """Local coordinate (z in chart 0, w in chart 1) of each node, shape (2, n, m)."""
        u = self.r[:, None] * np.exp(1j * self.theta[None, :])
        return np.stack([u, u])

    @cached_property
    def g(self) -> np.ndarray:
        """Conformal factor of the round metric in the local coordinate."""
        rr = np.abs(self.coords) ** 2
        return 4.0 / (1.0 + rr) ** 2

    @cached_property
    def h(self) -> np.ndarray:
        """Squared norm of the local frame of O(-k)."""
        return (1.0 + np.abs(self.coords) ** 2) ** self.k

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights for ``dvol``: the two disks partition the sphere."""
        _, wr, _ = self._radial
        base = (self.r * wr)[:, None] * np.full(self.n_theta, 2 * np.pi / self.n_theta)[None, :]
        return np.stack([base, base]) * self.g

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Normalised fiber average ``(1/Vol) int f dvol`` over the trailing grid axes."""
        return np.tensordot(f, self.weights, axes=3) / VOLUME

    def d_dz(self, F: np.ndarray) -> np.ndarray:
        """Spectral ``d/dz`` of chart-wise samples (trailing shape (2, n, m))."""
        D = self._radial[2]
        dr = np.einsum("ij,...cjm->...cim", D, F)
        m = self.n_theta
        kk = np.fft.fftfreq(m, 1.0 / m)
        if m % 2 == 0:
            kk[m // 2] = 0.0
        dth = np.fft.ifft(1j * kk * np.fft.fft(F, axis=-1), axis=-1)
        r = self.r[:, None]
        phase = np.exp(-1j * self.theta)[None, :]
        return 0.5 * phase * (dr - 1j * dth / r)


def candidate_forms(chart: FiberChart) -> np.ndarray:
    """Coefficients of ``z_bar^m (1+|z|^2)^{-k} dz_bar (x) e``, m = 0..k-2.

    Evaluated from the closed form in chart 0 and carried to chart 1 through
    ``e_0 = z^k e_1`` and ``dz_bar = -dw_bar / w_bar^2``.
    """
    k = chart.k
    if k < 2:
        return np.zeros((0, 2, chart.n, chart.n_theta), dtype=complex)
    z = chart.coords[0]
    w = chart.coords[1]
    zw = 1.0 / w
    out = []
    for m in range(k - 1):
        f0 = np.conj(z) ** m * (1 + np.abs(z) ** 2) ** (-k)
        f0_far = np.conj(zw) ** m * (1 + np.abs(zw) ** 2) ** (-k)
        f1 = -f0_far * w ** (-k) * np.conj(w) ** (-2)
        out.append(np.stack([f0, f1]))
    return np.array(out)


def pointwise_products(chart: FiberChart, f: np.ndarray, g_: np.ndarray = None) -> np.ndarray:
    """``<eta_i, eta_j>`` at each node for coefficient stacks ``f`` (and ``g_``)."""
    if g_ is None:
        g_ = f
    return 2 * chart.h / chart.g * np.einsum("i...,j...->ij...", f, np.conj(g_))


def dbar_star(chart: FiberChart, f: np.ndarray) -> np.ndarray:
    """``dbar^* (f dz_bar (x) e) = -(2 / (g h)) d/dz (h f)``, coefficient of ``e``."""
    return -2.0 / (chart.g * chart.h) * chart.d_dz(chart.h * f)


def harmonic_residual(chart: FiberChart, f: np.ndarray) -> np.ndarray:
    """Normalised L^2 norm of ``dbar^* eta`` for each form in the stack."""
    s = dbar_star(chart, f)
    return np.sqrt(np.abs(chart.integrate(np.abs(s) ** 2 * chart.h)))


@dataclass(frozen=True)
class HarmonicBasis:
    chart: FiberChart
    eta: np.ndarray  # (dim, 2, n, m)
    gram: np.ndarray
    residuals: np.ndarray

    @property
    def dim(self) -> int:
        return self.eta.shape[0]

    @property
    def orthonormality_error(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.gram - np.eye(self.dim))))


def build_harmonic_basis(chart: FiberChart) -> HarmonicBasis:
    """Orthonormal harmonic representatives of ``H^{0,1}(CP^1, O(-k))``."""
    cand = candidate_forms(chart)
    if cand.shape[0] == 0:
        return HarmonicBasis(chart, cand, np.zeros((0, 0)), np.zeros(0))
    G = chart.integrate(pointwise_products(chart, cand))
    L = np.linalg.cholesky(G)
    T = np.linalg.inv(L)
    eta = np.einsum("ij,j...->i...", T, cand)
    gram = chart.integrate(pointwise_products(chart, eta))
    return HarmonicBasis(chart, eta, gram, harmonic_residual(chart, eta))


@dataclass(frozen=True)
class FiberEndomorphismData:
    lambda1: np.ndarray  # [i, j] -> lambda_1(eta_ij) samples
    lambda2: np.ndarray
    lambda1_integral: np.ndarray
    lambda2_integral: np.ndarray

    def apply1(self, xi: np.ndarray) -> np.ndarray:
        """``lambda_1(xi)`` for ``xi`` in gl(k) = End(H^{0,1})."""
        return np.einsum("ij,ij...->...", xi, self.lambda1)

    def apply2(self, xi: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ij...->...", xi, self.lambda2)


def lambda_maps(basis: HarmonicBasis) -> FiberEndomorphismData:
    """``lambda_1(eta_ij) = (1/i) Lambda(eta_i ^ eta_j^*)``, ``lambda_2(eta_ij) = i Lambda(eta_i^* ^ eta_j)``.

    With the conventions above both reduce to pointwise inner products:
    ``lambda_1(eta_ij) = <eta_i, eta_j>`` and ``lambda_2(eta_ij) = <eta_j, eta_i>``.
    """
    if basis.dim == 0:
        raise ValueError("empty harmonic basis")
    chart = basis.chart
    f = basis.eta
    wedge = np.einsum("i...,j...->ij...", f, np.conj(f)) * chart.h  # eta_i ^ eta_j^*, coefficient of dz_bar ^ dz
    lam1 = (1 / 1j) * wedge * (2j / chart.g)
    wedge2 = np.einsum("i...,j...->ij...", np.conj(f), f) * chart.h  # eta_i^* ^ eta_j, coefficient of dz ^ dz_bar
    lam2 = 1j * wedge2 * (-2j / chart.g)
    return FiberEndomorphismData(lam1, lam2, chart.integrate(lam1), chart.integrate(lam2))


def fiber_integrate(chart: FiberChart, f: np.ndarray) -> np.ndarray:
    """``(1/Vol(F)) int_F Tr f dvol``; leading axes (base endomorphism indices) are kept."""
    f = np.asarray(f)
    if not np.all(np.isfinite(f)):
        raise ValueError("non-finite samples in fiber integrand")
    return chart.integrate(f)


def _phis(phis, dim):
    p = np.asarray(phis, dtype=complex)
    if p.ndim == 1:
        p = p[:, None, None]
    if p.shape[0] != dim:
        raise ValueError(f"need {dim} section coefficients, got {p.shape[0]}")
    return p


def lambda_sigma_terms(phis, lam: FiberEndomorphismData, sigma: float):
    """``Lambda_sigma(beta^ beta^*)`` and ``Lambda_sigma(beta^* ^ beta)`` via the lambda maps.

    ``phis`` has shape (dim, r1, r2): the coefficient of ``eta_j`` at a base point.
    """
    p = _phis(phis, lam.lambda1.shape[0])
    a = (1j / sigma) * np.einsum("iab,jcb,ij...->ac...", p, np.conj(p), lam.lambda1)
    b = (-1j / sigma) * np.einsum("iba,jbc,ij...->ac...", np.conj(p), p, lam.lambda2)
    return a, b


def lambda_sigma_direct(phis, basis: HarmonicBasis, sigma: float):
    """The same two forms assembled straight from ``beta = sum_j phi_j eta_j``."""
    chart = basis.chart
    p = _phis(phis, basis.dim)
    B = np.einsum("jab,j...->ab...", p, basis.eta)
    Bd = np.conj(np.swapaxes(B, 0, 1))
    bb = np.einsum("ab...,bc...->ac...", B, Bd) * chart.h  # dz_bar ^ dz
    bsb = np.einsum("ab...,bc...->ac...", Bd, B) * chart.h  # dz ^ dz_bar
    return bb * (2j / chart.g) / sigma, bsb * (-2j / chart.g) / sigma


@dataclass(frozen=True)
class PerturbationTerms:
    d1: np.ndarray
    d2: np.ndarray
    d1_integral: np.ndarray
    d2_integral: np.ndarray


def perturbation_terms(phis, basis: HarmonicBasis, sigma: float) -> PerturbationTerms:
    """Pointwise Lambda-terms minus their fiber averages times the identity."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    chart = basis.chart
    a, b = lambda_sigma_terms(phis, lambda_maps(basis), sigma)
    ones = np.ones(chart.weights.shape)
    d1 = a - np.multiply.outer(fiber_integrate(chart, a), ones)
    d2 = b - np.multiply.outer(fiber_integrate(chart, b), ones)
    return PerturbationTerms(d1, d2, fiber_integrate(chart, d1), fiber_integrate(chart, d2))


@dataclass(frozen=True)
class ReductionResidualReport:
    pointwise1: float
    pointwise2: float
    phi1: float
    phi2: float
    perturbation: float
    orthonormality: float
    harmonicity: float
    dbar_star_beta: float
    phi1_min_eig: float
    phi2_min_eig: float
    positive: bool

    def as_dict(self) -> dict:
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in self.__dict__.items()}


def verify_reduction_identity(phis, basis: HarmonicBasis, sigma: float) -> ReductionResidualReport:
    """Check the fiber-level reduction identities for ``beta = sum_j phi_j eta_j``.

    (a) pointwise agreement of the Lambda-terms with the lambda-map formulas;
    (b) ``(1/i) int Lambda(beta ^ beta^*) = Phi_1 / sigma`` with
        ``Phi_1 = sum phi_j phi_j^*`` (and the analogue for ``Phi_2``);
    (c) positivity of those integrals, vanishing only for ``beta = 0``.
    """
    chart = basis.chart
    p = _phis(phis, basis.dim)
    lam = lambda_maps(basis)
    a, b = lambda_sigma_terms(p, lam, sigma)
    a_dir, b_dir = lambda_sigma_direct(p, basis, sigma)
    phi1 = np.einsum("jab,jcb->ac", p, np.conj(p))
    phi2 = np.einsum("jba,jbc->ac", np.conj(p), p)
    int1 = fiber_integrate(chart, a_dir) / 1j
    int2 = 1j * fiber_integrate(chart, b_dir)
    pert = perturbation_terms(p, basis, sigma)
    beta_dbar = np.einsum("jab,j...->ab...", p, dbar_star(chart, basis.eta))
    dbs = np.sqrt(np.abs(chart.integrate(np.sum(np.abs(beta_dbar) ** 2, axis=(0, 1)) * chart.h)))
    e1 = np.linalg.eigvalsh((int1 + np.conj(int1.T)) / 2)
    e2 = np.linalg.eigvalsh((int2 + np.conj(int2.T)) / 2)
    nonzero = bool(np.any(p != 0))
    scale = max(1.0, float(np.max(np.abs(phi1))) / sigma)
    tol = 1e-9 * scale
    positive = bool(e1.min() >= -tol and e2.min() >= -tol and ((e1.max() > tol and e2.max() > tol) == nonzero))
    return ReductionResidualReport(
        pointwise1=float(np.max(np.abs(a - a_dir), initial=0.0)),
        pointwise2=float(np.max(np.abs(b - b_dir), initial=0.0)),
        phi1=float(np.max(np.abs(int1 - phi1 / sigma), initial=0.0)),
        phi2=float(np.max(np.abs(int2 - phi2 / sigma), initial=0.0)),
        perturbation=float(max(np.max(np.abs(pert.d1_integral), initial=0.0), np.max(np.abs(pert.d2_integral), initial=0.0))),
        orthonormality=basis.orthonormality_error,
        harmonicity=float(np.max(basis.residuals, initial=0.0)),
        dbar_star_beta=float(dbs),
        phi1_min_eig=float(e1.min()),
        phi2_min_eig=float(e2.min()),
        positive=positive,
    )

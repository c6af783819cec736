"""Flat rectangular torus with a periodic N x N grid."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class BaseGeometry:
    """Torus ``R^2 / (Lx Z + Ly Z)`` with Kaehler form ``dx ^ dy``.

    For ``h = h0 exp(2u)`` on a line bundle this gives
    ``i Lambda F_h = i Lambda F_h0 - Laplacian(u)``; the Laplacian is the
    5-point stencil, whose grid sum vanishes identically.
    """

    periods: tuple = (1.0, 1.0)
    n: int = 64

    def __post_init__(self):
        lx, ly = (float(p) for p in self.periods)
        if lx <= 0 or ly <= 0:
            raise ValueError("torus periods must be positive")
        if self.n < 4:
            raise ValueError("grid needs at least 4 points per direction")
        object.__setattr__(self, "periods", (lx, ly))

    @property
    def spacing(self) -> tuple:
        return self.periods[0] / self.n, self.periods[1] / self.n

    @property
    def cell_area(self) -> float:
        hx, hy = self.spacing
        return hx * hy

    @property
    def area(self) -> float:
        return self.periods[0] * self.periods[1]

    @cached_property
    def coords(self) -> tuple:
        hx, hy = self.spacing
        x = np.arange(self.n) * hx
        y = np.arange(self.n) * hy
        return np.meshgrid(x, y, indexing="ij")

    def integrate(self, f: np.ndarray) -> float:
        return float(np.sum(f) * self.cell_area)

    def mean(self, f: np.ndarray) -> float:
        return float(np.mean(f))

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        hx, hy = self.spacing
        return (np.roll(u, 1, 0) - 2 * u + np.roll(u, -1, 0)) / hx**2 + (np.roll(u, 1, 1) - 2 * u + np.roll(u, -1, 1)) / hy**2

    @cached_property
    def symbol(self) -> np.ndarray:
        """Eigenvalues of the discrete Laplacian on the FFT modes (all <= 0)."""
        hx, hy = self.spacing
        k = 2 * np.pi * np.fft.fftfreq(self.n)
        sx = (2 * np.cos(k) - 2) / hx**2
        sy = (2 * np.cos(k) - 2) / hy**2
        return sx[:, None] + sy[None, :]

    def poisson(self, f: np.ndarray) -> np.ndarray:
        """Mean-zero ``u`` with ``Laplacian(u) = f - mean(f)``."""
        fh = np.fft.fft2(f)
        s = self.symbol.copy()
        s[0, 0] = 1.0
        uh = fh / s
        uh[0, 0] = 0.0
        return np.real(np.fft.ifft2(uh))

    def shifted_inverse(self, f: np.ndarray, shift: float = 1.0) -> np.ndarray:
        """``(shift - Laplacian)^{-1} f``, the preconditioner used by the flow."""
        return np.real(np.fft.ifft2(np.fft.fft2(f) / (shift - self.symbol)))

    @cached_property
    def laplacian_matrix(self) -> sp.csr_matrix:
        hx, hy = self.spacing
        n = self.n
        e = np.ones(n)
        d = sp.diags([e[:-1], -2 * e, e[:-1]], [-1, 0, 1], shape=(n, n), format="lil")
        d[0, n - 1] = 1
        d[n - 1, 0] = 1
        d = d.tocsr()
        eye = sp.identity(n, format="csr")
        return (sp.kron(d, eye) / hx**2 + sp.kron(eye, d) / hy**2).tocsr()

    def as_dict(self) -> dict:
        return {"periods": list(self.periods), "n": self.n, "area": self.area}

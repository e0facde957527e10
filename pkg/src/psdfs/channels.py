"""Photon loss (amplitude damping to a vacuum bath).

Three routes to the evolved Wigner function W(zeta, t):

* ``lossy_wigner_closed``: finite multiple sum over p >= q, r, s, u.
* ``lossy_wigner_convolution``: Gaussian-kernel quadrature of an initial grid.
* ``lossy_wigner_oracle``: Kraus map on the density matrix, then displaced parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .specfun import inv_factorial
from .state import DensityMatrix, StateParams, annihilation, density_matrix, normalization_constant, psdfs_closed_form
from .wigner import PhaseSpaceGrid, wigner_closed, wigner_parity_oracle

__all__ = [
    "LossParams",
    "lossy_wigner_closed",
    "lossy_wigner_convolution",
    "lossy_density_matrix",
    "lossy_wigner_oracle",
    "KernelSupportError",
]


class KernelSupportError(ValueError):
    """The convolution kernel is not contained in the initial grid."""


@dataclass(frozen=True)
class LossParams:
    """Rescaled time kappa*t; the channel transmits exp(-2 kappa t) of the photons."""

    kappa_t: float

    def __post_init__(self):
        if not math.isfinite(self.kappa_t) or self.kappa_t < 0:
            raise ValueError(f"kappa_t must be finite and >= 0, got {self.kappa_t}")

    @classmethod
    def from_efficiency(cls, eta: float) -> "LossParams":
        """Loss equivalent to a detector of efficiency eta (T = 1 - eta)."""
        if not 0.0 < eta <= 1.0:
            raise ValueError(f"efficiency must lie in (0, 1], got {eta}")
        return cls(-0.5 * math.log(eta))

    @property
    def T(self) -> float:
        return -math.expm1(-2.0 * self.kappa_t)

    @property
    def damping(self) -> float:
        """Amplitude factor exp(-kappa t)."""
        return math.exp(-self.kappa_t)


@lru_cache(maxsize=256)
def _lossy_polys(p: StateParams, kappa_t: float) -> list[np.ndarray]:
    """Complex polynomials R_d(y), y = |beta|^2, of the p >= q sums with d = p - q."""
    n, k, a = p.n, p.k, p.alpha
    ac = a.conjugate()
    half_T = 0.5 * -math.expm1(-2.0 * kappa_t)
    polys = [np.zeros(n + 1, dtype=complex) for _ in range(k + 1)]
    for pp in range(k + 1):
        for q in range(pp + 1):
            d = pp - q
            c_pq = math.comb(k, pp) * math.comb(k, q) * ac ** (k - pp) * a ** (k - q)
            for r in range(n - pp + 1):
                c_r = (-2.0) ** r * inv_factorial(n - pp - r)
                for s in range(r + 1):
                    c_s = c_r * (-2.0) ** (r - s) * inv_factorial(s)
                    for u in range(d + r - s + 1):
                        # 1/(r-s-u)! vanishes for u > r - s
                        if u > r - s:
                            break
                        c_u = inv_factorial(u) * inv_factorial(d + r - s - u) * inv_factorial(r - s - u)
                        polys[d][r - s - u] += c_pq * c_s * c_u * half_T**u
    return polys


def lossy_wigner_closed(p: StateParams, lp: LossParams, zeta):
    """W(zeta, t) from the closed-form multiple sum (scalar or array zeta)."""
    if lp.kappa_t == 0.0:
        return wigner_closed(p, zeta)
    z = np.asarray(zeta, dtype=complex)
    c = lp.damping
    beta = c * (z - c * p.alpha)
    y = np.abs(beta) ** 2
    polys = _lossy_polys(p, lp.kappa_t)
    total = P.polyval(y, polys[0]).astype(complex)
    two_bc = 2.0 * np.conj(beta)
    power = np.ones_like(two_bc)
    for d in range(1, len(polys)):
        power = power * two_bc
        term = power * P.polyval(y, polys[d])
        total = total + term + np.conj(term)
    # (2/T)|beta|^2 (1 - e^{2 kappa t}) with expm1 for small kappa t
    expo = (2.0 / lp.T) * y * -math.expm1(2.0 * lp.kappa_t)
    pref = 2.0 * normalization_constant(p) ** 2 / math.pi * math.factorial(p.n)
    out = (pref * np.exp(expo) * total).real
    return float(out) if out.ndim == 0 else out


def lossy_wigner_convolution(grid: PhaseSpaceGrid, lp: LossParams, zeta: complex, mass_tol: float = 1e-6) -> float:
    """Integrate (2/T) pi^-1 exp(-(2/T)|zeta - gamma e^{-kt}|^2) W(gamma) over the grid."""
    T = lp.T
    if T <= 1e-6:
        raise ValueError(f"T = {T:.2e} too small for a resolvable kernel; use the closed form")
    c = lp.damping
    nodes = grid.geometry.mesh()
    kern = (2.0 / (math.pi * T)) * np.exp(-(2.0 / T) * np.abs(zeta - c * nodes) ** 2)
    captured = c * c * float(np.sum(grid.weights * kern))
    if abs(captured - 1.0) > mass_tol:
        center = zeta / c
        width = 6.0 * math.sqrt(T / 2.0) / c
        raise KernelSupportError(
            f"kernel mass captured {captured:.8f}; grid must cover "
            f"re [{center.real - width:.3f}, {center.real + width:.3f}], "
            f"im [{center.imag - width:.3f}, {center.imag + width:.3f}] with spacing below {width / 30:.3g}"
        )
    return float(np.sum(grid.weights * kern * grid.values))


def lossy_density_matrix(rho: DensityMatrix, lp: LossParams) -> DensityMatrix:
    """sum_l K_l rho K_l^dag with K_l = sqrt(T^l/l!) e^{-kt a^dag a} a^l."""
    if rho.mode_count != 1:
        raise ValueError("loss channel acts on a single mode")
    d = rho.dim
    T = lp.T
    damp = np.diag(lp.damping ** np.arange(d)).astype(complex)
    a = annihilation(d)
    out = np.zeros((d, d), dtype=complex)
    al = np.eye(d, dtype=complex)
    for l in range(d):
        K = math.sqrt(T**l / math.factorial(l)) * (damp @ al)
        out += K @ rho.elems @ K.conj().T
        al = a @ al
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def lossy_wigner_oracle(p: StateParams, lp: LossParams, zeta):
    """Kraus-evolved density matrix evaluated with the displaced-parity formula."""
    rho = lossy_density_matrix(density_matrix(psdfs_closed_form(p)), lp)
    return wigner_parity_oracle(rho, zeta)

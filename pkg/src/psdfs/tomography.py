"""Homodyne detection: detected Wigner function and quadrature distributions.

Quadratures follow gamma = (Q + iP)/sqrt(2), so the vacuum has Var(Q) = 1/2
and W_QP(Q, P) = W(gamma)/2 integrates to one over dQ dP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .channels import LossParams, lossy_wigner_closed
from .state import StateParams
from .wigner import wigner_closed

__all__ = [
    "DetectorParams",
    "QuadratureError",
    "ideal_wigner_qp",
    "detected_wigner",
    "detected_wigner_via_channel",
    "quadrature_distribution",
    "projection_half_width",
]

SQRT2 = math.sqrt(2.0)


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""


@dataclass(frozen=True)
class DetectorParams:
    """Detector efficiency eta in (0, 1] and local-oscillator phase theta (radians)."""

    eta: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "theta", math.fmod(self.theta, 2 * math.pi) % (2 * math.pi))


def ideal_wigner_qp(p: StateParams, Q, P):
    """Wigner function in (Q, P) coordinates."""
    out = 0.5 * np.asarray(wigner_closed(p, (np.asarray(Q) + 1j * np.asarray(P)) / SQRT2))
    return float(out) if out.ndim == 0 else out


def detected_wigner_via_channel(p: StateParams, dp: DetectorParams, Q, P):
    """W_det through the equivalent loss channel with T = 1 - eta."""
    if dp.eta == 1.0:
        return ideal_wigner_qp(p, Q, P)
    lp = LossParams.from_efficiency(dp.eta)
    out = 0.5 * np.asarray(lossy_wigner_closed(p, lp, (np.asarray(Q) + 1j * np.asarray(P)) / SQRT2))
    return float(out) if out.ndim == 0 else out


def _gh_convolution(p: StateParams, eta: float, Q: np.ndarray, P: np.ndarray, order: int) -> np.ndarray:
    # Q' = (Q + sqrt(1-eta) x)/sqrt(eta) turns the kernel into exp(-x^2 - y^2)
    x, w = np.polynomial.hermite.hermgauss(order)
    s = math.sqrt(1.0 - eta)
    se = math.sqrt(eta)
    q = Q.ravel()
    pp = P.ravel()
    out = np.empty(q.size)
    chunk = max(1, 200_000 // (order * order))
    for lo in range(0, q.size, chunk):
        qs = (q[lo : lo + chunk, None] + s * x[None, :]) / se
        ps = (pp[lo : lo + chunk, None] + s * x[None, :]) / se
        vals = ideal_wigner_qp(p, qs[:, :, None], ps[:, None, :])
        out[lo : lo + chunk] = np.einsum("cij,i,j->c", vals, w, w) / (math.pi * eta)
    return out.reshape(Q.shape)


def detected_wigner(p: StateParams, dp: DetectorParams, Q, P, tol: float = 1e-6, max_order: int = 256):
    """Gaussian-smoothed Wigner function of an eta-efficient detector by direct 2-D quadrature.

    Tensor Gauss-Hermite; the node count grows by half from 24 until two
    successive results agree to ``tol`` everywhere.
    """
    if dp.eta == 1.0:
        return ideal_wigner_qp(p, Q, P)
    Qa, Pa = np.broadcast_arrays(np.asarray(Q, dtype=float), np.asarray(P, dtype=float))
    order = 24
    prev = _gh_convolution(p, dp.eta, Qa, Pa, order)
    while True:
        order = (3 * order) // 2
        cur = _gh_convolution(p, dp.eta, Qa, Pa, order)
        delta = float(np.max(np.abs(cur - prev)))
        if delta < tol:
            break
        if order >= max_order:
            raise QuadratureError(
                f"detected Wigner quadrature did not converge: change {delta:.2e} at {order} nodes per axis"
            )
        prev = cur
    return float(cur) if cur.ndim == 0 else cur


def projection_half_width(p: StateParams) -> float:
    """Range |P_theta| <= L that holds essentially all of the state in quadrature units."""
    return SQRT2 * (abs(p.alpha) + 5.0 + math.sqrt(p.n + p.k))


def quadrature_distribution(p: StateParams, dp: DetectorParams, q_theta, tol: float = 1e-6, edge_tol: float = 1e-10):
    """Pr(Q_theta, theta): integral of W_det along the line rotated by theta.

    Adaptive (vector-valued) quadrature over P_theta in [-L, L]; W_det is
    evaluated through the equivalent loss channel.
    """
    q = np.atleast_1d(np.asarray(q_theta, dtype=float))
    c, s = math.cos(dp.theta), math.sin(dp.theta)
    L = projection_half_width(p)

    def integrand(pt: float) -> np.ndarray:
        return detected_wigner_via_channel(p, dp, q * c - pt * s, q * s + pt * c)

    edge = max(float(np.max(np.abs(integrand(-L)))), float(np.max(np.abs(integrand(L)))))
    if edge > edge_tol:
        raise QuadratureError(f"|W_det| = {edge:.2e} at the integration edge |P_theta| = {L:.3f}; range too small")
    val, err = quad_vec(integrand, -L, L, epsabs=tol, epsrel=0.0, norm="max", limit=2000)
    if err > tol:
        raise QuadratureError(f"projection quadrature error estimate {err:.2e} exceeds {tol:.1e}")
    val = np.asarray(val)
    return float(val[0]) if np.ndim(q_theta) == 0 else val

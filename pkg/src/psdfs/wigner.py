"""Wigner and characteristic functions of the photon-subtracted displaced Fock state.

Conventions: phase space is parametrized by the complex coordinate gamma with
the vacuum Wigner function (2/pi) exp(-2|gamma|^2), normalized so that the
integral over d(Re gamma) d(Im gamma) is one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from .specfun import hyp1f1_coeffs
from .state import (
    DensityMatrix,
    StateParams,
    TAIL_WINDOW,
    TruncationError,
    annihilation,
    displacement,
    expectation_adp_aq,
    normalization_constant,
)

__all__ = [
    "GridGeometry",
    "PhaseSpaceGrid",
    "HudsonWitness",
    "wigner_closed",
    "wigner_parity_oracle",
    "characteristic_function",
    "characteristic_matrix_oracle",
    "wigner_from_characteristic",
    "wigner_grid",
    "wigner_envelope_tail",
    "hudson_bound_witness",
    "trapezoid_weights",
]

W_MAX = 2.0 / math.pi


@dataclass(frozen=True)
class GridGeometry:
    re_min: float
    re_max: float
    re_steps: int
    im_min: float
    im_max: float
    im_steps: int

    def __post_init__(self):
        for v in (self.re_min, self.re_max, self.im_min, self.im_max):
            if not math.isfinite(v):
                raise ValueError("grid bounds must be finite")
        if self.re_steps < 2 or self.im_steps < 2:
            raise ValueError("grid needs at least 2 steps per axis")
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("grid bounds must satisfy min < max")

    @classmethod
    def square(cls, half_width: float, steps: int, center: complex = 0j) -> "GridGeometry":
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width, steps, c.imag - half_width, c.imag + half_width, steps)

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.re_steps)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.im_steps)

    def mesh(self) -> np.ndarray:
        """Complex node array of shape (re_steps, im_steps)."""
        return self.re_axis[:, None] + 1j * self.im_axis[None, :]


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights on a uniform axis."""
    h = x[1] - x[0]
    w = np.full(x.shape, h)
    w[0] = w[-1] = h / 2
    return w


@dataclass
class PhaseSpaceGrid:
    """Wigner values on a rectangular grid; ``values[i, j]`` sits at re_axis[i] + 1j*im_axis[j]."""

    geometry: GridGeometry
    values: np.ndarray
    weights: np.ndarray = field(repr=False)
    tail_estimate: float = 0.0

    @property
    def integral(self) -> float:
        return float(np.sum(self.weights * self.values))

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    def rows(self):
        """(re, im, w) per node, C-order (real axis outer)."""
        re = self.geometry.re_axis
        im = self.geometry.im_axis
        for i in range(re.size):
            for j in range(im.size):
                yield re[i], im[j], self.values[i, j]


# -- closed form ------------------------------------------------------------


@lru_cache(maxsize=256)
def _wigner_polys(p: StateParams) -> tuple[float, list[np.ndarray]]:
    """Prefactor 2N^2/pi and complex polynomials P_d(x), d = p - q >= 0.

    W = pref * exp(-x) * [P_0(x) + 2 Re(conj(eta)^d P_d(x))] with
    eta = alpha - gamma and x = 2|eta|^2. Terms with p < q are the complex
    conjugates of their mirrored p > q terms and are folded into the 2 Re(.).
    """
    n, k, a = p.n, p.k, p.alpha
    ac = a.conjugate()
    pref = 2.0 * normalization_constant(p) ** 2 / math.pi
    nfact = math.factorial(n)
    polys = [np.zeros(n + 1, dtype=complex) for _ in range(k + 1)]
    for pp in range(k + 1):
        for q in range(pp + 1):
            d = pp - q
            c_pq = math.comb(k, pp) * math.comb(k, q) * ac ** (k - pp) * a ** (k - q) * nfact
            for r in range(n - pp + 1):
                coef = (-2.0) ** (d + r) / (math.factorial(r) * math.factorial(d) * math.factorial(n - pp - r))
                f = hyp1f1_coeffs(r, d + 1)
                polys[d][: r + 1] += c_pq * coef * f
    return pref, polys


def wigner_closed(p: StateParams, gamma):
    """Closed-form Wigner function at gamma (scalar or array)."""
    pref, polys = _wigner_polys(p)
    g = np.asarray(gamma, dtype=complex)
    eta = p.alpha - g
    x = 2.0 * np.abs(eta) ** 2
    total = P.polyval(x, polys[0]).astype(complex)
    etac = np.conj(eta)
    power = np.ones_like(etac)
    for d in range(1, len(polys)):
        power = power * etac
        term = power * P.polyval(x, polys[d])
        total = total + term + np.conj(term)
    out = pref * np.exp(-x) * total
    if np.max(np.abs(out.imag), initial=0.0) > 1e-10:
        raise ArithmeticError("closed-form Wigner value has a non-negligible imaginary part")
    out = out.real
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=256)
def _envelope_coeffs(p: StateParams) -> np.ndarray:
    # |W| <= pref e^{-2 rho^2} sum_j b_j rho^j, rho = |eta|
    pref, polys = _wigner_polys(p)
    deg = 2 * p.n + p.k
    b = np.zeros(deg + 1)
    for d, poly in enumerate(polys):
        mult = 1.0 if d == 0 else 2.0
        for i, c in enumerate(poly):
            b[d + 2 * i] += mult * abs(c) * 2.0**i
    return pref * b


def wigner_envelope_tail(p: StateParams, radius: float) -> float:
    """Upper bound on the integral of |W| outside the disk |gamma - alpha| > radius."""
    b = _envelope_coeffs(p)
    s = np.arange(b.size) / 2.0 + 1.0
    # int_{rho>R} e^{-2 rho^2} rho^j 2 pi rho d rho = pi 2^{-s} Gamma(s) Q(s, 2R^2), s = j/2 + 1
    tails = math.pi * 2.0**-s * gamma_fn(s) * gammaincc(s, 2.0 * max(radius, 0.0) ** 2)
    return float(np.dot(b, tails))


def _inner_radius(p: StateParams, geom: GridGeometry) -> float:
    a = p.alpha
    return max(0.0, min(a.real - geom.re_min, geom.re_max - a.real, a.imag - geom.im_min, geom.im_max - a.imag))


def wigner_grid(p: StateParams, geometry: GridGeometry) -> PhaseSpaceGrid:
    """Closed-form Wigner values on a grid with trapezoid weights attached."""
    values = wigner_closed(p, geometry.mesh())
    weights = np.outer(trapezoid_weights(geometry.re_axis), trapezoid_weights(geometry.im_axis))
    tail = wigner_envelope_tail(p, _inner_radius(p, geometry))
    return PhaseSpaceGrid(geometry, values, weights, tail)


# -- oracles ----------------------------------------------------------------


def _padded_dim(dim: int, shift: float) -> int:
    # room for the state displaced by |shift| without hitting the cutoff
    return int(math.ceil((abs(shift) + math.sqrt(dim)) ** 2)) + 30


def _embed(rho: np.ndarray, work: int) -> np.ndarray:
    out = np.zeros((work, work), dtype=complex)
    d = rho.shape[0]
    out[:d, :d] = rho
    return out


@lru_cache(maxsize=16)
def _generator_eig(work: int) -> tuple[np.ndarray, np.ndarray]:
    # i(a^dag - a) is Hermitian, so D(r) = exp(r(a^dag - a)) = V exp(-i r lam) V^dag for real r
    a = annihilation(work)
    lam, V = np.linalg.eigh(1j * (a.conj().T - a))
    return lam, V


def _pure_components(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition rho = sum_i w_i |psi_i><psi_i| keeping non-negligible weights."""
    w, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = w > 1e-15 * max(float(w[-1]), 1e-300)
    return w[keep], vecs[:, keep]


def _parity_values(rho: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """(2/pi) Tr[D(g)^dag rho D(g) Pi] on a truncated space padded for the largest |g|."""
    d = rho.shape[0]
    shift = float(np.max(np.abs(gammas), initial=0.0))
    work = max(_padded_dim(d, shift), d + 30)
    lam, V = _generator_eig(work)
    Vh = V.conj().T
    w, psi = _pure_components(rho)
    psi = np.vstack([psi, np.zeros((work - d, psi.shape[1]))])
    m = np.arange(work)
    parity = (-1.0) ** m
    out = np.empty(gammas.size)
    for idx, g in enumerate(gammas.ravel()):
        r, phi = abs(g), np.angle(g)
        # D(g)^dag = D(-g) = R D(-r) R^dag with R = exp(i phi a^dag a)
        phased = np.exp(-1j * phi * m)[:, None] * psi
        shifted = V @ (np.exp(1j * r * lam)[:, None] * (Vh @ phased))
        prob = np.abs(shifted) ** 2
        edge = float(np.max(prob[-TAIL_WINDOW:].sum(axis=0)))
        if edge > 1e-12:
            raise TruncationError(f"parity oracle: displaced state reaches the cutoff (edge mass {edge:.2e}) at gamma={g}")
        out[idx] = (2.0 / math.pi) * float(np.dot(w, parity @ prob))
    return out.reshape(gammas.shape)


def wigner_parity_oracle(rho: DensityMatrix, gamma):
    """W(gamma) = (2/pi) Tr[rho D(gamma) Pi D(gamma)^dag] by matrix algebra."""
    if rho.mode_count != 1:
        raise ValueError("parity oracle needs a single-mode density matrix")
    g = np.asarray(gamma, dtype=complex)
    vals = _parity_values(rho.elems, g.reshape(-1)).reshape(g.shape)
    return float(vals) if g.ndim == 0 else vals


def characteristic_function(p: StateParams, lam):
    """C(lambda) = Tr(rho D(lambda)) from the closed-form double sum."""
    n, k, a = p.n, p.k, p.alpha
    ac = a.conjugate()
    lam = np.asarray(lam, dtype=complex)
    lamc = np.conj(lam)
    total = np.zeros_like(lam)
    nfact = math.factorial(n)
    for pp in range(k + 1):
        for q in range(k + 1):
            c_pq = math.comb(k, pp) * math.comb(k, q) * ac ** (k - pp) * a ** (k - q) * nfact
            for r in range(max(0, q - pp), n - pp + 1):
                s = pp - q + r
                denom = math.factorial(r) * math.factorial(s) * math.factorial(n - pp - r)
                total = total + c_pq * lam**r * (-lamc) ** s / denom
    nrm2 = normalization_constant(p) ** 2
    out = nrm2 * np.exp(lam * ac - lamc * a - 0.5 * np.abs(lam) ** 2) * total
    return complex(out) if out.ndim == 0 else out


def characteristic_matrix_oracle(rho: DensityMatrix, lam: complex) -> complex:
    """Tr(rho D(lambda)) with a padded truncated displacement."""
    work = max(_padded_dim(rho.dim, lam), rho.dim + 30)
    R = _embed(rho.elems, work)
    return complex(np.trace(R @ displacement(lam, work)))


def wigner_from_characteristic(
    p: StateParams, re_axis: np.ndarray, im_axis: np.ndarray, order: int = 240
) -> np.ndarray:
    """Fourier transform of the closed-form C(lambda) onto a rectangular gamma grid.

    W(gamma) = pi^-2 int d^2 lambda C(lambda) exp(gamma conj(lambda) - conj(gamma) lambda);
    the kernel factorizes as exp(2i Im(gamma) Re(lambda)) exp(-2i Re(gamma) Im(lambda)).
    """
    half = 12.0 + 2.0 * math.sqrt(p.n + p.k)
    x, w = np.polynomial.legendre.leggauss(order)
    x = half * x
    w = half * w
    lam = x[:, None] + 1j * x[None, :]  # [a, b] -> Re = x_a, Im = x_b
    C = characteristic_function(p, lam) * np.outer(w, w)
    Ei = np.exp(2j * np.outer(np.asarray(im_axis), x))  # (n_im, a)
    Er = np.exp(-2j * np.outer(np.asarray(re_axis), x))  # (n_re, b)
    W = Er @ C.T @ Ei.T / math.pi**2  # (n_re, n_im)
    return W.real


@dataclass(frozen=True)
class HudsonWitness:
    w_origin: float
    bound: float
    mean_photon: float
    witnessed: bool


def hudson_bound_witness(p: StateParams) -> HudsonWitness:
    """Compare W(0) with the pure-Gaussian lower bound (2/pi) exp(-2 nbar (1 + nbar))."""
    w0 = wigner_closed(p, 0j)
    nbar = expectation_adp_aq(p, 1, 1).real
    bound = W_MAX * math.exp(-2.0 * nbar * (1.0 + nbar))
    return HudsonWitness(w0, bound, nbar, w0 < bound)

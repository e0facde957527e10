"""Nonclassicality and non-Gaussianity measures for one state.

Four quantities: linear entropy potential (beam splitter + partial trace),
the skew-information measure, Wigner logarithmic negativity, and the
relative entropy of non-Gaussianity via the Gaussian reference state.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .specfun import displaced_laguerre
from .state import (
    DensityMatrix,
    FockVector,
    NullStateError,
    StateParams,
    TruncationError,
    expectation_adp_aq,
    normalization_constant,
    psdfs_closed_form,
)
from .wigner import wigner_closed, wigner_envelope_tail

__all__ = [
    "CovarianceMatrix",
    "MeasureReport",
    "QuadConfig",
    "NegativityEstimate",
    "beam_splitter_amplitudes",
    "beam_splitter_output",
    "linear_entropy_potential",
    "linear_entropy_series",
    "skew_measure",
    "negativity_integral",
    "wigner_log_negativity",
    "covariance_matrix",
    "entropy_h",
    "relative_entropy_ng",
    "measure_report",
]


# -- linear entropy potential ----------------------------------------------


def beam_splitter_amplitudes(v: FockVector) -> np.ndarray:
    """Two-mode amplitudes M[j, l] of |j, l> after a 50:50 splitter with vacuum in port B.

    |m, 0> -> 2^{-m/2} sum_j sqrt(binom(m, j)) |j, m - j>.
    """
    d = v.dim
    M = np.zeros((d, d), dtype=complex)
    for m in range(d):
        c = v.amps[m]
        if c == 0:
            continue
        j = np.arange(m + 1)
        logb = math.lgamma(m + 1) - np.array([math.lgamma(x + 1) + math.lgamma(m - x + 1) for x in j])
        M[j, m - j] += c * np.exp(0.5 * logb - 0.5 * m * math.log(2.0))
    return M


def _bs_tail(M: np.ndarray) -> float:
    d = M.shape[0]
    tot = np.add.outer(np.arange(d), np.arange(d))
    return float(np.sum(np.abs(M[tot >= d - 5]) ** 2))


def beam_splitter_output(v: FockVector) -> DensityMatrix:
    """Two-mode density matrix, basis index j * dim + l for |j>_A |l>_B."""
    M = beam_splitter_amplitudes(v)
    tail = _bs_tail(M)
    if tail > 1e-9:
        raise TruncationError(f"two-mode tail mass {tail:.2e} exceeds 1e-9", suggested_dim=2 * v.dim)
    psi = M.ravel()
    return DensityMatrix(np.outer(psi, psi.conj()), mode_count=2)


def linear_entropy_potential(p: StateParams) -> float:
    """1 - Tr(rho_B^2) with rho_B the reduced state of output mode B."""
    M = beam_splitter_amplitudes(psdfs_closed_form(p))
    tail = _bs_tail(M)
    if tail > 1e-9:
        raise TruncationError(f"two-mode tail mass {tail:.2e} exceeds 1e-9")
    rho_b = M.T @ M.conj()  # trace over the first (A) index
    val = 1.0 - float(np.real(np.vdot(rho_b, rho_b)))
    # separable outputs land a few ulps below zero
    return 0.0 if -1e-12 < val < 0.0 else val


def linear_entropy_series(p: StateParams, terms: int | None = None) -> float:
    """Triple-sum closed form for the linear entropy potential, evaluated as written.

    The sum runs over m, m2 >= 0 with m + m2 < terms and 0 <= m1 <= m + m2.
    Only |alpha| enters. Used as a cross-check of the partial-trace route.
    """
    n, k = p.n, p.k
    a = abs(p.alpha)
    terms = terms or p.cutoff
    f = [displaced_laguerre(n, j + k - n, a).real for j in range(2 * terms + 1)]
    lf = [math.lgamma(j + 1) for j in range(2 * terms + 1)]
    total = 0.0
    for m in range(terms):
        for m2 in range(terms - m):
            base = f[m] * f[m2] * math.exp(-lf[m] - lf[m2] - (m + m2) * math.log(2.0))
            if base == 0.0:
                continue
            s = 0.0
            for m1 in range(m + m2 + 1):
                s += math.comb(m + m2, m1) * f[m1] * f[m - m1 + m2]
            total += base * s
    nrm = normalization_constant(p)
    return 1.0 - nrm**4 * math.exp(-2 * a * a) * math.factorial(n) ** 2 * total


# -- skew information ------------------------------------------------------


def skew_measure(p: StateParams) -> float:
    """1/2 + <a^dag a> - <a^dag><a>."""
    n_mean = expectation_adp_aq(p, 1, 1)
    a_dag = expectation_adp_aq(p, 1, 0)
    a = expectation_adp_aq(p, 0, 1)
    val = 0.5 + n_mean - a_dag * a
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"skew measure has imaginary part {val.imag:.2e}")
    return float(val.real)


# -- Wigner logarithmic negativity -----------------------------------------


@dataclass(frozen=True)
class QuadConfig:
    """Composite Gauss-Legendre rule over [-L, L]^2.

    ``order`` is the node count per axis before refinement (``panels`` panels
    of ``order // panels`` points). Panels whose coarse and refined values
    differ by more than ``panel_tol`` are split in four, up to ``max_depth`` times.
    ``half_width=None`` picks |alpha| + 4 + sqrt(n + k).
    """

    order: int = 200
    panels: int = 20
    half_width: float | None = None
    panel_tol: float = 1e-9
    max_depth: int = 14

    def doubled(self) -> "QuadConfig":
        return QuadConfig(2 * self.order, 2 * self.panels, self.half_width, self.panel_tol, self.max_depth)


@dataclass(frozen=True)
class NegativityEstimate:
    abs_integral: float
    quad_error: float
    tail_bound: float
    half_width: float
    min_value: float

    @property
    def wln(self) -> float:
        if self.min_value >= -1e-9:
            return 0.0
        v = math.log2(self.abs_integral)
        if -1e-6 <= v < 0.0:
            return 0.0
        return v


def _panel_integrals(f, x0, y0, h, g, gw):
    xs = x0[:, None] + 0.5 * (g[None, :] + 1.0) * h[:, None]
    ys = y0[:, None] + 0.5 * (g[None, :] + 1.0) * h[:, None]
    vals = f(xs[:, :, None] + 1j * ys[:, None, :])
    return np.einsum("pij,i,j->p", np.abs(vals), gw, gw) * (h / 2) ** 2, float(np.min(vals))


def negativity_integral(p: StateParams, quad: QuadConfig = QuadConfig()) -> NegativityEstimate:
    """Integral of |W| over the plane with error estimate and analytic tail bound."""
    need = abs(p.alpha) + 4.0 + math.sqrt(p.n + p.k)
    L = quad.half_width if quad.half_width is not None else need
    if L < need:
        raise ValueError(f"quadrature half-width {L} < |alpha| + 4 + sqrt(n+k) = {need:.4f}")
    radius = L - abs(p.alpha)
    tail = wigner_envelope_tail(p, radius)
    if tail > 1e-6:
        suggest = L
        while wigner_envelope_tail(p, suggest - abs(p.alpha)) > 1e-6:
            suggest += 0.5
        raise ValueError(f"box half-width {L} leaves tail bound {tail:.2e} > 1e-6; use L >= {suggest}")
    m = max(quad.order // quad.panels, 2)
    g, gw = np.polynomial.legendre.leggauss(m)
    f = lambda z: wigner_closed(p, z)  # noqa: E731
    edges = np.linspace(-L, L, quad.panels + 1)
    X0, Y0 = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    x0, y0 = X0.ravel(), Y0.ravel()
    h = np.full(x0.size, 2 * L / quad.panels)
    coarse, vmin = _panel_integrals(f, x0, y0, h, g, gw)
    total = 0.0
    err = 0.0
    for depth in range(quad.max_depth + 1):
        hh = h / 2
        cx = np.concatenate([x0, x0 + hh, x0, x0 + hh])
        cy = np.concatenate([y0, y0, y0 + hh, y0 + hh])
        ch = np.concatenate([hh] * 4)
        fine_c, fmin = _panel_integrals(f, cx, cy, ch, g, gw)
        vmin = min(vmin, fmin)
        fine = fine_c.reshape(4, -1).sum(axis=0)
        diff = np.abs(fine - coarse)
        done = diff < quad.panel_tol
        if depth == quad.max_depth:
            done[:] = True
        total += float(fine[done].sum())
        err += float(diff[done].sum())
        if done.all():
            break
        sel = np.tile(~done, 4)
        x0, y0, h, coarse = cx[sel], cy[sel], ch[sel], fine_c[sel]
    return NegativityEstimate(total, err, tail, L, vmin)


def wigner_log_negativity(p: StateParams, quad: QuadConfig = QuadConfig()) -> float:
    """log2 of the integral of |W|; zero when the Wigner function is nonnegative."""
    return negativity_integral(p, quad).wln


# -- covariance and relative entropy ---------------------------------------


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetrized second moments with q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2); vacuum = identity."""

    s_qq: float
    s_pp: float
    s_qp: float

    @property
    def det(self) -> float:
        return self.s_qq * self.s_pp - self.s_qp**2

    def as_array(self) -> np.ndarray:
        return np.array([[self.s_qq, self.s_qp], [self.s_qp, self.s_pp]])


def covariance_from_moments(a: complex, a2: complex, n_mean: float) -> CovarianceMatrix:
    """Covariance matrix from <a>, <a^2> and <a^dag a>."""
    s_qq = 2 * a2.real + 2 * n_mean + 1 - 4 * a.real**2
    s_pp = -2 * a2.real + 2 * n_mean + 1 - 4 * a.imag**2
    s_qp = 2 * a2.imag - 4 * a.real * a.imag
    return CovarianceMatrix(float(s_qq), float(s_pp), float(s_qp))


def covariance_matrix(p: StateParams) -> CovarianceMatrix:
    return covariance_from_moments(
        expectation_adp_aq(p, 0, 1),
        expectation_adp_aq(p, 0, 2),
        expectation_adp_aq(p, 1, 1).real,
    )


def entropy_h(x: float) -> float:
    """von Neumann entropy (bits) of a one-mode Gaussian state with symplectic eigenvalue x >= 1."""
    if x < 1.0 - 1e-9:
        raise ValueError(f"symplectic eigenvalue {x} < 1 violates the uncertainty bound")
    plus = (x + 1) / 2
    out = plus * math.log2(plus)
    if abs(x - 1.0) >= 1e-12 and x > 1.0:
        minus = (x - 1) / 2
        out -= minus * math.log2(minus)
    return out


def relative_entropy_ng(p: StateParams) -> float:
    """Entropy of the Gaussian reference state, h(sqrt(det sigma)), for a pure state."""
    det = covariance_matrix(p).det
    if det < 1.0 - 1e-9:
        raise ValueError(f"det sigma = {det} < 1 violates the uncertainty bound")
    return entropy_h(math.sqrt(max(det, 1.0)))


# -- report -----------------------------------------------------------------


@dataclass
class MeasureReport:
    """All four measures for one parameter point; failures are kept per field in ``errors``."""

    n: int
    k: int
    alpha: complex
    linear_entropy: float | None = None
    skew: float | None = None
    wln: float | None = None
    rel_entropy_ng: float | None = None
    covariance: CovarianceMatrix | None = None
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        out = {
            "params": {"n": self.n, "k": self.k, "alpha": [self.alpha.real, self.alpha.imag]},
            "linear_entropy": self.linear_entropy,
            "skew": self.skew,
            "wln": self.wln,
            "rel_entropy_ng": self.rel_entropy_ng,
            "covariance": asdict(self.covariance) if self.covariance is not None else None,
        }
        if self.errors:
            out["errors"] = dict(self.errors)
        return out


def measure_report(p: StateParams, quad: QuadConfig = QuadConfig()) -> MeasureReport:
    """Run every measure; an exception in one is recorded and the rest still run."""
    rep = MeasureReport(p.n, p.k, p.alpha)
    try:
        p.check_nonnull()
    except NullStateError as exc:
        rep.errors["params"] = str(exc)
        return rep
    jobs = {
        "linear_entropy": lambda: linear_entropy_potential(p),
        "skew": lambda: skew_measure(p),
        "wln": lambda: wigner_log_negativity(p, quad),
        "covariance": lambda: covariance_matrix(p),
        "rel_entropy_ng": lambda: relative_entropy_ng(p),
    }
    for name, fn in jobs.items():
        try:
            setattr(rep, name, fn())
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            rep.errors[name] = f"{type(exc).__name__}: {exc}"
    return rep

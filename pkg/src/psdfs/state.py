"""Photon-subtracted displaced Fock states in a truncated Fock basis.

The state is N a^k D(alpha)|n>. Two independent constructions are provided:
``psdfs_closed_form`` sums the Laguerre expansion of the amplitudes and
``psdfs_matrix_oracle`` applies truncated operator matrices directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .specfun import displaced_laguerre

__all__ = [
    "StateParams",
    "FockVector",
    "DensityMatrix",
    "NullStateError",
    "TruncationError",
    "default_dim",
    "annihilation",
    "displacement",
    "normalization_constant",
    "psdfs_closed_form",
    "psdfs_matrix_oracle",
    "expectation_adp_aq",
    "expectation_matrix",
    "density_matrix",
    "fix_global_phase",
]

NORM_TOL = 1e-10
TAIL_TOL = 1e-10
TAIL_WINDOW = 5


class NullStateError(ValueError):
    """a^k D(0)|n> with k > n is the zero vector and cannot be normalized."""


class TruncationError(RuntimeError):
    """The Fock cutoff is too small for the requested accuracy."""

    def __init__(self, message: str, suggested_dim: int | None = None):
        super().__init__(message)
        self.suggested_dim = suggested_dim


def default_dim(n: int, k: int, alpha: complex) -> int:
    """Fock cutoff heuristic; displaced Fock states have Poisson-like tails."""
    r = abs(alpha)
    return n + k + math.ceil(r * r + 8.0 * r * math.sqrt(n + 1)) + 20


@dataclass(frozen=True)
class StateParams:
    """Parameters (n, k, alpha) of one state plus the Fock cutoff.

    ``dim=None`` selects :func:`default_dim` and lets constructors grow the
    cutoff until the tail-mass check passes. An explicit ``dim`` is honoured
    as given and a truncation failure raises instead.
    """

    n: int
    k: int
    alpha: complex
    dim: int | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a nonnegative integer, got {self.k!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        if self.dim is not None:
            if int(self.dim) != self.dim or self.dim <= self.n + self.k:
                raise ValueError(f"dim must be an integer > n + k = {self.n + self.k}, got {self.dim!r}")
            object.__setattr__(self, "dim", int(self.dim))

    @property
    def is_null(self) -> bool:
        return self.alpha == 0 and self.k > self.n

    def check_nonnull(self) -> None:
        if self.is_null:
            raise NullStateError(
                f"null state: a^{self.k} D(0)|{self.n}> = 0 because k = {self.k} > n = {self.n} at alpha = 0"
            )

    @property
    def cutoff(self) -> int:
        return self.dim if self.dim is not None else default_dim(self.n, self.k, self.alpha)

    def with_dim(self, dim: int) -> "StateParams":
        return StateParams(self.n, self.k, self.alpha, dim)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes on |0>, ..., |dim-1>."""

    amps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tail_mass(self, start: int = 0) -> float:
        """Probability in the last TAIL_WINDOW levels, ignoring levels below ``start``."""
        lo = max(self.dim - TAIL_WINDOW, start)
        return float(np.sum(np.abs(self.amps[lo:]) ** 2))


@dataclass(frozen=True)
class DensityMatrix:
    """Single-mode (dim x dim) or two-mode (dim^2 x dim^2) density matrix."""

    elems: np.ndarray
    mode_count: int = 1

    def __post_init__(self):
        if self.mode_count not in (1, 2):
            raise ValueError("mode_count must be 1 or 2")
        e = np.asarray(self.elems)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {e.shape}")
        object.__setattr__(self, "elems", _frozen(e))

    @property
    def dim(self) -> int:
        return self.elems.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.elems)))

    @property
    def purity(self) -> float:
        # Tr(rho^2) for Hermitian rho
        return float(np.real(np.vdot(self.elems, self.elems)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.elems - self.elems.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.elems + self.elems.conj().T))[0])


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator, a[m-1, m] = sqrt(m)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def displacement(alpha: complex, dim: int) -> np.ndarray:
    """Truncated D(alpha) = expm(alpha a^dag - alpha^* a).

    Not unitary near the cutoff; callers pad ``dim`` and discard the edge.
    """
    a = annihilation(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def normalization_constant(p: StateParams) -> float:
    """N = [sum_r binom(k,r)^2 n!/(n-r)! |alpha|^(2(k-r))]^(-1/2)."""
    p.check_nonnull()
    r2 = abs(p.alpha) ** 2
    total = 0.0
    for r in range(min(p.k, p.n) + 1):
        total += math.comb(p.k, r) ** 2 * math.perm(p.n, r) * r2 ** (p.k - r)
    if total == 0.0:
        raise NullStateError(f"state norm underflows at |alpha| = {abs(p.alpha):.3g} with k = {p.k} > n = {p.n}")
    return total**-0.5


def fix_global_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude is real and positive."""
    amps = np.asarray(amps, dtype=complex)
    i = int(np.argmax(np.abs(amps)))
    mag = abs(amps[i])
    out = amps / (amps[i] / mag)
    out[i] = mag  # exactly real, not just to rounding
    return out


def _closed_amplitudes(p: StateParams, dim: int) -> np.ndarray:
    # amplitude of |i>, i = m - k, is N e^{-|a|^2/2} a^{m-n} sqrt(n!/i!) L_n^{m-n}(|a|^2)
    log_pref = math.log(normalization_constant(p)) - 0.5 * abs(p.alpha) ** 2
    lf_n = math.lgamma(p.n + 1)
    out = np.empty(dim, dtype=complex)
    for i in range(dim):
        m = i + p.k
        out[i] = displaced_laguerre(p.n, m - p.n, p.alpha, log_pref + 0.5 * (lf_n - math.lgamma(i + 1)))
    return out


def _check_or_grow(p: StateParams, build) -> FockVector:
    p.check_nonnull()
    dim = p.cutoff
    while True:
        v = build(dim)
        v = v / np.linalg.norm(v)
        tail = FockVector(v).tail_mass(start=p.n + 1)
        if tail < TAIL_TOL:
            break
        if p.dim is not None:
            raise TruncationError(
                f"tail mass {tail:.3e} in the top {TAIL_WINDOW} levels exceeds {TAIL_TOL:g} at dim={dim}; "
                f"try dim={2 * dim}",
                suggested_dim=2 * dim,
            )
        dim *= 2
    return FockVector(fix_global_phase(v))


def psdfs_closed_form(p: StateParams) -> FockVector:
    """Amplitudes from the Laguerre closed form, normalized and phase-fixed."""
    return _check_or_grow(p, lambda d: _closed_amplitudes(p, d))


def psdfs_matrix_oracle(p: StateParams) -> FockVector:
    """a^k D(alpha)|n> built from operator matrices on a padded space."""

    def build(dim: int) -> np.ndarray:
        work = dim + p.k + max(2 * p.k, 10)
        ket = np.zeros(work, dtype=complex)
        ket[p.n] = 1.0
        v = displacement(p.alpha, work) @ ket
        a = annihilation(work)
        for _ in range(p.k):
            v = a @ v
        return v[:dim]

    return _check_or_grow(p, build)


def expectation_adp_aq(p: StateParams, pw: int, qw: int) -> complex:
    """Closed-form series for <(a^dag)^pw a^qw>.

    Uses <a^dag^p a^q> = N^2 e^{-|a|^2} n! sum_m h(m+q) conj(h(m+p)) / m!
    with h(j) = alpha^{j+k-n} L_n^{j+k-n}(|alpha|^2).
    """
    if pw < 0 or qw < 0:
        raise ValueError("moment orders must be nonnegative")
    dim = p.cutoff
    if max(pw, qw) > dim // 2:
        raise ValueError(f"moment order {max(pw, qw)} exceeds dim/2 = {dim // 2}")
    pref = normalization_constant(p) ** 2 * math.factorial(p.n)
    off = p.k - p.n
    r2 = abs(p.alpha) ** 2
    # g(j) = h(j) e^{-|a|^2/2} / sqrt(j!) stays O(1) where h(j) alone overflows
    lg = [math.lgamma(j + 1) for j in range(dim + max(pw, qw))]
    g = [displaced_laguerre(p.n, j + off, p.alpha, -0.5 * (r2 + lg[j])) for j in range(len(lg))]
    terms = np.array(
        [g[m + qw] * np.conj(g[m + pw]) * math.exp(0.5 * (lg[m + qw] + lg[m + pw]) - lg[m]) for m in range(dim)]
    )
    total = complex(np.sum(terms))
    tail = float(np.sum(np.abs(terms[-TAIL_WINDOW:])))
    if tail > 1e-12 * max(abs(total), 1e-300) and tail > 1e-300:
        raise TruncationError(
            f"moment series tail {tail:.3e} too large relative to sum {abs(total):.3e} at dim={dim}",
            suggested_dim=2 * dim,
        )
    return pref * total


def expectation_matrix(v: FockVector, pw: int, qw: int) -> complex:
    """<psi|(a^dag)^pw a^qw|psi> by matrix powers (truncation-exact for a^q on the vector)."""
    a = annihilation(v.dim)
    left = v.amps.copy()
    for _ in range(pw):
        left = a @ left
    right = v.amps.copy()
    for _ in range(qw):
        right = a @ right
    return complex(np.vdot(left, right))


def density_matrix(v: FockVector) -> DensityMatrix:
    """|psi><psi|."""
    return DensityMatrix(np.outer(v.amps, v.amps.conj()))

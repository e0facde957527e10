"""Scalar special functions used by the closed-form expressions.

Everything here works on Python ints and double-precision floats. The
Laguerre and confluent hypergeometric routines are evaluated as explicit
finite sums; when the alternating terms cancel badly the sum is redone in
exact rational arithmetic on the (exactly representable) float input.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

__all__ = [
    "log_factorial",
    "generalized_binomial",
    "laguerre",
    "laguerre_coeffs",
    "hyp1f1_terminating",
    "hyp1f1_coeffs",
    "displaced_laguerre",
    "inv_factorial",
]

# ratio of largest term to result above which float summation is not trusted
_CANCELLATION_LIMIT = 1e4


def log_factorial(m: int) -> float:
    """Return ln(m!)."""
    if m < 0:
        raise ValueError(f"log_factorial needs m >= 0, got {m}")
    if m <= 20:
        # m! is exact in a double up to 22!, so this is correctly rounded
        return math.log(math.factorial(m))
    return math.lgamma(m + 1.0)


def inv_factorial(m: int) -> float:
    """1/m!, with the convention 1/m! = 0 for negative integers m."""
    if m < 0:
        return 0.0
    return 1.0 / math.factorial(m)


def generalized_binomial(x: float, j: int) -> float:
    """Falling-factorial binomial x(x-1)...(x-j+1)/j! for real x."""
    if j < 0:
        raise ValueError(f"generalized_binomial needs j >= 0, got {j}")
    if float(x).is_integer():
        xi = int(x)
        if 0 <= xi < j:
            return 0.0
        if xi >= j:
            return float(math.comb(xi, j))
    out = 1.0
    for i in range(j):
        out *= (x - i) / (i + 1)
    return out


def _exact_binomial(x: int, j: int) -> Fraction:
    num = 1
    for i in range(j):
        num *= x - i
    return Fraction(num, math.factorial(j))


def laguerre_coeffs(n: int, a: int) -> np.ndarray:
    """Power-series coefficients of L_n^a(x), lowest order first.

    Negative integer ``a`` is allowed; the polynomial is the finite sum
    sum_j (-1)^j binom(n+a, n-j) x^j / j!.
    """
    if n < 0:
        raise ValueError(f"Laguerre degree must be >= 0, got {n}")
    return np.array(
        [(-1) ** j * generalized_binomial(n + a, n - j) / math.factorial(j) for j in range(n + 1)]
    )


def laguerre(n: int, a: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^a(x) for integer a of either sign."""
    coeffs = laguerre_coeffs(n, a)
    terms = coeffs * np.power(float(x), np.arange(n + 1))
    value = math.fsum(terms)
    peak = float(np.max(np.abs(terms)))
    if peak > _CANCELLATION_LIMIT * abs(value) and peak > 0.0:
        xf = Fraction(float(x))
        exact = sum(
            (-1) ** j * _exact_binomial(n + a, n - j) * xf**j / math.factorial(j)
            for j in range(n + 1)
        )
        value = float(exact)
    return value


def hyp1f1_coeffs(r: int, b: int) -> np.ndarray:
    """Coefficients of the terminating series 1F1(-r; b; x), lowest order first."""
    if r < 0:
        raise ValueError(f"1F1 needs r >= 0, got {r}")
    if b <= 0:
        raise ValueError(
            f"1F1(-r; b; x) with b = {b} <= 0 is undefined here; "
            "callers must reduce the double sum to p >= q"
        )
    out = np.empty(r + 1)
    c = 1.0
    for j in range(r + 1):
        out[j] = c
        # (-r)_{j+1}/(b)_{j+1}/(j+1)! from the j-th term
        c *= (j - r) / ((b + j) * (j + 1))
    return out


def hyp1f1_terminating(r: int, b: int, x: float) -> float:
    """1F1(-r; b; x) evaluated as a finite sum (r >= 0, b >= 1)."""
    coeffs = hyp1f1_coeffs(r, b)
    terms = coeffs * np.power(float(x), np.arange(r + 1))
    value = math.fsum(terms)
    peak = float(np.max(np.abs(terms)))
    if peak > _CANCELLATION_LIMIT * abs(value) and peak > 0.0:
        xf = Fraction(float(x))
        c = Fraction(1)
        acc = Fraction(0)
        for j in range(r + 1):
            acc += c * xf**j
            c *= Fraction(j - r, (b + j) * (j + 1))
        value = float(acc)
    return value


def displaced_laguerre(n: int, a: int, alpha: complex, log_scale: float = 0.0) -> complex:
    """exp(log_scale) * alpha^a * L_n^a(|alpha|^2) without forming negative powers of alpha.

    For a < 0 the first -a terms of the Laguerre sum vanish, so the product
    is a polynomial in alpha and conj(alpha) and stays finite at alpha = 0.
    That cancellation needs n + a >= 0. Every surviving term carries the phase
    exp(i a arg alpha); magnitudes are summed in the log domain so large |alpha|
    and large a do not overflow before ``log_scale`` is applied.
    """
    if n + a < 0:
        raise ValueError(f"displaced_laguerre needs n + a >= 0, got n={n}, a={a}")
    alpha = complex(alpha)
    r = abs(alpha)
    if r == 0.0:
        return complex(math.exp(log_scale) * generalized_binomial(n, n)) if a == 0 else 0j
    lr = math.log(r)
    total = 0.0
    for j in range(max(0, -a), n + 1):
        c = generalized_binomial(n + a, n - j)
        if c == 0.0:
            continue
        mag = math.exp((a + 2 * j) * lr - math.lgamma(j + 1) + log_scale)
        total += (-1) ** j * c * mag
    return total * cmath.exp(1j * a * cmath.phase(alpha))

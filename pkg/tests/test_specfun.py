import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, hyp1f1

from psdfs.specfun import (
    displaced_laguerre,
    generalized_binomial,
    hyp1f1_coeffs,
    hyp1f1_terminating,
    inv_factorial,
    laguerre,
    log_factorial,
)


@pytest.mark.parametrize("m, expected", [(0, 0.0), (1, 0.0), (5, math.log(120.0))])
def test_log_factorial_values(m, expected):
    assert log_factorial(m) == pytest.approx(expected, abs=1e-12)


def test_log_factorial_large_matches_lgamma():
    assert log_factorial(170) == pytest.approx(math.lgamma(171), rel=1e-14)
    with pytest.raises(ValueError):
        log_factorial(-1)


def test_inv_factorial_negative_is_zero():
    assert inv_factorial(-3) == 0.0
    assert inv_factorial(4) == pytest.approx(1 / 24)


@pytest.mark.parametrize("x, j, expected", [(4, 2, 6), (1, 2, 0), (-1, 2, 1), (2.5, 0, 1)])
def test_generalized_binomial(x, j, expected):
    assert generalized_binomial(x, j) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("n, a, x, expected", [(0, 5, 3.7, 1.0), (1, 0, 2.0, -1.0), (2, -1, 1.0, -0.5)])
def test_laguerre_values(n, a, x, expected):
    assert laguerre(n, a, x) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("r, b, x, expected", [(0, 3, 9.9, 1.0), (1, 2, 2.0, 0.0), (2, 1, 1.0, -0.5)])
def test_hyp1f1_values(r, b, x, expected):
    assert hyp1f1_terminating(r, b, x) == pytest.approx(expected, abs=1e-14)


def test_hyp1f1_rejects_nonpositive_b():
    with pytest.raises(ValueError):
        hyp1f1_coeffs(2, 0)


@given(st.integers(0, 30), st.integers(-30, 30))
def test_laguerre_at_zero_is_binomial(n, a):
    assert laguerre(n, a, 0.0) == pytest.approx(generalized_binomial(n + a, n), rel=1e-12, abs=1e-12)


@given(st.integers(1, 29), st.integers(-10, 10), st.floats(0.0, 25.0))
def test_laguerre_three_term_recurrence(n, a, x):
    lhs = (n + 1) * laguerre(n + 1, a, x)
    rhs = (2 * n + 1 + a - x) * laguerre(n, a, x) - (n + a) * laguerre(n - 1, a, x)
    scale = max(abs(lhs), abs((2 * n + 1 + a - x) * laguerre(n, a, x)), abs((n + a) * laguerre(n - 1, a, x)), 1.0)
    assert abs(lhs - rhs) <= 1e-10 * scale


@given(st.integers(0, 30), st.floats(0.0, 25.0))
def test_kummer_identity_b_one(r, x):
    ref = laguerre(r, 0, x)
    assert hyp1f1_terminating(r, 1, x) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(st.integers(0, 20), st.integers(0, 20), st.floats(0.0, 20.0))
def test_laguerre_matches_scipy_for_nonnegative_a(n, a, x):
    ref = eval_genlaguerre(n, a, x)
    assert laguerre(n, a, x) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(st.integers(0, 15), st.integers(1, 10), st.floats(0.0, 10.0))
def test_hyp1f1_matches_scipy(r, b, x):
    assert hyp1f1_terminating(r, b, x) == pytest.approx(hyp1f1(-r, b, x), rel=1e-8, abs=1e-8)


@given(
    st.integers(0, 8),
    st.integers(-8, 12),
    st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
)
def test_displaced_laguerre_equals_power_times_laguerre(n, a, alpha):
    # the reference alpha**a overflows for tiny alpha, covered separately below
    if abs(alpha) < 1e-6 or n + a < 0:
        return
    ref = alpha**a * laguerre(n, a, abs(alpha) ** 2)
    assert displaced_laguerre(n, a, alpha) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("alpha", [1.7e-273, 1e-3j, 1e-150 * (1 - 1j)])
@pytest.mark.parametrize("n", [1, 2, 8])
def test_displaced_laguerre_tiny_alpha(n, alpha):
    # L_n^{-n}(x) = (-x)^n / n!, so alpha^{-n} L_n^{-n}(|alpha|^2) = (-conj(alpha))^n / n!
    ref = (-complex(alpha).conjugate()) ** n / math.factorial(n)
    assert displaced_laguerre(n, -n, alpha) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_displaced_laguerre_at_origin_finite():
    # L_n^a with a < 0 has a zero of order -a at x = 0 that cancels alpha^a
    assert displaced_laguerre(3, -2, 0j) == 0.0
    assert displaced_laguerre(3, 0, 0j) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        displaced_laguerre(1, -2, 1.0)


def test_functions_are_deterministic():
    xs = np.linspace(0, 20, 7)
    first = [laguerre(12, -5, x) for x in xs]
    assert first == [laguerre(12, -5, x) for x in xs]

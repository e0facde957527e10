import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psdfs.channels import (
    KernelSupportError,
    LossParams,
    lossy_density_matrix,
    lossy_wigner_closed,
    lossy_wigner_convolution,
    lossy_wigner_oracle,
)
from psdfs.state import DensityMatrix, StateParams, annihilation, density_matrix, psdfs_closed_form
from psdfs.wigner import GridGeometry, wigner_closed, wigner_grid, wigner_parity_oracle

P31 = StateParams(3, 1, 0.5)


def _zetas(count, seed, scale=1.5):
    rng = np.random.default_rng(seed)
    return rng.normal(scale=scale, size=count) + 1j * rng.normal(scale=scale, size=count)


def _rho(p):
    return density_matrix(psdfs_closed_form(p))


def test_loss_params_validation():
    with pytest.raises(ValueError):
        LossParams(-0.1)
    with pytest.raises(ValueError):
        LossParams(math.nan)
    with pytest.raises(ValueError):
        LossParams.from_efficiency(0.0)


def test_efficiency_constructor():
    lp = LossParams.from_efficiency(0.8)
    assert lp.T == pytest.approx(0.2, abs=1e-15)
    assert lp.damping == pytest.approx(math.sqrt(0.8))


def test_zero_time_returns_initial():
    assert lossy_wigner_closed(P31, LossParams(0.0), 0.3 + 0.1j) == wigner_closed(P31, 0.3 + 0.1j)


def test_long_time_is_vacuum():
    assert lossy_wigner_closed(P31, LossParams(10.0), 0j) == pytest.approx(2 / math.pi, abs=1e-6)


def test_small_time_is_identity_limit():
    z = _zetas(15, 1)
    got = lossy_wigner_closed(P31, LossParams(1e-6), z)
    assert np.max(np.abs(got - wigner_closed(P31, z))) <= 1e-4


def test_closed_matches_kraus_oracle_examples():
    z = _zetas(15, 2)
    lp = LossParams(0.1)
    assert np.max(np.abs(lossy_wigner_closed(P31, lp, z) - lossy_wigner_oracle(P31, lp, z))) <= 1e-6


@pytest.mark.parametrize("n, k, alpha", [(0, 0, 0.8), (1, 2, 0.4j), (2, 1, -0.6 + 0.3j), (4, 2, 1.0), (5, 3, 1.5)])
@pytest.mark.parametrize("kt", [0.05, 0.3, 1.2])
def test_closed_matches_kraus_oracle(n, k, alpha, kt):
    p = StateParams(n, k, alpha)
    lp = LossParams(kt)
    z = _zetas(12, 3)
    assert np.max(np.abs(lossy_wigner_closed(p, lp, z) - lossy_wigner_oracle(p, lp, z))) <= 1e-8


def test_convolution_vacuum_fixed_point():
    g = wigner_grid(StateParams(0, 0, 0), GridGeometry.square(6.0, 241))
    for kt in (0.1, 0.5):
        assert lossy_wigner_convolution(g, LossParams(kt), 0j) == pytest.approx(2 / math.pi, abs=1e-6)
    # at long times the kernel, not the state, outgrows the grid
    with pytest.raises(KernelSupportError):
        lossy_wigner_convolution(g, LossParams(2.0), 0j)


def test_convolution_coherent_peak_follows_damped_alpha():
    g = wigner_grid(StateParams(0, 0, 1.0), GridGeometry.square(6.0, 241))
    assert lossy_wigner_convolution(g, LossParams(0.5), math.exp(-0.5)) == pytest.approx(2 / math.pi, abs=1e-4)


def test_convolution_matches_closed_form():
    g = wigner_grid(P31, GridGeometry.square(6.5, 261))
    lp = LossParams(0.1)
    for z in _zetas(10, 4, scale=1.0):
        assert lossy_wigner_convolution(g, lp, z) == pytest.approx(lossy_wigner_closed(P31, lp, z), abs=1e-6)


def test_convolution_kernel_outside_grid():
    g = wigner_grid(P31, GridGeometry.square(2.0, 81))
    with pytest.raises(KernelSupportError, match="grid must cover"):
        lossy_wigner_convolution(g, LossParams(0.5), 1.8 + 1.8j)


def test_convolution_rejects_tiny_T():
    g = wigner_grid(P31, GridGeometry.square(4.0, 41))
    with pytest.raises(ValueError):
        lossy_wigner_convolution(g, LossParams(1e-9), 0j)


def test_kraus_examples():
    vac = DensityMatrix(np.diag([1.0, 0, 0, 0]).astype(complex))
    np.testing.assert_allclose(lossy_density_matrix(vac, LossParams(0.7)).elems, vac.elems, atol=1e-15)
    one = DensityMatrix(np.diag([0.0, 1.0, 0, 0]).astype(complex))
    out = lossy_density_matrix(one, LossParams(-0.5 * math.log(0.64)))
    np.testing.assert_allclose(np.real(np.diag(out.elems))[:2], [0.36, 0.64], atol=1e-14)


def test_kraus_psdfs_is_mixed_and_matches_closed():
    lp = LossParams(0.3)
    rho_t = lossy_density_matrix(_rho(P31), lp)
    assert rho_t.purity < 1
    z = _zetas(6, 5)
    assert np.max(np.abs(wigner_parity_oracle(rho_t, z) - lossy_wigner_closed(P31, lp, z))) <= 1e-8


@given(st.floats(0.0, 3.0))
def test_trace_preserved_and_photons_decay(kt):
    rho0 = _rho(P31)
    d = rho0.dim
    num = np.diag(np.arange(d)).astype(complex)
    rho_t = lossy_density_matrix(rho0, LossParams(kt))
    assert abs(rho_t.trace - 1) < 1e-10
    n0 = np.trace(rho0.elems @ num).real
    nt = np.trace(rho_t.elems @ num).real
    assert nt == pytest.approx(math.exp(-2 * kt) * n0, abs=1e-9)
    assert rho_t.min_eigenvalue() > -1e-12


@given(st.floats(0.0, 0.3), st.floats(0.0, 0.3))
def test_purity_decreases_at_early_times(t1, t2):
    t1, t2 = sorted((t1, t2))
    rho0 = _rho(P31)
    p1 = lossy_density_matrix(rho0, LossParams(t1)).purity
    p2 = lossy_density_matrix(rho0, LossParams(t2)).purity
    assert p2 <= p1 + 1e-10


def test_purity_rebounds_toward_vacuum():
    # the output tends to the pure vacuum, so purity is not monotone over all times
    rho0 = _rho(P31)
    pur = [lossy_density_matrix(rho0, LossParams(kt)).purity for kt in (0.0, 0.35, 5.0)]
    assert pur[1] < pur[0] and pur[1] < pur[2]
    assert pur[2] == pytest.approx(1.0, abs=1e-3)


def test_kraus_semigroup():
    rho0 = _rho(StateParams(2, 1, 0.7j))
    a = lossy_density_matrix(lossy_density_matrix(rho0, LossParams(0.2)), LossParams(0.3))
    b = lossy_density_matrix(rho0, LossParams(0.5))
    np.testing.assert_allclose(a.elems, b.elems, atol=1e-12)


def test_three_way_agreement():
    lp = LossParams(0.3)
    g = wigner_grid(P31, GridGeometry.square(6.5, 261))
    for z in _zetas(5, 6, scale=1.0):
        closed = lossy_wigner_closed(P31, lp, z)
        assert lossy_wigner_convolution(g, lp, z) == pytest.approx(closed, abs=1e-4)
        assert lossy_wigner_oracle(P31, lp, z) == pytest.approx(closed, abs=1e-4)


def test_negativity_shrinks_with_time():
    mesh = GridGeometry.square(3.5, 141).mesh()
    mins = [float(np.min(lossy_wigner_closed(P31, LossParams(kt), mesh))) for kt in (0.1, 0.3, 0.5)]
    assert mins[0] < 0
    assert mins[0] <= mins[1] <= mins[2] <= 1e-12


def test_lossy_wigner_normalized():
    geom = GridGeometry.square(6.0, 241)
    vals = lossy_wigner_closed(StateParams(4, 2, 1.0), LossParams(0.4), geom.mesh())
    h = geom.re_axis[1] - geom.re_axis[0]
    assert float(np.sum(vals)) * h * h == pytest.approx(1.0, abs=1e-6)


def test_annihilation_matrix():
    a = annihilation(4)
    np.testing.assert_allclose(np.diag(a, 1), np.sqrt([1, 2, 3]))

"""Weyl kernels: closed forms, grid paths, inverse and HS relation."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistwave.field import (Grid, GridError, FunctionField, gaussian, l2_norm, sample,
                             zero_field)
from twistwave.weyl import (WeylKernel, check_dilation_kernel, hs_norm, inverse_weyl_kernel,
                            kernel_direct, kernel_fft, kernel_values, weyl_kernel)
from twistwave.wavelet import haar_generator


def haar_ft(w):
    """``int_0^1 h(x) e^{i w x} dx`` for the Haar step, by direct integration."""
    w = np.asarray(w, float)
    safe = np.where(w == 0, 1.0, w)
    v = (2 * np.exp(0.5j * safe) - 1 - np.exp(1j * safe)) / (1j * safe)
    return np.where(w == 0, 0.0, v)


def haar_step(u):
    u = np.asarray(u, float)
    return np.where((u >= 0) & (u < 0.5), 1.0, np.where((u >= 0.5) & (u < 1), -1.0, 0.0))


@pytest.mark.parametrize("j", [-1, 0, 1, 2])
def test_haar_kernel_closed_form(j):
    lam = Fraction(1, 4) ** j if j >= 0 else Fraction(4) ** -j
    rng = np.random.default_rng(j + 10)
    xi, eta = rng.uniform(-3, 3, (2, 500))
    got = kernel_values(haar_generator(j), lam, xi, eta)
    want = haar_step(eta - xi) * haar_ft(2 * np.pi * float(lam) * eta)
    assert np.max(np.abs(got - want)) < 1e-13


def test_gaussian_kernel_against_direct_quadrature():
    g = Grid(4.0, 128)
    K_exact = weyl_kernel(gaussian(), 1, g, method="exact").data
    K_direct = weyl_kernel(gaussian(), 1, g, method="direct").data
    assert np.max(np.abs(K_exact - K_direct)) < 1e-12


def test_zero_field_gives_zero_kernel():
    K = weyl_kernel(zero_field(), 1, Grid(2.0, 16))
    assert np.all(K.data == 0) and hs_norm(K) == 0


def test_lambda_zero_rejected():
    with pytest.raises(ValueError):
        weyl_kernel(gaussian(), 0, Grid(2.0, 16))


def test_analytic_field_needs_output_grid():
    with pytest.raises(GridError):
        weyl_kernel(gaussian(), 1)
    with pytest.raises(GridError):
        kernel_values(FunctionField(gaussian()), 1, 0.0, 0.0)


@pytest.mark.parametrize("lam", [1, Fraction(1, 4), -4, Fraction(-1, 2)])
def test_fft_path_matches_direct_sum(lam):
    gs = sample(gaussian(), Grid(4.0, 256))
    a, b = kernel_fft(gs, lam), kernel_direct(gs, lam)
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) < 1e-10


@pytest.mark.parametrize("lam,grid", [(1, Grid(4.0, 256)), (-1, Grid(4.0, 256)),
                                      (Fraction(1, 4), Grid(16.0, 512))])
def test_inverse_round_trip(lam, grid):
    gs = sample(gaussian(), grid)
    back = inverse_weyl_kernel(weyl_kernel(gs, lam))
    sl = slice(grid.n // 8, grid.n - grid.n // 8)
    assert np.max(np.abs(back.data - gs.data)[sl, sl]) < 1e-8


def _haar_inverse_error(X, n):
    g = Grid(X, n)
    back = inverse_weyl_kernel(weyl_kernel(haar_generator(0), 1, g, method="exact"))
    want = sample(haar_generator(0), g).data
    Xg, Yg = np.meshgrid(g.nodes, g.nodes)
    far = (np.abs(Xg - np.rint(2 * Xg) / 2) > 0.1) & (np.abs(Xg) < 2) & (np.abs(Yg) < 2)
    return float(np.max(np.abs(back.data - want)[far]))


def test_inverse_recovers_haar_from_closed_form_kernel():
    # away from the x-jumps the error is Gibbs ringing of the s-truncated
    # Fourier inversion and halves when the box doubles
    e4, e8 = _haar_inverse_error(4.0, 256), _haar_inverse_error(8.0, 512)
    assert e8 < 0.12 and e8 < 0.6 * e4


@pytest.mark.parametrize("lam,grid", [
    (4, Grid(8.0, 512)), (-4, Grid(8.0, 512)), (1, Grid(8.0, 512)), (-1, Grid(8.0, 512)),
    (Fraction(1, 4), Grid(8.0, 512)), (Fraction(-1, 4), Grid(8.0, 512)),
    (16, Grid(4.0, 1024)), (Fraction(1, 16), Grid(32.0, 1024)),
])
def test_hs_relation_gaussian(lam, grid):
    g = gaussian()
    hs = hs_norm(weyl_kernel(g, lam, grid))
    assert abs(hs - abs(float(lam)) ** -0.5 * l2_norm(g, grid)) < 1e-6


def test_hs_defect_of_haar_is_a_box_truncation_effect():
    # the Haar kernel decays like 1/eta^2 so a finite box misses mass ~ 1/X
    defects = []
    for X, n in ((4.0, 256), (8.0, 512), (16.0, 1024)):
        hs = hs_norm(weyl_kernel(haar_generator(0), 1, Grid(X, n)))
        defects.append(1.0 - hs)
    assert all(d > 0 for d in defects)
    assert defects[0] > 1.8 * defects[1] > 3.2 * defects[2]


@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_kernel_linearity(a, b):
    g = Grid(2.0, 32)
    f, h = gaussian(), haar_generator(0)
    lhs = weyl_kernel(a * f + b * h, 1, g).data
    rhs = a * weyl_kernel(f, 1, g).data + b * weyl_kernel(h, 1, g).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@pytest.mark.parametrize("name", ["gaussian", "haar"])
@pytest.mark.parametrize("j", [0, 1, 2])
@pytest.mark.parametrize("k2,l", [(0, 0), (2, 1), (4, 3)])
def test_dilation_kernel_relations(name, j, k2, l):
    phi = gaussian() if name == "gaussian" else haar_generator(0)
    rep = check_dilation_kernel(phi, 1, j, k2 // 2, l)
    assert rep.passed, rep.metrics


def test_dilation_kernel_on_sampled_field_counts_skipped_nodes():
    phi = sample(gaussian(), Grid(4.0, 64))
    rep = check_dilation_kernel(phi, 1, 0, 0, 0, grid=Grid(2.0, 32))
    assert rep.metrics["skipped"] == 0 and rep.passed
    rep = check_dilation_kernel(phi, 1, -1, 0, 0, grid=Grid(2.0, 64))
    assert rep.metrics["skipped"] > 0


def test_weyl_kernel_shape_checked():
    with pytest.raises(GridError):
        WeylKernel(1, Grid(2.0, 16), np.zeros((8, 8)))

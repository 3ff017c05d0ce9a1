"""Weyl-Zak transform identities."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistwave.field import Grid, GridError, gaussian, sample, zero_field
from twistwave.weyl import kernel_values
from twistwave.wavelet import haar_generator
from twistwave.zak import (ZakParams, check_isometry, check_parseval_xi_prime,
                           check_zak_marginal, check_zak_translation, weyl_zak)

SMALL = ZakParams(M=16, H=8.0, n_eta=128)


def test_zero_field():
    assert np.all(weyl_zak(zero_field(), SMALL).data == 0)


def test_params_validation():
    with pytest.raises(ValueError):
        ZakParams(M=0)
    with pytest.raises(ValueError):
        ZakParams(M=4, n_t=8)
    assert ZakParams(M=4).nt == 10


def test_series_matches_direct_sum():
    phi = haar_generator(0)
    p = ZakParams(M=3, H=2.0, n_eta=8)
    z = weyl_zak(phi, p).data
    i, k, e = 2, 5, 3
    ms = np.arange(-3, 4)
    K = kernel_values(phi, 1, p.xi[i] + ms, np.full(ms.size, p.eta[e]))
    want = np.sum(K * np.exp(-2j * np.pi * ms * p.xip[k]))
    assert abs(z[e, i, k] - want) < 1e-13


def test_quasi_periodicity_by_recomputation():
    phi = gaussian()
    p = ZakParams(M=8, H=4.0, n_eta=32)
    ms = p.ms
    eta = p.eta[:, None]
    for xi in (0.1, 0.6):
        shifted = kernel_values(phi, 1, xi + 1 + ms[None, :], eta) @ np.exp(-2j * np.pi * np.outer(ms, p.xip))
        base = kernel_values(phi, 1, xi + ms[None, :] + 1, eta)
        # same samples, re-indexed: m -> m + 1 multiplies by e^{2 pi i xi'}
        ms1 = ms + 1
        ref = base @ np.exp(-2j * np.pi * np.outer(ms1, p.xip)) * np.exp(2j * np.pi * p.xip)[None, :]
        assert np.max(np.abs(shifted - ref)) < 1e-12


@pytest.mark.parametrize("k,l", [(0, 0), (1, 1), (2, 1), (-3, 2)])
@pytest.mark.parametrize("phi", [gaussian(), haar_generator(0)], ids=["gauss", "haar"])
def test_translation_modulation(phi, k, l):
    assert check_zak_translation(phi, k, l, SMALL).passed


def test_translation_zero_shift_is_exact():
    rep = check_zak_translation(haar_generator(0), 0, 0, SMALL)
    assert rep.metrics["max_deviation"] == 0.0


@pytest.mark.parametrize("phi", [gaussian(), haar_generator(0)], ids=["gauss", "haar"])
def test_parseval_in_xi_prime(phi):
    assert check_parseval_xi_prime(phi, SMALL).passed


@pytest.mark.parametrize("phi", [gaussian(), haar_generator(0)], ids=["gauss", "haar"])
def test_marginal(phi):
    assert check_zak_marginal(phi, ZakParams(M=32, H=30.0, n_eta=480)).passed


def test_marginal_reports_tail_mass():
    rep = check_zak_marginal(haar_generator(0), SMALL)
    assert rep.metrics["tail_mass"] == 0.0


def test_isometry_gaussian():
    assert check_isometry(gaussian(), SMALL, norm=1.0).passed


def test_haar_isometry_defect_shrinks_with_window():
    defects = [check_isometry(haar_generator(0), ZakParams(M=M, H=H, n_eta=16 * int(H)),
                              norm=1.0).metrics["max_deviation"]
               for M, H in ((8, 4.0), (16, 8.0), (32, 16.0))]
    assert defects[0] > defects[1] > defects[2]


def test_sampled_field_needs_room_for_series():
    f = sample(gaussian(), Grid(4.0, 64))
    with pytest.raises(GridError):
        weyl_zak(f, ZakParams(M=8, H=2.0, n_eta=8))


@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_linearity(a):
    p = ZakParams(M=4, H=2.0, n_eta=16)
    f, g = gaussian(), haar_generator(0)
    lhs = weyl_zak(a * f + g, p).data
    rhs = a * weyl_zak(f, p).data + weyl_zak(g, p).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12

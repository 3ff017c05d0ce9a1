"""Spectral functions, Calderon sums and the dyadic-band inequality."""
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from twistwave.checks import lattice_combos
from twistwave.field import Atom, ChirpField, UNIT_BOX, Band, gaussian, zero_field
from twistwave.ops import TwistIndex, dilate, twisted_translate
from twistwave.spectral import (calderon_sum, mainineq_check, sigma_general, sigma_l1,
                                sigma_principal, sigma_sum, sigma_w0j, uniform_eta)
from twistwave.wavelet import GeneratorFamily, design_tiling_family, haar_family, haar_generator
from twistwave.zak import ZakParams

ETA = uniform_eta(16.0, 4096)
# eta-integrals of the Gaussian Calderon terms for j = -1, 0, 1, frozen from a
# dense direct-sum kernel oracle
GAUSS_TERM_MASS = {-1: 0.25, 0: 1.0, 1: 4.0}


def haar_term(j, eta):
    e = np.where(eta == 0, 1.0, eta)
    v = 2.0 ** (3 * j) * 4 * np.sin(np.pi * 2.0 ** (-j - 1) * e) ** 4 / (np.pi ** 2 * e ** 2)
    return np.where(eta == 0, 0.0, v)


def haar_tail(X):
    """int_X^inf of the j = 0 Haar term, with sin^4 expanded into cosines."""
    def osc(w):
        return quad(lambda e: 1 / e ** 2, X, np.inf, weight="cos", wvar=w)[0]
    return 4 / np.pi ** 2 * (3 / (8 * X) - osc(np.pi) / 2 + osc(2 * np.pi) / 8)


def in_band(eta, lo, hi):
    # positive band [lo, hi), negative band [-hi, -lo)
    return ((eta >= lo) & (eta < hi)) | ((eta >= -hi) & (eta < -lo))


def band_generator(lo, hi):
    b = Band(((Fraction(lo), Fraction(hi)), (Fraction(-hi), Fraction(-lo))), (1.0, 1.0))
    return ChirpField([Atom(1.0, b, UNIT_BOX, alpha=Fraction(1))])


def test_zero_generator():
    assert np.all(sigma_principal(zero_field(), ETA).values == 0)
    assert sigma_l1(sigma_principal(zero_field(), ETA)) == 0


def test_sigma_integrates_to_norm():
    assert abs(sigma_l1(sigma_principal(gaussian(), ETA)) - 1.0) < 1e-12


def test_haar_sigma_closed_form():
    s = sigma_principal(haar_generator(0), ETA)
    assert np.max(np.abs(s.values - haar_term(0, ETA))) < 1e-13


def test_haar_sigma_l1_near_one():
    tail = 2 * haar_tail(16.0)
    assert abs(sigma_l1(sigma_principal(haar_generator(0), ETA)) - (1 - tail)) < 1e-4


def test_geometric_family_l1():
    gens = [gaussian(2.0 ** -j) for j in range(30)]
    assert abs(sigma_l1(sigma_sum(gens, ETA)) - 4 / 3) < 1e-12


def test_sigma_sum_cases():
    assert np.all(sigma_sum([], ETA).values == 0)
    g = haar_generator(0)
    assert np.array_equal(sigma_sum([g], ETA).values, sigma_principal(g, ETA).values)


def test_sigma_sum_disjoint_bands():
    a, b = band_generator(1, 2), band_generator(2, 4)
    s = sigma_sum([a, b], ETA).values
    sa, sb = sigma_principal(a, ETA).values, sigma_principal(b, ETA).values
    assert np.all(sa * sb == 0)
    assert np.array_equal(s, sa + sb)
    on = in_band(ETA, 1, 4)
    assert np.max(np.abs(s[on] - 1)) < 1e-12 and np.all(s[~on] == 0)


@pytest.mark.parametrize("k,l", [(1, 0), (0, 1), (3, -2)])
def test_sigma_translation_invariance(k, l):
    psi = haar_generator(0)
    a = sigma_principal(twisted_translate(psi, TwistIndex(k, l, 1)), ETA).values
    assert np.max(np.abs(a - sigma_principal(psi, ETA).values)) < 1e-10


def test_sigma_general_cases():
    psi = haar_generator(0)
    p = ZakParams(M=16, H=8.0, n_eta=128)
    v = sigma_general(psi, (0.3, 0.6, 0.7), p)
    b = sigma_general(2.0 * psi, (0.3, 0.6, 0.7), p)
    assert v == pytest.approx(b, rel=1e-12)
    # bracket is the window mass, so the ratio is sigma over that mass
    mass = 1 - 2 * haar_tail(8.0)
    assert v == pytest.approx(float(haar_term(0, np.array(0.7))) / mass, rel=1e-4)
    assert sigma_general(zero_field(), (0.3, 0.6, 0.7), p) == 0.0


def test_sigma_w0j():
    assert np.all(sigma_w0j(zero_field(), 1, ETA).values == 0)
    psi = haar_generator(0)
    assert np.array_equal(sigma_w0j(psi, 0, ETA).values, sigma_principal(psi, ETA).values)
    s = sigma_w0j(haar_generator(1), 1, ETA)
    assert np.max(np.abs(s.values - haar_term(1, ETA))) < 1e-6
    with pytest.raises(ValueError):
        sigma_w0j(psi, -1, ETA)


def test_calderon_empty_family():
    assert np.all(calderon_sum(GeneratorFamily(), ETA).values == 0)


def test_calderon_haar_against_closed_form():
    s = calderon_sum(haar_family(-3, 3), ETA)
    want = sum(haar_term(j, ETA) for j in range(-3, 4))
    assert np.max(np.abs(s.values - want)) < 1e-6
    for j in range(-3, 4):
        assert np.max(np.abs(s.per_j[j] - haar_term(j, ETA))) < 1e-6


def test_calderon_additive_over_partition():
    fam = haar_family(-3, 3)
    whole = calderon_sum(fam, ETA).values
    a = calderon_sum(fam, ETA, j_max=0).values
    b = calderon_sum(fam, ETA, j_min=1).values
    lo = calderon_sum(fam, ETA, j_min=-3, j_max=0)
    assert np.array_equal(lo.values, a)
    assert np.max(np.abs(a + b - whole)) < 1e-15


def test_calderon_thread_count_does_not_change_result(monkeypatch):
    fam = haar_family(-2, 2)
    monkeypatch.setenv("TWC_THREADS", "1")
    a = calderon_sum(fam, ETA).values
    monkeypatch.setenv("TWC_THREADS", "4")
    assert np.array_equal(calderon_sum(fam, ETA).values, a)


def test_calderon_tiling_is_indicator():
    s = calderon_sum(design_tiling_family(range(-3, 4)), ETA)
    inside = in_band(ETA, 0.125, 16)
    assert np.max(np.abs(s.values[inside] - 1)) < 1e-12
    assert np.all(s.values[~inside] == 0)


def test_tiling_term_j0_is_band_indicator():
    s = calderon_sum(design_tiling_family([0]), ETA)
    on = in_band(ETA, 1, 2)
    assert np.max(np.abs(s.values[on] - 1)) < 1e-12 and np.all(s.values[~on] == 0)


@pytest.mark.parametrize("j", [-1, 0, 1])
def test_term_mass_regression(j):
    s = calderon_sum(GeneratorFamily({j: gaussian()}), uniform_eta(16.0, 8192))
    assert sigma_l1(s) == pytest.approx(GAUSS_TERM_MASS[j], rel=1e-10)


def test_mainineq_zero_field():
    rep = mainineq_check(zero_field(), [haar_generator(0)], 0, M=8)
    assert rep.metrics["lhs"] == 0.0 and rep.passed


def test_mainineq_single_generator():
    psi = haar_generator(0)
    rep = mainineq_check(psi, [psi], 0, M=8)
    assert rep.passed and rep.metrics["slack"] > 0


@pytest.mark.parametrize("j", [0, 1, 2])
def test_mainineq_lattice_combination(j):
    psi = haar_generator(0)
    g = lattice_combos(psi, 3, seed=11)[2]
    assert mainineq_check(dilate(g, j), [psi], j, M=12).passed

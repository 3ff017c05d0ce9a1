"""Grids, profiles, fields and grid quadrature."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistwave.field import (GAUSS, HAAR, UNIT_BOX, Atom, Band, Block, ChirpField, Grid,
                             GridError, SampledField, block_inner, gaussian, inner,
                             interpolate, l2_norm, sample, zero_field)
from twistwave.wavelet import SHANNON


def test_grid_rejects_non_power_of_two():
    with pytest.raises(GridError):
        Grid(8.0, 1000)


def test_grid_rejects_fractional_inverse_step():
    with pytest.raises(GridError):
        Grid(3.0, 64)


def test_grid_nodes_are_left_endpoints():
    g = Grid(2.0, 8)
    assert g.h == 0.5
    assert g.nodes[0] == -2.0 and g.nodes[-1] == 1.5
    assert g.index_range(0.0, 1.0) == (4, 6)


def test_haar_profile_is_half_open():
    u = np.array([-0.1, 0.0, 0.25, 0.5, 0.75, 1.0])
    assert np.array_equal(HAAR(u).real, [0, 1, 1, -1, -1, 0])


def test_haar_fourier_integral():
    w = np.linspace(-30, 30, 61) + 0.123
    want = (2 * np.exp(0.5j * w) - 1 - np.exp(1j * w)) / (1j * w)
    assert np.max(np.abs(HAAR.ft(w) - want)) < 1e-13


def test_gaussian_profile_fourier_integral():
    u = np.linspace(-8, 8, 20001)
    for w in (0.0, 1.0, 3.5):
        num = np.trapezoid(GAUSS(u) * np.exp(1j * w * u), u)
        assert abs(num - GAUSS.ft(w)) < 1e-10


def test_shannon_band_profile_closed_form():
    x = np.array([0.1, 0.37, 1.25, -2.4])
    want = (np.sin(4 * np.pi * x) - np.sin(2 * np.pi * x)) / (np.pi * x)
    assert np.max(np.abs(SHANNON(x) - want)) < 1e-13
    assert SHANNON.norm2() == 2.0


def test_band_fourier_integral_by_quadrature():
    b = Band(((Fraction(1, 2), Fraction(3, 2)),), (1.0,))
    u = np.linspace(-400, 400, 800001)
    w = 2 * np.pi * 1.0
    num = np.trapezoid(b(u) * np.exp(1j * w * u), u)
    assert abs(num - 1.0) < 5e-3


def test_gaussian_has_unit_norm():
    assert abs(l2_norm(gaussian(), Grid(8.0, 256)) - 1.0) < 1e-12


def test_zero_field():
    g = Grid(2.0, 16)
    assert l2_norm(zero_field(), g) == 0.0
    assert np.all(sample(zero_field(), g).data == 0)


def test_sampled_field_is_read_only():
    f = sample(gaussian(), Grid(2.0, 16))
    with pytest.raises(ValueError):
        f.data[0, 0] = 1.0


def test_sampled_field_shape_check():
    with pytest.raises(GridError):
        SampledField(Grid(2.0, 16), np.zeros((8, 8)))


def test_interpolate_reproduces_nodes():
    g = Grid(2.0, 32)
    f = sample(gaussian(), g)
    X, Y = np.meshgrid(g.nodes, g.nodes)
    for order in ("nearest", "linear"):
        assert np.max(np.abs(interpolate(f, X, Y, order) - f.data)) < 1e-15


def test_interpolate_zero_outside():
    f = sample(gaussian(), Grid(2.0, 32))
    assert interpolate(f, np.array([5.0]), np.array([0.0]))[0] == 0


def test_block_inner_matches_full_grid():
    g = Grid(4.0, 128)
    f = ChirpField([Atom(1.0, HAAR, UNIT_BOX, alpha=Fraction(1))])
    h = ChirpField([Atom(0.5j, UNIT_BOX, HAAR, beta=Fraction(1, 2))])
    full = complex(g.h ** 2 * np.sum(sample(f, g).data * np.conj(sample(h, g).data)))
    assert abs(block_inner(Block(f, g), Block(h, g), g.h) - full) < 1e-14


def test_inner_mismatched_grids():
    a = sample(gaussian(), Grid(2.0, 16))
    b = sample(gaussian(), Grid(2.0, 32))
    with pytest.raises(GridError):
        inner(a, b)


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.floats(-3, 3), st.floats(-3, 3))
def test_chirp_field_linearity(a, b, x, y):
    f = gaussian()
    h = ChirpField([Atom(1.0, HAAR, HAAR, alpha=Fraction(1))])
    lhs = (a * f + b * h)(x, y)
    assert abs(lhs - (a * f(x, y) + b * h(x, y))) < 1e-12

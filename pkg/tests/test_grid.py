import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavenly.grid import (
    TWO_PI,
    Grid,
    GridError,
    GridFunction,
    NonZeroMean,
    antiderivative,
    antiderivative_matrix,
    delta_kernel,
    derivative,
    derivative_matrix,
    green_kernel,
    inner_product,
    integrate,
    nyquist_mode,
)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid.line(7)
    with pytest.raises(GridError):
        Grid.line(6)
    with pytest.raises(GridError):
        Grid((8, 8, 8))
    assert Grid.torus(16, 32).shape == (16, 32)


def test_nodes_and_volume():
    g = Grid.torus(16)
    assert g.n_points == 256
    assert np.isclose(g.cell_volume, (TWO_PI / 16) ** 2)
    x1, x2 = g.mesh()
    assert x1.shape == (16, 16) and x1[3, 0] == x2[0, 3]


def test_nearest_index_range():
    g = Grid.line(16)
    assert g.nearest_index(TWO_PI / 16 * 3.4) == (3,)
    with pytest.raises(GridError):
        g.nearest_index(TWO_PI)
    with pytest.raises(GridError):
        g.nearest_index(-0.1)


def test_grid_function_is_read_only(line64):
    f = line64.sample(np.sin)
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(GridError):
        GridFunction(line64, np.full(64, np.nan))


def test_derivative_of_sine_is_cosine(line64):
    x = line64.axis_nodes()
    f = GridFunction(line64, np.sin(3 * x))
    assert np.abs(derivative(f).values - 3 * np.cos(3 * x)).max() < 1e-12
    assert np.abs(derivative(f, order=2).values + 9 * np.sin(3 * x)).max() < 1e-11


def test_derivative_on_torus_axes():
    g = Grid.torus(32, 16)
    f = g.sample(lambda a, b: np.sin(a) * np.cos(2 * b))
    x1, x2 = g.mesh()
    assert np.abs(derivative(f, 0).values - np.cos(x1) * np.cos(2 * x2)).max() < 1e-12
    assert np.abs(derivative(f, 1).values + 2 * np.sin(x1) * np.sin(2 * x2)).max() < 1e-12


def test_antiderivative_of_cos(line64):
    x = line64.axis_nodes()
    g = antiderivative(GridFunction(line64, np.cos(x)))
    assert np.abs(g.values - np.sin(x)).max() < 1e-12


def test_antiderivative_rejects_mean(line64):
    with pytest.raises(NonZeroMean):
        antiderivative(line64.constant(1.0))


def test_derivative_matrix_is_skew(line64):
    D = derivative_matrix(line64)
    assert np.abs(D + D.T).max() < 1e-12
    A = antiderivative_matrix(line64)
    assert np.abs(A + A.T).max() < 1e-12


def test_delta_has_unit_mass_and_sifts(line64):
    s = 1.3
    d = delta_kernel(line64, s)
    assert abs(integrate(d) - 1.0) < 1e-14
    f = line64.sample(np.cos)
    assert abs(inner_product(d, f) - f.at(s)) < 1e-14


def test_green_identity_up_to_nyquist(line64):
    s = np.pi / 2
    lhs = derivative(green_kernel(line64, s)).values + 1 / TWO_PI - delta_kernel(line64, s).values
    nyq = nyquist_mode(line64)
    rest = lhs - nyq * (lhs @ nyq) / 64
    assert np.abs(rest).max() < 1e-10
    assert abs(green_kernel(line64, s).mean()) < 1e-14


def test_green_is_sawtooth(line64):
    G = green_kernel(line64, 0.0).values
    x = line64.axis_nodes()
    mid = slice(8, 56)
    # away from the jump the periodic Heaviside is (pi - x) / (2 pi) up to grid oscillation
    assert np.abs(G[mid] - (np.pi - x[mid]) / TWO_PI).max() < 0.05


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(-5, 5))
def test_derivative_is_linear(coefs, alpha):
    g = Grid.line(32)
    x = g.axis_nodes()
    f = GridFunction(g, sum(c * np.sin((k + 1) * x) for k, c in enumerate(coefs)))
    h = GridFunction(g, np.cos(2 * x))
    lhs = derivative(f * alpha + h).values
    rhs = alpha * derivative(f).values + derivative(h).values
    assert np.abs(lhs - rhs).max() < 1e-10

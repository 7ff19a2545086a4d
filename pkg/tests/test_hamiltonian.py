import numpy as np
import pytest

from heavenly.grid import TWO_PI, Grid, GridError, GridFunction
from heavenly.hamiltonian import (
    DENSITIES,
    Functional,
    LineField,
    cubic_slope_density,
    gateaux_gradient,
    h0_gradient,
    homotopy_reconstruct,
    pairing,
    t_flow_gradient,
    variational_derivative,
)

N = 64


@pytest.fixture
def grid():
    return Grid.line(N)


def periodic_field(grid):
    x = grid.axis_nodes()
    return LineField(grid, 0.4 * np.sin(x) + 0.2 * np.cos(3 * x))


def test_line_field_from_slope(grid):
    x = grid.axis_nodes()
    u = LineField.from_slope(grid, 1 + 0.5 * np.sin(x))
    assert u.slope == pytest.approx(1.0)
    assert np.abs(u.dx() - (1 + 0.5 * np.sin(x))).max() < 1e-12
    with pytest.raises(GridError):
        LineField(Grid.torus(8), np.zeros((8, 8)))


def test_pairing_drift_term(grid):
    x = grid.axis_nodes()
    # int_0^{2pi} x cos(x) dx = 0 and int_0^{2pi} x dx = 2 pi^2
    u = LineField(grid, np.zeros(N), 1.0)
    assert abs(pairing(np.cos(x), u)) < 1e-12
    assert pairing(np.ones(N), u) == pytest.approx(2 * np.pi**2)
    # int_0^{2pi} x sin(x) dx = -2 pi
    assert pairing(np.sin(x), u) == pytest.approx(-TWO_PI)


@pytest.mark.parametrize("name", sorted(DENSITIES))
def test_partials_and_gradient_agree(name, grid):
    dens = DENSITIES[name]()
    assert dens.check_partials() < 1e-6
    u = periodic_field(grid)
    exact = variational_derivative(dens, u).values
    fd = gateaux_gradient(Functional(dens), u).values
    assert np.abs(exact - fd).max() < 1e-6 * max(np.abs(exact).max(), 1.0)


def test_h0_gradient_matches_variational(grid):
    u = periodic_field(grid)
    a = variational_derivative(cubic_slope_density(), u).values
    assert np.abs(a - h0_gradient(u).values).max() < 1e-10


@pytest.mark.parametrize("name", sorted(DENSITIES))
def test_homotopy_on_periodic_fields(name, grid):
    dens = DENSITIES[name]()
    u = periodic_field(grid)
    F = Functional(dens)
    zero = F(LineField(grid, np.zeros(N)))
    got = homotopy_reconstruct(lambda w: variational_derivative(dens, w), u)
    assert got == pytest.approx(F(u) - zero, abs=1e-8)


def test_homotopy_misses_drift_boundary_term(grid):
    x = grid.axis_nodes()
    u = LineField.from_slope(grid, 1 + 0.5 * np.sin(x))
    direct = Functional(cubic_slope_density())(u)
    assert direct == pytest.approx(11 * np.pi / 4)
    got = homotopy_reconstruct(h0_gradient, u)
    assert got == pytest.approx(3 * np.pi / 4)


def test_homotopy_needs_nodes(grid):
    with pytest.raises(ValueError):
        homotopy_reconstruct(h0_gradient, periodic_field(grid), n_nodes=2)


def test_t_flow_gradient_is_mean_free(grid):
    x = grid.axis_nodes()
    u = LineField.from_slope(grid, 1 + 0.3 * np.cos(x))
    g = t_flow_gradient(u)
    assert isinstance(g, GridFunction)
    assert abs(g.mean()) < 1e-10

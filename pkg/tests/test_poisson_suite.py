import numpy as np
import pytest

from heavenly.grid import Grid, GridFunction, NonZeroMean
from heavenly.poisson_suite import (
    NonPositiveSlope,
    OperatorPencil,
    apply_theta0,
    flow_consistency,
    inverse_scalar,
    pencil_jacobi_defect,
    project_out,
    recursion_apply,
    skew_defect,
    theta0,
    theta0_inv,
    theta0_jacobi,
    theta_minus1,
    theta_minus1_inv,
    theta_minus1_jacobi,
)

N = 64


@pytest.fixture
def slope():
    g = Grid.line(N)
    return g, 1 + 0.3 * np.cos(g.axis_nodes())


def test_theta0_of_cos(slope):
    g, _ = slope
    x = g.axis_nodes()
    out = apply_theta0(GridFunction(g, np.cos(x)))
    assert np.abs(out.values - 0.5 * np.sin(x)).max() < 1e-12
    with pytest.raises(NonZeroMean):
        apply_theta0(g.constant(1.0))


def test_theta0_inverse_on_mean_free(slope):
    g, _ = slope
    x = g.axis_nodes()
    f = np.sin(2 * x) + np.cos(5 * x)
    assert np.abs(theta0_inv(g)(theta0(g)(f)) - f).max() < 1e-12


def test_skewness(slope):
    g, v = slope
    assert skew_defect(theta0(g), 20) < 1e-12
    assert skew_defect(theta_minus1(g, v), 20) < 1e-12
    assert skew_defect(OperatorPencil(theta0(g), theta_minus1(g, v), 2.0).combined(), 20) < 1e-12


def test_jacobi(slope):
    g, v = slope
    assert theta0_jacobi(g, 5).defect < 1e-12
    r = theta_minus1_jacobi(g, v, 5)
    assert r.relative < 1e-6
    assert 0 < r.projection_norm < 1
    assert pencil_jacobi_defect(1.0, g, v, 5).relative < 1e-6


def test_project_out_is_orthogonal():
    rng = np.random.default_rng(0)
    c = [np.ones(10), rng.normal(size=10)]
    out = project_out(rng.normal(size=(4, 10)), c)
    assert np.abs(out @ np.stack(c, 1)).max() < 1e-12


def test_inverse_prefactor(slope):
    g, v = slope
    c, resid = inverse_scalar(g, v, prefactor=0.5)
    assert abs(c - 0.5) < 1e-8 and resid < 1e-8
    c1, _ = inverse_scalar(g, v, prefactor=1.0)
    assert abs(c1 - 1.0) < 1e-8


def test_inverse_needs_positive_slope(slope):
    g, v = slope
    with pytest.raises(NonPositiveSlope):
        theta_minus1_inv(g, v - 2)


def test_flow_consistency(slope):
    g, v = slope
    reports = flow_consistency(g, v)
    assert all(r.passed for r in reports)
    assert all(r.sign == -1 for r in reports)


def test_recursion_maps_cos_to_something_mean_free(slope):
    g, v = slope
    x = g.axis_nodes()
    out = recursion_apply(GridFunction(g, np.cos(x)), v)
    assert abs(out.mean()) < 1e-12

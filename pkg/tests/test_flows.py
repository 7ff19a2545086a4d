import csv

import numpy as np
import pytest

from heavenly.flows import (
    BlowupDetected,
    Flow,
    FlowSpec,
    NoConvergence,
    catastrophe_time,
    characteristics_solution,
    conserved_H0,
    energy,
    evolve,
    hierarchy_rhs,
    momentum,
    plebanski_flow_residual,
)
from heavenly.grid import Grid, GridFunction


@pytest.fixture
def v0():
    g = Grid.line(128)
    return GridFunction(g, 0.1 * np.sin(g.axis_nodes()))


def test_flow_spec_validation(v0):
    with pytest.raises(ValueError):
        FlowSpec("mp-y", v0.grid, 0.0, 1.0)
    spec = FlowSpec("mp-y", v0.grid, 0.01, 0.1)
    assert spec.flow is Flow.MP_Y and spec.n_steps == 10
    assert spec.cfl(v0.values) > 0


def test_rhs_of_constant_is_zero():
    g = Grid.line(16)
    assert np.abs(hierarchy_rhs("mp-t", g.constant(2.0)).values).max() == 0.0
    with pytest.raises(ValueError):
        hierarchy_rhs("plebanski-t", g.constant(1.0))


@pytest.mark.parametrize("flow", ["mp-y", "mp-t"])
def test_conservation(flow, v0):
    traj = evolve(flow, v0, 0.1, 1e-3)
    assert traj.times[-1] == pytest.approx(0.1)
    for m in (conserved_H0, momentum, energy):
        assert traj.relative_drift(m) < 1e-8


def test_matches_characteristics(v0):
    T = 0.5
    traj = evolve("mp-y", v0, T, 1e-3)
    x = v0.grid.axis_nodes()
    exact = characteristics_solution(lambda s: 0.1 * np.sin(s), T, x, lambda s: 0.1 * np.cos(s))
    assert np.abs(traj.final.values - exact).max() < 1e-7


def test_characteristics_fail_after_crossing():
    with pytest.raises(NoConvergence):
        characteristics_solution(np.sin, 1.0, np.linspace(0, 6, 50), np.cos)
    assert catastrophe_time(1.0) == pytest.approx(1 / 3)
    assert catastrophe_time(0.0) == np.inf


def test_blowup_detected():
    g = Grid.line(64)
    v = GridFunction(g, np.sin(g.axis_nodes()))
    with pytest.raises(BlowupDetected):
        evolve("mp-y", v, 2.0, 1e-3)


def test_csv(tmp_path, v0):
    traj = evolve("mp-y", v0, 0.01, 1e-3, store_every=5)
    path = tmp_path / "t.csv"
    traj.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["time", "H0", "min_v", "max_v"]
    assert len(rows) == len(traj.times) + 1


def test_plebanski_residual_vanishes_for_static_degenerate_field():
    g = Grid.torus(16)
    u = g.sample(lambda a, b: np.sin(a + b))
    zero = g.constant(0.0)
    r1, r2 = plebanski_flow_residual(u, zero, zero)
    assert r1.max_abs() < 1e-10 and r2.max_abs() < 1e-10

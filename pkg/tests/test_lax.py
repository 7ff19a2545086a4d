import numpy as np
import pytest

from heavenly.grid import Grid, GridError
from heavenly.lax import (
    JetField,
    MissingJetComponent,
    build_pair,
    casimir_defect,
    compatibility_residual,
    equivalence_check,
    mp_casimir_order_minus1,
    on_shell_mp,
    pde_residual,
    random_jets,
)


def test_jet_from_expression_is_consistent():
    jet = JetField.from_expression("mp", "sin(x + y) * cos(t) + 0.1*cos(2*x)", Grid.line(32), y=0.3, t=0.1)
    jet.require()
    assert jet.consistency_defect() < 1e-12
    with pytest.raises(MissingJetComponent):
        jet["u_11"]


def test_jet_rejects_wrong_grid_or_variable():
    with pytest.raises(GridError):
        JetField.from_expression("mp", "sin(x)", Grid.torus(8))
    with pytest.raises(ValueError):
        JetField.from_expression("mp", "sin(x1)", Grid.line(8))


def test_mp_residual_of_travelling_wave():
    jet = JetField.from_expression("mp", "sin(x + y + t)", Grid.line(64), y=0.2, t=0.4)
    x = Grid.line(64).axis_nodes()
    assert np.abs(pde_residual("mp", jet).values + 2 * np.sin(x + 0.6)).max() < 1e-10
    r = compatibility_residual(build_pair("mp", jet))
    assert np.abs(r.coefficient(0)[0] + 2 * np.sin(x + 0.6)).max() < 1e-10


@pytest.mark.parametrize("case, n", [("mp", 64), ("plebanski", 32)])
def test_lax_equivalence_on_random_jets(case, n):
    grid = Grid.line(n) if case == "mp" else Grid.torus(n)
    for jet in random_jets(case, grid, count=3, seed=7):
        assert equivalence_check(case, jet).passed


def test_pair_case_mismatch():
    jet = JetField.from_expression("mp", "sin(x)", Grid.line(16))
    with pytest.raises(ValueError):
        build_pair("plebanski", jet)


def test_mp_casimir_defects():
    jet = random_jets("mp", Grid.line(64), count=1, seed=3)[0]
    d = casimir_defect("mp", jet)
    scale = max(jet.scale, 1.0)
    if 0 in d:
        assert d[0][0].max_abs() < 1e-12 * scale
    assert np.abs(d[-1][0].values - mp_casimir_order_minus1(jet)).max() < 1e-10 * scale
    on = on_shell_mp(jet)
    assert np.abs(mp_casimir_order_minus1(on)).max() < 1e-10 * scale

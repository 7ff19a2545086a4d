"""Seed elements, coordinate-functional gradients and Lie-Poisson bracket kernels.

Two cases are supported:

* ``mp`` (Mikhalev-Pavlov, 1-torus): seed ``lambda**p (lambda + u0) dx`` with
  ``u0 = -2 u_x``; coordinate gradient ``lambda**-(p+1) delta(x - s) d/dx``.
* ``plebanski`` (2-torus): seed ``lambda**p (lambda + w_x1) dx1 + lambda**p (lambda + w_x2) dx2``
  with ``w = u_x1 - u_x2``; coordinate gradient built from the periodic
  Heaviside and the delta kernel.

All pairings of a seed ``l_p`` with gradients use the plain residue
(pairing index 0): the power ``lambda**p`` is carried by the seed itself.
Brackets are evaluated with the R-bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .grid import (
    TWO_PI,
    Grid,
    GridError,
    GridFunction,
    antiderivative_matrix,
    spectral_antiderivative,
    spectral_derivative,
)
from .loop_algebra import LaurentOneForm, LaurentVectorField, r_bracket, residue_pairing

NONVANISHING_POWERS = frozenset({-1, 0})


class Case(str, Enum):
    MP = "mp"
    PLEBANSKI = "plebanski"


@dataclass(frozen=True, eq=False)
class SeedElement:
    case: Case
    p: int
    u: GridFunction
    form: LaurentOneForm

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def coordinate_field(self) -> GridFunction:
        """The coordinate u0 as a field: -2 u_x (MP) or u_x1 - u_x2 (Plebanski)."""
        g = self.grid
        if self.case is Case.MP:
            return GridFunction(g, -2.0 * spectral_derivative(self.u.values, g, 0))
        w = spectral_derivative(self.u.values, g, 0) - spectral_derivative(self.u.values, g, 1)
        return GridFunction(g, w)


def make_seed(case, p: int, u: GridFunction) -> SeedElement:
    case = Case(case)
    g = u.grid
    if case is Case.MP:
        if g.dim != 1:
            raise GridError("the MP seed lives on the 1-torus")
        u0 = -2.0 * spectral_derivative(u.values, g, 0)
        form = LaurentOneForm(g, {p + 1: (np.ones(g.shape),), p: (u0,)})
    else:
        if g.dim != 2:
            raise GridError("the Plebanski seed lives on the 2-torus")
        w = spectral_derivative(u.values, g, 0) - spectral_derivative(u.values, g, 1)
        w1 = spectral_derivative(w, g, 0)
        w2 = spectral_derivative(w, g, 1)
        one = np.ones(g.shape)
        form = LaurentOneForm(g, {p + 1: (one, one), p: (w1, w2)})
    return SeedElement(case, int(p), u, form)


def _delta_1d(n: int, j: int) -> np.ndarray:
    v = np.zeros(n)
    v[j] = n / TWO_PI
    return v


def _green_1d(grid: Grid, axis: int, j: int) -> np.ndarray:
    """Samples of G(x - s_j) along one axis, G the zero-mean periodic Heaviside."""
    n = grid.shape[axis]
    g1 = Grid.line(n)
    return spectral_antiderivative(_delta_1d(n, j), g1)


def coordinate_gradient(seed: SeedElement, samples) -> LaurentVectorField:
    """Discretized gradient of the coordinate functional u0(samples) at the seed."""
    g = seed.grid
    power = -(seed.p + 1)
    idx = g.nearest_index(samples)
    if seed.case is Case.MP:
        return LaurentVectorField.single(g, power, _delta_1d(g.shape[0], idx[0]))
    j1, j2 = idx
    n1, n2 = g.shape
    if seed.p < 0:
        # theta(s1 - x1) delta(x2 - s2) d/dx1;  G(s1 - x1) = -G(x1 - s1)
        a1 = np.outer(-_green_1d(g, 0, j1), _delta_1d(n2, j2))
        return LaurentVectorField.single(g, power, a1, np.zeros(g.shape))
    # -1/2 (theta(x1 - s1) delta(x2 - s2) d/dx1 + delta(x1 - s1) theta(x2 - s2) d/dx2)
    a1 = -0.5 * np.outer(_green_1d(g, 0, j1), _delta_1d(n2, j2))
    a2 = -0.5 * np.outer(_delta_1d(n1, j1), _green_1d(g, 1, j2))
    return LaurentVectorField.single(g, power, a1, a2)


def evaluate_coordinate(seed: SeedElement, samples) -> float:
    """u0(samples) represented as the pairing (l_p | grad u0)."""
    return residue_pairing(seed.form, coordinate_gradient(seed, samples), 0)


def sampled_coordinate(seed: SeedElement, samples) -> float:
    """u0(samples) read directly off the grid."""
    return seed.coordinate_field().at(samples)


def reproducing_offset(seed: SeedElement, samples) -> float:
    """Zero-mean constant by which the pairing differs from the sampled coordinate.

    Zero for MP.  For Plebanski the periodic Heaviside only inverts the
    derivative on mean-free functions, so the pairing reproduces
    ``w - mean_x1 w`` (p < 0) or ``w - (mean_x1 w + mean_x2 w)/2`` (p >= 0).
    """
    if seed.case is Case.MP:
        return 0.0
    w = seed.coordinate_field().values
    j1, j2 = seed.grid.nearest_index(samples)
    m1 = w[:, j2].mean()
    if seed.p < 0:
        return float(m1)
    return float(0.5 * (m1 + w[j1, :].mean()))


def bracket_value(seed: SeedElement, t1, t2) -> float:
    """(l_p | [grad u0(t1), grad u0(t2)]_R) with the plain residue."""
    a = coordinate_gradient(seed, t1)
    b = coordinate_gradient(seed, t2)
    return residue_pairing(seed.form, r_bracket(a, b), 0)


def vanishing_powers(seed: SeedElement | None = None) -> frozenset[int]:
    """Powers p for which the coordinate bracket is not identically zero."""
    return NONVANISHING_POWERS


# -- closed forms ------------------------------------------------------------


def _ddelta(n: int, j_eval: int, j_center: int) -> float:
    """delta'(s_eval - s_center), discretized as the spectral derivative of delta_kernel."""
    d = spectral_derivative(_delta_1d(n, j_center), Grid.line(n))
    return float(d[j_eval])


def _green_at(n: int, j_eval: int, j_center: int) -> float:
    """G(s_eval - s_center)."""
    return float(_green_1d(Grid.line(n), 0, j_center)[j_eval])


def _closed_forms(seed: SeedElement, t1, t2) -> tuple[float, float]:
    """(reference closed form, periodic-consistent closed form)."""
    g = seed.grid
    u0 = seed.coordinate_field().values
    if seed.case is Case.MP:
        n = g.shape[0]
        (j1,), (j2,) = g.nearest_index(t1), g.nearest_index(t2)
        dd = _ddelta(n, j1, j2)
        if seed.p == 0:
            val = -2.0 * dd
            return val, val
        # p = -1: the reference form carries (u0(s1) - u0(s2)); antisymmetry requires the sum
        return dd * (u0[j1] - u0[j2]), dd * (u0[j1] + u0[j2])
    n1, n2 = g.shape
    j1, j2 = g.nearest_index(t1)
    j3, j4 = g.nearest_index(t2)
    if seed.p == -1:
        w1 = spectral_derivative(u0, g, 0)
        dlt = (n2 / TWO_PI) if j2 == j4 else 0.0
        theta = _green_at(n1, j3, j1)
        reference = (w1[j1, j2] + w1[j3, j4]) * theta * dlt
        # the periodic Heaviside has G' = delta - 1/(2 pi); its constant contributes
        # (w(s1, s2) - w(s3, s2)) / (2 pi) on the diagonal s2 = s4
        wf = u0 - u0.mean(axis=0, keepdims=True)
        corr = (wf[j1, j2] - wf[j3, j2]) * dlt / TWO_PI
        return reference, reference + corr
    # p = 0, reference form: 1/2 (delta(s1 - s3) theta(s2 - s4) - theta(s1 - s3) delta(s2 - s4))
    d13 = (n1 / TWO_PI) if j1 == j3 else 0.0
    d24 = (n2 / TWO_PI) if j2 == j4 else 0.0
    g13 = _green_at(n1, j1, j3)
    g24 = _green_at(n2, j2, j4)
    reference = 0.5 * (d13 * g24 - g13 * d24)
    # direct evaluation: theta(s1 - s3) delta(s2 - s4) + delta(s1 - s3) theta(s2 - s4),
    # plus the contribution of the 1/(2 pi) constant in G'
    direct = g13 * d24 + d13 * g24 - (g13 + g24) / (2.0 * TWO_PI)
    return reference, direct


@dataclass(frozen=True, eq=False)
class BracketKernel:
    case: Case
    p: int
    tuples: list = field(repr=False)
    numeric: np.ndarray = field(repr=False)
    closed: np.ndarray = field(repr=False)
    closed_consistent: np.ndarray = field(repr=False)

    @property
    def scale(self) -> float:
        return float(max(np.abs(self.numeric).max(), np.abs(self.closed_consistent).max(), 1e-300))

    def defect(self, consistent: bool = True) -> float:
        ref = self.closed_consistent if consistent else self.closed
        return float(np.abs(self.numeric - ref).max())

    def relative_defect(self, consistent: bool = True) -> float:
        return self.defect(consistent) / self.scale


def bracket_kernel(seed: SeedElement, pairs) -> BracketKernel:
    """Numeric bracket values and closed forms over ``pairs`` of sample tuples."""
    if seed.p not in NONVANISHING_POWERS:
        raise ValueError(f"closed forms exist only for p in {{-1, 0}}, got p={seed.p}")
    pairs = [(tuple(np.atleast_1d(a)), tuple(np.atleast_1d(b))) for a, b in pairs]
    numeric, closed, consistent = [], [], []
    for t1, t2 in pairs:
        numeric.append(bracket_value(seed, t1, t2))
        c, cc = _closed_forms(seed, t1, t2)
        closed.append(c)
        consistent.append(cc)
    return BracketKernel(seed.case, seed.p, pairs, np.array(numeric), np.array(closed), np.array(consistent))


def mp_kernel_table(seed: SeedElement) -> np.ndarray:
    """Numeric bracket {u0(s_i), u0(s_j)} for every pair of grid nodes (MP case)."""
    if seed.case is not Case.MP:
        raise ValueError("kernel tables are provided for the MP case")
    g = seed.grid
    nodes = g.axis_nodes(0)
    n = len(nodes)
    table = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = bracket_value(seed, (nodes[i],), (nodes[j],))
            table[i, j] = v
            table[j, i] = -v
    return table


def integrated_bracket(seed: SeedElement, table: np.ndarray | None = None) -> np.ndarray:
    """{u(s_i), u(s_j)} recovered from the u0 kernel by inverse derivatives in both samples.

    With u0 = -2 u_s the kernel equals 4 d_s1 d_s2 {u(s1), u(s2)}; integration
    constants follow the zero-mean convention.
    """
    if table is None:
        table = mp_kernel_table(seed)
    A = antiderivative_matrix(seed.grid)
    return A @ (table / 4.0) @ A.T


def mp_integrated_closed_form(grid: Grid) -> np.ndarray:
    """1/2 theta(s_i - s_j) with theta the periodic Heaviside."""
    n = grid.shape[0]
    return 0.5 * np.column_stack([_green_1d(grid, 0, j) for j in range(n)])

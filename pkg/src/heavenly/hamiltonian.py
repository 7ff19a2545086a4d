"""Local functionals on the circle: variational derivatives, a finite-difference
gradient oracle and homotopy reconstruction of a functional from its gradient.

Fields may carry a linear drift: ``LineField`` stores u = slope * x + periodic
part, which is how a slope field such as u_x = 1 + sin(x)/2 is integrated
without losing its mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .grid import (
    TWO_PI,
    Grid,
    GridError,
    GridFunction,
    derivative_matrix,
    spectral_antiderivative,
    spectral_derivative,
)

QUADRATURE_NODES = 5


@dataclass(frozen=True, eq=False)
class LineField:
    """u(x) = slope * x + periodic(x) sampled on a 1D grid."""

    grid: Grid
    periodic: np.ndarray
    slope: float = 0.0

    def __post_init__(self):
        if self.grid.dim != 1:
            raise GridError("line fields live on 1D grids")
        p = np.array(self.periodic, dtype=float)
        if p.shape != self.grid.shape:
            raise GridError("periodic part does not match the grid")
        p.flags.writeable = False
        object.__setattr__(self, "periodic", p)
        object.__setattr__(self, "slope", float(self.slope))

    @classmethod
    def coerce(cls, u) -> "LineField":
        if isinstance(u, LineField):
            return u
        if isinstance(u, GridFunction):
            return cls(u.grid, u.values)
        raise TypeError(f"expected LineField or GridFunction, got {type(u).__name__}")

    @classmethod
    def from_slope(cls, grid: Grid, ux) -> "LineField":
        """The field with derivative ``ux`` and zero-mean periodic part."""
        v = np.asarray(ux.values if isinstance(ux, GridFunction) else ux, dtype=float)
        m = float(v.mean())
        return cls(grid, spectral_antiderivative(v - m, grid), m)

    def values(self) -> np.ndarray:
        return self.slope * self.grid.axis_nodes() + self.periodic

    def dx(self, order: int = 1) -> np.ndarray:
        d = spectral_derivative(self.periodic, self.grid, 0, order)
        return d + self.slope if order == 1 else d

    def scaled(self, mu: float) -> "LineField":
        return LineField(self.grid, mu * self.periodic, mu * self.slope)

    def perturbed(self, direction: np.ndarray, eps: float) -> "LineField":
        return LineField(self.grid, self.periodic + eps * direction, self.slope)


def pairing(g, u) -> float:
    """<g, u> over one period, with the drift term slope * int x g dx done exactly.

    int_0^{2pi} x g dx = 2 pi^2 mean(g) + 2 pi G(0), G the zero-mean antiderivative
    of g - mean(g).
    """
    u = LineField.coerce(u)
    gv = np.asarray(g.values if isinstance(g, GridFunction) else g, dtype=float)
    grid = u.grid
    total = float(np.sum(gv * u.periodic) * grid.cell_volume)
    if u.slope:
        m = float(gv.mean())
        G = spectral_antiderivative(gv - m, grid)
        total += u.slope * (m * TWO_PI * np.pi + TWO_PI * float(G[0]))
    return total


DensityFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _zero(u, ux, uxx):
    return np.zeros_like(u)


@dataclass(frozen=True)
class LocalDensity:
    """f(u, u_x, u_xx) with its partial derivatives in each slot."""

    f: DensityFn
    f_u: DensityFn = _zero
    f_ux: DensityFn = _zero
    f_uxx: DensityFn = _zero
    name: str = "density"

    def jet(self, u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        u = LineField.coerce(u)
        return u.values(), u.dx(1), u.dx(2)

    def check_partials(self, n_points: int = 20, seed: int = 0, step: float = 1e-6) -> float:
        """Largest relative mismatch between the partials and central differences of f."""
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-2.0, 2.0, size=(3, n_points))
        worst = 0.0
        for slot, part in enumerate((self.f_u, self.f_ux, self.f_uxx)):
            up, dn = pts.copy(), pts.copy()
            up[slot] += step
            dn[slot] -= step
            fd = (self.f(*up) - self.f(*dn)) / (2 * step)
            exact = part(*pts)
            scale = max(np.abs(exact).max(), np.abs(fd).max(), 1.0)
            worst = max(worst, float(np.abs(fd - exact).max() / scale))
        return worst


@dataclass(frozen=True)
class Functional:
    density: LocalDensity

    def value(self, u) -> float:
        u = LineField.coerce(u)
        vals = self.density.f(*self.density.jet(u))
        vals = np.broadcast_to(vals, u.grid.shape)
        return float(vals.sum() * u.grid.cell_volume)

    __call__ = value


def variational_derivative(density: LocalDensity, u) -> GridFunction:
    """f_u - D(f_ux) + D^2(f_uxx)."""
    u = LineField.coerce(u)
    grid = u.grid
    jet = density.jet(u)
    out = np.broadcast_to(density.f_u(*jet), grid.shape).astype(float)
    out = out - spectral_derivative(np.broadcast_to(density.f_ux(*jet), grid.shape), grid, 0, 1)
    out = out + spectral_derivative(np.broadcast_to(density.f_uxx(*jet), grid.shape), grid, 0, 2)
    return GridFunction(grid, out)


def gateaux_gradient(functional, u, step: float | None = None) -> GridFunction:
    """Gradient from central differences of F along each nodal direction.

    ``functional`` is any callable on fields.  With the discrete L2 pairing
    the gradient at node j is (F[u + h e_j] - F[u - h e_j]) / (2 h dx).
    """
    u = LineField.coerce(u)
    grid = u.grid
    if step is None:
        step = 1e-4 * max(1.0, float(np.abs(u.periodic).max()))
    out = np.empty(grid.shape[0])
    for j in range(grid.shape[0]):
        e = np.zeros(grid.shape[0])
        e[j] = 1.0
        out[j] = (functional(u.perturbed(e, step)) - functional(u.perturbed(e, -step))) / (2 * step)
    return GridFunction(grid, out / grid.cell_volume)


def homotopy_reconstruct(gradfield: Callable[[LineField], object], u, n_nodes: int = QUADRATURE_NODES) -> float:
    """F[u] - F[0] = int_0^1 <gradfield(mu u), u> dmu by Gauss-Legendre quadrature.

    The identity needs boundary terms of the variation to vanish, which holds
    for periodic u.  For a field with drift the gradient alone does not see
    the drift's contribution and the result is only the periodic part.
    """
    if n_nodes < 3:
        raise ValueError("use at least 3 quadrature nodes")
    u = LineField.coerce(u)
    nodes, weights = leggauss(n_nodes)
    mus = 0.5 * (nodes + 1.0)
    total = 0.0
    for mu, w in zip(mus, weights):
        total += 0.5 * w * pairing(gradfield(u.scaled(mu)), u)
    return float(total)


# -- densities and gradients used across the package ------------------------


def cubic_slope_density() -> LocalDensity:
    """u_x^3"""
    return LocalDensity(lambda u, a, b: a**3, f_ux=lambda u, a, b: 3 * a**2, name="u_x^3")


def linear_density() -> LocalDensity:
    """u"""
    return LocalDensity(lambda u, a, b: u, f_u=lambda u, a, b: np.ones_like(u), name="u")


def harmonic_density() -> LocalDensity:
    """u_x^2 / 2"""
    return LocalDensity(lambda u, a, b: 0.5 * a**2, f_ux=lambda u, a, b: a, name="u_x^2/2")


def mixed_density() -> LocalDensity:
    """u u_x^2"""
    return LocalDensity(
        lambda u, a, b: u * a**2,
        f_u=lambda u, a, b: a**2,
        f_ux=lambda u, a, b: 2 * u * a,
        name="u u_x^2",
    )


def curvature_density() -> LocalDensity:
    """u_xx^2"""
    return LocalDensity(lambda u, a, b: b**2, f_uxx=lambda u, a, b: 2 * b, name="u_xx^2")


DENSITIES = {
    "u_x^3": cubic_slope_density,
    "u": linear_density,
    "u_x^2/2": harmonic_density,
    "u u_x^2": mixed_density,
    "u_xx^2": curvature_density,
}


def h0_gradient(u) -> GridFunction:
    """-6 u_x u_xx, the gradient of int u_x^3 dx."""
    u = LineField.coerce(u)
    return GridFunction(u.grid, -6.0 * u.dx(1) * u.dx(2))


def t_flow_gradient(u, sign: int = -1, prefactor: float = 1.0) -> GridFunction:
    """sign * theta_minus1_inv(u) applied to 5/2 u_x^3, the gradient read off the t-flow.

    ``sign`` links the flow to its Hamiltonian form and ``prefactor`` is the
    scalar in front of the inverse; 1 makes it a true inverse on admissible
    covectors.  Requires u_x > 0.
    """
    from .poisson_suite import theta_minus1_inv

    u = LineField.coerce(u)
    v = u.dx(1)
    inv = theta_minus1_inv(u.grid, v, prefactor=prefactor).matrix
    return GridFunction(u.grid, sign * (inv @ (2.5 * v**3)))


__all__ = [
    "LineField",
    "LocalDensity",
    "Functional",
    "pairing",
    "variational_derivative",
    "gateaux_gradient",
    "homotopy_reconstruct",
    "h0_gradient",
    "t_flow_gradient",
    "DENSITIES",
    "derivative_matrix",
]

"""Periodic grid calculus on the 1-torus and 2-torus.

All differentiation is pseudo-spectral (trigonometric interpolation).  The
first-derivative operator drops the Nyquist mode so that it is a real,
exactly skew-adjoint matrix; the antiderivative is the zero-mean inverse of
that operator on its range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class GridError(ValueError):
    pass


class NonZeroMean(GridError):
    """Raised when the inverse derivative is applied to a function with nonzero mean."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 2pi)^d, d in {1, 2}."""

    shape: tuple[int, ...]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if len(shape) not in (1, 2):
            raise GridError(f"only 1D and 2D grids are supported, got shape {shape}")
        for n in shape:
            if n < 8 or n % 2:
                raise GridError(f"axis sizes must be even and >= 8, got {n}")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def line(cls, n: int) -> "Grid":
        return cls((n,))

    @classmethod
    def torus(cls, n1: int, n2: int | None = None) -> "Grid":
        return cls((n1, n1 if n2 is None else n2))

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(TWO_PI / n for n in self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_nodes(self, axis: int = 0) -> np.ndarray:
        n = self.shape[axis]
        return np.arange(n) * (TWO_PI / n)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Node coordinates, one array per axis, each of ``self.shape``."""
        return tuple(np.meshgrid(*(self.axis_nodes(a) for a in range(self.dim)), indexing="ij"))

    def nearest_index(self, point) -> tuple[int, ...]:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.dim,):
            raise GridError(f"expected a point with {self.dim} coordinates")
        if np.any(point < 0.0) or np.any(point >= TWO_PI):
            raise GridError(f"sample point {point} outside [0, 2pi)")
        idx = []
        for a, s in enumerate(point):
            n = self.shape[a]
            idx.append(int(np.rint(s / (TWO_PI / n))) % n)
        return tuple(idx)

    def wavenumbers(self, axis: int, ndim: int | None = None) -> np.ndarray:
        """Integer wavenumbers shaped to broadcast along grid ``axis`` of an
        ``ndim``-dimensional array whose trailing axes are the grid axes."""
        n = self.shape[axis]
        k = np.fft.fftfreq(n, d=1.0 / n)
        ndim = self.dim if ndim is None else ndim
        bcast = [1] * ndim
        bcast[ndim - self.dim + axis] = n
        return k.reshape(bcast)

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.shape))

    def constant(self, c: float) -> "GridFunction":
        return GridFunction(self, np.full(self.shape, float(c)))

    def sample(self, func) -> "GridFunction":
        """Evaluate ``func(*coords)`` at the grid nodes."""
        vals = np.broadcast_to(np.asarray(func(*self.mesh()), dtype=float), self.shape)
        return GridFunction(self, np.array(vals))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise GridError(f"values of shape {vals.shape} do not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("grid function has non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridError("grid mismatch")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __pow__(self, k):
        return GridFunction(self.grid, self.values**k)

    def mean(self) -> float:
        return float(self.values.mean())

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def at(self, point) -> float:
        return float(self.values[self.grid.nearest_index(point)])


@dataclass(frozen=True, eq=False)
class KernelVector(GridFunction):
    kind: str = "delta"


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise GridError("non-finite values")


def spectral_derivative(values: np.ndarray, grid: Grid, axis: int = 0, order: int = 1) -> np.ndarray:
    """Array-level spectral derivative along grid ``axis``.

    ``values`` may carry leading batch axes; the grid axes are the trailing ones.
    """
    if order not in (1, 2):
        raise GridError(f"derivative order must be 1 or 2, got {order}")
    if not 0 <= axis < grid.dim:
        raise GridError(f"axis {axis} invalid for a {grid.dim}D grid")
    _check_finite(values)
    n = grid.shape[axis]
    k = grid.wavenumbers(axis, np.ndim(values))
    ax = np.ndim(values) - grid.dim + axis
    if order == 1:
        mult = 1j * k
        # the Nyquist mode has no real skew-symmetric derivative
        mult = np.where(np.abs(k) == n // 2, 0.0, mult)
    else:
        mult = -(k**2)
    vhat = np.fft.fft(values, axis=ax)
    return np.real(np.fft.ifft(vhat * mult, axis=ax))


def spectral_antiderivative(values: np.ndarray, grid: Grid, axis: int = 0) -> np.ndarray:
    """Zero-mean inverse of the first derivative along ``axis`` (Nyquist mode dropped)."""
    n = grid.shape[axis]
    k = grid.wavenumbers(axis, np.ndim(values))
    ax = np.ndim(values) - grid.dim + axis
    safe = np.where(k == 0, 1.0, k)
    mult = np.where((k == 0) | (np.abs(k) == n // 2), 0.0, 1.0 / (1j * safe))
    vhat = np.fft.fft(values, axis=ax)
    return np.real(np.fft.ifft(vhat * mult, axis=ax))


def derivative(f: GridFunction, axis: int = 0, order: int = 1) -> GridFunction:
    return GridFunction(f.grid, spectral_derivative(f.values, f.grid, axis, order))


def antiderivative(f: GridFunction, rtol: float = 1e-10) -> GridFunction:
    """The unique zero-mean g on the circle with g' = f (f must be mean-free)."""
    if f.grid.dim != 1:
        raise GridError("antiderivative is defined on 1D grids")
    scale = max(f.max_abs(), 1.0) if f.max_abs() > 0 else 1.0
    if abs(f.mean()) > rtol * scale:
        raise NonZeroMean(f"mean {f.mean():.3e} is not zero; the inverse derivative is undefined")
    return GridFunction(f.grid, spectral_antiderivative(f.values, f.grid))


def integrate(f: GridFunction) -> float:
    return float(f.values.sum() * f.grid.cell_volume)


def inner_product(f: GridFunction, g: GridFunction) -> float:
    if f.grid != g.grid:
        raise GridError("grid mismatch")
    return float(np.sum(f.values * g.values) * f.grid.cell_volume)


def delta_kernel(grid: Grid, s) -> KernelVector:
    """Nearest-node indicator scaled to unit mass."""
    vals = np.zeros(grid.shape)
    vals[grid.nearest_index(s)] = 1.0 / grid.cell_volume
    return KernelVector(grid, vals, kind="delta")


def green_kernel(grid: Grid, s: float) -> KernelVector:
    """Periodic Heaviside: the zero-mean G with G' = delta_s - 1/(2pi).

    Equality holds on the range of the discrete derivative, i.e. up to the
    Nyquist component of ``delta_kernel(grid, s)``.
    """
    if grid.dim != 1:
        raise GridError("green_kernel is defined on 1D grids")
    d = delta_kernel(grid, s).values
    return KernelVector(grid, spectral_antiderivative(d, grid), kind="green")


def nyquist_mode(grid: Grid, axis: int = 0) -> np.ndarray:
    """Unit-mean-square alternating vector (-1)^j along ``axis``."""
    n = grid.shape[axis]
    alt = (-1.0) ** np.arange(n)
    bcast = [1] * grid.dim
    bcast[axis] = n
    return np.broadcast_to(alt.reshape(bcast), grid.shape).copy()


def derivative_matrix(grid: Grid, order: int = 1) -> np.ndarray:
    """Dense matrix of the spectral derivative on a 1D grid."""
    if grid.dim != 1:
        raise GridError("matrices are assembled for 1D grids only")
    # row i of the batched result is (D e_i)^T
    return spectral_derivative(np.eye(grid.shape[0]), grid, axis=0, order=order).T


def antiderivative_matrix(grid: Grid) -> np.ndarray:
    if grid.dim != 1:
        raise GridError("matrices are assembled for 1D grids only")
    return spectral_antiderivative(np.eye(grid.shape[0]), grid, axis=0).T

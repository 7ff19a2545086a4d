"""Laurent-in-lambda vector fields and 1-forms on the torus.

Coefficients are stored sparsely as ``{power: (component_0, ..., component_{d-1})}``
with every component a plain ndarray on one shared :class:`~heavenly.grid.Grid`.
The splitting puts lambda**0 in the plus part: plus powers are ``k >= 0``,
minus powers ``k < 0``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .grid import Grid, GridError, GridFunction, spectral_derivative


def is_plus(power: int) -> bool:
    return power >= 0


class _Laurent:
    kind = "laurent"

    def __init__(self, grid: Grid, coeffs: Mapping[int, tuple] | None = None):
        self.grid = grid
        clean: dict[int, tuple[np.ndarray, ...]] = {}
        for power, comps in (coeffs or {}).items():
            comps = tuple(comps)
            if len(comps) != grid.dim:
                raise GridError(f"power {power}: expected {grid.dim} components, got {len(comps)}")
            arrs = []
            for c in comps:
                if isinstance(c, GridFunction):
                    if c.grid != grid:
                        raise GridError("component grid mismatch")
                    c = c.values
                a = np.broadcast_to(np.asarray(c, dtype=float), grid.shape).copy()
                a.flags.writeable = False
                arrs.append(a)
            clean[int(power)] = tuple(arrs)
        self.coeffs = clean

    @classmethod
    def single(cls, grid: Grid, power: int, *components):
        return cls(grid, {power: components})

    @classmethod
    def zero(cls, grid: Grid):
        return cls(grid, {})

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def powers(self) -> list[int]:
        return sorted(self.coeffs)

    def coefficient(self, power: int) -> tuple[np.ndarray, ...]:
        return self.coeffs.get(power, tuple(np.zeros(self.grid.shape) for _ in range(self.dim)))

    def component(self, power: int, axis: int = 0) -> GridFunction:
        return GridFunction(self.grid, self.coefficient(power)[axis])

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.grid != self.grid:
            raise GridError("grid mismatch")

    def _combine(self, other, sign):
        self._check(other)
        out = {p: list(c) for p, c in self.coeffs.items()}
        for p, comps in other.coeffs.items():
            base = out.get(p, [np.zeros(self.grid.shape)] * self.dim)
            out[p] = [b + sign * c for b, c in zip(base, comps)]
        return type(self)(self.grid, out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, c: float):
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c: float):
        return type(self)(self.grid, {p: tuple(c * a for a in comps) for p, comps in self.coeffs.items()})

    def shift(self, k: int):
        """Multiply by lambda**k."""
        return type(self)(self.grid, {p + k: comps for p, comps in self.coeffs.items()})

    def max_abs(self) -> float:
        return max((float(np.abs(a).max()) for comps in self.coeffs.values() for a in comps), default=0.0)

    def pruned(self, atol: float = 0.0):
        keep = {p: c for p, c in self.coeffs.items() if max(float(np.abs(a).max()) for a in c) > atol}
        return type(self)(self.grid, keep)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, shape={self.grid.shape}, powers={self.powers})"


class LaurentVectorField(_Laurent):
    """sum_k lambda**k sum_j a_j^{(k)}(x) d/dx_j"""

    kind = "vector"


class LaurentOneForm(_Laurent):
    """sum_k lambda**k sum_j l_j^{(k)}(x) dx_j"""

    kind = "form"


@dataclass(frozen=True)
class SplitConvention:
    """Partition of the integers into plus (k >= 0) and minus (k < 0) powers."""

    def is_plus(self, power: int) -> bool:
        return is_plus(power)

    def is_minus(self, power: int) -> bool:
        return not is_plus(power)


def _d(grid, arr, axis):
    return spectral_derivative(arr, grid, axis=axis, order=1)


def _same(a, b):
    if a.grid != b.grid:
        raise GridError("grid mismatch")


def commutator(a: LaurentVectorField, b: LaurentVectorField) -> LaurentVectorField:
    """Lie bracket of vector fields, [a, b]_j = sum_i a_i d_i b_j - b_i d_i a_j, power by power."""
    _same(a, b)
    grid = a.grid
    out: dict[int, list[np.ndarray]] = defaultdict(lambda: [np.zeros(grid.shape) for _ in range(grid.dim)])
    db = {q: [[_d(grid, comp, i) for i in range(grid.dim)] for comp in comps] for q, comps in b.coeffs.items()}
    da = {p: [[_d(grid, comp, i) for i in range(grid.dim)] for comp in comps] for p, comps in a.coeffs.items()}
    for p, ac in a.coeffs.items():
        for q, bc in b.coeffs.items():
            acc = out[p + q]
            for j in range(grid.dim):
                for i in range(grid.dim):
                    acc[j] = acc[j] + ac[i] * db[q][j][i] - bc[i] * da[p][j][i]
    return LaurentVectorField(grid, dict(out))


def project(a: LaurentVectorField, sign: int) -> LaurentVectorField:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    keep = {p: c for p, c in a.coeffs.items() if is_plus(p) == (sign == 1)}
    return type(a)(a.grid, keep)


def r_matrix(a: LaurentVectorField) -> LaurentVectorField:
    """R = (P+ - P-)/2."""
    return (project(a, 1) - project(a, -1)).scale(0.5)


def r_bracket(a: LaurentVectorField, b: LaurentVectorField) -> LaurentVectorField:
    return commutator(r_matrix(a), b) + commutator(a, r_matrix(b))


def residue_pairing(l: LaurentOneForm, a: LaurentVectorField, p: int = 0) -> float:
    """res_lambda lambda**(-p) (l | a) with the L2 metric on the torus.

    Picks every pair of powers (m, k) with m + k = p - 1.
    """
    _same(l, a)
    vol = l.grid.cell_volume
    total = 0.0
    for m, lc in l.coeffs.items():
        k = p - 1 - m
        if k not in a.coeffs:
            continue
        ac = a.coeffs[k]
        total += sum(float(np.sum(x * y)) for x, y in zip(lc, ac)) * vol
    return total


def coadjoint_action(a: LaurentVectorField, l: LaurentOneForm) -> LaurentOneForm:
    """Lie derivative of the 1-form l along a.

    (ad*_a l)_j = sum_i d_i(l_j a_i) + l_i d_j a_i.  It satisfies
    (ad*_a l | b) = -(l | [a, b]) for every vector field b and every pairing index.
    """
    _same(a, l)
    grid = a.grid
    out: dict[int, list[np.ndarray]] = defaultdict(lambda: [np.zeros(grid.shape) for _ in range(grid.dim)])
    for k, ac in a.coeffs.items():
        da = [[_d(grid, comp, j) for j in range(grid.dim)] for comp in ac]
        for m, lc in l.coeffs.items():
            acc = out[k + m]
            for j in range(grid.dim):
                for i in range(grid.dim):
                    acc[j] = acc[j] + _d(grid, lc[j] * ac[i], i) + lc[i] * da[i][j]
    return LaurentOneForm(grid, dict(out))

"""Vector-field Lax pairs, their lambda-wise compatibility residuals and
asymptotic Casimir defects for the MP and Plebanski heavenly equations.

ψ is never represented: [d_t + A, d_y + B] = B_t - A_y + [A, B] has only
spatial components, so compatibility is checked on Laurent coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expression import Expression, parse_expression
from .grid import Grid, GridError, GridFunction, spectral_derivative
from .lie_poisson import Case
from .loop_algebra import LaurentOneForm, LaurentVectorField, coadjoint_action, commutator
from .report import VerificationReport

# jet entry -> partial derivative orders
JET_SPEC: dict[Case, dict[str, dict[str, int]]] = {
    Case.MP: {
        "u": {},
        "u_x": {"x": 1},
        "u_y": {"y": 1},
        "u_t": {"t": 1},
        "u_xx": {"x": 2},
        "u_xy": {"x": 1, "y": 1},
        "u_xt": {"x": 1, "t": 1},
        "u_yy": {"y": 2},
    },
    Case.PLEBANSKI: {
        "u": {},
        "u_1": {"x1": 1},
        "u_2": {"x2": 1},
        "u_11": {"x1": 2},
        "u_12": {"x1": 1, "x2": 1},
        "u_22": {"x2": 2},
        "u_t": {"t": 1},
        "u_y": {"y": 1},
        "u_1t": {"x1": 1, "t": 1},
        "u_2y": {"x2": 1, "y": 1},
        "u_11t": {"x1": 2, "t": 1},
        "u_12t": {"x1": 1, "x2": 1, "t": 1},
        "u_12y": {"x1": 1, "x2": 1, "y": 1},
        "u_22y": {"x2": 2, "y": 1},
    },
}

SPATIAL_VARIABLES = {Case.MP: ("x",), Case.PLEBANSKI: ("x1", "x2")}


class MissingJetComponent(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class JetField:
    """u and the partial derivatives the Lax pair consumes, as grid functions."""

    case: Case
    grid: Grid
    fields: dict[str, GridFunction]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.fields[name].values
        except KeyError:
            raise MissingJetComponent(f"jet for case {self.case.value} lacks {name!r}") from None

    def require(self):
        missing = [k for k in JET_SPEC[self.case] if k not in self.fields]
        if missing:
            raise MissingJetComponent(f"jet for case {self.case.value} lacks {missing}")

    def replaced(self, **updates) -> "JetField":
        new = dict(self.fields)
        for k, v in updates.items():
            new[k] = v if isinstance(v, GridFunction) else GridFunction(self.grid, v)
        return JetField(self.case, self.grid, new)

    @property
    def scale(self) -> float:
        return max(float(np.abs(f.values).max()) for f in self.fields.values())

    def consistency_defect(self) -> float:
        """Largest gap between jet entries and spectral x-derivatives of lower entries."""
        spatial = SPATIAL_VARIABLES[self.case]
        spec = JET_SPEC[self.case]
        worst = 0.0
        for name, orders in spec.items():
            if name not in self.fields:
                continue
            for axis, var in enumerate(spatial):
                if orders.get(var, 0) == 0:
                    continue
                lower = dict(orders)
                lower[var] -= 1
                lower = {k: v for k, v in lower.items() if v}
                src = next((k for k, o in spec.items() if o == lower and k in self.fields), None)
                if src is None:
                    continue
                d = spectral_derivative(self.fields[src].values, self.grid, axis)
                worst = max(worst, float(np.abs(d - self.fields[name].values).max()))
        return worst

    @classmethod
    def from_expression(cls, case, expr, grid: Grid, y: float = 0.0, t: float = 0.0) -> "JetField":
        """Sample u and its exact derivatives at fixed (y, t)."""
        case = Case(case)
        if isinstance(expr, str):
            expr = parse_expression(expr)
        spatial = SPATIAL_VARIABLES[case]
        if grid.dim != len(spatial):
            raise GridError(f"case {case.value} needs a {len(spatial)}D grid")
        allowed = set(spatial) | {"y", "t"}
        stray = expr.variables() - allowed
        if stray:
            raise ValueError(f"variables {sorted(stray)} are not defined for case {case.value}")
        env = dict(zip(spatial, grid.mesh()))
        env.update(y=y, t=t)
        fields = {}
        for name, orders in JET_SPEC[case].items():
            vals = np.asarray(expr.derivative(**orders).evaluate(env), dtype=float)
            fields[name] = GridFunction(grid, np.broadcast_to(vals, grid.shape))
        return cls(case, grid, fields)


@dataclass(frozen=True, eq=False)
class LaxPair:
    """d_t + A and d_y + B with A, B Laurent vector fields in lambda."""

    case: Case
    A: LaurentVectorField
    B: LaurentVectorField
    A_y: LaurentVectorField = field(repr=False)
    B_t: LaurentVectorField = field(repr=False)


def build_pair(case, jet: JetField) -> LaxPair:
    case = Case(case)
    if jet.case is not case:
        raise ValueError("jet was built for a different case")
    jet.require()
    g = jet.grid
    one = np.ones(g.shape)
    zero = np.zeros(g.shape)
    V = LaurentVectorField
    if case is Case.MP:
        A = V(g, {2: (one,), 1: (jet["u_x"],), 0: (-jet["u_y"],)})
        B = V(g, {1: (one,), 0: (jet["u_x"],)})
        A_y = V(g, {1: (jet["u_xy"],), 0: (-jet["u_yy"],)})
        B_t = V(g, {0: (jet["u_xt"],)})
    else:
        A = V(g, {1: (zero, one), 0: (jet["u_22"], -jet["u_12"])})
        B = V(g, {1: (-one, zero), 0: (-jet["u_12"], jet["u_11"])})
        A_y = V(g, {0: (jet["u_22y"], -jet["u_12y"])})
        B_t = V(g, {0: (-jet["u_12t"], jet["u_11t"])})
    return LaxPair(case, A, B, A_y, B_t)


def compatibility_residual(pair: LaxPair, jet: JetField | None = None) -> LaurentVectorField:
    """B_t - A_y + [A, B], coefficient by coefficient in lambda."""
    return pair.B_t - pair.A_y + commutator(pair.A, pair.B)


def pde_residual(case, jet: JetField) -> GridFunction:
    """MP: u_xt + u_yy - u_y u_xx + u_x u_xy.  Plebanski: u_t1 + u_y2 + u_11 u_22 - u_12^2."""
    case = Case(case)
    if case is Case.MP:
        r = jet["u_xt"] + jet["u_yy"] - jet["u_y"] * jet["u_xx"] + jet["u_x"] * jet["u_xy"]
    else:
        r = jet["u_1t"] + jet["u_2y"] + jet["u_11"] * jet["u_22"] - jet["u_12"] ** 2
    return GridFunction(jet.grid, r)


def expected_residual(case, jet: JetField) -> tuple[np.ndarray, ...]:
    """The lambda^0 compatibility residual written through the equation residual E.

    MP: (E,).  Plebanski: (-d_2 E, d_1 E), the Lax pair encodes the equation
    differentiated once.
    """
    case = Case(case)
    E = pde_residual(case, jet).values
    if case is Case.MP:
        return (E,)
    g = jet.grid
    return (-spectral_derivative(E, g, 1), spectral_derivative(E, g, 0))


def equivalence_check(case, jet: JetField, tol_zero: float = 1e-10, tol_other: float = 1e-12, params=None) -> VerificationReport:
    """lambda^0 residual equals the equation residual; every other power vanishes.

    Both defects are relative to the largest jet entry (at least 1).
    """
    case = Case(case)
    res = compatibility_residual(build_pair(case, jet), jet)
    scale = max(jet.scale, 1.0)
    target = expected_residual(case, jet)
    got = res.coefficient(0)
    d0 = max(float(np.abs(a - b).max()) for a, b in zip(got, target)) / scale
    others = [p for p in res.powers if p != 0]
    d_other = max((float(np.abs(c).max()) for p in others for c in res.coefficient(p)), default=0.0) / scale
    return VerificationReport(
        check="lax_equivalence",
        case=case.value,
        params=dict(params or {}, grid=jet.grid.shape[0]),
        defect=d0,
        tolerance=tol_zero,
        secondary=(("other_powers", d_other, tol_other),),
        extra={"powers": res.powers, "scale": scale},
    )


def casimir_gradient(case, jet: JetField, which: int = 1) -> LaurentVectorField:
    """Truncated asymptotic Casimir gradient.

    MP: 1 + u_x/lambda - u_y/lambda^2.  Plebanski h1: (0,1) + (u_22, -u_12)/lambda;
    h2: (-1,0) + (-u_12, u_11)/lambda.
    """
    case = Case(case)
    g = jet.grid
    one = np.ones(g.shape)
    zero = np.zeros(g.shape)
    if case is Case.MP:
        return LaurentVectorField(g, {0: (one,), -1: (jet["u_x"],), -2: (-jet["u_y"],)})
    if which == 1:
        return LaurentVectorField(g, {0: (zero, one), -1: (jet["u_22"], -jet["u_12"])})
    if which == 2:
        return LaurentVectorField(g, {0: (-one, zero), -1: (-jet["u_12"], jet["u_11"])})
    raise ValueError("which must be 1 or 2")


def jet_seed(case, jet: JetField) -> LaurentOneForm:
    """Seed 1-form from jet data.

    MP: (lambda - 2 u_x) dx.  Plebanski: (lambda + w_1) dx1 + (lambda + w_2) dx2 with
    w = u_1 - u_2.
    """
    case = Case(case)
    g = jet.grid
    one = np.ones(g.shape)
    if case is Case.MP:
        return LaurentOneForm(g, {1: (one,), 0: (-2.0 * jet["u_x"],)})
    w1 = jet["u_11"] - jet["u_12"]
    w2 = jet["u_12"] - jet["u_22"]
    return LaurentOneForm(g, {1: (one, one), 0: (w1, w2)})


def casimir_defect(case, jet: JetField, which: int = 1) -> dict[int, tuple[GridFunction, ...]]:
    """Coefficients of ad*_{grad h} seed, power -> component fields."""
    case = Case(case)
    out = coadjoint_action(casimir_gradient(case, jet, which), jet_seed(case, jet))
    return {p: tuple(GridFunction(jet.grid, c) for c in out.coefficient(p)) for p in out.powers}


def mp_casimir_order_minus1(jet: JetField) -> np.ndarray:
    """-(2 u_xy + 6 u_x u_xx), the closed form of the MP lambda^-1 order."""
    return -(2.0 * jet["u_xy"] + 6.0 * jet["u_x"] * jet["u_xx"])


def on_shell_mp(jet: JetField) -> JetField:
    """Substitute u_y = -3/2 u_x^2 (and the matching u_xy) into an MP jet."""
    ux, uxx = jet["u_x"], jet["u_xx"]
    return jet.replaced(u_y=-1.5 * ux**2, u_xy=-3.0 * ux * uxx)


def random_trig_expression(case, rng: np.random.Generator, n_terms: int = 3, max_mode: int = 3) -> Expression:
    """Sum of amplitude * sin(k.x + m y + q t + phase) with integer spatial modes."""
    case = Case(case)
    spatial = SPATIAL_VARIABLES[case]
    terms = []
    for _ in range(n_terms):
        amp = float(rng.uniform(-1.0, 1.0))
        ks = rng.integers(-max_mode, max_mode + 1, size=len(spatial))
        if not ks.any():
            ks[0] = 1
        m, q, ph = (float(c) for c in rng.uniform(-2.0, 2.0, size=3))
        arg = " + ".join(f"({int(k)})*{v}" for k, v in zip(ks, spatial))
        terms.append(f"({amp!r})*sin({arg} + ({m!r})*y + ({q!r})*t + ({ph!r}))")
    return parse_expression(" + ".join(terms))


def random_jets(case, grid: Grid, count: int = 5, seed: int = 0) -> list[JetField]:
    rng = np.random.default_rng(seed)
    jets = []
    for _ in range(count):
        expr = random_trig_expression(case, rng)
        y, t = rng.uniform(-1.0, 1.0, size=2)
        jets.append(JetField.from_expression(case, expr, grid, y=float(y), t=float(t)))
    return jets

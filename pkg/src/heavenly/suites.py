"""Verification suites: each function runs a group of checks and returns reports.

The CLI maps every subcommand onto one of these, and the acceptance tests
call them directly.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from . import flows, hamiltonian, lax, lie_poisson, loop_algebra, poisson_suite
from .defaults import defaults
from .expression import parse_expression
from .grid import (
    TWO_PI,
    Grid,
    GridFunction,
    antiderivative,
    delta_kernel,
    derivative,
    derivative_matrix,
    green_kernel,
    integrate,
    nyquist_mode,
)
from .lie_poisson import Case
from .report import VerificationReport

TOL = defaults()["tolerance"]


def _report(check, case, params, defect, tol, **kw) -> VerificationReport:
    return VerificationReport(check=check, case=case, params=params, defect=float(defect), tolerance=float(tol), **kw)


# -- grid and algebra ----------------------------------------------------------


def grid_suite(n: int) -> list[VerificationReport]:
    g = Grid.line(n)
    x = g.axis_nodes()
    f = GridFunction(g, np.sin(3 * x) + 0.5 * np.cos(x))
    d_err = np.abs(derivative(f).values - (3 * np.cos(3 * x) - 0.5 * np.sin(x))).max()
    a_err = np.abs(derivative(antiderivative(f)).values - f.values).max()
    s = np.pi / 2
    lhs = derivative(green_kernel(g, s)).values + 1.0 / TWO_PI - delta_kernel(g, s).values
    nyq = nyquist_mode(g)
    g_err = np.abs(lhs - nyq * (lhs @ nyq) / n).max()
    mass = abs(integrate(delta_kernel(g, s)) - 1.0)
    p = {"grid": n}
    return [
        _report("grid_spectral_derivative", "grid", p, d_err, TOL["grid"]),
        _report("grid_antiderivative_inverse", "grid", p, a_err, TOL["grid"]),
        _report("grid_green_identity", "grid", p, g_err, TOL["grid"], extra={"nyquist_component": float(lhs @ nyq / n)}),
        _report("grid_delta_mass", "grid", p, mass, TOL["grid"]),
    ]


def _random_field(grid: Grid, rng, power: int, max_mode: int = 4):
    x = grid.axis_nodes()
    comps = []
    for _ in range(grid.dim):
        a = sum(rng.normal() * np.sin(k * x + rng.uniform(0, TWO_PI)) / k for k in range(1, max_mode + 1))
        comps.append(a)
    return comps


def _random_laurent(grid: Grid, rng, cls, powers=(-2, -1, 0, 1)):
    return cls(grid, {p: _random_field(grid, rng, p) for p in powers})


def algebra_suite(n: int, seed: int = 0) -> list[VerificationReport]:
    g = Grid.line(n)
    rng = np.random.default_rng(seed)
    V, L = loop_algebra.LaurentVectorField, loop_algebra.LaurentOneForm
    a, b, c = (_random_laurent(g, rng, V) for _ in range(3))
    l = _random_laurent(g, rng, L)
    com, rb = loop_algebra.commutator, loop_algebra.r_bracket
    scale = max(a.max_abs(), b.max_abs(), c.max_abs()) ** 3 * 10
    anti = (com(a, b) + com(b, a)).max_abs()
    jac = (com(a, com(b, c)) + com(b, com(c, a)) + com(c, com(a, b))).max_abs() / scale
    rjac = (rb(a, rb(b, c)) + rb(b, rb(c, a)) + rb(c, rb(a, b))).max_abs() / scale
    dual = []
    for p in (-1, 0, 1):
        lhs = loop_algebra.residue_pairing(loop_algebra.coadjoint_action(a, l), b, p)
        rhs = -loop_algebra.residue_pairing(l, com(a, b), p)
        dual.append(abs(lhs - rhs) / max(abs(rhs), 1.0))
    prm = {"grid": n, "seed": seed}
    return [
        _report("algebra_antisymmetry", "algebra", prm, anti, TOL["algebra"]),
        _report("algebra_jacobi", "algebra", prm, jac, TOL["algebra"]),
        _report("algebra_r_jacobi", "algebra", prm, rjac, TOL["algebra"]),
        _report("algebra_coadjoint_duality", "algebra", prm, max(dual), TOL["algebra"], sign=-1),
    ]


# -- Poisson operators -------------------------------------------------------


def poisson_reports(n: int, seed: int = 0, case: str = "mp") -> list[VerificationReport]:
    cfg = defaults()["verify"]
    g = Grid.line(n)
    x = g.axis_nodes()
    v = 1.0 + 0.3 * np.cos(x)
    reports = []
    prm = {"grid": n, "seed": seed}
    ops = [
        poisson_suite.theta0(g),
        poisson_suite.theta_minus1(g, v),
        poisson_suite.PoissonOperator("2d", 2.0 * derivative_matrix(g)),
    ]
    for op in ops:
        d = poisson_suite.skew_defect(op, cfg["skew_pairs"], seed)
        reports.append(_report(f"skew_{op.name}", case, prm, d, TOL["skew"]))
    j0 = poisson_suite.theta0_jacobi(g, cfg["jacobi_triples"], seed)
    reports.append(_report("jacobi_theta0", case, prm, j0.defect, TOL["jacobi_theta0"]))
    j1 = poisson_suite.theta_minus1_jacobi(g, v, cfg["jacobi_triples"], seed)
    reports.append(
        _report(
            "jacobi_theta_minus1",
            case,
            prm,
            j1.relative,
            TOL["jacobi_relative"],
            extra={"scale": j1.scale, "richardson": j1.richardson, "projection_norm": j1.projection_norm},
        )
    )
    for eps in cfg["epsilons"]:
        jp = poisson_suite.pencil_jacobi_defect(eps, g, v, cfg["jacobi_triples"], seed)
        reports.append(
            _report(
                "jacobi_pencil",
                case,
                dict(prm, epsilon=eps),
                jp.relative,
                TOL["jacobi_relative"],
                extra={"scale": jp.scale, "richardson": jp.richardson, "projection_norm": jp.projection_norm},
            )
        )
    c_true, r_true = poisson_suite.inverse_scalar(g, v, prefactor=1.0, seed=seed)
    c_half, _ = poisson_suite.inverse_scalar(g, v, prefactor=0.5, seed=seed)
    reports.append(
        _report(
            "inverse_theta_minus1",
            case,
            dict(prm, prefactor=1.0),
            max(r_true, abs(c_true - 1.0)),
            TOL["inverse_composition"],
            extra={"scalar_prefactor_one": c_true, "scalar_prefactor_half": c_half},
        )
    )
    # theta0 inverse pair on mean-free vectors
    w = poisson_suite.random_covectors(g, 5, seed=seed).T
    comp = poisson_suite.theta0_inv(g).matrix @ poisson_suite.theta0(g).matrix @ w
    reports.append(_report("inverse_theta0", case, prm, np.abs(comp - w).max(), TOL["skew"]))
    # recursion operator against its matrix-product oracle
    grad = GridFunction(g, w[:, 0])
    rec = poisson_suite.recursion_apply(grad, v).values
    oracle = 2.0 * derivative_matrix(g) @ (0.5 * (poisson_suite.antiderivative_matrix(g) @ (v * grad.values) + v * (poisson_suite.antiderivative_matrix(g) @ grad.values)))
    reports.append(_report("recursion_oracle", case, prm, np.abs(rec - oracle).max(), TOL["skew"]))
    ux = GridFunction(Grid.line(256), 1.0 + 0.5 * np.sin(Grid.line(256).axis_nodes()))
    reports += poisson_suite.flow_consistency(ux.grid, ux, TOL["flow_consistency"])
    return reports


# -- Hamiltonian functionals ---------------------------------------------------


def hamiltonian_reports(n: int, seed: int = 0) -> list[VerificationReport]:
    g = Grid.line(n)
    x = g.axis_nodes()
    rng = np.random.default_rng(seed)
    per = sum(rng.normal() * 0.3 * np.sin(k * x + rng.uniform(0, TWO_PI)) for k in range(1, 4))
    u = hamiltonian.LineField(g, per)
    reports = []
    for name in ("u_x^3", "u u_x^2", "u_xx^2"):
        dens = hamiltonian.DENSITIES[name]()
        vd = hamiltonian.variational_derivative(dens, u).values
        gd = hamiltonian.gateaux_gradient(hamiltonian.Functional(dens), u).values
        rel = np.abs(vd - gd).max() / max(np.abs(gd).max(), 1e-300)
        F = hamiltonian.Functional(dens)
        rec = hamiltonian.homotopy_reconstruct(lambda f, d=dens: hamiltonian.variational_derivative(d, f), u)
        exact = F(u) - F(u.scaled(0.0))
        prm = {"grid": n, "seed": seed, "density": name}
        reports.append(_report("variational_vs_gateaux", "mp", prm, rel, TOL["gateaux_relative"], extra={"partials": dens.check_partials(seed=seed)}))
        reports.append(_report("homotopy_exactness", "mp", prm, abs(rec - exact) / max(abs(exact), 1.0), TOL["homotopy_identity"]))
    return reports


# -- Lie-Poisson brackets --------------------------------------------------------


def _bracket_field(case: Case, grid: Grid, rng) -> GridFunction:
    a, b, c = rng.uniform(0, TWO_PI, size=3)
    if case is Case.MP:
        return grid.sample(lambda x: 0.3 * np.sin(x + a) + 0.2 * np.cos(2 * x + b))
    return grid.sample(lambda x1, x2: 0.3 * np.sin(x1 + a) * np.sin(x2 + b) + 0.2 * np.cos(x1 + 2 * x2 + c))


def _sample_pairs(case: Case, rng, count: int, coarse: int = 64):
    """Pairs of sample tuples on nodes of the coarsest grid (nodes of every finer grid)."""
    h = TWO_PI / coarse
    pairs = []
    for i in range(count):
        if case is Case.MP:
            j1, j2 = rng.choice(coarse, size=2, replace=False)
            pairs.append(((j1 * h,), (j2 * h,)))
        else:
            j1, j2, j3 = rng.integers(0, coarse, size=3)
            # half the pairs share the second coordinate so the delta factor is active
            j4 = j2 if i % 2 == 0 else rng.integers(0, coarse)
            pairs.append(((j1 * h, j2 * h), (j3 * h, j4 * h)))
    return pairs


def _grid_for(case: Case, n: int) -> Grid:
    return Grid.line(n) if case is Case.MP else Grid.torus(n)


def bracket_reports(case, n: int, seed: int = 0, p: int | None = None, csv_path=None) -> list[VerificationReport]:
    case = Case(case)
    cfg = defaults()
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(case, rng, cfg["bracket"]["samples"], min(cfg["grid"]["bracket-convergence"][0], n))
    field_rng_state = rng.bit_generator.state
    powers = [0, -1] if p is None else [p]
    reports = []
    rows = []

    def field_on(grid):
        r = np.random.default_rng()
        r.bit_generator.state = field_rng_state
        return _bracket_field(case, grid, r)

    g = _grid_for(case, n)
    u = field_on(g)
    prm = {"grid": n, "seed": seed}
    ref_scale = None
    for q in powers:
        if q not in lie_poisson.NONVANISHING_POWERS:
            continue
        seed_el = lie_poisson.make_seed(case, q, u)
        k = lie_poisson.bracket_kernel(seed_el, pairs)
        ref_scale = max(ref_scale or 0.0, k.scale)
        swapped = np.array([lie_poisson.bracket_value(seed_el, t2, t1) for t1, t2 in pairs])
        anti = float(np.abs(k.numeric + swapped).max() / k.scale)
        qp = dict(prm, p=q)
        for t, num, cl, cc in zip(k.tuples, k.numeric, k.closed, k.closed_consistent):
            rows.append([case.value, q, *t[0], *t[1], num, cl, cc])
        if case is Case.MP and q == 0:
            reports.append(_report("bracket_kernel", case.value, qp, k.relative_defect(False), TOL["bracket_relative"], secondary=(("antisymmetry", anti, TOL["reproducing"]),)))
            integ = lie_poisson.integrated_bracket(seed_el)
            closed = lie_poisson.mp_integrated_closed_form(g)
            reports.append(_report("bracket_integrated", case.value, qp, np.abs(integ - closed).max() / np.abs(closed).max(), TOL["bracket_relative"]))
        elif case is Case.MP:
            reports.append(
                _report(
                    "bracket_kernel",
                    case.value,
                    qp,
                    k.relative_defect(False),
                    TOL["bracket_relative"],
                    secondary=(("antisymmetry", anti, TOL["reproducing"]),),
                    extra={"form": "difference u0(s1) - u0(s2)"},
                )
            )
            reports.append(
                _report("bracket_kernel_antisymmetric_form", case.value, qp, k.relative_defect(True), TOL["bracket_relative"], extra={"form": "sum u0(s1) + u0(s2)"})
            )
        elif q == -1:
            defects = {}
            for m in cfg["grid"]["bracket-convergence"]:
                if m == n:
                    defects[m] = k.relative_defect(True)
                    continue
                gm = _grid_for(case, m)
                km = lie_poisson.bracket_kernel(lie_poisson.make_seed(case, q, field_on(gm)), pairs)
                defects[m] = km.relative_defect(True)
            defects[n] = k.relative_defect(True)
            ms = sorted(defects)
            orders = [math.log2(defects[a] / defects[b]) / math.log2(b / a) for a, b in zip(ms, ms[1:]) if defects[b] > 0]
            order = min(orders) if orders else float("nan")
            shortfall = max(0.0, TOL["bracket_order_min"] - order) if math.isfinite(order) else float("inf")
            reports.append(
                _report(
                    "bracket_kernel",
                    case.value,
                    qp,
                    k.relative_defect(True),
                    TOL["bracket_relative"],
                    secondary=(("antisymmetry", anti, TOL["reproducing"]), ("order_shortfall", shortfall, 0.0)),
                    extra={
                        "defect_by_grid": {str(m): defects[m] for m in ms},
                        "observed_order": order,
                        "defect_without_mean_correction": k.relative_defect(False),
                    },
                )
            )
        else:
            reports.append(
                _report(
                    "bracket_kernel",
                    case.value,
                    qp,
                    k.relative_defect(False),
                    TOL["bracket_relative"],
                    secondary=(("antisymmetry", anti, TOL["reproducing"]),),
                    extra={"form": "half difference"},
                )
            )
            reports.append(_report("bracket_kernel_direct_form", case.value, qp, k.relative_defect(True), TOL["bracket_relative"]))
        # reproducing identity of the coordinate gradient
        rep = 0.0
        for t1, _ in pairs[:10]:
            val = lie_poisson.evaluate_coordinate(seed_el, t1)
            ref = lie_poisson.sampled_coordinate(seed_el, t1) - lie_poisson.reproducing_offset(seed_el, t1)
            rep = max(rep, abs(val - ref))
        reports.append(_report("coordinate_reproducing", case.value, qp, rep, TOL["reproducing"]))

    vanish = cfg["bracket"]["vanishing_powers"] if p is None else [q for q in powers if q not in lie_poisson.NONVANISHING_POWERS]
    if vanish:
        if ref_scale is None:
            ref_scale = lie_poisson.bracket_kernel(lie_poisson.make_seed(case, 0, u), pairs[:10]).scale
        worst = 0.0
        for q in vanish:
            s = lie_poisson.make_seed(case, q, u)
            worst = max(worst, max(abs(lie_poisson.bracket_value(s, t1, t2)) for t1, t2 in pairs[:10]))
        reports.append(_report("bracket_vanishing", case.value, dict(prm, powers=list(vanish)), worst / ref_scale, TOL["bracket_vanishing"]))

    if csv_path:
        dim = 1 if case is Case.MP else 2
        head = ["case", "p"] + [f"t1_{i}" for i in range(dim)] + [f"t2_{i}" for i in range(dim)] + ["numeric", "closed_reference", "closed_periodic"]
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(head)
            for r in rows:
                w.writerow([r[0], r[1]] + [f"{v:.17g}" for v in r[2:]])
    return reports


# -- Lax pairs and Casimirs ------------------------------------------------------


def _jets(case: Case, grid: Grid, seed: int, field: str | None, count: int):
    if field:
        return [lax.JetField.from_expression(case, field, grid)]
    return lax.random_jets(case, grid, count, seed)


def lax_reports(case, n: int, seed: int = 0, field: str | None = None) -> list[VerificationReport]:
    case = Case(case)
    g = _grid_for(case, n)
    reports = []
    for i, jet in enumerate(_jets(case, g, seed, field, defaults()["lax"]["jets"])):
        prm = {"grid": n, "seed": seed, "jet": i} if not field else {"grid": n, "field": field}
        r = lax.equivalence_check(case, jet, TOL["lax_zero"], TOL["lax_other"], prm)
        reports.append(r)
    return reports


def casimir_reports(case, n: int, seed: int = 0, field: str | None = None) -> list[VerificationReport]:
    case = Case(case)
    g = _grid_for(case, n)
    reports = []
    for i, jet in enumerate(_jets(case, g, seed, field, defaults()["lax"]["jets"])):
        prm = {"grid": n, "seed": seed, "jet": i} if not field else {"grid": n, "field": field}
        which = (1,) if case is Case.MP else (1, 2)
        zero = 0.0
        for w in which:
            cd = lax.casimir_defect(case, jet, w)
            zero = max(zero, max(float(np.abs(c.values).max()) for c in cd.get(0, (GridFunction(g, np.zeros(g.shape)),))))
        reports.append(_report("casimir_order_zero", case.value, prm, zero, TOL["casimir_zero"]))
        if case is Case.MP:
            cd = lax.casimir_defect(case, jet)
            closed = lax.mp_casimir_order_minus1(jet)
            scale = max(float(np.abs(closed).max()), 1.0)
            reports.append(_report("casimir_order_minus1_form", case.value, prm, np.abs(cd[-1][0].values - closed).max() / scale, TOL["casimir_on_shell"]))
            on = lax.casimir_defect(case, lax.on_shell_mp(jet))
            reports.append(_report("casimir_on_shell", case.value, prm, np.abs(on[-1][0].values).max(), TOL["casimir_on_shell"]))
    return reports


# -- flows -------------------------------------------------------------------------


def _line_values(expr_text: str, grid: Grid) -> tuple[np.ndarray, object]:
    expr = parse_expression(expr_text)
    stray = expr.variables() - {"x"}
    if stray:
        raise ValueError(f"initial data may depend on x only, got {sorted(stray)}")
    vals = np.broadcast_to(np.asarray(expr.evaluate({"x": grid.axis_nodes()}), dtype=float), grid.shape)
    return np.array(vals), expr


def order_study(seed_cfg=None) -> tuple[list[float], list[float]]:
    cfg = seed_cfg or defaults()["order_study"]
    g = Grid.line(cfg["grid"])
    vals, expr = _line_values(cfg["init"], g)
    v0 = lambda s: np.asarray(expr.evaluate({"x": s}), dtype=float) * np.ones_like(s)  # noqa: E731
    dv0 = lambda s: np.asarray(expr.diff("x").evaluate({"x": s}), dtype=float) * np.ones_like(s)  # noqa: E731
    exact = flows.characteristics_solution(v0, cfg["T"], g.axis_nodes(), dv0)
    dts = [cfg["dt"] / 2**k for k in range(cfg["halvings"] + 1)]
    errs = [float(np.abs(flows.evolve("mp-y", GridFunction(g, vals), cfg["T"], dt).final.values - exact).max()) for dt in dts]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    return errs, ratios


def evolve_reports(flow: str, init: str, n: int, dt: float, T: float, csv_path=None, dealias: bool = False) -> list[VerificationReport]:
    flow = flows.Flow(flow)
    prm = {"grid": n, "dt": dt, "T": T, "init": init, "flow": flow.value}
    if flow in (flows.Flow.PLEBANSKI_T, flows.Flow.PLEBANSKI_Y):
        g = Grid.torus(n)
        expr = parse_expression(init)
        env = dict(zip(("x1", "x2"), g.mesh()), y=0.0, t=0.0)

        def field(e):
            return GridFunction(g, np.broadcast_to(np.asarray(e.evaluate(env), dtype=float), g.shape))

        r_t, r_y = flows.plebanski_flow_residual(field(expr), field(expr.diff("t")), field(expr.diff("y")))
        r = r_t if flow is flows.Flow.PLEBANSKI_T else r_y
        return [_report("plebanski_flow_residual", "plebanski", prm, r.max_abs(), TOL["plebanski_residual"])]
    g = Grid.line(n)
    vals, expr = _line_values(init, g)
    try:
        traj = flows.evolve(flow, GridFunction(g, vals), T, dt, dealias=dealias)
    except flows.BlowupDetected as exc:
        return [_report("evolve_blowup", "mp", prm, float("inf"), TOL["conservation"], extra={"error": str(exc)})]
    if csv_path:
        traj.write_csv(csv_path)
    reports = [
        _report("conservation_H0", "mp", prm, traj.relative_drift(flows.conserved_H0), TOL["conservation"]),
        _report("conservation_momentum", "mp", prm, traj.relative_drift(flows.momentum), TOL["conservation"]),
        _report("conservation_energy", "mp", prm, traj.relative_drift(flows.energy), TOL["conservation"]),
    ]
    if flow is flows.Flow.MP_Y:
        v0 = lambda s: np.asarray(expr.evaluate({"x": s}), dtype=float) * np.ones_like(s)  # noqa: E731
        dv0 = lambda s: np.asarray(expr.diff("x").evaluate({"x": s}), dtype=float) * np.ones_like(s)  # noqa: E731
        exact = flows.characteristics_solution(v0, traj.times[-1], g.axis_nodes(), dv0)
        reports.append(_report("characteristics_match", "mp", prm, np.abs(traj.final.values - exact).max(), TOL["characteristics"]))
        errs, ratios = order_study()
        lo, hi = TOL["rk4_ratio"]
        miss = max(max(lo - r, r - hi, 0.0) for r in ratios)
        reports.append(
            _report("rk4_order", "mp", dict(defaults()["order_study"]), miss, 0.0, extra={"errors": errs, "ratios": ratios})
        )
    return reports


# -- reconstruction ------------------------------------------------------------------


def reconstruct_reports(init: str, n: int) -> list[VerificationReport]:
    """Reconstruct int u_x^3 dx for the field whose slope u_x is ``init``."""
    g = Grid.line(n)
    vals, expr = _line_values(init, g)
    u = hamiltonian.LineField.from_slope(g, vals)
    dens = hamiltonian.cubic_slope_density()
    F = hamiltonian.Functional(dens)
    value = F(u) - F(u.scaled(0.0))
    exact_grad = -6.0 * vals * np.asarray(expr.diff("x").evaluate({"x": g.axis_nodes()}), dtype=float)
    vd = hamiltonian.variational_derivative(dens, u).values
    h0 = hamiltonian.homotopy_reconstruct(hamiltonian.h0_gradient, u)
    prm = {"grid": n, "init": init}
    reports = [
        _report("variational_derivative", "mp", prm, np.abs(vd - exact_grad).max(), TOL["variational"]),
        _report("homotopy_h0", "mp", prm, abs(h0 - value), TOL["homotopy"], extra={"reconstructed": h0, "functional": value, "slope": u.slope}),
    ]
    if vals.min() > 0:
        ht = hamiltonian.homotopy_reconstruct(hamiltonian.t_flow_gradient, u)
        reports.append(_report("homotopy_t_flow", "mp", prm, abs(ht - h0), TOL["homotopy_identity"], extra={"reconstructed": ht, "h0_reconstructed": h0}))
    return reports

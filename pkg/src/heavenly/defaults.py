"""Versioned table of grid sizes, tolerances and step sizes used by the CLI."""

from __future__ import annotations

import copy
import json

DEFAULTS_VERSION = 1

_TABLE = {
    "version": DEFAULTS_VERSION,
    "seed": 0,
    "grid": {
        "verify": 128,
        "bracket-table": {"mp": 128, "plebanski": 128},
        "bracket-convergence": [64, 128, 256],
        "lax-check": {"mp": 64, "plebanski": 32},
        "casimir": {"mp": 64, "plebanski": 32},
        "evolve": 256,
        "reconstruct": 256,
    },
    "tolerance": {
        "bracket_relative": 5e-2,
        "bracket_vanishing": 1e-9,
        "bracket_order_min": 0.8,
        "reproducing": 1e-10,
        "skew": 1e-10,
        "jacobi_theta0": 1e-12,
        "jacobi_relative": 1e-6,
        "inverse_composition": 1e-8,
        "flow_consistency": 1e-8,
        "variational": 1e-10,
        "gateaux_relative": 1e-6,
        "homotopy": 1e-8,
        "homotopy_identity": 1e-10,
        "lax_zero": 1e-10,
        "lax_other": 1e-12,
        "casimir_zero": 1e-12,
        "casimir_on_shell": 1e-10,
        "conservation": 1e-8,
        "characteristics": 1e-7,
        "rk4_ratio": [12.0, 20.0],
        "plebanski_residual": 1e-10,
        "algebra": 1e-10,
        "grid": 1e-10,
    },
    "verify": {"skew_pairs": 100, "jacobi_triples": 50, "epsilons": [0.1, 1.0, 10.0], "slope_field": "1 + 0.3*cos(x)"},
    "bracket": {"samples": 40, "vanishing_powers": [-3, -2, 1, 2]},
    "lax": {"jets": 5},
    "evolve": {"flow": "mp-y", "init": "0.1*sin(x)", "dt": 1e-3, "T": 0.1},
    "order_study": {"grid": 128, "init": "0.5*sin(x)", "T": 0.2, "dt": 0.008333333333333333, "halvings": 2},
    "reconstruct": {"init": "1 + 0.5*sin(x)"},
}


def defaults() -> dict:
    return copy.deepcopy(_TABLE)


def render_defaults() -> str:
    return json.dumps(_TABLE, indent=2, sort_keys=True) + "\n"

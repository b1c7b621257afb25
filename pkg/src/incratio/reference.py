"""Bundled reference market and its golden reproduction run.

A two-agent, three-commodity Cobb-Douglas market in which the first agent
gains roughly a factor 1.50 by misreporting its exponents as
(.85, .1, .05) -- strictly more than the exp(1/e) ~ 1.4447 ceiling that
binds every two-commodity market. The expected values below are rounded
to three or four digits, so the comparison tolerances reflect rounding,
not solver precision.

Convention stamp: the second agent's exponents are taken as (.4, .6, 0);
commodity 3 enters only the first agent's utility, which is what makes
the truthful relative prices come out at (1, 1.5, .505).
"""
from __future__ import annotations

import math

import numpy as np

from .markets import Economy, ReportProfile, UtilityFunction, utility_eval
from .ratio import witness_cd, witness_leontief, witness_linear
from .solvers import solve_cobb_douglas

REFERENCE_ENDOWMENTS = ((0.99, 0.01, 0.01), (0.01, 0.99, 0.99))
REFERENCE_ALPHAS = ((0.2, 0.3, 0.5), (0.4, 0.6, 0.0))
REFERENCE_DEVIATION = (0.85, 0.10, 0.05)
REFERENCE_DEVIATING_AGENT = 0

# (expected, tolerance) pairs for the golden comparison
EXPECTED = {
    "truthful_price_ratios": ((1.0, 1.5, 0.505), 2e-3),
    "truthful_bundle_agent1": ((0.202, 0.202, 1.0), 2e-3),
    "truthful_utility_agent1": (0.4495, 5e-4),
    "deviant_price_ratios": ((1.0, 0.3323, 0.0497), 2e-3),
    "deviant_bundle_agent1": ((0.845, 0.299, 1.0), 2e-3),
    "deviant_utility_agent1": (0.6731, 5e-4),
    "ratio": (1.50, 1e-2),
}

# witness families replayed at fixed parameters; all ratios are closed form
WITNESS_EXPECTED = {
    "linear_eps_0.01": 100.0,
    "leontief_eps_0.001_delta_0.001": (1 + 0.001) / (2 * (0.001 + 0.001 - 0.001**2)),
    "cobb_douglas_eps_0.02": 10.0,
    "cobb_douglas_eps_0.5": 2.0,
}


def reference_economy() -> Economy:
    return Economy(
        endowments=np.array(REFERENCE_ENDOWMENTS),
        utilities=tuple(UtilityFunction.cobb_douglas(a) for a in REFERENCE_ALPHAS),
    )


def reference_deviation() -> UtilityFunction:
    return UtilityFunction.cobb_douglas(REFERENCE_DEVIATION)


def _check(name: str, value, expected, tol: float):
    value_arr = np.atleast_1d(np.asarray(value, dtype=float))
    expected_arr = np.atleast_1d(np.asarray(expected, dtype=float))
    passed = bool(np.all(np.abs(value_arr - expected_arr) <= tol))
    return {
        "name": name,
        "value": value if np.ndim(value) else float(value),
        "expected": expected,
        "tol": tol,
        "passed": passed,
    }


def run_reproduction() -> dict:
    """Solve the reference market truthfully and under the fixed misreport,
    compare every quantity against its expected value, and replay the
    three witness families. Returns a report dict with `passed` set."""
    economy = reference_economy()
    truthful_reports = ReportProfile.truthful(economy)
    deviant_reports = truthful_reports.replace(
        REFERENCE_DEVIATING_AGENT, reference_deviation()
    )

    truthful = solve_cobb_douglas(economy, truthful_reports)
    deviant = solve_cobb_douglas(economy, deviant_reports)
    true_u = economy.utilities[REFERENCE_DEVIATING_AGENT]
    u_truthful = utility_eval(true_u, truthful.allocation[REFERENCE_DEVIATING_AGENT])
    u_deviant = utility_eval(true_u, deviant.allocation[REFERENCE_DEVIATING_AGENT])
    ratio = u_deviant / u_truthful

    checks = [
        _check(
            "truthful_price_ratios",
            tuple(truthful.price_ratios()),
            *EXPECTED["truthful_price_ratios"],
        ),
        _check(
            "truthful_bundle_agent1",
            tuple(truthful.allocation[0]),
            *EXPECTED["truthful_bundle_agent1"],
        ),
        _check(
            "truthful_utility_agent1", u_truthful, *EXPECTED["truthful_utility_agent1"]
        ),
        _check(
            "deviant_price_ratios",
            tuple(deviant.price_ratios()),
            *EXPECTED["deviant_price_ratios"],
        ),
        _check(
            "deviant_bundle_agent1",
            tuple(deviant.allocation[0]),
            *EXPECTED["deviant_bundle_agent1"],
        ),
        _check("deviant_utility_agent1", u_deviant, *EXPECTED["deviant_utility_agent1"]),
        _check("ratio", ratio, *EXPECTED["ratio"]),
    ]

    lin = witness_linear(0.01)
    leo = witness_leontief(0.001, 0.001)
    cd_small = witness_cd(0.02)
    cd_half = witness_cd(0.5)
    witness_checks = [
        _check("witness_linear_ratio", lin.ratio, WITNESS_EXPECTED["linear_eps_0.01"], 1e-9),
        _check(
            "witness_leontief_ratio",
            leo.ratio,
            WITNESS_EXPECTED["leontief_eps_0.001_delta_0.001"],
            1e-9,
        ),
        _check(
            "witness_cd_ratio_eps_0.02",
            cd_small.ratio,
            WITNESS_EXPECTED["cobb_douglas_eps_0.02"],
            1e-9,
        ),
        _check(
            "witness_cd_ratio_eps_0.5",
            cd_half.ratio,
            WITNESS_EXPECTED["cobb_douglas_eps_0.5"],
            1e-9,
        ),
    ]
    certificates_ok = (
        all(c.ok for c in lin.checks)
        and all(c.ok for c in leo.checks)
        and cd_small.truthful_check.ok
        and cd_small.deviant_check.ok
        and cd_half.truthful_check.ok
        and cd_half.deviant_check.ok
    )
    witness_checks.append(
        {
            "name": "witness_certificates_verified",
            "value": certificates_ok,
            "expected": True,
            "tol": 0.0,
            "passed": certificates_ok,
        }
    )

    all_checks = checks + witness_checks
    return {
        "market": {
            "endowments": [list(row) for row in REFERENCE_ENDOWMENTS],
            "alphas": [list(row) for row in REFERENCE_ALPHAS],
            "deviation": {
                "agent": REFERENCE_DEVIATING_AGENT,
                "alpha": list(REFERENCE_DEVIATION),
            },
        },
        "conventions": {
            "agent2_alpha": list(REFERENCE_ALPHAS[1]),
            "note": (
                "reference values assume the second agent weights its own "
                "consumption of commodities 1 and 2 as (.4, .6) and puts no "
                "weight on commodity 3"
            ),
        },
        "computed": {
            "truthful_prices_simplex": [float(v) for v in truthful.prices],
            "deviant_prices_simplex": [float(v) for v in deviant.prices],
            "truthful_utility": u_truthful,
            "deviant_utility": u_deviant,
            "ratio": ratio,
            "two_commodity_ceiling": math.exp(1.0 / math.e),
        },
        "checks": all_checks,
        "passed": all(c["passed"] for c in all_checks),
    }

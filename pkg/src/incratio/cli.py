"""Command-line interface.

Subcommands: solve a market file, search the incentive ratio, construct
the divergent witness families, run the verification suites, and replay
the bundled reference market against its expected values. Reports are
JSON on stdout (CSV rows for sweeps with --csv).

Exit codes: 0 pass, 1 verification failure, 2 residual/solver failure,
3 parse error, 4 validation error. Agent indices are zero-based.
"""
from __future__ import annotations

import csv
import json
import sys

import click
import numpy as np

from .errors import (
    AssumptionViolationError,
    BoundViolationError,
    DegenerateMarketError,
    SolverError,
)
from .marketfile import LoadedMarket, MarketFileError, load_market, market_to_mapping
from .markets import (
    Economy,
    ReportProfile,
    SolverConfig,
    UtilityFunction,
    UtilityKind,
    is_equilibrium,
    utility_eval,
    validate_economy,
)
from .ratio import (
    OptimizerConfig,
    RatioQuery,
    UpperBoundConfig,
    check_power_inequality,
    incentive_ratio_cd,
    verify_upper_bound_m,
    witness_cd,
    witness_leontief,
    witness_linear,
)
from .reference import run_reproduction
from .sampling import sample_cd_economy, sample_simplex
from .solvers import (
    brute_force_equilibrium,
    solve_cobb_douglas,
    solve_leontief,
    solve_linear_smallscale,
)
from .spending import budget_determinant

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_RESIDUAL = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _emit(report: dict):
    json.dump(_jsonable(report), sys.stdout, indent=2)
    sys.stdout.write("\n")


def _fail(code: int, message: str, **extra):
    _emit({"error": message, **extra})
    sys.exit(code)


def _load(spec_path) -> LoadedMarket:
    try:
        loaded = load_market(spec_path)
    except MarketFileError as exc:
        _fail(EXIT_PARSE, str(exc))
    except ValueError as exc:
        # structurally sound file, but a utility/economy invariant fails
        _fail(EXIT_VALIDATION, str(exc))
    violations = validate_economy(loaded.economy)
    if violations:
        _fail(
            EXIT_VALIDATION,
            "market violates economy invariants",
            violations=[str(v) for v in violations],
        )
    return loaded


def _parse_alpha_option(text: str, m: int):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        _fail(EXIT_PARSE, f"--deviation expects comma-separated floats, got {text!r}")
    if len(values) != m:
        _fail(EXIT_VALIDATION, f"--deviation needs {m} values, got {len(values)}")
    return np.array(values)


def _resolve_deviation(loaded: LoadedMarket, deviation: str | None, agent: int | None):
    """Returns (agent, alpha) or (None, None) when no deviation requested."""
    if deviation is None:
        return None, None
    if deviation == "file":
        if loaded.deviation_agent is None:
            _fail(EXIT_VALIDATION, "market file has no deviation section")
        return loaded.deviation_agent, loaded.deviation_alpha
    if agent is None:
        agent = loaded.deviation_agent
    if agent is None:
        _fail(EXIT_VALIDATION, "an inline --deviation requires --agent")
    return agent, _parse_alpha_option(deviation, loaded.economy.m)


def _report_utility(report: UtilityFunction):
    return {"kind": report.kind.value, "alpha": list(report.alpha)}


def _equilibrium_block(economy: Economy, reports: ReportProfile, eq, tol: float):
    check = is_equilibrium(economy, reports, eq.prices, eq.allocation, tol=tol)
    prices = np.asarray(eq.prices)
    # LP/solver allocations may undershoot zero by bound-tolerance noise;
    # clamp before evaluating fractional powers
    bundles = np.maximum(np.asarray(eq.allocation), 0.0)
    block = {
        "prices_simplex": list(prices / prices.sum()),
        "allocation": [list(row) for row in eq.allocation],
        "utilities_reported": [
            utility_eval(reports.reports[i], bundles[i]) for i in range(economy.n)
        ],
        "utilities_true": [
            utility_eval(economy.utilities[i], bundles[i]) for i in range(economy.n)
        ],
        "max_clearing_residual": eq.max_clearing_residual,
        "budget_residual": list(eq.budget_residual),
        "verified": check.ok,
        "verification_failures": list(check.failures),
        "tolerance": tol,
    }
    if prices[0] > 0:
        block["price_ratios"] = list(prices / prices[0])
    return block


@click.group()
def main():
    """Equilibria and misreport gains for small exchange economies."""


@main.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", type=int, default=41, show_default=True, help="Search grid resolution for Leontief/linear markets.")
@click.option("--tol", type=float, default=1e-8, show_default=True, help="Clearing/optimality tolerance.")
@click.option("--deviation", default=None, help="'file' to apply the file's deviation section, or comma-separated exponents (with --agent).")
@click.option("--agent", type=int, default=None, help="Deviating agent for an inline --deviation.")
def solve(spec_path, grid, tol, deviation, agent):
    """Solve a market file and report verified equilibria."""
    loaded = _load(spec_path)
    economy = loaded.economy
    dev_agent, dev_alpha = _resolve_deviation(loaded, deviation, agent)
    reports = ReportProfile.truthful(economy)
    if dev_agent is not None:
        try:
            reports = reports.replace(
                dev_agent, UtilityFunction(economy.kind, dev_alpha)
            )
        except ValueError as exc:
            _fail(EXIT_VALIDATION, f"invalid deviation: {exc}")
    config = SolverConfig(clearing_tol=tol, grid_resolution=grid)

    report = {
        "command": "solve",
        "market": market_to_mapping(economy, dev_agent, dev_alpha),
        "warnings": list(loaded.warnings),
        "tolerance": tol,
    }
    try:
        if economy.kind is UtilityKind.COBB_DOUGLAS:
            members = [solve_cobb_douglas(economy, reports, config)]
            note = None
        elif economy.kind is UtilityKind.LEONTIEF:
            result = solve_leontief(economy, reports, config)
            members, note = list(result.members), result.family_note
        else:
            result = solve_linear_smallscale(economy, reports, config)
            members, note = list(result.members), result.family_note
    except AssumptionViolationError as exc:
        _fail(EXIT_VALIDATION, "assumption check failed", violations=[str(v) for v in exc.violations])
    except SolverError as exc:
        _fail(EXIT_RESIDUAL, str(exc), best_residual=exc.best_residual)

    # LP-derived linear allocations carry HiGHS-level noise (~1e-9..1e-7)
    block_tol = tol if economy.kind is not UtilityKind.LINEAR else max(tol, 1e-7)
    blocks = [_equilibrium_block(economy, reports, eq, block_tol) for eq in members]
    report["equilibria"] = blocks
    report["family_note"] = note
    _emit(report)
    if not blocks or not all(b["verified"] for b in blocks):
        sys.exit(EXIT_RESIDUAL)


@main.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--agent", type=int, required=True, help="Zero-based index of the deviating agent.")
@click.option("--grid", type=int, default=21, show_default=True, help="Exponent-grid resolution per simplex dimension.")
@click.option("--refine", type=int, default=200, show_default=True, help="Pattern-search refinement rounds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--deviation", default=None, help="Skip the search and evaluate this fixed report ('file' or comma-separated exponents).")
def ratio(spec_path, agent, grid, refine, seed, deviation):
    """Maximize one agent's misreport gain in a Cobb-Douglas market."""
    loaded = _load(spec_path)
    economy = loaded.economy
    if economy.kind is not UtilityKind.COBB_DOUGLAS:
        _fail(EXIT_VALIDATION, "ratio search requires a cobb_douglas market")
    if not 0 <= agent < economy.n:
        _fail(EXIT_VALIDATION, f"agent {agent} out of range")

    truthful_reports = ReportProfile.truthful(economy)
    report = {
        "command": "ratio",
        "market": market_to_mapping(economy),
        "warnings": list(loaded.warnings),
        "agent": agent,
    }
    try:
        if deviation is not None:
            dev_agent, dev_alpha = _resolve_deviation(loaded, deviation, agent)
            if dev_agent != agent:
                _fail(EXIT_VALIDATION, "deviation agent does not match --agent")
            fixed = UtilityFunction.cobb_douglas(dev_alpha)
            truthful_eq = solve_cobb_douglas(economy, truthful_reports)
            deviant_reports = truthful_reports.replace(agent, fixed)
            deviant_eq = solve_cobb_douglas(economy, deviant_reports)
            true_u = economy.utilities[agent]
            u_t = utility_eval(true_u, truthful_eq.allocation[agent])
            u_d = utility_eval(true_u, deviant_eq.allocation[agent])
            best_report = fixed
            result_ratio = u_d / u_t
            trace_len = 0
        else:
            result = incentive_ratio_cd(
                RatioQuery(
                    economy=economy,
                    agent_index=agent,
                    optimizer=OptimizerConfig(
                        grid_resolution=grid, refine_iterations=refine, seed=seed
                    ),
                )
            )
            truthful_eq = result.truthful_equilibrium
            deviant_eq = result.deviant_equilibrium
            deviant_reports = truthful_reports.replace(agent, result.best_report)
            u_t, u_d = result.truthful_utility, result.deviant_utility
            best_report = result.best_report
            result_ratio = result.ratio
            trace_len = len(result.trace)
    except AssumptionViolationError as exc:
        _fail(EXIT_VALIDATION, "assumption check failed", violations=[str(v) for v in exc.violations])
    except (DegenerateMarketError, ValueError) as exc:
        _fail(EXIT_VALIDATION, str(exc))

    det_t = budget_determinant(economy, truthful_reports, agent)
    det_d = budget_determinant(economy, deviant_reports, agent)
    invariance = abs(det_t - det_d) / max(1.0, abs(det_t))

    report.update(
        {
            "truthful": _equilibrium_block(economy, truthful_reports, truthful_eq, 1e-8),
            "deviant": _equilibrium_block(economy, deviant_reports, deviant_eq, 1e-8),
            "truthful_utility": u_t,
            "deviant_utility_under_true_preferences": u_d,
            "best_report": _report_utility(best_report),
            "ratio": result_ratio,
            "budget_invariance_residual": {"value": invariance, "tol": 1e-9},
            "candidates_traced": trace_len,
        }
    )
    _emit(report)


def _sweep_values(spec: str):
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        _fail(EXIT_PARSE, "--sweep expects START:STOP:COUNT")
    if count < 1:
        _fail(EXIT_VALIDATION, "--sweep needs at least one point")
    return np.linspace(start, stop, count)


def _witness_row(family: str, epsilon: float, delta: float | None):
    if family == "linear":
        res = witness_linear(epsilon)
        ok = all(c.ok for c in res.checks)
    elif family == "leontief":
        res = witness_leontief(epsilon, delta)
        ok = all(c.ok for c in res.checks)
    else:
        res = witness_cd(epsilon)
        ok = res.truthful_check.ok and res.deviant_check.ok
    return res, ok


@main.command()
@click.argument("family", type=click.Choice(["linear", "leontief", "cobb_douglas"]))
@click.option("--epsilon", type=float, default=0.01, show_default=True)
@click.option("--delta", type=float, default=0.001, show_default=True, help="Second parameter (Leontief only).")
@click.option("--sweep", default=None, help="Sweep epsilon over START:STOP:COUNT, one row per value.")
@click.option("--csv", "as_csv", is_flag=True, help="Emit sweep rows as CSV.")
def witness(family, epsilon, delta, sweep, as_csv):
    """Construct a witness market whose gain diverges as epsilon shrinks."""
    try:
        if sweep is not None:
            rows = []
            for eps in _sweep_values(sweep):
                res, ok = _witness_row(family, float(eps), delta)
                rows.append(
                    {
                        "family": family,
                        "epsilon": float(eps),
                        "delta": delta if family == "leontief" else "",
                        "ratio": res.ratio,
                        "certificates_ok": ok,
                    }
                )
            if as_csv:
                writer = csv.DictWriter(
                    sys.stdout,
                    fieldnames=["family", "epsilon", "delta", "ratio", "certificates_ok"],
                )
                writer.writeheader()
                writer.writerows(rows)
            else:
                _emit({"command": "witness", "sweep": rows})
            sys.exit(EXIT_OK if all(r["certificates_ok"] for r in rows) else EXIT_RESIDUAL)

        res, ok = _witness_row(family, epsilon, delta)
    except ValueError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    report = {"command": "witness", "family": family, "epsilon": epsilon}
    if family == "leontief":
        report["delta"] = delta
    report["market"] = market_to_mapping(res.economy)
    if family == "cobb_douglas":
        report["deviation"] = _report_utility(res.deviant_reports.reports[0])
        report["equilibria"] = [
            _equilibrium_block(res.economy, res.truthful_reports, res.truthful, 1e-8),
            _equilibrium_block(res.economy, res.deviant_reports, res.deviant, 1e-8),
        ]
    else:
        report["equilibria"] = [
            _equilibrium_block(res.economy, res.reports, eq, 1e-8)
            for eq in res.equilibria.members
        ]
        report["family_note"] = res.equilibria.family_note
    report["ratio"] = res.ratio
    report["certificates_ok"] = ok
    _emit(report)
    sys.exit(EXIT_OK if ok else EXIT_RESIDUAL)


def _verify_bounds(seed: int, samples: int, optimizer: OptimizerConfig):
    cells = []
    rows = []
    for n in (2, 3):
        for m in (2, 3, 4):
            cfg = UpperBoundConfig(
                n=n,
                m=m,
                samples=samples,
                seed=seed + 97 * n + m,
                optimizer=optimizer,
                include_reference=(n, m) == (2, 3),
            )
            try:
                rep = verify_upper_bound_m(cfg)
            except BoundViolationError as exc:
                cells.append({"n": n, "m": m, "passed": False, "error": str(exc)})
                continue
            cells.append(
                {
                    "n": n,
                    "m": m,
                    "samples": rep.samples,
                    "bound": rep.bound,
                    "max_ratio": rep.max_ratio,
                    "passed": rep.passed,
                }
            )
            rows.extend(
                {"suite": "bounds", "n": n, "m": m, "sample": k, "value": r}
                for k, r in enumerate(rep.ratios)
            )
    power = check_power_inequality(10_000, seed=seed)
    observed = [c["max_ratio"] for c in cells if "max_ratio" in c]
    block = {
        "cells": cells,
        "power_inequality": {
            "n_samples": power.n_samples,
            "max_violation": power.max_violation,
            "tol": 1e-12,
            "passed": power.passed,
        },
        "max_ratio_observed": max(observed) if observed else None,
        "passed": all(c["passed"] for c in cells) and power.passed,
    }
    return block, rows


def _verify_budget(seed: int, samples: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    rows = []
    for k in range(samples):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 7))
        economy = sample_cd_economy(rng, n, m)
        agent = int(rng.integers(n))
        truthful = ReportProfile.truthful(economy)
        deviant = truthful.replace(
            agent, UtilityFunction.cobb_douglas(sample_simplex(rng, m))
        )
        det_t = budget_determinant(economy, truthful, agent)
        det_d = budget_determinant(economy, deviant, agent)
        rel = abs(det_t - det_d) / max(1.0, abs(det_t))
        worst = max(worst, rel)
        rows.append({"suite": "budget", "n": n, "m": m, "sample": k, "value": rel})
    return {
        "samples": samples,
        "worst_relative_residual": worst,
        "tol": 1e-9,
        "passed": worst <= 1e-9,
    }, rows


def _verify_oracle(seed: int, samples: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    rows = []
    config = SolverConfig(grid_resolution=33)
    for k in range(samples):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(2, 4))
        economy = sample_cd_economy(rng, n, m)
        reports = ReportProfile.truthful(economy)
        closed = solve_cobb_douglas(economy, reports, config)
        brute = brute_force_equilibrium(economy, reports, config)
        dev = float(np.abs(closed.price_ratios() - brute.price_ratios()).max())
        worst = max(worst, dev)
        rows.append({"suite": "oracle", "n": n, "m": m, "sample": k, "value": dev})
    return {
        "samples": samples,
        "worst_price_ratio_deviation": worst,
        "tol": 1e-6,
        "passed": worst <= 1e-6,
    }, rows


@main.command()
@click.argument("suite", type=click.Choice(["bounds", "budget", "oracle", "all"]))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=None, help="Samples per suite cell (defaults: bounds 50, budget 1000, oracle 100).")
@click.option("--grid", type=int, default=21, show_default=True, help="Exponent-grid resolution for the bounds suite.")
@click.option("--csv", "as_csv", is_flag=True, help="Emit per-sample rows as CSV.")
def verify(suite, seed, samples, grid, as_csv):
    """Run a property suite and exit 0 only if every check passes."""
    optimizer = OptimizerConfig(grid_resolution=grid, seed=seed)
    report = {"command": "verify", "suite": suite, "seed": seed}
    all_rows = []
    passed = True
    if suite in ("bounds", "all"):
        block, rows = _verify_bounds(seed, samples or 50, optimizer)
        report["bounds"] = block
        all_rows += rows
        passed &= block["passed"]
    if suite in ("budget", "all"):
        block, rows = _verify_budget(seed, samples or 1000)
        report["budget"] = block
        all_rows += rows
        passed &= block["passed"]
    if suite in ("oracle", "all"):
        block, rows = _verify_oracle(seed, samples or 100)
        report["oracle"] = block
        all_rows += rows
        passed &= block["passed"]
    report["passed"] = passed

    if as_csv:
        writer = csv.DictWriter(
            sys.stdout, fieldnames=["suite", "n", "m", "sample", "value"]
        )
        writer.writeheader()
        writer.writerows(all_rows)
    else:
        _emit(report)
    sys.exit(EXIT_OK if passed else EXIT_VERIFY)


@main.command()
def reproduce():
    """Replay the bundled reference market against its expected values."""
    report = run_reproduction()
    report["command"] = "reproduce"
    _emit(report)
    if not report["passed"]:
        sys.exit(EXIT_VERIFY)


if __name__ == "__main__":
    main()

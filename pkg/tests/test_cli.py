import json

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from incratio.cli import main
from incratio.marketfile import parse_market

REFERENCE = "markets/reference_cd3.yaml"


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    assert result.output, result.exception
    return json.loads(result.output)


def test_solve_reference(runner):
    result = runner.invoke(main, ["solve", REFERENCE])
    assert result.exit_code == 0
    report = _json(result)
    eq = report["equilibria"][0]
    assert abs(eq["price_ratios"][1] - 1.5) < 1e-6
    assert abs(eq["utilities_true"][0] - 0.4495) < 5e-4
    assert eq["verified"]


def test_solve_symmetric(runner):
    result = runner.invoke(main, ["solve", "markets/symmetric_cd2.yaml"])
    assert result.exit_code == 0
    eq = _json(result)["equilibria"][0]
    assert abs(eq["price_ratios"][1] - 1.0) < 1e-12


def test_solve_with_file_deviation(runner):
    result = runner.invoke(main, ["solve", REFERENCE, "--deviation", "file"])
    assert result.exit_code == 0
    eq = _json(result)["equilibria"][0]
    assert abs(eq["price_ratios"][1] - 0.3323) < 2e-3


def test_solve_renormalization_warning(runner, tmp_path):
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [0.45, 0.5], "alpha": [0.5, 0.5]},
            {"endowment": [0.45, 0.5], "alpha": [0.5, 0.5]},
        ],
    }
    path = tmp_path / "m.yaml"
    path.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["solve", str(path)])
    assert result.exit_code == 0
    report = _json(result)
    assert report["warnings"] and "renormalized" in report["warnings"][0]


def test_solve_parse_error_exit_3(runner, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("format: 1\nmarket_kind: cobb_douglas\n")
    result = runner.invoke(main, ["solve", str(path)])
    assert result.exit_code == 3


def test_solve_validation_error_exit_4(runner, tmp_path):
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [0.5, 0.5], "alpha": [0.7, 0.7]},
            {"endowment": [0.5, 0.5], "alpha": [0.5, 0.5]},
        ],
    }
    path = tmp_path / "m.yaml"
    path.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["solve", str(path)])
    assert result.exit_code == 4


def test_report_market_round_trip(runner):
    result = runner.invoke(main, ["solve", REFERENCE])
    report = _json(result)
    loaded = parse_market(report["market"])
    original = parse_market(yaml.safe_load(open(REFERENCE)))
    np.testing.assert_array_equal(
        loaded.economy.endowments, original.economy.endowments
    )
    for got, want in zip(loaded.economy.utilities, original.economy.utilities):
        np.testing.assert_array_equal(got.alpha, want.alpha)


def test_ratio_reference(runner):
    result = runner.invoke(main, ["ratio", REFERENCE, "--agent", "0"])
    assert result.exit_code == 0
    report = _json(result)
    assert report["ratio"] >= 1.497
    assert report["budget_invariance_residual"]["value"] <= 1e-9


def test_ratio_fixed_to_truth_is_one(runner):
    result = runner.invoke(
        main, ["ratio", REFERENCE, "--agent", "0", "--deviation", "0.2,0.3,0.5"]
    )
    assert result.exit_code == 0
    assert _json(result)["ratio"] == 1.0


def test_ratio_rejects_assumption_violation(runner, tmp_path):
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [1.0, 0.0], "alpha": [0.5, 0.5]},
            {"endowment": [0.0, 1.0], "alpha": [0.1, 0.9]},
        ],
    }
    path = tmp_path / "witness.yaml"
    path.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["ratio", str(path), "--agent", "0"])
    assert result.exit_code == 4


def test_ratio_two_commodity_ceiling(runner, tmp_path):
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [0.7, 0.2], "alpha": [0.35, 0.65]},
            {"endowment": [0.3, 0.8], "alpha": [0.6, 0.4]},
        ],
    }
    path = tmp_path / "m2.yaml"
    path.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["ratio", str(path), "--agent", "0", "--seed", "5"])
    assert result.exit_code == 0
    assert _json(result)["ratio"] <= 1.4447


@pytest.mark.parametrize(
    "args,expected",
    [
        (["witness", "cobb_douglas", "--epsilon", "0.02"], 10.0),
        (["witness", "leontief", "--epsilon", "0.001", "--delta", "0.001"], 250.37518759379688),
        (["witness", "linear", "--epsilon", "0.01"], 100.0),
    ],
)
def test_witness_families(runner, args, expected):
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    report = _json(result)
    assert np.isclose(report["ratio"], expected, rtol=1e-12)
    assert report["certificates_ok"]


def test_witness_out_of_range_exit_4(runner):
    result = runner.invoke(main, ["witness", "linear", "--epsilon", "1.5"])
    assert result.exit_code == 4


def test_witness_sweep_csv(runner):
    result = runner.invoke(
        main, ["witness", "linear", "--sweep", "0.1:0.5:3", "--csv"]
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "family,epsilon,delta,ratio,certificates_ok"
    assert len(lines) == 4


def test_verify_budget_suite(runner):
    result = runner.invoke(main, ["verify", "budget", "--samples", "50"])
    assert result.exit_code == 0
    report = _json(result)
    assert report["budget"]["passed"]
    assert report["budget"]["worst_relative_residual"] <= 1e-9


def test_verify_bounds_suite_small(runner):
    result = runner.invoke(main, ["verify", "bounds", "--samples", "2"])
    assert result.exit_code == 0
    report = _json(result)
    assert report["bounds"]["passed"]
    assert report["bounds"]["power_inequality"]["passed"]
    assert len(report["bounds"]["cells"]) == 6
    for cell in report["bounds"]["cells"]:
        assert cell["max_ratio"] <= cell["bound"]


def test_solve_leontief_no_solution_exit_2(runner, tmp_path):
    doc = {
        "format": 1,
        "market_kind": "leontief",
        "commodities": 2,
        "agents": [{"endowment": [1.0, 1.0], "alpha": [1.0, 2.0]}],
    }
    path = tmp_path / "m.yaml"
    path.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["solve", str(path), "--grid", "11"])
    assert result.exit_code == 2


def test_verify_oracle_suite(runner):
    result = runner.invoke(main, ["verify", "oracle", "--samples", "10"])
    assert result.exit_code == 0
    assert _json(result)["oracle"]["worst_price_ratio_deviation"] <= 1e-6


def test_verify_deterministic(runner):
    first = runner.invoke(main, ["verify", "budget", "--samples", "25", "--seed", "9"])
    second = runner.invoke(main, ["verify", "budget", "--samples", "25", "--seed", "9"])
    assert first.output == second.output


def test_verify_csv_rows(runner):
    result = runner.invoke(
        main, ["verify", "budget", "--samples", "5", "--csv"]
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "suite,n,m,sample,value"
    assert len(lines) == 6


def test_reproduce(runner):
    result = runner.invoke(main, ["reproduce"])
    assert result.exit_code == 0
    report = _json(result)
    assert report["passed"]
    assert all(c["passed"] for c in report["checks"])

import numpy as np
import pytest
import yaml

from incratio import UtilityKind
from incratio.marketfile import (
    MarketFileError,
    dump_market,
    load_market,
    market_to_mapping,
    parse_market,
)
from incratio.reference import reference_economy
from incratio.sampling import sample_cd_economy


def test_load_reference_file():
    loaded = load_market("markets/reference_cd3.yaml")
    ref = reference_economy()
    assert loaded.kind is UtilityKind.COBB_DOUGLAS
    np.testing.assert_array_equal(loaded.economy.endowments, ref.endowments)
    for got, want in zip(loaded.economy.utilities, ref.utilities):
        np.testing.assert_array_equal(got.alpha, want.alpha)
    assert loaded.deviation_agent == 0
    np.testing.assert_array_equal(loaded.deviation_alpha, [0.85, 0.1, 0.05])
    assert loaded.warnings == ()


def test_renormalization_warning(tmp_path):
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
    loaded = load_market(path)
    assert loaded.warnings and "renormalized" in loaded.warnings[0]
    np.testing.assert_allclose(loaded.economy.endowments.sum(axis=0), [1.0, 1.0])


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(17)
    economy = sample_cd_economy(rng, 3, 4)
    path = tmp_path / "rt.yaml"
    dump_market(path, economy, 1, economy.utilities[1].alpha)
    loaded = load_market(path)
    np.testing.assert_array_equal(loaded.economy.endowments, economy.endowments)
    for got, want in zip(loaded.economy.utilities, economy.utilities):
        np.testing.assert_array_equal(got.alpha, want.alpha)
    # and through the in-memory mapping as well
    again = parse_market(market_to_mapping(economy))
    np.testing.assert_array_equal(again.economy.endowments, economy.endowments)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("format"),
        lambda d: d.update(format=2),
        lambda d: d.update(market_kind="ces"),
        lambda d: d.pop("agents"),
        lambda d: d["agents"][0].pop("alpha"),
        lambda d: d["agents"][0].update(endowment=[0.5]),
        lambda d: d.update(deviation={"agent": 9, "alpha": [0.5, 0.5]}),
    ],
)
def test_schema_errors(mutate):
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [0.5, 0.5], "alpha": [0.5, 0.5]},
            {"endowment": [0.5, 0.5], "alpha": [0.5, 0.5]},
        ],
    }
    mutate(doc)
    with pytest.raises(MarketFileError):
        parse_market(doc)


def test_invalid_alpha_raises_value_error():
    doc = {
        "format": 1,
        "market_kind": "cobb_douglas",
        "commodities": 2,
        "agents": [
            {"endowment": [0.5, 0.5], "alpha": [0.6, 0.6]},
            {"endowment": [0.5, 0.5], "alpha": [0.5, 0.5]},
        ],
    }
    with pytest.raises(ValueError):
        parse_market(doc)


def test_invalid_yaml_raises_market_file_error(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("{unbalanced: [")
    with pytest.raises(MarketFileError):
        load_market(path)

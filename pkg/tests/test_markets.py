import numpy as np
import pytest

from incratio import (
    Economy,
    MultiValuedDemandError,
    ReportProfile,
    UnboundedDemandError,
    UtilityFunction,
    demand,
    excess_demand,
    is_equilibrium,
    max_utility_on_budget_set,
    utility_eval,
    validate_economy,
)
from incratio.sampling import sample_cd_economy


# ---------------------------------------------------------------------------
# type invariants


def test_linear_allows_all_zero_alpha():
    u = UtilityFunction.linear([0.0, 0.0])
    assert utility_eval(u, [0.3, 0.7]) == 0.0


def test_linear_rejects_negative_alpha():
    with pytest.raises(ValueError):
        UtilityFunction.linear([1.0, -0.1])


def test_leontief_requires_strictly_positive_alpha():
    with pytest.raises(ValueError):
        UtilityFunction.leontief([1.0, 0.0])


@pytest.mark.parametrize("alpha", [[0.6, 0.5], [0.5, 0.4], [1.2, -0.2]])
def test_cobb_douglas_rejects_off_simplex(alpha):
    with pytest.raises(ValueError):
        UtilityFunction.cobb_douglas(alpha)


def test_economy_rejects_mixed_kinds():
    with pytest.raises(ValueError):
        Economy(
            endowments=[[0.5, 0.5], [0.5, 0.5]],
            utilities=(
                UtilityFunction.linear([1.0, 0.0]),
                UtilityFunction.leontief([1.0, 1.0]),
            ),
        )


def test_values_are_frozen(reference_market):
    economy, _ = reference_market
    with pytest.raises(ValueError):
        economy.endowments[0, 0] = 0.5


# ---------------------------------------------------------------------------
# validate_economy


def test_reference_market_satisfies_assumptions(reference_market):
    economy, _ = reference_market
    assert validate_economy(economy, require_assumption1=True) == []


def test_corner_endowments_flagged_under_assumption1():
    economy = Economy(
        endowments=[[1.0, 0.0], [0.0, 1.0]],
        utilities=(
            UtilityFunction.cobb_douglas([0.5, 0.5]),
            UtilityFunction.cobb_douglas([0.1, 0.9]),
        ),
    )
    assert validate_economy(economy) == []
    violations = validate_economy(economy, require_assumption1=True)
    assert [v.rule for v in violations] == ["endowment_positivity"] * 2
    assert {v.where for v in violations} == {(0, 1), (1, 0)}


def test_bad_supply_column_reported():
    economy = Economy(
        endowments=[[0.5, 0.4], [0.5, 0.5]],
        utilities=(
            UtilityFunction.cobb_douglas([0.5, 0.5]),
            UtilityFunction.cobb_douglas([0.5, 0.5]),
        ),
    )
    violations = validate_economy(economy)
    assert [v.rule for v in violations] == ["supply_normalization"]
    assert violations[0].where == (1,)


def test_uncovered_commodity_flagged():
    economy = Economy(
        endowments=[[0.5, 0.5], [0.5, 0.5]],
        utilities=(
            UtilityFunction.cobb_douglas([1.0, 0.0]),
            UtilityFunction.cobb_douglas([1.0, 0.0]),
        ),
    )
    violations = validate_economy(economy, require_assumption1=True)
    assert [v.rule for v in violations] == ["strong_competitiveness"]


# ---------------------------------------------------------------------------
# utility_eval


def test_utility_eval_reference_bundle():
    u = UtilityFunction.cobb_douglas([0.2, 0.3, 0.5])
    assert abs(utility_eval(u, [0.202, 0.202, 1.0]) - 0.4495) < 5e-4


def test_utility_eval_leontief_half():
    u = UtilityFunction.leontief([1.0, 1.0])
    assert utility_eval(u, [0.5, 0.5]) == 0.5


@pytest.mark.parametrize("c", [0.0, 0.7, 3.0])
def test_zero_exponent_convention(c):
    u = UtilityFunction.cobb_douglas([1.0, 0.0])
    assert utility_eval(u, [c, 0.0]) == c


def test_utility_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        utility_eval(UtilityFunction.linear([1.0, 0.0]), [1.0, 0.0, 0.0])


def test_cd_utility_degree_one_homogeneous():
    rng = np.random.default_rng(3)
    for _ in range(25):
        alpha = rng.dirichlet(np.ones(4))
        u = UtilityFunction.cobb_douglas(alpha)
        x = rng.uniform(0.1, 2.0, size=4)
        c = rng.uniform(0.1, 5.0)
        assert np.isclose(utility_eval(u, c * x), c * utility_eval(u, x), rtol=1e-12)


# ---------------------------------------------------------------------------
# demand


def test_cd_demand_splits_budget_by_weight():
    eps = 0.1
    d = demand(UtilityFunction.cobb_douglas([0.5, 0.5]), [1.0, 1.0 / (2 * eps)], 1.0)
    assert d.single_valued
    np.testing.assert_allclose(d.bundle, [0.5, eps], rtol=1e-14)


def test_linear_demand_unique_bundle():
    d = demand(UtilityFunction.linear([1.0, 0.0]), [1.0, 1.0], 1.0)
    assert d.single_valued
    assert d.support == (0,)
    np.testing.assert_allclose(d.bundle, [1.0, 0.0])


def test_leontief_demand_formula():
    eps, delta = 0.25, 0.4
    budget = delta * (1 - eps) + eps
    d = demand(UtilityFunction.leontief([1.0, 1.0]), [delta, 1.0], budget)
    expected = (eps + delta - delta * eps) / (1 + delta)
    np.testing.assert_allclose(d.bundle, [expected, expected], rtol=1e-14)


def test_linear_demand_tie_is_correspondence():
    d = demand(UtilityFunction.linear([1.0, 1.0]), [1.0, 1.0], 1.0)
    assert d.support == (0, 1)
    assert not d.single_valued


def test_linear_free_desired_good_unbounded():
    with pytest.raises(UnboundedDemandError):
        demand(UtilityFunction.linear([1.0, 1.0]), [1.0, 0.0], 1.0)


def test_cd_free_desired_good_unbounded_with_budget():
    with pytest.raises(UnboundedDemandError):
        demand(UtilityFunction.cobb_douglas([0.5, 0.5]), [1.0, 0.0], 1.0)


def test_cd_free_undesired_good_marked_free():
    d = demand(UtilityFunction.cobb_douglas([1.0, 0.0]), [1.0, 0.0], 1.0)
    assert d.free == (1,)
    assert not d.single_valued
    np.testing.assert_allclose(d.bundle, [1.0, 0.0])


def test_cd_zero_budget_zero_demand():
    d = demand(UtilityFunction.cobb_douglas([0.5, 0.5]), [1.0, 2.0], 0.0)
    assert d.single_valued
    np.testing.assert_allclose(d.bundle, [0.0, 0.0])


def test_cd_zero_budget_with_free_desired_good():
    # a priced desired good pins utility at 0; the free one is unconstrained
    d = demand(UtilityFunction.cobb_douglas([0.3, 0.7]), [1.0, 0.0], 0.0)
    assert d.free == (1,)
    np.testing.assert_allclose(d.bundle, [0.0, 0.0])


def test_cd_all_desired_goods_free_is_unbounded():
    with pytest.raises(UnboundedDemandError):
        demand(UtilityFunction.cobb_douglas([1.0, 0.0]), [0.0, 1.0], 0.0)


def test_linear_zero_utility_whole_budget_set():
    d = demand(UtilityFunction.linear([0.0, 0.0]), [1.0, 1.0], 1.0)
    assert d.whole_budget_set
    assert not d.single_valued


def test_demand_homogeneous_degree_zero():
    rng = np.random.default_rng(11)
    makers = [
        lambda a: UtilityFunction.cobb_douglas(a / a.sum()),
        lambda a: UtilityFunction.leontief(a + 0.1),
        lambda a: UtilityFunction.linear(a),
    ]
    for _ in range(30):
        for make in makers:
            u = make(rng.uniform(0.05, 1.0, size=3))
            p = rng.uniform(0.1, 2.0, size=3)
            budget = rng.uniform(0.1, 3.0)
            c = rng.uniform(0.2, 9.0)
            d1 = demand(u, p, budget)
            d2 = demand(u, c * p, c * budget)
            np.testing.assert_allclose(d1.bundle, d2.bundle, rtol=1e-10)
            assert d1.support == d2.support and d1.free == d2.free


def test_cd_demand_exhausts_budget():
    rng = np.random.default_rng(12)
    for _ in range(30):
        alpha = rng.dirichlet(np.ones(4))
        p = rng.uniform(0.1, 2.0, size=4)
        budget = rng.uniform(0.1, 3.0)
        d = demand(UtilityFunction.cobb_douglas(alpha), p, budget)
        assert np.isclose(d.bundle @ p, budget, rtol=1e-12)


# ---------------------------------------------------------------------------
# excess demand


def test_reference_market_clears_at_published_prices(reference_market):
    economy, reports = reference_market
    z = excess_demand(economy, reports, [0.398, 0.597, 0.201])
    assert np.abs(z).max() < 1e-3


def test_excess_demand_homogeneous(reference_market):
    economy, reports = reference_market
    p = np.array([0.4, 0.6, 0.2])
    np.testing.assert_allclose(
        excess_demand(economy, reports, p),
        excess_demand(economy, reports, 2.0 * p),
        atol=1e-12,
    )


def test_symmetric_market_clears_at_equal_prices(symmetric_2x2):
    economy, reports = symmetric_2x2
    z = excess_demand(economy, reports, [1.0, 1.0])
    np.testing.assert_allclose(z, [0.0, 0.0], atol=1e-15)


def test_excess_demand_rejects_ties():
    economy = Economy(
        endowments=[[0.5, 0.5], [0.5, 0.5]],
        utilities=(
            UtilityFunction.linear([1.0, 1.0]),
            UtilityFunction.linear([2.0, 1.0]),
        ),
    )
    with pytest.raises(MultiValuedDemandError):
        excess_demand(economy, ReportProfile.truthful(economy), [1.0, 1.0])


def test_walras_law():
    rng = np.random.default_rng(21)
    for _ in range(40):
        n, m = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        economy = sample_cd_economy(rng, n, m)
        reports = ReportProfile.truthful(economy)
        p = rng.uniform(0.05, 1.0, size=m)
        z = excess_demand(economy, reports, p)
        assert abs(p @ z) < 1e-10


def test_walras_law_linear_single_valued():
    # distinct bang-per-buck ratios keep linear demand single-valued
    economy = Economy(
        endowments=[[0.5, 0.5], [0.5, 0.5]],
        utilities=(
            UtilityFunction.linear([3.0, 1.0]),
            UtilityFunction.linear([1.0, 4.0]),
        ),
    )
    reports = ReportProfile.truthful(economy)
    rng = np.random.default_rng(8)
    for _ in range(20):
        p = rng.uniform(0.5, 1.5, size=2)
        z = excess_demand(economy, reports, p)
        assert abs(p @ z) < 1e-10


def test_walras_law_leontief():
    economy = Economy(
        endowments=[[0.5, 0.5], [0.5, 0.5]],
        utilities=(
            UtilityFunction.leontief([1.0, 2.0]),
            UtilityFunction.leontief([2.0, 1.0]),
        ),
    )
    reports = ReportProfile.truthful(economy)
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = rng.uniform(0.05, 1.0, size=2)
        z = excess_demand(economy, reports, p)
        assert abs(p @ z) < 1e-10


# ---------------------------------------------------------------------------
# is_equilibrium


def _linear_selection_market(eps):
    economy = Economy(
        endowments=[[eps, 1 - eps], [1 - eps, eps]],
        utilities=(
            UtilityFunction.linear([1.0, 0.0]),
            UtilityFunction.linear([0.0, 0.0]),
        ),
    )
    return economy, ReportProfile.truthful(economy)


def test_selection_market_low_payoff_equilibrium():
    eps = 0.25
    economy, reports = _linear_selection_market(eps)
    check = is_equilibrium(
        economy, reports, [1.0, 0.0], [[eps, 1 - eps], [1 - eps, eps]]
    )
    assert check.ok, check.failures


def test_selection_market_high_payoff_equilibrium():
    eps = 0.25
    economy, reports = _linear_selection_market(eps)
    check = is_equilibrium(economy, reports, [1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]])
    assert check.ok, check.failures


def test_budget_violation_rejected(reference_market):
    economy, reports = reference_market
    prices = np.array([0.398, 0.597, 0.201])
    check = is_equilibrium(
        economy, reports, prices, [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]]
    )
    assert not check.ok
    assert any("overspends" in f for f in check.failures)


def test_suboptimal_allocation_rejected(symmetric_2x2):
    economy, reports = symmetric_2x2
    # endowments clear and are affordable but do not maximize at p=(1,3)
    check = is_equilibrium(economy, reports, [1.0, 3.0], economy.endowments)
    assert not check.ok
    assert any("not at optimum" in f for f in check.failures)


def test_max_utility_handles_unbounded_case():
    u = UtilityFunction.cobb_douglas([0.5, 0.5])
    assert max_utility_on_budget_set(u, [1.0, 0.0], 1.0) == np.inf
    assert max_utility_on_budget_set(u, [1.0, 0.0], 0.0) == 0.0

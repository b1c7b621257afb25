import numpy as np
import pytest

from incratio import Economy, ReportProfile, UtilityFunction


@pytest.fixture
def reference_market():
    """Two-agent, three-commodity market with a known ~1.50 misreport gain."""
    economy = Economy(
        endowments=[[0.99, 0.01, 0.01], [0.01, 0.99, 0.99]],
        utilities=(
            UtilityFunction.cobb_douglas([0.2, 0.3, 0.5]),
            UtilityFunction.cobb_douglas([0.4, 0.6, 0.0]),
        ),
    )
    return economy, ReportProfile.truthful(economy)


@pytest.fixture
def symmetric_2x2():
    economy = Economy(
        endowments=[[0.5, 0.5], [0.5, 0.5]],
        utilities=(
            UtilityFunction.cobb_douglas([0.5, 0.5]),
            UtilityFunction.cobb_douglas([0.5, 0.5]),
        ),
    )
    return economy, ReportProfile.truthful(economy)


def rng_for(seed):
    return np.random.default_rng(seed)

import numpy as np
import pytest

from conftest import GLD_TRUTH, SIR_TRUTH
from sirgld.gld import gld_growth, params_to_growth
from sirgld.simulate import GldScenario, counts_from_curves, round_cumulative, simulate


def test_noiseless_counts_follow_rounded_curve():
    T, R = SIR_TRUTH.curves()
    s = simulate(SIR_TRUTH)
    np.testing.assert_array_equal(s.cum_infected, np.floor(T + 0.5))
    assert np.all(np.abs(s.cum_removed - R) <= 0.5)


def test_gld_scenario_matches_closed_form():
    s = simulate(GLD_TRUTH)
    growth = params_to_growth(GLD_TRUTH.params, GLD_TRUTH.N)
    expected = round_cumulative(gld_growth(s.days, growth))
    np.testing.assert_array_equal(s.cum_infected, expected)


def test_gld_scenario_removals():
    T, R = GldScenario(gamma=0.0).curves()
    assert not R.any()
    T, R = GLD_TRUTH.curves()
    assert np.all(R <= T) and np.all(np.diff(R) >= 0)
    # removal lags infection by roughly 1/gamma days
    assert R[49] == pytest.approx(T[49 - 20], rel=0.2)


def test_fatality_split():
    T, R = SIR_TRUTH.curves()
    recs = counts_from_curves(T, R, fatality=0.3)
    died = sum(r.new_died for r in recs)
    removed = sum(r.new_removed for r in recs)
    assert died == pytest.approx(0.3 * removed, abs=1)
    assert all(r.new_died >= 0 and r.new_recovered >= 0 for r in recs)


def test_poisson_noise_is_seeded():
    a = simulate(SIR_TRUTH, noise=1.0, seed=3)
    b = simulate(SIR_TRUTH, noise=1.0, seed=3)
    c = simulate(SIR_TRUTH, noise=1.0, seed=4)
    assert a.cum_infected.tolist() == b.cum_infected.tolist()
    assert a.cum_infected.tolist() != c.cum_infected.tolist()
    T, _ = SIR_TRUTH.curves()
    assert a.cum_infected[-1] == pytest.approx(T[-1], rel=0.05)
    assert np.all(a.active >= 0)


def test_noise_needs_rng():
    with pytest.raises(ValueError):
        counts_from_curves([1.0, 2.0], [0.0, 0.0], noise=1.0)

"""
Tests for the growth functionals, their derivatives and sampled curves
"""

import math

import numpy as np
import pytest

from controllers.growth_controller import GrowthController
from models.bet_model import BernoulliBet, DiscreteBet, UniformReturnBet
from models.clock_model import ClockModel
from utils.errors import BranchError, ConfigurationError, FractionOutOfRangeError

growth = GrowthController()
KELLY_BET = BernoulliBet(0.53)
KT = ClockModel.degenerate()
VG = ClockModel.gamma(0.5)
IG = ClockModel.inverse_gaussian(0.5)


# ----- values -----

def test_kelly_thorp_values():
    assert growth.growth_kt(KELLY_BET, 0.0) == 0.0
    assert growth.growth_kt(KELLY_BET, 0.06) == pytest.approx(0.53 * math.log(1.06) + 0.47 * math.log(0.94), abs=1e-15)
    assert growth.growth_kt(KELLY_BET, 0.06) == pytest.approx(0.001801, abs=1e-6)
    assert growth.growth_kt(KELLY_BET, 0.12) == pytest.approx(0.0, abs=5e-5)


def test_clock_aware_values():
    assert growth.growth_cc(VG, KELLY_BET, 0.06) == pytest.approx(0.0009010, abs=1e-6)
    assert growth.growth_cc(IG, KELLY_BET, 0.06) == pytest.approx(0.0009014, abs=1e-6)
    assert growth.growth_cc(VG, KELLY_BET, 0.08) == pytest.approx(0.0, abs=5e-5)
    # 1 - 0.53/1.06 - 0.47/0.94 = 0
    assert growth.growth_cc(ClockModel.gamma(1.0), KELLY_BET, 0.06) == pytest.approx(0.0, abs=1e-15)


def test_gamma_matches_bernoulli_closed_form():
    expected = (0.53 * 1.06 ** -0.5 + 0.47 * 0.94 ** -0.5 - 1.0) / -0.5
    assert growth.growth_cc(VG, KELLY_BET, 0.06) == pytest.approx(expected, rel=1e-12)


def test_inverse_gaussian_penalty_weights_each_outcome():
    up, down = math.log(1.06), math.log(0.94)
    penalty = 0.25 * (0.53 * up ** 2 + 0.47 * down ** 2)
    expected = 0.53 * up + 0.47 * down - penalty
    assert growth.growth_cc(IG, KELLY_BET, 0.06) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("bet", [
    KELLY_BET,
    UniformReturnBet(-0.5, 1.5),
    DiscreteBet.from_pairs([[-0.5, 0.4], [0.1, 0.3], [0.8, 0.3]]),
])
def test_degenerate_clock_reduces_to_kelly_thorp(bet):
    for f in (0.0, 0.05, 0.3, 0.9):
        assert growth.growth_cc(KT, bet, f) == growth.growth_kt(bet, f)


def test_zero_fraction_is_exactly_zero():
    for clock in (KT, VG, IG):
        assert growth.growth_cc(clock, UniformReturnBet(-0.5, 1.5), 0.0) == 0.0


def test_out_of_range_fraction_raises():
    with pytest.raises(FractionOutOfRangeError):
        growth.growth_cc(VG, KELLY_BET, 1.0)
    with pytest.raises(FractionOutOfRangeError):
        growth.growth_kt(UniformReturnBet(-0.25, 1.0), 4.5)


# ----- admissibility and the inverse Gaussian branch -----

def test_admissible_fraction():
    assert growth.admissible_fraction(VG, KELLY_BET) == 1.0
    assert growth.admissible_fraction(IG, UniformReturnBet(-0.5, 20.0)) == pytest.approx(math.expm1(2.0) / 20.0)
    assert growth.admissible_fraction(ClockModel.inverse_gaussian(2.0), KELLY_BET) == pytest.approx(math.expm1(0.5))


def test_inverse_gaussian_branch_error():
    with pytest.raises(BranchError):
        growth.growth_cc(IG, UniformReturnBet(-0.5, 20.0), 0.5)
    with pytest.raises(BranchError):
        growth.growth_cc(ClockModel.inverse_gaussian(2.0), KELLY_BET, 0.7)
    assert math.isfinite(growth.growth_cc(IG, UniformReturnBet(-0.5, 20.0), 0.3))


# ----- derivatives -----

def test_kelly_derivative_vanishes_at_p_minus_q():
    assert growth.growth_cc_derivative(KT, KELLY_BET, 0.06) == pytest.approx(0.0, abs=1e-12)


def test_gamma_derivative_is_negative_at_kelly_fraction():
    assert growth.growth_cc_derivative(VG, KELLY_BET, 0.06) < 0


def test_derivative_at_zero_is_mean_return():
    bet = UniformReturnBet(-0.5, 1.5)
    for clock in (KT, VG, IG):
        assert growth.growth_cc_derivative(clock, bet, 0.0) == 0.5


@pytest.mark.parametrize("clock", [KT, VG, IG, ClockModel.gamma(1.0), ClockModel.gamma(2.0)], ids=lambda c: c.label)
@pytest.mark.parametrize("bet,f", [
    (KELLY_BET, 0.03),
    (KELLY_BET, 0.1),
    (UniformReturnBet(-0.5, 1.5), 0.3),
    (UniformReturnBet(-0.5, 1.5), 1.2),
    (UniformReturnBet(-0.5, 1.5), 0.005),
    (DiscreteBet.from_pairs([[-0.5, 0.4], [0.1, 0.3], [0.8, 0.3]]), 0.4),
])
def test_derivative_matches_finite_difference(clock, bet, f):
    h = 1e-6
    numeric = (growth.growth_cc(clock, bet, f + h) - growth.growth_cc(clock, bet, f - h)) / (2 * h)
    assert growth.growth_cc_derivative(clock, bet, f) == pytest.approx(numeric, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("clock", [KT, VG, ClockModel.gamma(1.0), ClockModel.gamma(2.0)], ids=lambda c: c.label)
def test_uniform_foc_residual_is_scaled_derivative(clock):
    bet = UniformReturnBet(-0.5, 1.5)
    for f in (0.005, 0.3, 1.2):
        slope = growth.growth_cc_derivative(clock, bet, f)
        assert growth.uniform_foc_residual(clock, bet, f) == pytest.approx(f * slope, rel=1e-7, abs=1e-12)


def test_uniform_foc_kelly_limit():
    bet = UniformReturnBet(-0.5, 1.5)
    f = 0.7
    kelly_condition = bet.width - math.log((1 + bet.ub * f) / (1 + bet.lb * f)) / f
    residual = growth.uniform_foc_residual(KT, bet, f)
    assert residual == pytest.approx(kelly_condition / bet.width, rel=1e-10)


def test_uniform_foc_rejects_other_inputs():
    with pytest.raises(ConfigurationError):
        growth.uniform_foc_residual(IG, UniformReturnBet(-0.5, 1.5), 0.3)
    with pytest.raises(ConfigurationError):
        growth.uniform_foc_residual(VG, KELLY_BET, 0.03)
    with pytest.raises(FractionOutOfRangeError):
        growth.uniform_foc_residual(VG, UniformReturnBet(-0.5, 1.5), 0.0)


# ----- closed forms against quadrature -----

@pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 1.00005, 2.0])
@pytest.mark.parametrize("f", [0.1, 0.5, 1.5])
def test_uniform_closed_form_matches_quadrature(theta, f):
    clock = ClockModel.gamma(theta)
    bet = UniformReturnBet(-0.5, 1.5)
    assert growth.growth_cc(clock, bet, f) == pytest.approx(growth.growth_cc_quadrature(clock, bet, f), abs=1e-9)


def test_uniform_kelly_closed_form_matches_quadrature():
    bet = UniformReturnBet(-0.2, 0.3)
    for f in (0.5, 2.0, 4.5):
        assert growth.growth_kt(bet, f) == pytest.approx(growth.growth_cc_quadrature(KT, bet, f), abs=1e-9)


# ----- invariants -----

def test_small_theta_approaches_kelly_thorp():
    clock = ClockModel.gamma(1e-6)
    gaps = [abs(growth.growth_cc(clock, KELLY_BET, f) - growth.growth_kt(KELLY_BET, f))
            for f in np.linspace(0.0, 0.11, 56)]
    assert max(gaps) <= 1e-5


def _random_instance(rng):
    theta = rng.uniform(0.05, 2.0)
    clock = ClockModel.gamma(theta) if rng.random() < 0.5 else ClockModel.inverse_gaussian(theta)
    choice = rng.integers(3)
    if choice == 0:
        bet = BernoulliBet(rng.uniform(0.3, 0.9))
    elif choice == 1:
        bet = UniformReturnBet(rng.uniform(-0.9, -0.05), rng.uniform(0.05, 2.0))
    else:
        probabilities = rng.dirichlet(np.ones(3)) * 0.97 + 0.01
        probabilities = probabilities / probabilities.sum()
        bet = DiscreteBet(tuple(np.sort(rng.uniform(-0.9, 1.5, 3)) + np.array([0.0, 1e-3, 2e-3])), tuple(probabilities))
    f = rng.uniform(0.0, 0.95) * min(growth.admissible_fraction(clock, bet), 5.0)
    return clock, bet, f


def test_clock_aware_growth_never_exceeds_kelly_thorp():
    rng = np.random.default_rng(20251019)
    for _ in range(1000):
        clock, bet, f = _random_instance(rng)
        clock_aware, kelly = growth.growth_cc(clock, bet, f), growth.growth_kt(bet, f)
        assert clock_aware <= kelly + 1e-12, (clock, bet, f)
        if f > 1e-2:
            assert clock_aware < kelly, (clock, bet, f)
        assert growth.growth_cc(clock, bet, 0.0) == growth.growth_kt(bet, 0.0) == 0.0


@pytest.mark.parametrize("clock", [VG, IG, ClockModel.gamma(1.0)], ids=lambda c: c.label)
def test_bernoulli_growth_is_concave(clock):
    values = np.array([growth.growth_cc(clock, KELLY_BET, f) for f in np.linspace(0.0, 0.5, 101)])
    assert np.all(np.diff(values, 2) <= 1e-12)


def test_bernoulli_drift_moments():
    for clock in (KT, VG, IG):
        mean, variance = growth.drift_moments(clock, KELLY_BET, 0.06)
        up, down = clock.inv_mgf(1.06), clock.inv_mgf(0.94)
        assert mean == pytest.approx(growth.growth_cc(clock, KELLY_BET, 0.06), rel=1e-12)
        assert variance == pytest.approx(0.53 * 0.47 * (up - down) ** 2, rel=1e-9)
    assert growth.drift_moments(VG, KELLY_BET, 0.0) == (0.0, 0.0)


def test_uniform_drift_variance_matches_kelly_moments():
    bet = UniformReturnBet(-0.2, 0.3)
    mean, variance = growth.drift_moments(KT, bet, 1e-3)
    # log(1 + f u) ~ f u for small f
    assert variance == pytest.approx((1e-3) ** 2 * bet.width ** 2 / 12.0, rel=1e-3)
    assert mean == pytest.approx(growth.growth_kt(bet, 1e-3))


# ----- curves -----

def test_curve_at_zero():
    curve = growth.growth_curve(KT, KELLY_BET, [0.0])
    assert curve.points == [(0.0, 0.0)]
    assert curve.model_label == "KT"


def test_gamma_curve_lies_below_kelly_curve():
    grid = np.linspace(0.0, 0.12, 61)
    kelly = growth.growth_curve(KT, KELLY_BET, grid)
    gamma = growth.growth_curve(VG, KELLY_BET, grid)
    assert all(g <= k for g, k in zip(gamma.values, kelly.values))
    assert gamma.values[0] == kelly.values[0] == 0.0


def test_gamma_curve_changes_sign_near_eight_percent():
    curve = growth.growth_curve(VG, KELLY_BET, [0.078, 0.08, 0.082])
    assert curve.values[0] > 0
    assert curve.values[-1] < 0


def test_curve_frame_columns():
    frame = growth.growth_curve(IG, KELLY_BET, [0.0, 0.05, 0.1]).to_dataframe()
    assert list(frame.columns) == ['f', 'G', 'model_label']
    assert frame['model_label'].unique().tolist() == ["IG(theta=0.5)"]


def test_curve_errors_name_the_fraction():
    with pytest.raises(ConfigurationError, match="strictly increasing"):
        growth.growth_curve(VG, KELLY_BET, [0.1, 0.05])
    with pytest.raises(FractionOutOfRangeError, match="f=1.0"):
        growth.growth_curve(VG, KELLY_BET, [0.5, 1.0])
    with pytest.raises(BranchError, match="f=0.5"):
        growth.growth_curve(IG, UniformReturnBet(-0.5, 20.0), [0.1, 0.5])

"""
Tests for distortion families, distorted growth and the acceptability index
"""

import math

import numpy as np
import pytest

from controllers.acceptability_controller import AcceptabilityController
from controllers.growth_controller import GrowthController
from models.bet_model import BernoulliBet
from models.clock_model import ClockModel
from models.distortion_model import DistortionFamily
from utils.errors import ConfigurationError

accept = AcceptabilityController()
growth = GrowthController()
POWER = DistortionFamily.power()
KELLY_BET = BernoulliBet(0.53)
KT = ClockModel.degenerate()
VG = ClockModel.gamma(0.5)
IG = ClockModel.inverse_gaussian(0.5)


# ----- distortion family -----

def test_power_family_fixed_points():
    for x in (0.0, 0.5, 1.0, 3.0, 50.0):
        assert POWER.forward(x, 0.0) == 0.0
        assert POWER.forward(x, 1.0) == 1.0
        assert POWER.inverse(x, 1.0) == 1.0


def test_power_family_inverts():
    y = np.geomspace(1e-6, 1e3, 200)
    for x in (0.25, 1.0, 3.0):
        assert np.allclose(POWER.forward(x, POWER.inverse(x, y)), y, rtol=1e-12, atol=0.0)


def test_power_family_dominates_identity_above_one():
    y = np.linspace(1.0, 10.0, 50)
    assert np.all(POWER.forward(2.0, y) >= y)
    assert np.all(POWER.inverse(2.0, y) <= y)


def test_negative_level_is_rejected():
    with pytest.raises(ConfigurationError):
        POWER.forward(-0.1, 2.0)
    with pytest.raises(ConfigurationError):
        DistortionFamily("minvar")
    assert DistortionFamily.from_dict(POWER.to_dict()) == POWER


# ----- distorted MGF -----

def test_distorted_mgf_examples():
    assert accept.distorted_mgf(VG, POWER, 0.0, 0.5) == VG.mgf(0.5)
    assert accept.distorted_mgf(VG, POWER, 1.0, 0.5) == pytest.approx(1.33333, abs=1e-5)
    for clock in (KT, VG, IG):
        assert accept.distorted_mgf(clock, POWER, 2.5, 0.0) == 1.0


def test_distorted_mgf_lies_below_reference():
    for clock in (VG, IG):
        for s in np.linspace(0.0, 0.9, 10):
            reference = clock.mgf(s)
            for x in (0.0, 0.5, 2.0):
                assert accept.distorted_mgf(clock, POWER, x, s) <= reference


def test_distorted_mgf_decreases_with_level():
    values = [accept.distorted_mgf(IG, POWER, x, 0.3) for x in (0.0, 0.5, 1.0, 4.0)]
    assert all(b < a for a, b in zip(values, values[1:]))


# ----- distorted growth -----

def test_zero_level_reproduces_clock_aware_growth():
    for clock in (KT, VG, IG):
        for f in (0.03, 0.06, 0.12):
            assert accept.distorted_growth(clock, POWER, 0.0, KELLY_BET, f) == growth.growth_cc(clock, KELLY_BET, f)
    assert accept.distorted_growth(VG, POWER, 0.0, KELLY_BET, 0.06) == pytest.approx(0.000901, abs=1e-6)


def test_zero_fraction_stays_at_zero():
    for clock in (KT, VG, IG):
        assert accept.distorted_growth(clock, POWER, 3.0, KELLY_BET, 0.0) == 0.0


def test_distortion_shrinks_positive_growth():
    reference = growth.growth_cc(VG, KELLY_BET, 0.06)
    value = accept.distorted_growth(VG, POWER, 3.0, KELLY_BET, 0.06)
    assert 0.0 < value < reference
    levels = [accept.distorted_growth(VG, POWER, x, KELLY_BET, 0.06) for x in (0.0, 1.0, 2.0, 3.0)]
    assert all(b <= a for a, b in zip(levels, levels[1:]))


def test_distortion_keeps_the_sign_of_growth():
    negative = accept.distorted_growth(VG, POWER, 2.0, KELLY_BET, 0.12)
    assert growth.growth_cc(VG, KELLY_BET, 0.12) < negative < 0.0


def test_optimistic_direction_raises_growth():
    reference = growth.growth_cc(VG, KELLY_BET, 0.06)
    optimistic = accept.distorted_growth(VG, POWER, 1.0, KELLY_BET, 0.06, direction="optimistic")
    assert optimistic > reference
    with pytest.raises(ConfigurationError):
        accept.distorted_growth(VG, POWER, 1.0, KELLY_BET, 0.06, direction="sideways")


# ----- acceptability index -----

def test_unit_hurdle_is_a_sign_test():
    assert accept.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=1.0) == math.inf
    assert accept.acceptability_index(VG, POWER, KELLY_BET, 0.12, hurdle=1.0) == 0.0


def test_index_solves_the_hurdle_equation():
    index = accept.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=1.0005)
    assert 0.8 < index < 0.81
    value = VG.mgf(growth.growth_cc(VG, KELLY_BET, 0.06))
    assert POWER.inverse(index, value) == pytest.approx(1.0005, abs=1e-8)


def test_index_decreases_with_hurdle():
    indices = [accept.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=h) for h in (1.0002, 1.0005, 1.0008)]
    assert all(b < a for a, b in zip(indices, indices[1:]))
    assert accept.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=1.01) == 0.0


def test_index_nonincreasing_between_optimum_and_threshold():
    grid = np.linspace(0.041, 0.079, 12)
    indices = [accept.acceptability_index(VG, POWER, KELLY_BET, f, hurdle=1.0001) for f in grid]
    assert all(b <= a for a, b in zip(indices, indices[1:]))


def test_index_beyond_search_bound_is_inf():
    tiny = AcceptabilityController(settings={'x_upper': 0.1})
    assert tiny.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=1.0001) == math.inf


def test_hurdle_below_one_is_rejected():
    with pytest.raises(ConfigurationError):
        accept.acceptability_index(VG, POWER, KELLY_BET, 0.06, hurdle=0.99)


def test_acceptability_table():
    table = accept.acceptability_table(VG, POWER, KELLY_BET, [0.02, 0.06, 0.12], hurdle=1.0, x=1.0)
    assert list(table.columns) == ['f', 'growth', 'x', 'hurdle', 'distortion_level', 'distorted_growth']
    assert table['x'].tolist() == [math.inf, math.inf, 0.0]
    assert (table['distortion_level'] == 1.0).all()
    assert (table['distorted_growth'].abs() <= table['growth'].abs()).all()


def test_controller_family_comes_from_settings():
    assert accept.family == POWER
    with pytest.raises(ConfigurationError):
        AcceptabilityController(settings={'family': 'wang'})

"""
Acceptability Controller - Distorted MGFs, distorted growth rates and acceptability indices
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import pandas as pd
from scipy import optimize

from controllers.growth_controller import GrowthController, growth_controller
from models.bet_model import BetModel
from models.clock_model import ClockModel
from models.distortion_model import DistortionFamily
from utils.constants import ACCEPT_CONFIG, ERROR_MESSAGES
from utils.errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

DIRECTIONS = ("pessimistic", "optimistic")


class AcceptabilityController:
    """
    Controller for distortion-based acceptability of long-run investments

    The pessimistic direction passes MGF values through g_x^{-1}, pulling them
    toward 1; the optimistic direction applies g_x itself.
    """

    def __init__(self, settings: Optional[Dict] = None, growth: Optional[GrowthController] = None):
        """
        Initialize the acceptability controller

        Args:
            settings: Overrides for ACCEPT_CONFIG
            growth: Growth controller used for G^CC
        """
        self.settings = {**ACCEPT_CONFIG, **(settings or {})}
        self.growth = growth or growth_controller
        self._check_direction(self.settings['direction'])
        self.family = DistortionFamily(self.settings['family'])

    @staticmethod
    def _check_direction(direction: str) -> str:
        if direction not in DIRECTIONS:
            raise ConfigurationError(f"Distortion direction must be one of {DIRECTIONS}, got '{direction}'")
        return direction

    def _distort(self, family: DistortionFamily, x: float, value: float, direction: str) -> float:
        if direction == "pessimistic":
            return family.inverse(x, value)
        return family.forward(x, value)

    # ===== DISTORTED MGF =====

    def distorted_mgf(self, clock: ClockModel, family: DistortionFamily, x: float, s: float,
                      direction: Optional[str] = None) -> float:
        """
        Pseudo-MGF g_x^{-1}(psi(s)) (g_x(psi(s)) in the optimistic direction)

        Args:
            clock: Stochastic clock
            family: Distortion family
            x: Distortion level >= 0
            s: MGF argument inside the clock's domain

        Returns:
            Distorted MGF value; psi(s) exactly at x = 0
        """
        direction = self._check_direction(direction or self.settings['direction'])
        return self._distort(family, x, clock.mgf(s), direction)

    # ===== DISTORTED GROWTH =====

    def distorted_growth(self, clock: ClockModel, family: DistortionFamily, x: float, bet: BetModel, f: float,
                         direction: Optional[str] = None) -> float:
        """
        Growth rate psi^{-1}(g_x^{-1}(psi(G^CC(f))))

        Args:
            clock: Stochastic clock
            family: Distortion family
            x: Distortion level >= 0
            bet: Bet model
            f: Fraction
            direction: 'pessimistic' (default) or 'optimistic'

        Returns:
            Distorted growth; G^CC(f) exactly at x = 0
        """
        direction = self._check_direction(direction or self.settings['direction'])
        growth = self.growth.growth_cc(clock, bet, f)
        if float(x) == 0.0:
            return growth

        distorted = self._distort(family, x, clock.mgf(growth), direction)
        try:
            return clock.inv_mgf(distorted)
        except DomainError as e:
            raise type(e)(f"Distorted MGF value {distorted!r} at x={x}, f={f} left the inverse domain: {e}") from e

    # ===== ACCEPTABILITY INDEX =====

    def acceptability_index(self, clock: ClockModel, family: DistortionFamily, bet: BetModel, f: float,
                            hurdle: float = 1.0) -> float:
        """
        Largest distortion level keeping the pessimistic pseudo-MGF at or above the hurdle

        sup{x >= 0 : g_x^{-1}(psi(G^CC(f))) >= hurdle}. With hurdle 1 the unit
        fixed point reduces this to a sign test of G^CC(f).

        Args:
            clock: Stochastic clock
            family: Distortion family
            bet: Bet model
            f: Fraction
            hurdle: Threshold >= 1

        Returns:
            Index in [0, inf]; inf when acceptable up to the bisection bound
        """
        hurdle = float(hurdle)
        if not (math.isfinite(hurdle) and hurdle >= 1.0):
            raise ConfigurationError(ERROR_MESSAGES['hurdle'].format(hurdle=hurdle))

        growth = self.growth.growth_cc(clock, bet, f)
        value = clock.mgf(growth)

        if hurdle == 1.0:
            logger.warning(f"Hurdle 1 reduces the acceptability index to the sign of G^CC({f})={growth:.6g}")
            return math.inf if growth >= 0.0 else 0.0

        gap = lambda x: family.inverse(x, value) - hurdle
        if gap(0.0) < 0.0:
            return 0.0
        x_upper = float(self.settings['x_upper'])
        if gap(x_upper) >= 0.0:
            logger.warning(f"Still acceptable at x={x_upper:g}; index reported as inf")
            return math.inf

        index = optimize.bisect(gap, 0.0, x_upper, xtol=self.settings['xtol'], maxiter=200)
        logger.debug(f"Acceptability index {index:.10g} at f={f}, hurdle={hurdle}")
        return index

    def acceptability_table(self, clock: ClockModel, family: DistortionFamily, bet: BetModel,
                            f_grid: Sequence[float], hurdle: float = 1.0, x: float = 0.0,
                            direction: Optional[str] = None) -> pd.DataFrame:
        """
        Index and distorted growth across fractions

        Returns:
            DataFrame with columns f, growth, x, hurdle, distortion_level,
            distorted_growth where x is the acceptability index
        """
        rows: List[Dict] = []
        for f in f_grid:
            rows.append({
                'f': float(f),
                'growth': self.growth.growth_cc(clock, bet, f),
                'x': self.acceptability_index(clock, family, bet, f, hurdle),
                'hurdle': float(hurdle),
                'distortion_level': float(x),
                'distorted_growth': self.distorted_growth(clock, family, x, bet, f, direction),
            })
        return pd.DataFrame(rows, columns=['f', 'growth', 'x', 'hurdle', 'distortion_level', 'distorted_growth'])


# Default controller instance
acceptability_controller = AcceptabilityController()

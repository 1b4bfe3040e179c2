"""
Growth Controller - Kelly-Thorp and clock-aware growth functionals, derivatives and curves
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

from scipy import integrate

from models.bet_model import BernoulliBet, BetModel, DiscreteBet, UniformReturnBet
from models.clock_model import ClockKind, ClockModel
from models.result_models import GrowthCurve
from utils.constants import GROWTH_CONFIG
from utils.errors import (
    ConfigurationError,
    ConvergenceError,
    FractionOutOfRangeError,
    KellyClockError,
)

logger = logging.getLogger(__name__)

_DEGENERATE = ClockModel.degenerate()


def _power_difference(a: float, b: float, k: float) -> float:
    """(A^k - B^k) / k for A = e^a, B = e^b, with the k -> 0 limit a - b."""
    if k == 0.0:
        return a - b
    return math.exp(k * b) * math.expm1(k * (a - b)) / k


def _uniform_power_growth(gamma: float, a: float, b: float, width: float) -> float:
    """
    Mean of (V^gamma - 1)/gamma for V uniform on [B, A] with A = e^a, B = e^b

    Written as [A e(a) - B e(b) - (A - B)] / ((gamma + 1)(A - B)) with
    e(x) = expm1(gamma x)/gamma so gamma = 0 gives the expected logarithm.
    """
    big_a, big_b = math.exp(a), math.exp(b)
    if gamma == 0.0:
        ea, eb = a, b
    else:
        ea, eb = math.expm1(gamma * a) / gamma, math.expm1(gamma * b) / gamma
    return (big_a * ea - big_b * eb - width) / ((gamma + 1.0) * width)


class GrowthController:
    """
    Controller for the growth functionals G^KT (expected log) and G^CC
    (expected psi^{-1}) of a bet under a stochastic clock
    """

    def __init__(self, settings: Optional[Dict] = None):
        """
        Initialize the growth controller

        Args:
            settings: Overrides for GROWTH_CONFIG
        """
        self.settings = {**GROWTH_CONFIG, **(settings or {})}

    # ===== ADMISSIBILITY =====

    def admissible_fraction(self, clock: ClockModel, bet: BetModel) -> float:
        """
        Largest fraction bound for which G^CC is defined

        Args:
            clock: Stochastic clock
            bet: Bet model

        Returns:
            min(max_fraction, IG branch limit) where the IG limit keeps every
            gross return below e^lambda
        """
        bound = bet.max_fraction()
        if clock.kind is ClockKind.INVERSE_GAUSSIAN:
            _, top = bet.unit_return_bounds()
            lam = clock.ig_lambda
            if top > 0 and lam < 700.0:
                bound = min(bound, math.expm1(lam) / top)
        return bound

    # ===== GROWTH FUNCTIONALS =====

    def growth_kt(self, bet: BetModel, f: float) -> float:
        """
        Kelly-Thorp growth: expected log gross return

        Args:
            bet: Bet model
            f: Fraction in [0, max_fraction)

        Returns:
            E[log(1 + f u)]
        """
        f = bet.check_fraction(f)
        if f == 0.0:
            return 0.0
        return self._expected_transform(_DEGENERATE, bet, f)

    def growth_cc(self, clock: ClockModel, bet: BetModel, f: float) -> float:
        """
        Clock-aware growth: expected psi^{-1} of the gross return

        Args:
            clock: Stochastic clock
            bet: Bet model
            f: Fraction in [0, max_fraction)

        Returns:
            E[psi^{-1}(1 + f u)]; the degenerate clock returns growth_kt
        """
        if clock.is_degenerate:
            return self.growth_kt(bet, f)
        f = bet.check_fraction(f)
        if f == 0.0:
            return 0.0
        return self._expected_transform(clock, bet, f)

    def growth_cc_quadrature(self, clock: ClockModel, bet: BetModel, f: float) -> float:
        """Generic quadrature path for uniform bets (cross-check for the closed forms)."""
        f = bet.check_fraction(f)
        if f == 0.0:
            return 0.0
        if not isinstance(bet, UniformReturnBet):
            return self._expected_transform(clock, bet, f)
        return self._uniform_quad(lambda u: clock.inv_mgf_from_log(math.log1p(f * u)), bet)

    def _expected_transform(self, clock: ClockModel, bet: BetModel, f: float) -> float:
        if isinstance(bet, BernoulliBet):
            return (bet.p * clock.inv_mgf_from_log(math.log1p(f))
                    + bet.q * clock.inv_mgf_from_log(math.log1p(-f)))
        if isinstance(bet, DiscreteBet):
            return math.fsum(p * clock.inv_mgf_from_log(math.log1p(f * r)) for r, p in bet.outcomes)
        if isinstance(bet, UniformReturnBet):
            closed = self._uniform_closed_form(clock, bet, f)
            if closed is not None:
                return closed
            return self._uniform_quad(lambda u: clock.inv_mgf_from_log(math.log1p(f * u)), bet)
        raise ConfigurationError(f"Unsupported bet model {type(bet).__name__}")

    def _uniform_closed_form(self, clock: ClockModel, bet: UniformReturnBet, f: float) -> Optional[float]:
        if clock.kind is ClockKind.INVERSE_GAUSSIAN:
            return None
        gamma = clock.gamma_parameter
        a, b = math.log1p(f * bet.ub), math.log1p(f * bet.lb)
        width = f * bet.width
        if gamma == -1.0:
            # integral of 1/v
            return 1.0 - (a - b) / width
        if abs(gamma + 1.0) < self.settings['gamma_pole_tol']:
            return None
        return _uniform_power_growth(gamma, a, b, width)

    def _uniform_quad(self, integrand: Callable[[float], float], bet: UniformReturnBet) -> float:
        value, error = integrate.quad(
            integrand, bet.lb, bet.ub,
            epsabs=self.settings['quad_epsabs'],
            epsrel=self.settings['quad_epsrel'],
            limit=self.settings['quad_limit'],
        )
        if not math.isfinite(value):
            raise ConvergenceError(f"Quadrature over [{bet.lb}, {bet.ub}] returned {value}")
        return value / bet.width

    # ===== DERIVATIVES =====

    def growth_cc_derivative(self, clock: ClockModel, bet: BetModel, f: float) -> float:
        """
        dG^CC/df

        Args:
            clock: Stochastic clock
            bet: Bet model
            f: Fraction in [0, max_fraction); f = 0 returns the one-sided
               limit E[u] since d psi^{-1}/dR = 1 at R = 1

        Returns:
            Derivative of the growth functional
        """
        f = bet.check_fraction(f)
        if f == 0.0:
            return bet.mean_return()

        slope = clock.inv_mgf_derivative_from_log
        if isinstance(bet, BernoulliBet):
            return bet.p * slope(math.log1p(f)) - bet.q * slope(math.log1p(-f))
        if isinstance(bet, DiscreteBet):
            return math.fsum(p * r * slope(math.log1p(f * r)) for r, p in bet.outcomes)
        if isinstance(bet, UniformReturnBet):
            scale = f * max(abs(bet.lb), abs(bet.ub))
            if clock.kind is not ClockKind.INVERSE_GAUSSIAN and scale >= self.settings['closed_form_min_scale']:
                return self.uniform_foc_residual(clock, bet, f) / f
            return self._uniform_quad(lambda u: u * slope(math.log1p(f * u)), bet)
        raise ConfigurationError(f"Unsupported bet model {type(bet).__name__}")

    def uniform_foc_residual(self, clock: ClockModel, bet: UniformReturnBet, f: float) -> float:
        """
        First-order condition of the uniform gamma model

        (1/(gamma+1))[(1+UB f)^(gamma+1) - (1+LB f)^(gamma+1)]
            - (1/gamma)[(1+UB f)^gamma - (1+LB f)^gamma],
        divided by (UB - LB) f. Equals f * G'(f), so it shares the sign and
        zeros of the derivative; gamma -> 0 gives the Kelly-Thorp condition
        UB - LB = (1/f) log((1 + UB f)/(1 + LB f)).

        Args:
            clock: Degenerate or gamma clock
            bet: Uniform bet
            f: Fraction in (0, max_fraction)

        Returns:
            FOC residual
        """
        if clock.kind is ClockKind.INVERSE_GAUSSIAN or not isinstance(bet, UniformReturnBet):
            raise ConfigurationError("The uniform FOC is defined for uniform bets under degenerate or gamma clocks")
        f = bet.check_fraction(f)
        if f == 0.0:
            raise FractionOutOfRangeError("The uniform FOC needs f > 0", f=f, max_fraction=bet.max_fraction())
        gamma = clock.gamma_parameter
        a, b = math.log1p(f * bet.ub), math.log1p(f * bet.lb)
        lhs = _power_difference(a, b, gamma + 1.0)
        rhs = _power_difference(a, b, gamma)
        return (lhs - rhs) / (bet.width * f)

    # ===== MOMENTS OF THE DRIFT =====

    def drift_moments(self, clock: ClockModel, bet: BetModel, f: float) -> Tuple[float, float]:
        """
        Mean and variance of the per-period drift s = psi^{-1}(1 + f u)

        Returns:
            (mean, variance)
        """
        f = bet.check_fraction(f)
        mean = self.growth_cc(clock, bet, f)
        if f == 0.0:
            return 0.0, 0.0

        def squared(log_r: float) -> float:
            return clock.inv_mgf_from_log(log_r) ** 2

        if isinstance(bet, BernoulliBet):
            second = bet.p * squared(math.log1p(f)) + bet.q * squared(math.log1p(-f))
        elif isinstance(bet, DiscreteBet):
            second = math.fsum(p * squared(math.log1p(f * r)) for r, p in bet.outcomes)
        elif isinstance(bet, UniformReturnBet):
            second = self._uniform_quad(lambda u: squared(math.log1p(f * u)), bet)
        else:
            raise ConfigurationError(f"Unsupported bet model {type(bet).__name__}")
        return mean, max(second - mean * mean, 0.0)

    # ===== CURVES =====

    def growth_curve(self, clock: ClockModel, bet: BetModel, f_grid: Sequence[float],
                     label: Optional[str] = None) -> GrowthCurve:
        """
        Sample G^CC (G^KT for the degenerate clock) on a grid

        Args:
            clock: Stochastic clock
            bet: Bet model
            f_grid: Strictly increasing admissible fractions
            label: Model label, defaults to the clock label

        Returns:
            GrowthCurve
        """
        grid = [float(f) for f in f_grid]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("Fraction grid must be strictly increasing")

        points = []
        for f in grid:
            try:
                points.append((f, self.growth_cc(clock, bet, f)))
            except FractionOutOfRangeError as e:
                raise FractionOutOfRangeError(f"Growth curve failed at f={f}: {e}", f=f, max_fraction=e.max_fraction) from e
            except KellyClockError as e:
                raise type(e)(f"Growth curve failed at f={f}: {e}") from e

        curve = GrowthCurve(label or clock.label, points, clock, bet)
        logger.debug(f"Sampled {len(curve)} points of {curve.model_label} on [{grid[0] if grid else 0}, {grid[-1] if grid else 0}]")
        return curve


# Default controller instance
growth_controller = GrowthController()

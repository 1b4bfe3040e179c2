"""
Bet Model - One-period bets mapping an investment fraction f to a law of gross returns
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.constants import BET_CONFIG, ERROR_MESSAGES
from utils.errors import ConfigurationError, FractionOutOfRangeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrossReturns:
    """
    Law of the gross return 1 + f*u for a fixed fraction

    Either a finite support (points with probabilities) or a uniform law on
    [low, high] with density 1 / (high - low).
    """

    points: Tuple[Tuple[float, float], ...] = ()
    low: Optional[float] = None
    high: Optional[float] = None

    @property
    def is_discrete(self) -> bool:
        return self.low is None

    @property
    def support_min(self) -> float:
        if self.is_discrete:
            return min(r for r, _ in self.points)
        return self.low

    @property
    def support_max(self) -> float:
        if self.is_discrete:
            return max(r for r, _ in self.points)
        return self.high

    def to_dict(self) -> Dict:
        if self.is_discrete:
            return {'points': [list(point) for point in self.points]}
        return {'low': self.low, 'high': self.high, 'density': 1.0 / (self.high - self.low) if self.high > self.low else math.inf}


class BetModel:
    """
    Base class for one-period bets; the gross return of fraction f is 1 + f*u
    where u is the per-unit-wagered return.
    """

    type_name = ""

    def max_fraction(self) -> float:
        raise NotImplementedError

    def mean_return(self) -> float:
        """Expected per-unit return E[u], the slope of every growth functional at f = 0."""
        raise NotImplementedError

    def gross_returns(self, f: float) -> GrossReturns:
        raise NotImplementedError

    def unit_return_bounds(self) -> Tuple[float, float]:
        """Smallest and largest per-unit return u."""
        raise NotImplementedError

    def to_dict(self) -> Dict:
        raise NotImplementedError

    def check_fraction(self, f: float) -> float:
        """
        Validate an investment fraction

        Args:
            f: Fraction of wealth wagered

        Returns:
            f as float

        Raises:
            FractionOutOfRangeError: f outside [0, max_fraction)
        """
        f = float(f)
        bound = self.max_fraction()
        if not math.isfinite(f) or f < 0 or f >= bound:
            raise FractionOutOfRangeError(
                ERROR_MESSAGES['fraction_range'].format(f=f, max_fraction=bound), f=f, max_fraction=bound
            )
        return f

    @staticmethod
    def from_dict(data: Dict) -> 'BetModel':
        """
        Build a bet from its tagged record

        Args:
            data: {'type': 'bernoulli', 'p': ...} | {'type': 'uniform', 'lb': ..., 'ub': ...}
                  | {'type': 'discrete', 'outcomes': [[r, prob], ...]}

        Returns:
            Concrete BetModel
        """
        bet_type = str(data.get('type', '')).lower()
        try:
            if bet_type == BernoulliBet.type_name:
                return BernoulliBet(float(data['p']))
            if bet_type == UniformReturnBet.type_name:
                return UniformReturnBet(float(data['lb']), float(data['ub']))
            if bet_type == DiscreteBet.type_name:
                return DiscreteBet.from_pairs(data['outcomes'])
        except KeyError as e:
            raise ConfigurationError(f"Bet record of type '{bet_type}' is missing field {e}") from None
        raise ConfigurationError(f"Unknown bet type '{data.get('type')}'")


@dataclass(frozen=True)
class BernoulliBet(BetModel):
    """Win f with probability p, lose f otherwise."""

    p: float
    type_name = "bernoulli"

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ConfigurationError(f"Bernoulli probability must lie in (0, 1), got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def max_fraction(self) -> float:
        return 1.0

    def mean_return(self) -> float:
        return self.p - self.q

    def unit_return_bounds(self) -> Tuple[float, float]:
        return -1.0, 1.0

    def gross_returns(self, f: float) -> GrossReturns:
        f = self.check_fraction(f)
        if f == 0.0:
            return GrossReturns(points=((1.0, 1.0),))
        return GrossReturns(points=((1.0 + f, self.p), (1.0 - f, self.q)))

    def to_dict(self) -> Dict:
        return {'type': self.type_name, 'p': self.p}


@dataclass(frozen=True)
class UniformReturnBet(BetModel):
    """Per-unit return u uniform on [lb, ub]."""

    lb: float
    ub: float
    type_name = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lb) and math.isfinite(self.ub)) or not self.lb < self.ub:
            raise ConfigurationError(f"Uniform bounds need LB < UB, got LB={self.lb}, UB={self.ub}")

    @property
    def width(self) -> float:
        return self.ub - self.lb

    def max_fraction(self) -> float:
        return -1.0 / self.lb if self.lb < 0 else math.inf

    def mean_return(self) -> float:
        return 0.5 * (self.lb + self.ub)

    def unit_return_bounds(self) -> Tuple[float, float]:
        return self.lb, self.ub

    def gross_returns(self, f: float) -> GrossReturns:
        f = self.check_fraction(f)
        if f == 0.0:
            return GrossReturns(points=((1.0, 1.0),))
        return GrossReturns(low=1.0 + f * self.lb, high=1.0 + f * self.ub)

    def to_dict(self) -> Dict:
        return {'type': self.type_name, 'lb': self.lb, 'ub': self.ub}


@dataclass(frozen=True)
class DiscreteBet(BetModel):
    """Finite law of per-unit returns r_i with probabilities prob_i."""

    returns: Tuple[float, ...]
    probabilities: Tuple[float, ...]
    type_name = "discrete"

    def __post_init__(self):
        returns = tuple(float(r) for r in self.returns)
        probabilities = tuple(float(p) for p in self.probabilities)
        if not returns or len(returns) != len(probabilities):
            raise ConfigurationError("Discrete bet needs matching, non-empty returns and probabilities")
        if any(p <= 0 for p in probabilities):
            raise ConfigurationError(f"Discrete probabilities must be strictly positive, got {probabilities}")
        if abs(math.fsum(probabilities) - 1.0) > BET_CONFIG['probability_sum_tol']:
            raise ConfigurationError(f"Discrete probabilities must sum to 1, got {math.fsum(probabilities)!r}")
        if len(set(returns)) != len(returns):
            raise ConfigurationError(f"Discrete returns must be distinct, got {returns}")
        if not all(math.isfinite(r) for r in returns):
            raise ConfigurationError("Discrete returns must be finite")
        object.__setattr__(self, 'returns', returns)
        object.__setattr__(self, 'probabilities', probabilities)

    @classmethod
    def from_pairs(cls, outcomes: Sequence[Sequence[float]]) -> 'DiscreteBet':
        pairs = [tuple(pair) for pair in outcomes]
        if any(len(pair) != 2 for pair in pairs):
            raise ConfigurationError("Discrete outcomes must be [return, probability] pairs")
        return cls(tuple(r for r, _ in pairs), tuple(p for _, p in pairs))

    @property
    def outcomes(self) -> List[Tuple[float, float]]:
        return list(zip(self.returns, self.probabilities))

    def max_fraction(self) -> float:
        losses = [r for r in self.returns if r < 0]
        if not losses:
            return math.inf
        return min(-1.0 / r for r in losses)

    def mean_return(self) -> float:
        return math.fsum(r * p for r, p in self.outcomes)

    def unit_return_bounds(self) -> Tuple[float, float]:
        return min(self.returns), max(self.returns)

    def gross_returns(self, f: float) -> GrossReturns:
        f = self.check_fraction(f)
        if f == 0.0:
            return GrossReturns(points=((1.0, 1.0),))
        return GrossReturns(points=tuple((1.0 + f * r, p) for r, p in self.outcomes))

    def to_dict(self) -> Dict:
        return {'type': self.type_name, 'outcomes': [[r, p] for r, p in self.outcomes]}

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.returns), np.asarray(self.probabilities)

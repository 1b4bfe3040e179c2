"""
Result Models - Growth curves, solver results and Monte Carlo configuration/results
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import pandas as pd

from models.bet_model import BetModel
from models.clock_model import ClockModel
from utils.constants import SIM_CONFIG
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


def json_number(value: Optional[float]):
    """Finite floats pass through; infinities become 'inf' / '-inf' strings."""
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@dataclass
class GrowthCurve:
    """
    Sampled growth functional G(f) for one (clock, bet) pair
    """

    model_label: str
    points: List[Tuple[float, float]]
    clock: ClockModel
    bet: BetModel

    def __post_init__(self):
        fractions = [f for f, _ in self.points]
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ConfigurationError("Growth curve fractions must be strictly increasing")
        bound = self.bet.max_fraction()
        if any(f >= bound for f in fractions):
            raise ConfigurationError(f"Growth curve fractions must stay below max_fraction={bound}")
        if any(not math.isfinite(g) for _, g in self.points):
            raise ConfigurationError("Growth curve values must be finite")

    @property
    def fractions(self) -> List[float]:
        return [f for f, _ in self.points]

    @property
    def values(self) -> List[float]:
        return [g for _, g in self.points]

    def to_dataframe(self) -> pd.DataFrame:
        """Convert curve to a DataFrame with columns f, G, model_label"""
        return pd.DataFrame({
            'f': self.fractions,
            'G': self.values,
            'model_label': [self.model_label] * len(self.points),
        })

    def to_dict(self) -> Dict:
        return {
            'model_label': self.model_label,
            'clock': self.clock.to_dict(),
            'bet': self.bet.to_dict(),
            'points': [{'f': f, 'G': g} for f, g in self.points],
        }

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass
class SolveResult:
    """
    Optimal fraction, growth at the optimum and ruin threshold with solver diagnostics
    """

    f_star: Optional[float] = None
    g_at_f_star: Optional[float] = None
    f_c: Optional[float] = None
    has_ruin_boundary: Optional[bool] = None
    iterations: int = 0
    residuals: List[float] = field(default_factory=list)
    brackets: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    method: str = ""
    message: str = ""

    def merge(self, other: 'SolveResult') -> 'SolveResult':
        """Combine an optimum result with a ruin threshold result."""
        return SolveResult(
            f_star=self.f_star if self.f_star is not None else other.f_star,
            g_at_f_star=self.g_at_f_star if self.g_at_f_star is not None else other.g_at_f_star,
            f_c=other.f_c if other.f_c is not None else self.f_c,
            has_ruin_boundary=other.has_ruin_boundary if other.has_ruin_boundary is not None else self.has_ruin_boundary,
            iterations=self.iterations + other.iterations,
            residuals=self.residuals + other.residuals,
            brackets={**self.brackets, **other.brackets},
            method="+".join(m for m in (self.method, other.method) if m),
            message="; ".join(m for m in (self.message, other.message) if m),
        )

    def to_dict(self) -> Dict:
        return {
            'f_star': json_number(self.f_star),
            'g_at_f_star': json_number(self.g_at_f_star),
            'f_c': json_number(self.f_c),
            'has_ruin_boundary': self.has_ruin_boundary,
            'iterations': self.iterations,
            'residuals': [json_number(r) for r in self.residuals],
            'brackets': {name: [json_number(a), json_number(b)] for name, (a, b) in sorted(self.brackets.items())},
            'method': self.method,
            'message': self.message,
        }

    def to_row(self) -> Dict:
        """Flat CSV row"""
        return {
            'f_star': self.f_star,
            'g_at_f_star': self.g_at_f_star,
            'f_c': self.f_c,
            'has_ruin_boundary': self.has_ruin_boundary,
            'iterations': self.iterations,
        }


SIM_MODES = ("clock_only", "full")


@dataclass
class SimConfig:
    """
    Monte Carlo run parameters
    """

    periods: int = SIM_CONFIG['periods']
    paths: int = SIM_CONFIG['paths']
    seed: int = SIM_CONFIG['seed']
    mode: str = SIM_CONFIG['mode']
    s_bar: Optional[float] = None
    ruin_floor: float = SIM_CONFIG['ruin_floor']
    growth_ceiling: float = SIM_CONFIG['growth_ceiling']
    dump_paths: bool = False
    workers: int = SIM_CONFIG['workers']

    @classmethod
    def from_dict(cls, data: Dict) -> 'SimConfig':
        known = {name: data[name] for name in cls.__dataclass_fields__ if name in data and data[name] is not None}
        return cls(**known)

    def validate(self, clock: ClockModel) -> 'SimConfig':
        """
        Check the configuration against the clock

        Args:
            clock: Clock the run will use

        Returns:
            self, for chaining

        Raises:
            ConfigurationError: on any violated invariant
        """
        if int(self.periods) < 1 or int(self.paths) < 1:
            raise ConfigurationError(f"Simulation needs periods >= 1 and paths >= 1, got N={self.periods}, M={self.paths}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigurationError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode not in SIM_MODES:
            raise ConfigurationError(f"Simulation mode must be one of {SIM_MODES}, got '{self.mode}'")
        if self.mode == "clock_only":
            if self.s_bar is None:
                raise ConfigurationError("clock_only mode needs s_bar")
            sup = clock.mgf_domain_sup()
            if not self.s_bar < sup:
                raise ConfigurationError(f"s_bar={self.s_bar} must be below the MGF domain bound {sup}")
        if not (0 < self.ruin_floor < 1 < self.growth_ceiling):
            raise ConfigurationError(
                f"Need 0 < ruin_floor < 1 < growth_ceiling, got {self.ruin_floor} and {self.growth_ceiling}"
            )
        if int(self.workers) < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        self.periods = int(self.periods)
        self.paths = int(self.paths)
        self.seed = int(self.seed)
        self.workers = int(self.workers)
        return self

    def to_dict(self) -> Dict:
        return {
            'periods': self.periods,
            'paths': self.paths,
            'seed': self.seed,
            'mode': self.mode,
            's_bar': self.s_bar,
            'ruin_floor': self.ruin_floor,
            'growth_ceiling': self.growth_ceiling,
        }


@dataclass
class SimResult:
    """
    Monte Carlo estimates for one (clock, bet, f, config) run

    geo_mean_growth is (mean over paths of W_N/W_0)^(1/N); per_path_growth
    summarizes (W_N/W_0)^(1/N) path by path; loss_fraction counts paths that
    end below their starting wealth.
    """

    geo_mean_growth: float
    per_path_growth: Dict[str, float]
    sample_cov_mean: float
    tau_over_N_mean: float
    ruin_fraction: float
    ceiling_fraction: float
    loss_fraction: float
    mean_log_growth: float
    config: SimConfig
    clock: ClockModel
    bet: Optional[BetModel] = None
    f: Optional[float] = None
    paths: Optional[pd.DataFrame] = None

    def to_dict(self) -> Dict:
        return {
            'geo_mean_growth': self.geo_mean_growth,
            'per_path_growth': dict(sorted(self.per_path_growth.items())),
            'sample_cov_mean': self.sample_cov_mean,
            'tau_over_N_mean': self.tau_over_N_mean,
            'ruin_fraction': self.ruin_fraction,
            'ceiling_fraction': self.ceiling_fraction,
            'loss_fraction': self.loss_fraction,
            'mean_log_growth': self.mean_log_growth,
            'config': self.config.to_dict(),
            'clock': self.clock.to_dict(),
            'bet': self.bet.to_dict() if self.bet is not None else None,
            'f': self.f,
        }

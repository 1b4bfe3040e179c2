"""
Models package - Clocks, bets, distortion families and result types
"""

from .clock_model import ClockKind, ClockModel
from .bet_model import BetModel, BernoulliBet, UniformReturnBet, DiscreteBet, GrossReturns
from .distortion_model import DistortionFamily, DistortionKind
from .result_models import GrowthCurve, SolveResult, SimConfig, SimResult

__all__ = [
    'ClockKind', 'ClockModel',
    'BetModel', 'BernoulliBet', 'UniformReturnBet', 'DiscreteBet', 'GrossReturns',
    'DistortionFamily', 'DistortionKind',
    'GrowthCurve', 'SolveResult', 'SimConfig', 'SimResult',
]

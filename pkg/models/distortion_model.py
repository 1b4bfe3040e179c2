"""
Distortion Model - Parametric families g_x on [0, inf] fixing 0 and 1
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Union

import numpy as np

from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class DistortionKind(str, Enum):
    POWER = "power"


@dataclass(frozen=True)
class DistortionFamily:
    """
    Family of strictly increasing, continuous, surjective maps g_x of [0, inf]
    with g_x(0) = 0, g_x(1) = 1 and g_0 the identity.

    The power family g_x(y) = y^(1+x) grows faster than the identity above 1,
    so its inverse pulls MGF values down toward 1.
    """

    kind: DistortionKind = DistortionKind.POWER

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', DistortionKind(self.kind))
        except ValueError:
            raise ConfigurationError(f"Unknown distortion family '{self.kind}'") from None

    @classmethod
    def power(cls) -> 'DistortionFamily':
        return cls(DistortionKind.POWER)

    @classmethod
    def from_dict(cls, data: Dict) -> 'DistortionFamily':
        return cls(data.get('kind', DistortionKind.POWER.value))

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value}

    @staticmethod
    def _check_level(x: float) -> float:
        x = float(x)
        if not np.isfinite(x) or x < 0:
            raise ConfigurationError(f"Distortion level x must be finite and >= 0, got {x}")
        return x

    def forward(self, x: float, y: ArrayLike) -> ArrayLike:
        """g_x(y)"""
        x = self._check_level(x)
        if x == 0.0:
            return y
        scalar = np.ndim(y) == 0
        out = np.power(np.asarray(y, dtype=float), 1.0 + x)
        return float(out) if scalar else out

    def inverse(self, x: float, y: ArrayLike) -> ArrayLike:
        """g_x^{-1}(y), the distortion phi applied to MGF values"""
        x = self._check_level(x)
        if x == 0.0:
            return y
        scalar = np.ndim(y) == 0
        out = np.power(np.asarray(y, dtype=float), 1.0 / (1.0 + x))
        return float(out) if scalar else out

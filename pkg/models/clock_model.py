"""
Clock Model - Mean-one stochastic clocks: moment generating function, its inverse and sampling
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Union

import numpy as np

from utils.constants import ERROR_MESSAGES
from utils.errors import BranchError, ConfigurationError, DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class ClockKind(str, Enum):
    DEGENERATE = "degenerate"
    GAMMA = "gamma"
    INVERSE_GAUSSIAN = "inverse_gaussian"


def _finish(values: np.ndarray, scalar: bool) -> ArrayLike:
    # +0.0 folds a signed zero into 0.0
    values = values + 0.0
    return float(values) if scalar else values


@dataclass(frozen=True)
class ClockModel:
    """
    Unit-time increment Z of a stochastic clock with E[Z] = 1 and Var[Z] = theta.

    The gamma clock uses gamma = -theta (Variance Gamma convention), the
    inverse Gaussian clock uses IG(1, lambda) with lambda = 1/theta, and
    theta = 0 is always the degenerate clock Z = 1.
    """

    kind: ClockKind
    theta: float = 0.0

    def __post_init__(self):
        try:
            kind = ClockKind(self.kind)
        except ValueError:
            raise ConfigurationError(f"Unknown clock kind '{self.kind}'") from None
        object.__setattr__(self, 'kind', kind)

        theta = float(self.theta)
        if not math.isfinite(theta) or theta < 0:
            raise ConfigurationError(f"Clock variance theta must be finite and >= 0, got {self.theta}")
        if (kind is ClockKind.DEGENERATE) != (theta == 0.0):
            raise ConfigurationError(ERROR_MESSAGES['theta_kind'].format(kind=kind.value, theta=theta))
        object.__setattr__(self, 'theta', theta)

    # ----- construction -----

    @classmethod
    def degenerate(cls) -> 'ClockModel':
        return cls(ClockKind.DEGENERATE, 0.0)

    @classmethod
    def gamma(cls, theta: float) -> 'ClockModel':
        return cls(ClockKind.GAMMA, theta)

    @classmethod
    def inverse_gaussian(cls, theta: float) -> 'ClockModel':
        return cls(ClockKind.INVERSE_GAUSSIAN, theta)

    @classmethod
    def from_dict(cls, data: Dict) -> 'ClockModel':
        """
        Build a clock from its flat record {kind, theta}

        Args:
            data: Dictionary with 'kind' and optional 'theta'

        Returns:
            ClockModel instance
        """
        if 'kind' not in data:
            raise ConfigurationError("Clock record needs a 'kind' field")
        kind = str(data['kind'])
        theta = data.get('theta', 0.0)
        if kind == ClockKind.DEGENERATE.value:
            theta = 0.0
        return cls(kind, theta)

    def to_dict(self) -> Dict:
        """Convert clock back to its flat record"""
        return {'kind': self.kind.value, 'theta': self.theta}

    # ----- derived parameters -----

    @property
    def is_degenerate(self) -> bool:
        return self.kind is ClockKind.DEGENERATE

    @property
    def variance(self) -> float:
        return self.theta

    @property
    def gamma_parameter(self) -> float:
        """Variance Gamma exponent gamma = -theta."""
        return -self.theta

    @property
    def ig_lambda(self) -> float:
        """Inverse Gaussian shape lambda = 1/theta (infinite for theta = 0)."""
        return math.inf if self.theta == 0.0 else 1.0 / self.theta

    @property
    def label(self) -> str:
        if self.is_degenerate:
            return "KT"
        if self.kind is ClockKind.GAMMA:
            return f"VG(theta={self.theta:g})"
        return f"IG(theta={self.theta:g})"

    # ----- moment generating function -----

    def mgf_domain_sup(self) -> float:
        """
        Supremum of the MGF domain

        Returns:
            +inf for the degenerate clock, 1/theta for gamma (open bound),
            1/(2 theta) for inverse Gaussian (closed bound)
        """
        if self.is_degenerate:
            return math.inf
        if self.kind is ClockKind.GAMMA:
            return 1.0 / self.theta
        return 1.0 / (2.0 * self.theta)

    def _check_mgf_domain(self, s: np.ndarray):
        if not np.all(np.isfinite(s)):
            raise DomainError(f"MGF argument must be finite, got {s}")
        sup = self.mgf_domain_sup()
        if self.kind is ClockKind.GAMMA:
            bad = s >= sup
            bound = f"< {sup:g}"
        elif self.kind is ClockKind.INVERSE_GAUSSIAN:
            bad = s > sup
            bound = f"<= {sup:g}"
        else:
            return
        if np.any(bad):
            offending = float(np.max(s))
            raise DomainError(ERROR_MESSAGES['mgf_domain'].format(s=offending, kind=self.kind.value, bound=bound))

    def mgf(self, s: ArrayLike) -> ArrayLike:
        """
        psi(s) = E[exp(s Z)]

        Args:
            s: Scalar or array inside the MGF domain

        Returns:
            MGF value(s), psi(0) = 1 exactly
        """
        scalar = np.ndim(s) == 0
        s = np.asarray(s, dtype=float)
        self._check_mgf_domain(s)

        if self.is_degenerate:
            out = np.exp(s)
        elif self.kind is ClockKind.GAMMA:
            # (1 + gamma s)^(1/gamma) with gamma = -theta
            out = np.exp(-np.log1p(-self.theta * s) / self.theta)
        else:
            # lambda (1 - sqrt(1 - 2s/lambda)) rewritten without cancellation
            out = np.exp(2.0 * s / (1.0 + np.sqrt(1.0 - 2.0 * self.theta * s)))
        return _finish(out, scalar)

    def _log_returns(self, R: ArrayLike) -> np.ndarray:
        R = np.asarray(R, dtype=float)
        if not np.all(np.isfinite(R)) or np.any(R <= 0):
            offending = float(np.min(R)) if R.size else R
            raise DomainError(ERROR_MESSAGES['inv_mgf_domain'].format(R=offending))
        return np.log(R)

    def _check_branch(self, log_r: np.ndarray):
        if self.kind is ClockKind.INVERSE_GAUSSIAN:
            lam = self.ig_lambda
            if np.any(log_r > lam):
                worst = float(np.max(log_r))
                raise BranchError(ERROR_MESSAGES['ig_branch'].format(lam=lam, R=math.exp(min(worst, 700.0)), log_r=worst))

    def inv_mgf_from_log(self, log_r: ArrayLike) -> ArrayLike:
        """
        psi^{-1}(exp(log_r)) evaluated directly on log gross returns

        Args:
            log_r: log R, e.g. log1p(f*u) computed without rounding 1 + f*u

        Returns:
            Clock-aware logarithm of R
        """
        scalar = np.ndim(log_r) == 0
        log_r = np.asarray(log_r, dtype=float)
        if not np.all(np.isfinite(log_r)):
            raise DomainError(ERROR_MESSAGES['inv_mgf_domain'].format(R=0.0))
        self._check_branch(log_r)

        if self.is_degenerate:
            out = log_r
        elif self.kind is ClockKind.GAMMA:
            # (R^gamma - 1) / gamma via expm1, exact in the gamma -> 0 limit
            gamma = self.gamma_parameter
            out = np.expm1(gamma * log_r) / gamma
        else:
            out = log_r - 0.5 * self.theta * log_r ** 2
        return _finish(out, scalar)

    def inv_mgf(self, R: ArrayLike) -> ArrayLike:
        """
        psi^{-1}(R), the clock-aware logarithm

        Args:
            R: Positive gross return(s); for the IG clock log R <= lambda

        Returns:
            s with psi(s) = R; inv_mgf(1) = 0
        """
        scalar = np.ndim(R) == 0
        out = self.inv_mgf_from_log(self._log_returns(R))
        return float(out) if scalar else out

    def inv_mgf_derivative_from_log(self, log_r: ArrayLike) -> ArrayLike:
        """(d psi^{-1}/dR)(exp(log_r)); equals 1 at log_r = 0 for every clock."""
        scalar = np.ndim(log_r) == 0
        log_r = np.asarray(log_r, dtype=float)
        self._check_branch(log_r)

        if self.is_degenerate:
            out = np.exp(-log_r)
        elif self.kind is ClockKind.GAMMA:
            out = np.exp((self.gamma_parameter - 1.0) * log_r)
        else:
            out = (1.0 - self.theta * log_r) * np.exp(-log_r)
        return _finish(out, scalar)

    def inv_mgf_derivative(self, R: ArrayLike) -> ArrayLike:
        """d psi^{-1} / dR"""
        scalar = np.ndim(R) == 0
        out = self.inv_mgf_derivative_from_log(self._log_returns(R))
        return float(out) if scalar else out

    # ----- sampling -----

    def sample_increments(self, stream: np.random.Generator, size) -> np.ndarray:
        """
        Draw i.i.d. clock increments

        Args:
            stream: numpy Generator owned by the caller
            size: Output shape

        Returns:
            Array of positive increments with mean 1 and variance theta
        """
        if self.is_degenerate:
            return np.ones(size)
        if self.kind is ClockKind.GAMMA:
            return stream.gamma(shape=1.0 / self.theta, scale=self.theta, size=size)
        return self._sample_inverse_gaussian(stream, size)

    def _sample_inverse_gaussian(self, stream: np.random.Generator, size) -> np.ndarray:
        # Transformation with one chi-square and one uniform draw (mean 1, shape lambda)
        lam = self.ig_lambda
        y = stream.standard_normal(size) ** 2
        # smaller root of the quadratic, written as 1/(larger root)
        x = 1.0 / (1.0 + y / (2.0 * lam) + np.sqrt(4.0 * lam * y + y * y) / (2.0 * lam))
        u = stream.random(size)
        return np.where(u <= 1.0 / (1.0 + x), x, 1.0 / x)

    def sample_increment(self, stream: np.random.Generator) -> float:
        """Single clock increment."""
        if self.is_degenerate:
            return 1.0
        return float(self.sample_increments(stream, 1)[0])

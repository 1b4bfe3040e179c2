"""
Simulation Controller - Monte Carlo wealth paths under a stochastic clock
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from scipy import special

from controllers.growth_controller import GrowthController, growth_controller
from models.bet_model import BernoulliBet, BetModel, DiscreteBet, UniformReturnBet
from models.clock_model import ClockModel
from models.result_models import SimConfig, SimResult
from utils.constants import SIM_CONFIG
from utils.errors import ConfigurationError
from utils.loading_utils import create_multi_step_progress

logger = logging.getLogger(__name__)


@dataclass
class PathBlock:
    """Per-path accumulators for one block of paths."""

    log_wealth: np.ndarray
    tau: np.ndarray
    drift_mean: np.ndarray
    comoment: np.ndarray


class SimulationController:
    """
    Controller for Monte Carlo simulation of subordinated wealth paths

    Paths are generated in fixed-size blocks; block b draws from
    SeedSequence(seed, spawn_key=(b,)) so results do not depend on the worker
    count and the first M1 paths of a run with M2 > M1 paths coincide with
    the run with M1 paths.
    """

    def __init__(self, settings: Optional[Dict] = None, growth: Optional[GrowthController] = None):
        """
        Initialize the simulation controller

        Args:
            settings: Overrides for SIM_CONFIG (path_block, period_chunk, quantiles)
            growth: Growth controller used for analytic moments
        """
        self.settings = {**SIM_CONFIG, **(settings or {})}
        self.growth = growth or growth_controller
        if int(self.settings['path_block']) < 1 or int(self.settings['period_chunk']) < 1:
            raise ConfigurationError("path_block and period_chunk must be >= 1")

    # ===== STREAMS =====

    @staticmethod
    def block_stream(seed: int, block: int) -> np.random.Generator:
        """Independent generator for one block of paths."""
        return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))

    # ===== BET DRAWS =====

    def _draw_drifts(self, clock: ClockModel, bet: BetModel, f: float,
                     stream: np.random.Generator, shape) -> np.ndarray:
        if isinstance(bet, BernoulliBet):
            wins = stream.random(shape) < bet.p
            drifts = clock.inv_mgf_from_log(np.array([math.log1p(-f), math.log1p(f)]))
            return drifts[wins.astype(np.intp)]
        if isinstance(bet, DiscreteBet):
            returns, probabilities = bet.as_arrays()
            index = stream.choice(len(returns), size=shape, p=probabilities)
            drifts = clock.inv_mgf_from_log(np.log1p(f * returns))
            return drifts[index]
        if isinstance(bet, UniformReturnBet):
            u = stream.uniform(bet.lb, bet.ub, size=shape)
            return clock.inv_mgf_from_log(np.log1p(f * u))
        raise ConfigurationError(f"Unsupported bet model {type(bet).__name__}")

    # ===== BLOCK KERNEL =====

    def _run_block(self, block: int, clock: ClockModel, bet: Optional[BetModel], f: float,
                   config: SimConfig) -> PathBlock:
        size = int(self.settings['path_block'])
        chunk = int(self.settings['period_chunk'])
        stream = self.block_stream(config.seed, block)

        log_wealth = np.zeros(size)
        tau = np.zeros(size)
        drift_mean = np.zeros(size)
        clock_mean = np.zeros(size)
        comoment = np.zeros(size)
        done = 0

        while done < config.periods:
            width = min(chunk, config.periods - done)
            if config.mode == "full":
                s = self._draw_drifts(clock, bet, f, stream, (size, width))
                z = clock.sample_increments(stream, (size, width))
                log_wealth += np.sum(s * z, axis=1)

                # merge chunk co-moments (pairwise update)
                s_mean_c = s.mean(axis=1)
                z_mean_c = z.mean(axis=1)
                comoment_c = np.sum((s - s_mean_c[:, None]) * (z - z_mean_c[:, None]), axis=1)
                total = done + width
                delta_s = s_mean_c - drift_mean
                delta_z = z_mean_c - clock_mean
                comoment += comoment_c + delta_s * delta_z * (done * width / total)
                drift_mean += delta_s * (width / total)
                clock_mean += delta_z * (width / total)
            else:
                z = clock.sample_increments(stream, (size, width))
            tau += np.sum(z, axis=1)
            done += width

        if config.mode == "clock_only":
            log_wealth = config.s_bar * tau
            drift_mean = np.full(size, float(config.s_bar))

        return PathBlock(log_wealth=log_wealth, tau=tau, drift_mean=drift_mean, comoment=comoment)

    # ===== SIMULATION =====

    def simulate(self, clock: ClockModel, bet: Optional[BetModel] = None, f: Optional[float] = None,
                 config: Optional[SimConfig] = None) -> SimResult:
        """
        Simulate M wealth paths of N periods

        full mode draws bet outcomes R_i, maps them to drifts s_i = psi^{-1}(R_i)
        and accumulates log W = sum s_i Z_i; clock_only mode holds s_bar fixed
        and accumulates log W = s_bar * tau_N.

        Args:
            clock: Stochastic clock
            bet: Bet model (full mode)
            f: Fraction (full mode)
            config: Run parameters

        Returns:
            SimResult with all summary fields populated
        """
        config = replace(config) if config is not None else SimConfig(s_bar=self.settings['s_bar'])
        config.validate(clock)

        if config.mode == "full":
            if bet is None or f is None:
                raise ConfigurationError("full mode needs a bet and a fraction")
            f = bet.check_fraction(f)
            low, high = bet.unit_return_bounds()
            # surfaces IG branch errors before any path is drawn
            clock.inv_mgf_from_log(np.log1p(f * np.array([low, high])))
        elif f is not None and bet is not None:
            f = bet.check_fraction(f)

        size = int(self.settings['path_block'])
        blocks = -(-config.paths // size)
        progress = create_multi_step_progress(
            f"Simulation ({config.mode}, {clock.label})", blocks, log_every=max(blocks // 10, 1)
        )

        def run(block: int) -> PathBlock:
            return self._run_block(block, clock, bet, f, config)

        results: List[PathBlock] = []
        # progress is only touched from this thread
        if config.workers > 1 and blocks > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as executor:
                for block, result in enumerate(executor.map(run, range(blocks))):
                    results.append(result)
                    progress.step(f"block {block}")
        else:
            for block in range(blocks):
                results.append(run(block))
                progress.step(f"block {block}")

        def gather(name: str) -> np.ndarray:
            return np.concatenate([getattr(r, name) for r in results])[:config.paths]

        log_wealth = gather('log_wealth')
        tau = gather('tau')
        drift_mean = gather('drift_mean')
        cov = gather('comoment') / config.periods

        result = self._summarize(log_wealth, tau, cov, config, clock, bet, f)
        if config.dump_paths:
            result.paths = pd.DataFrame({
                'path_index': np.arange(config.paths),
                'log_terminal_wealth': log_wealth,
                'tau_N': tau,
                'cov': cov,
                's_bar': drift_mean,
            })
        progress.complete(
            f"Simulated {config.paths} paths x {config.periods} periods: geo mean growth {result.geo_mean_growth:.6g}"
        )
        return result

    def _summarize(self, log_wealth: np.ndarray, tau: np.ndarray, cov: np.ndarray, config: SimConfig,
                   clock: ClockModel, bet: Optional[BetModel], f: Optional[float]) -> SimResult:
        n, m = config.periods, config.paths
        growth = np.exp(log_wealth / n)

        stats = {
            'mean': math.fsum(growth) / m,
            'median': float(np.median(growth)),
            'std': float(np.std(growth)),
            'min': float(np.min(growth)),
            'max': float(np.max(growth)),
        }
        for q in self.settings['quantiles']:
            stats[f"q{int(round(q * 100)):02d}"] = float(np.quantile(growth, q))

        return SimResult(
            geo_mean_growth=math.exp((float(special.logsumexp(log_wealth)) - math.log(m)) / n),
            per_path_growth=stats,
            sample_cov_mean=math.fsum(cov) / m,
            tau_over_N_mean=math.fsum(tau) / (m * n),
            ruin_fraction=float(np.count_nonzero(log_wealth < math.log(config.ruin_floor))) / m,
            ceiling_fraction=float(np.count_nonzero(log_wealth > math.log(config.growth_ceiling))) / m,
            loss_fraction=float(np.count_nonzero(log_wealth < 0.0)) / m,
            mean_log_growth=math.fsum(log_wealth) / (m * n),
            config=config,
            clock=clock,
            bet=bet,
            f=f,
        )

    # ===== COVARIANCE CHECK =====

    def verify_covariance_vanishing(self, clock: ClockModel, bet: BetModel, f: float,
                                    n_grid: Iterable[int], paths: int, seed: int) -> pd.DataFrame:
        """
        Measure how fast the per-path sample covariance cov(s, Z) concentrates at 0

        Args:
            clock: Stochastic clock
            bet: Bet model
            f: Fraction
            n_grid: Period counts N
            paths: Paths per N
            seed: Base seed

        Returns:
            DataFrame with columns N, mean_abs_cov, clt_bound where
            clt_bound = 3 sigma_s sigma_Z / sqrt(N)
        """
        _, drift_variance = self.growth.drift_moments(clock, bet, f)
        sigma = math.sqrt(drift_variance) * math.sqrt(clock.variance)

        rows: List[Dict] = []
        for periods in n_grid:
            config = SimConfig(periods=int(periods), paths=int(paths), seed=int(seed), mode="full", dump_paths=True)
            result = self.simulate(clock, bet, f, config)
            mean_abs_cov = math.fsum(np.abs(result.paths['cov'].to_numpy())) / config.paths
            rows.append({
                'N': config.periods,
                'mean_abs_cov': mean_abs_cov,
                'clt_bound': 3.0 * sigma / math.sqrt(config.periods),
            })
            logger.debug(f"N={config.periods}: mean |cov(s,Z)|={mean_abs_cov:.3e}")
        return pd.DataFrame(rows, columns=['N', 'mean_abs_cov', 'clt_bound'])


# Default controller instance
simulation_controller = SimulationController()

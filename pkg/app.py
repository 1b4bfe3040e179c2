"""
Kelly Clock Toolkit - Command-line entry point
Growth curves, optimal fractions, ruin thresholds, Table 1, Monte Carlo runs and acceptability indices
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from controllers import (
    AcceptabilityController,
    GrowthController,
    SimulationController,
    SolveController,
)
from models import BetModel, ClockKind, ClockModel, SimConfig
from utils.constants import BET_TYPES, CLI_DEFAULTS, CLOCK_KINDS, COMMAND_FORMATS, EXIT_CODES, SIM_CONFIG
from utils.errors import ConfigurationError, KellyClockError
from views import ReportView

logger = logging.getLogger(__name__)

COMMANDS = ("curve", "solve", "table1", "simulate", "accept", "sweep")


def _as_list(value) -> List:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _parse_number_list(value) -> List[float]:
    if isinstance(value, str):
        return [float(item) for item in value.split(",") if item.strip()]
    return [float(item) for item in _as_list(value)]


def _parse_outcomes(value) -> List[List[float]]:
    """'r:prob,r:prob' or a JSON-style list of pairs."""
    if isinstance(value, str):
        pairs = []
        for item in value.split(","):
            if not item.strip():
                continue
            parts = item.split(":")
            if len(parts) != 2:
                raise ConfigurationError(f"Discrete outcome '{item}' must look like return:probability")
            pairs.append([float(parts[0]), float(parts[1])])
        return pairs
    return [list(map(float, pair)) for pair in _as_list(value)]


@dataclass
class RunConfig:
    """
    Fully resolved configuration of one CLI invocation
    """

    command: str
    clocks: List[ClockModel]
    bet: BetModel
    fmt: str
    out: Optional[Path] = None
    f: Optional[float] = None
    f_grid: List[float] = field(default_factory=list)
    sim: Optional[SimConfig] = None
    dump_paths: Optional[Path] = None
    hurdle: float = CLI_DEFAULTS['hurdle']
    x: float = CLI_DEFAULTS['x']
    direction: Optional[str] = None
    search_upper: Optional[float] = None
    method: Optional[str] = None
    reference: Optional[Path] = None
    theta_grid: List[float] = field(default_factory=list)

    @classmethod
    def from_settings(cls, command: str, settings: Dict) -> 'RunConfig':
        """
        Build a run configuration from merged defaults, config file values and flags

        Args:
            command: Subcommand name
            settings: Flat mapping of option names to values

        Returns:
            RunConfig (not yet validated)
        """
        try:
            kinds = [str(k) for k in _as_list(settings.get('clock'))] or [CLI_DEFAULTS['clock']]
            thetas = _parse_number_list(settings.get('theta')) or [CLI_DEFAULTS['theta']]
            if len(kinds) > 1 and len(thetas) > 1 and len(kinds) != len(thetas):
                raise ConfigurationError(f"Got {len(kinds)} clocks but {len(thetas)} theta values")
            count = max(len(kinds), len(thetas))
            kinds = kinds * count if len(kinds) == 1 else kinds
            thetas = thetas * count if len(thetas) == 1 else thetas
            for kind in kinds:
                if kind not in CLOCK_KINDS:
                    raise ConfigurationError(f"Unknown clock '{kind}', expected one of {CLOCK_KINDS}")
            clocks = [ClockModel.from_dict({'kind': k, 'theta': t}) for k, t in zip(kinds, thetas)]

            bet_type = str(settings.get('bet', CLI_DEFAULTS['bet']))
            if bet_type not in BET_TYPES:
                raise ConfigurationError(f"Unknown bet '{bet_type}', expected one of {BET_TYPES}")
            record = {'type': bet_type}
            if bet_type == "bernoulli":
                record['p'] = settings.get('p', CLI_DEFAULTS['p'])
            elif bet_type == "uniform":
                if settings.get('lb') is None or settings.get('ub') is None:
                    raise ConfigurationError("Uniform bets need both --lb and --ub")
                record.update(lb=settings['lb'], ub=settings['ub'])
            else:
                if settings.get('outcomes') is None:
                    raise ConfigurationError("Discrete bets need --outcomes return:probability,...")
                record['outcomes'] = _parse_outcomes(settings['outcomes'])
            bet = BetModel.from_dict(record)

            f_min = float(settings.get('f_min', CLI_DEFAULTS['f_min']))
            f_max = float(settings.get('f_max', CLI_DEFAULTS['f_max']))
            f_step = float(settings.get('f_step', CLI_DEFAULTS['f_step']))
            if not (f_step > 0 and f_max >= f_min >= 0):
                raise ConfigurationError(f"Need f_step > 0 and 0 <= f_min <= f_max, got {f_min}, {f_max}, {f_step}")
            # last point never exceeds f_max
            steps = math.floor((f_max - f_min) / f_step + 1e-9)
            f_grid = [min(round(f_min + i * f_step, 12), f_max) for i in range(steps + 1)]

            sim = None
            if command == "simulate":
                sim = SimConfig.from_dict({
                    's_bar': SIM_CONFIG['s_bar'],
                    **settings,
                    'dump_paths': settings.get('dump_paths') is not None,
                })

            fmt = settings.get('format') or COMMAND_FORMATS.get(command, CLI_DEFAULTS['format'])
            return cls(
                command=command,
                clocks=clocks,
                bet=bet,
                fmt=str(fmt),
                out=Path(settings['out']) if settings.get('out') else None,
                f=float(settings['f']) if settings.get('f') is not None else None,
                f_grid=f_grid,
                sim=sim,
                dump_paths=Path(settings['dump_paths']) if settings.get('dump_paths') else None,
                hurdle=float(settings.get('hurdle', CLI_DEFAULTS['hurdle'])),
                x=float(settings.get('x', CLI_DEFAULTS['x'])),
                direction=settings.get('direction'),
                search_upper=float(settings['search_upper']) if settings.get('search_upper') is not None else None,
                method=settings.get('method'),
                reference=Path(settings['reference']) if settings.get('reference') else None,
                theta_grid=_parse_number_list(settings.get('theta_grid', CLI_DEFAULTS['theta_grid'])),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, KellyClockError):
                raise
            raise ConfigurationError(f"Invalid configuration value: {e}") from e

    def validate(self) -> 'RunConfig':
        """
        Check mutual consistency before anything is computed

        Returns:
            self

        Raises:
            ConfigurationError: with an actionable message
        """
        if self.command not in COMMANDS:
            raise ConfigurationError(f"Unknown command '{self.command}', expected one of {COMMANDS}")
        if self.fmt not in ("csv", "json"):
            raise ConfigurationError(f"--format must be csv or json, got '{self.fmt}'")

        bound = self.bet.max_fraction()
        if self.command in ("curve", "accept") and self.f is None:
            if self.f_grid[-1] >= bound:
                raise ConfigurationError(
                    f"--f-max={self.f_grid[-1]} must stay below max_fraction={bound} for this bet"
                )
        if self.f is not None and not (0 <= self.f < bound):
            raise ConfigurationError(f"--f={self.f} must lie in [0, {bound})")

        if self.command == "simulate":
            if len(self.clocks) != 1:
                raise ConfigurationError("simulate takes exactly one clock")
            self.sim.validate(self.clocks[0])
            if self.sim.mode == "full" and self.f is None:
                raise ConfigurationError("simulate --mode full needs --f")
            if self.dump_paths is not None and self.out is not None and self.dump_paths.resolve() == self.out.resolve():
                raise ConfigurationError("--dump-paths and --out must be different files")
        if self.command == "accept":
            if not (math.isfinite(self.hurdle) and self.hurdle >= 1.0):
                raise ConfigurationError(f"--hurdle must be >= 1, got {self.hurdle}")
            if not (math.isfinite(self.x) and self.x >= 0):
                raise ConfigurationError(f"--x must be >= 0, got {self.x}")
        if self.command == "sweep":
            if not self.theta_grid or any(t < 0 for t in self.theta_grid):
                raise ConfigurationError("--theta-grid needs nonnegative values")
            if len({c.kind for c in self.clocks if not c.is_degenerate}) > 1:
                raise ConfigurationError("sweep takes a single clock kind")
        if self.search_upper is not None and not self.search_upper > 0:
            raise ConfigurationError(f"--search-upper must be > 0, got {self.search_upper}")
        return self


class KellyClockApp:
    """
    Main application class wiring configuration to controllers and the report view
    """

    def __init__(self):
        """Initialize the application with its controllers"""
        self.growth_controller = GrowthController()
        self.solve_controller = SolveController(growth=self.growth_controller)
        self.simulation_controller = SimulationController(growth=self.growth_controller)
        self.acceptability_controller = AcceptabilityController(growth=self.growth_controller)

    def run(self, config: RunConfig) -> Dict[Path, str]:
        """
        Execute one command

        Args:
            config: Validated run configuration

        Returns:
            Rendered outputs keyed by destination (None for stdout); nothing is
            written here so failures never leave partial files
        """
        view = ReportView(config.fmt)
        handler = getattr(self, f"cmd_{config.command}")
        return handler(config, view)

    def cmd_curve(self, config: RunConfig, view: ReportView) -> Dict:
        curves = [self.growth_controller.growth_curve(clock, config.bet, config.f_grid) for clock in config.clocks]
        return {config.out: view.render_curves(curves)}

    def cmd_solve(self, config: RunConfig, view: ReportView) -> Dict:
        results = {
            clock.label: self.solve_controller.solve(clock, config.bet, config.search_upper, config.method)
            for clock in config.clocks
        }
        return {config.out: view.render_solve(results)}

    def cmd_table1(self, config: RunConfig, view: ReportView) -> Dict:
        table = self.solve_controller.table1(config.reference)
        return {config.out: view.render_frame(table)}

    def cmd_simulate(self, config: RunConfig, view: ReportView) -> Dict:
        result = self.simulation_controller.simulate(config.clocks[0], config.bet, config.f, config.sim)
        outputs = {config.out: view.render_simulation(result)}
        if config.dump_paths is not None:
            outputs[config.dump_paths] = view.frame_to_csv(result.paths)
        return outputs

    def cmd_accept(self, config: RunConfig, view: ReportView) -> Dict:
        family = self.acceptability_controller.family
        grid = [config.f] if config.f is not None else config.f_grid
        frames = []
        for clock in config.clocks:
            table = self.acceptability_controller.acceptability_table(
                clock, family, config.bet, grid, hurdle=config.hurdle, x=config.x, direction=config.direction
            )
            table.insert(0, 'model_label', clock.label)
            frames.append(table)
        return {config.out: view.render_frame(pd.concat(frames, ignore_index=True),
                                              meta={'family': family.to_dict(), 'bet': config.bet.to_dict()})}

    def cmd_sweep(self, config: RunConfig, view: ReportView) -> Dict:
        kinds = [c.kind for c in config.clocks if not c.is_degenerate]
        kind = kinds[0].value if kinds else ClockKind.GAMMA.value
        table = self.solve_controller.theta_sweep(config.bet, config.theta_grid, kind, config.search_upper)
        return {config.out: view.render_frame(table)}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Flat JSON config file; flags override its values")
    common.add_argument("--clock", action="append", choices=CLOCK_KINDS, help="Clock kind (repeatable)")
    common.add_argument("--theta", action="append", type=float, help="Clock variance (repeatable, paired with --clock)")
    common.add_argument("--bet", choices=BET_TYPES)
    common.add_argument("--p", type=float, help="Bernoulli win probability")
    common.add_argument("--lb", type=float, help="Uniform lower per-unit return")
    common.add_argument("--ub", type=float, help="Uniform upper per-unit return")
    common.add_argument("--outcomes", help="Discrete outcomes as return:probability,...")
    common.add_argument("--f", type=float, help="Single fraction")
    common.add_argument("--f-min", dest="f_min", type=float)
    common.add_argument("--f-max", dest="f_max", type=float)
    common.add_argument("--f-step", dest="f_step", type=float)
    common.add_argument("--search-upper", dest="search_upper", type=float,
                        help="Upper search bound when max_fraction is unbounded")
    common.add_argument("--method", choices=("derivative", "golden"))
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="Output file (stdout when omitted)")
    common.add_argument("--seed", type=int)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="DEBUG logging")
    verbosity.add_argument("--quiet", action="store_true", help="WARNING logging")

    parser = argparse.ArgumentParser(
        prog="kelly-clock",
        description="Kelly growth, ruin thresholds and acceptability under stochastic clocks",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("curve", parents=[common], help="Growth curve G(f) on a grid")
    subparsers.add_parser("solve", parents=[common], help="Optimal fraction and ruin threshold")

    table1 = subparsers.add_parser("table1", parents=[common], help="Reproduce the model risk table")
    table1.add_argument("--reference", help="Reference CSV with provenance comments")

    simulate = subparsers.add_parser("simulate", parents=[common], help="Monte Carlo wealth paths")
    simulate.add_argument("--periods", type=int)
    simulate.add_argument("--paths", type=int)
    simulate.add_argument("--mode", choices=("clock_only", "full"))
    simulate.add_argument("--s-bar", dest="s_bar", type=float)
    simulate.add_argument("--ruin-floor", dest="ruin_floor", type=float)
    simulate.add_argument("--growth-ceiling", dest="growth_ceiling", type=float)
    simulate.add_argument("--workers", type=int)
    simulate.add_argument("--dump-paths", dest="dump_paths", help="Per-path CSV dump")

    accept = subparsers.add_parser("accept", parents=[common], help="Acceptability index and distorted growth")
    accept.add_argument("--hurdle", type=float)
    accept.add_argument("--x", type=float, help="Distortion level for the distorted growth column")
    accept.add_argument("--direction", choices=("pessimistic", "optimistic"))

    sweep = subparsers.add_parser("sweep", parents=[common], help="f*, G(f*) and f_c across theta")
    sweep.add_argument("--theta-grid", dest="theta_grid", help="Comma-separated theta values")
    return parser


def load_settings(args: argparse.Namespace) -> Dict:
    """Merge the JSON config file (if any) with explicit flags."""
    settings: Dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                loaded = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read config file {args.config}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Config file {args.config} must hold a flat JSON object")
        settings.update({key.replace("-", "_"): value for key, value in loaded.items()})

    skip = {'config', 'command', 'verbose', 'quiet'}
    settings.update({key: value for key, value in vars(args).items() if key not in skip and value is not None})
    return settings


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the command-line tool

    Returns:
        Exit code: 0 ok, 2 configuration error, 3 numeric or domain error
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = RunConfig.from_settings(args.command, load_settings(args)).validate()
    except ConfigurationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CODES['config_error']

    app = KellyClockApp()
    try:
        outputs = app.run(config)
    except ConfigurationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CODES['config_error']
    except (KellyClockError, FloatingPointError) as e:
        logger.error(f"{config.command} failed: {e}")
        return EXIT_CODES['numeric_error']

    view = ReportView(config.fmt)
    for destination, text in outputs.items():
        view.write(text, destination)
    return EXIT_CODES['ok']


if __name__ == "__main__":
    sys.exit(main())

"""
Controllers package - Growth, solver, simulation and acceptability logic
"""

from .growth_controller import GrowthController, growth_controller
from .solve_controller import SolveController, solve_controller
from .simulation_controller import SimulationController, simulation_controller
from .acceptability_controller import AcceptabilityController, acceptability_controller

__all__ = [
    'GrowthController', 'growth_controller',
    'SolveController', 'solve_controller',
    'SimulationController', 'simulation_controller',
    'AcceptabilityController', 'acceptability_controller',
]

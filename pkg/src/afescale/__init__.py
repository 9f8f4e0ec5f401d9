"""Scaling laws and bounds for the power consumption of receiver analog front ends."""

from afescale.afe import (
    BlockFoM,
    ChainFoM,
    FrontEndDesign,
    Scenario,
    optimal_power,
    optimal_power_circuit_form,
    optimal_power_system_form,
    scenario_to_design,
)
from afescale.errors import (
    AfeScaleError,
    ConvergenceError,
    DomainError,
    InfeasibleDesignError,
    OutOfModelError,
    ValidityError,
)
from afescale.numerics import DEFAULT_CONSTANTS, PhysicalConstants

__version__ = "0.1.0"

__all__ = [
    "BlockFoM",
    "ChainFoM",
    "FrontEndDesign",
    "Scenario",
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "optimal_power",
    "optimal_power_circuit_form",
    "optimal_power_system_form",
    "scenario_to_design",
    "AfeScaleError",
    "ConvergenceError",
    "DomainError",
    "InfeasibleDesignError",
    "OutOfModelError",
    "ValidityError",
]

"""Exact RCPSP solvers on the chain lattice, a lag-bounded corridor solver,
shuffle product membership, and hardness reductions with decoders."""

from .chains import ChainDecomposition, EarliestStarts, chain_decompose, earliest_starts, schedule_lag, width
from .core import (
    BudgetExceeded,
    Instance,
    InstanceError,
    Job,
    Resource,
    Schedule,
    Verdict,
    is_feasible,
    makespan,
    validate_instance,
)
from .corridor import build_gamma, corridor_solve
from .lattice import Geometry, Solution, servakh_solve
from .shuffle import DsInstance, ShuffleInstance, WitnessMapping, ds_to_shuffle, shuffle_member

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ChainDecomposition",
    "DsInstance",
    "EarliestStarts",
    "Geometry",
    "Instance",
    "InstanceError",
    "Job",
    "Resource",
    "Schedule",
    "ShuffleInstance",
    "Solution",
    "Verdict",
    "WitnessMapping",
    "build_gamma",
    "chain_decompose",
    "corridor_solve",
    "ds_to_shuffle",
    "earliest_starts",
    "is_feasible",
    "makespan",
    "schedule_lag",
    "servakh_solve",
    "shuffle_member",
    "validate_instance",
    "width",
]

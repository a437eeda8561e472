"""Power-minimizing indoor LED placement for visible light communication."""

from .baselines import lca, lxyo, oracle_grid_search
from .config import load_scenario
from .report import PlacementSolution
from .scene import (LedLayout, PhysicalParams, Receiver, RoomConfig, Scenario,
                    lambert_order, symmetric_layout, uniform_receiver_grid)
from .solver import SolverConfig, lxo, lxyu, lyo

__version__ = "0.1.0"

__all__ = [
    "LedLayout", "PhysicalParams", "PlacementSolution", "Receiver", "RoomConfig",
    "Scenario", "SolverConfig", "lambert_order", "lca", "load_scenario", "lxo",
    "lxyo", "lxyu", "lyo", "oracle_grid_search", "symmetric_layout",
    "uniform_receiver_grid", "__version__",
]

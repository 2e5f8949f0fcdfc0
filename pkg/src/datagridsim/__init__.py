"""Deterministic discrete-event simulator of a two-level data grid.

Jobs are brokered to the site holding the largest share of their input
bytes, missing files are staged by a pluggable replication strategy
(hierarchical two-phase, bandwidth-hierarchy, or plain LRU), and every run
is a pure function of its configuration and seed.
"""

from .config import Config, load_config
from .errors import ConfigurationError, SimulationError
from .replication import StrategyKind
from .runner import build_simulation, run_once
from .simulation import Simulation

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ConfigurationError",
    "Simulation",
    "SimulationError",
    "StrategyKind",
    "build_simulation",
    "load_config",
    "run_once",
    "__version__",
]

"""Exception types shared across the simulator."""


class ConfigurationError(Exception):
    """Bad configuration value or unknown identifier supplied by the caller."""


class SimulationError(Exception):
    """Internal invariant violated during a run; the run cannot continue."""

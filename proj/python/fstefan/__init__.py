"""Space-fractional one-phase Stefan problem solver."""

from ._fstefan import (
    AnalyticBenchmark,
    ConfigError,
    Run,
    SolverError,
    check,
    eta,
    h_alpha,
    ml3,
    parse_config,
    solve,
)

__all__ = [
    "AnalyticBenchmark",
    "ConfigError",
    "Run",
    "SolverError",
    "check",
    "eta",
    "h_alpha",
    "ml3",
    "parse_config",
    "solve",
]

"""Deterministic multi-agent environments for ecological control problems.

Five scenarios (wind farm control, wildfire resource management, ocean
plastic collection, drone reforestation, aerial wildfire suppression)
share one seeded, headless episode engine, plus a parameter-shared PPO
trainer and a config-driven experiment harness.
"""

from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec, StepOutcome
from ecomarl.core.base import make_env
from ecomarl.core.batch import EnvBatch
from ecomarl.core.errors import (
    ActionError,
    ConfigurationError,
    DomainError,
    EcomarlError,
    LifecycleError,
)

__version__ = "0.1.0"

__all__ = [
    "Actions",
    "EnvBatch",
    "EnvConfig",
    "SpaceSpec",
    "StepOutcome",
    "make_env",
    "ActionError",
    "ConfigurationError",
    "DomainError",
    "EcomarlError",
    "LifecycleError",
    "__version__",
]

"""Flat-array environment API for the scripting RL ecosystem.

Wraps the native library behind four calls -- make / reset / step / spec --
that exchange plain contiguous numpy buffers and JSON info strings, the
conventional env-API shape. One call steps all agents at once.

Observation layout: agent-major; the vector block precedes the visual
block; visual grids are row-major (channels, height, width).
"""

from ecomarl_bindings.api import (
    ENVIRONMENTS,
    BoundEnv,
    FlatStep,
    bound_make,
    bound_reset,
    bound_spec,
    bound_step,
)
from ecomarl_bindings.errors import (
    BindingActionError,
    BindingConfigurationError,
    BindingError,
    BindingLifecycleError,
)

__version__ = "0.1.0"

__all__ = [
    "ENVIRONMENTS",
    "BoundEnv",
    "FlatStep",
    "bound_make",
    "bound_reset",
    "bound_spec",
    "bound_step",
    "BindingError",
    "BindingActionError",
    "BindingConfigurationError",
    "BindingLifecycleError",
    "__version__",
]

from ecomarl.core.base import MultiAgentEnv, Stacker, make_env
from ecomarl.core.batch import EnvBatch
from ecomarl.core.rng import RngStream, dynamics_rng, policy_init_rng, worldgen_rng
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec, StepOutcome

__all__ = [
    "MultiAgentEnv",
    "Stacker",
    "make_env",
    "EnvBatch",
    "RngStream",
    "dynamics_rng",
    "policy_init_rng",
    "worldgen_rng",
    "Actions",
    "EnvConfig",
    "SpaceSpec",
    "StepOutcome",
]

from ecomarl.ppo.gae import compute_gae, ppo_clip_objective
from ecomarl.ppo.networks import ActorCritic
from ecomarl.ppo.trainer import CuriosityConfig, SummaryRow, Trainer, TrainerConfig, UpdateStats

__all__ = [
    "compute_gae",
    "ppo_clip_objective",
    "ActorCritic",
    "CuriosityConfig",
    "SummaryRow",
    "Trainer",
    "TrainerConfig",
    "UpdateStats",
]

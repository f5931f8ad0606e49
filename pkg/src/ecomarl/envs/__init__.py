from ecomarl.envs.fire_suppression import FireSuppressionEnv
from ecomarl.envs.ocean_cleanup import OceanCleanupEnv
from ecomarl.envs.reforestation import ReforestationEnv
from ecomarl.envs.wildfire_towers import WildfireTowersEnv
from ecomarl.envs.windfarm import WindFarmEnv

ENV_CLASSES = {
    "wfc": WindFarmEnv,
    "wrm": WildfireTowersEnv,
    "opc": OceanCleanupEnv,
    "dbr": ReforestationEnv,
    "aws": FireSuppressionEnv,
}

__all__ = [
    "ENV_CLASSES",
    "WindFarmEnv",
    "WildfireTowersEnv",
    "OceanCleanupEnv",
    "ReforestationEnv",
    "FireSuppressionEnv",
]

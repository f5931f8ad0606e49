from ecomarl.harness.config import ParseError, RunConfig, parse_config, parse_config_file
from ecomarl.harness.metrics import MetricsRow, MetricsWriter, mean_and_sample_std
from ecomarl.harness.rungrid import run_grid, run_single
from ecomarl.harness.scalability import random_rollout, run_scalability

__all__ = [
    "ParseError",
    "RunConfig",
    "parse_config",
    "parse_config_file",
    "MetricsRow",
    "MetricsWriter",
    "mean_and_sample_std",
    "run_grid",
    "run_single",
    "random_rollout",
    "run_scalability",
]

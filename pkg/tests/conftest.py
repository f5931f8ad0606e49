import numpy as np
import pytest

from ecomarl.core.spaces import Actions


def random_actions(spec, rng: np.random.Generator) -> Actions:
    """Uniformly random valid actions for one tick."""
    disc = (
        np.stack([rng.integers(0, b, spec.agent_count) for b in spec.discrete_branches], axis=1)
        if spec.discrete_branches
        else np.zeros((spec.agent_count, 0), dtype=np.int64)
    )
    return Actions(
        continuous=rng.uniform(-1.0, 1.0, (spec.agent_count, spec.continuous_actions)),
        discrete=disc,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

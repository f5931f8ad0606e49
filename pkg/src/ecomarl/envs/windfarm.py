"""Wind Farm Control: turbine agents rotate against a drifting wind.

Reward components:

* generate_energy -- each turbine carries a performance state P in [0, 1]
  driven by the recurrence P <- clamp(P - 0.1 P + W 0.1), where the wind
  force W is zero below the half-alignment threshold and ramps linearly
  to 1 at perfect alignment. The per-step reward is the updated P.
* avoid_damage -- a tent over the turbine/wind angle, peaking at 90
  degrees (rotor blades parallel to the wind).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ecomarl.core.base import MultiAgentEnv
from ecomarl.core.errors import ActionError, DomainError
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec
from ecomarl.worldgen.fields import WindField
from ecomarl.worldgen.layouts import ARENA_HALF_EXTENT, layout_turbines

ROTATE_SPEED_DEG = 2.0  # degrees per step; a half turn takes 90 steps
TURBINE_ACCELERATION = 0.1
DRAG_COEFFICIENT = 0.1

DO_NOTHING, ROTATE_LEFT, ROTATE_RIGHT = 0, 1, 2


@dataclass
class TurbineState:
    position: np.ndarray  # (2,) meters
    orientation: np.ndarray  # (2,) unit vector
    performance: float = 0.0


def rotate(vec: np.ndarray, degrees: float) -> np.ndarray:
    rad = np.deg2rad(degrees)
    c, s = np.cos(rad), np.sin(rad)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])


def apply_rotation(turbine: TurbineState, action: int) -> TurbineState:
    """Rotate by the fixed step: 1 = left (+), 2 = right (-), 0 = hold."""
    if action not in (DO_NOTHING, ROTATE_LEFT, ROTATE_RIGHT):
        raise ActionError(f"rotate action {action} not in {{0, 1, 2}}")
    if action == DO_NOTHING:
        return turbine
    sign = 1.0 if action == ROTATE_LEFT else -1.0
    new_dir = rotate(turbine.orientation, sign * ROTATE_SPEED_DEG)
    new_dir = new_dir / np.linalg.norm(new_dir)
    return TurbineState(turbine.position, new_dir, turbine.performance)


def alignment(orientation: np.ndarray, wind_dir: np.ndarray) -> tuple[float, float]:
    """(theta_norm, theta_deg) between turbine orientation and upwind direction.

    theta_norm = (1 + cos theta) / 2, so facing straight into the wind gives
    1.0, perpendicular 0.5, downwind 0.0.
    """
    no = np.linalg.norm(orientation)
    nw = np.linalg.norm(wind_dir)
    if no < 1e-12 or nw < 1e-12:
        raise DomainError("alignment requires non-zero vectors")
    cos_t = float(np.dot(orientation, wind_dir) / (no * nw))
    cos_t = min(1.0, max(-1.0, cos_t))
    theta_deg = float(np.degrees(np.arccos(cos_t)))
    theta_norm = (1.0 + cos_t) / 2.0
    return theta_norm, theta_deg


def wind_force(theta_norm: float) -> float:
    """Zero below the perpendicular threshold, then linear up to 1."""
    if theta_norm < 0.5:
        return 0.0
    return (theta_norm - 0.5) / 0.5


def generate_energy_reward(performance: float, theta_norm: float) -> tuple[float, float]:
    """Advance the performance recurrence; returns (reward, updated performance)."""
    w = wind_force(theta_norm)
    drag = -DRAG_COEFFICIENT * performance
    p = performance + drag + w * TURBINE_ACCELERATION
    p = max(0.0, min(1.0, p))
    return p, p


def avoid_damage_reward(theta_deg: float) -> float:
    """Tent map: 0 at 0 deg, 1 at 90 deg, 0 at 180 deg."""
    if not 0.0 <= theta_deg <= 180.0:
        raise DomainError(f"theta {theta_deg} outside [0, 180]")
    if theta_deg <= 90.0:
        return theta_deg / 90.0
    return 2.0 - theta_deg / 90.0


class WindFarmEnv(MultiAgentEnv):
    ENV_ID = "wfc"
    METRIC_NAME = "mean_performance"

    def _build_spec(self, config: EnvConfig) -> SpaceSpec:
        count = config.agent_count_override or 8
        return SpaceSpec(
            vector_len=6,
            vector_stacks=1,
            visual_dims=None,
            visual_stacks=1,
            continuous_actions=0,
            discrete_branches=(3,),
            agent_count=count,
            episode_length=5000,
        )

    def _reset_world(self) -> tuple[np.ndarray, Optional[np.ndarray]]:
        n = self.spec.agent_count
        layout = layout_turbines(self.config.scenario, self.seed, count=n)
        self.wind = WindField.create(self.seed, half_extent=ARENA_HALF_EXTENT)
        headings = self.world_rng.uniform(-np.pi, np.pi, size=n)
        self.turbines = [
            TurbineState(
                position=layout.positions[i].copy(),
                orientation=np.array([np.cos(headings[i]), np.sin(headings[i])]),
            )
            for i in range(n)
        ]
        return self._frames(), None

    def _wind_at_turbines(self) -> np.ndarray:
        pos = np.asarray([t.position for t in self.turbines])
        return self.wind.direction(pos[:, 0], pos[:, 1], float(self.step_count))

    def _frames(self) -> np.ndarray:
        wind = self._wind_at_turbines()
        rows = []
        for i, t in enumerate(self.turbines):
            # local wind direction: the unit wind vector expressed in the
            # turbine's own frame (x along the rotor axis, y to its left)
            local_x = t.orientation[0] * wind[i, 0] + t.orientation[1] * wind[i, 1]
            local_y = t.orientation[0] * wind[i, 1] - t.orientation[1] * wind[i, 0]
            rows.append(
                [
                    t.position[0] / ARENA_HALF_EXTENT,
                    t.position[1] / ARENA_HALF_EXTENT,
                    t.orientation[0],
                    t.orientation[1],
                    local_x,
                    local_y,
                ]
            )
        return np.asarray(rows, dtype=np.float64)

    def _step_world(self, actions: Actions):
        wind = self._wind_at_turbines()
        breakdowns = []
        for i, turbine in enumerate(self.turbines):
            self.turbines[i] = turbine = apply_rotation(turbine, int(actions.discrete[i, 0]))
            theta_norm, theta_deg = alignment(turbine.orientation, wind[i])
            energy, turbine.performance = generate_energy_reward(turbine.performance, theta_norm)
            breakdowns.append(
                {"generate_energy": energy, "avoid_damage": avoid_damage_reward(theta_deg)}
            )
        dones = np.zeros(self.spec.agent_count, dtype=bool)
        metrics = {"mean_performance": self.metric()}
        return self._frames(), None, breakdowns, dones, metrics

    def metric(self) -> float:
        return float(np.mean([t.performance for t in self.turbines]))

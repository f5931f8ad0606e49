"""Wildfire Resource Management: watchtowers shuffle resources as fires approach.

Nine towers sit on a fixed 3x3 lattice. Each step every agent gets a fresh
1.0-unit pool and moves it in 0.1 increments to itself or its three
neighbours (or reclaims back into the pool). Resources are tracked in
integer tenths so conservation is exact.

Tower performance follows a broken power law over the normalized distance
to the closest observed fire, remapped by whether the fire is approaching;
rewards combine own performance (weighted by own resources squared), the
neighbourhood performance sum (plus a bonus for supplying towers that turn
out to perform well), and a collective term over all nine towers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ecomarl.core.base import MultiAgentEnv
from ecomarl.core.errors import ActionError
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec
from ecomarl.worldgen.fields import ScalarField, WindField, weather_fields
from ecomarl.worldgen.terrain import TerrainGrid, generate_terrain

HALF_EXTENT = 750.0
LATTICE = (-500.0, 0.0, 500.0)
DETECTION_RANGE = 600.0
DISTANCE_THRESHOLD = 200.0  # d_thresh for distance normalization
POWER_LAW_S = 270.0
POWER_LAW_A = 5.0
SUPPORT_NORM_UNITS = 10.0  # resources above this saturate the observation
USEFUL_SUPPORT_BONUS = 0.1
USEFUL_SUPPORT_THRESHOLD = 0.5

FIRE_BASE_SPEED = 6.0  # meters per step before weather modulation
FIRE_SPAWN_STEPS = (0, 0, 150)

NO_ACTION, ADD, SUB = 0, 1, 2


@dataclass
class WatchtowerState:
    position: np.ndarray  # (3,) meters
    resources_tenths: int
    pool_tenths: int
    neighbours: tuple[int, int, int]
    last_fire_distance: Optional[float] = None  # d0

    @property
    def resources(self) -> float:
        return self.resources_tenths / 10.0

    @property
    def pool(self) -> float:
        return self.pool_tenths / 10.0


@dataclass
class FireFront:
    position: np.ndarray  # (3,) meters, on the terrain surface
    heading: np.ndarray  # (2,) unit vector
    intensity: float


def lattice_neighbours(index: int) -> tuple[int, int, int]:
    """Exactly three lattice-adjacent towers (up, right, down with wraparound)."""
    r, c = divmod(index, 3)
    picks = (((r - 1) % 3, c), (r, (c + 1) % 3), ((r + 1) % 3, c))
    return tuple(pr * 3 + pc for pr, pc in picks)


def apply_distribution(
    towers: list[WatchtowerState], agent: int, branch_actions: np.ndarray
) -> list[int]:
    """Apply one agent's four Add/Sub branches (self, neighbour 1..3).

    Moves that would drive a tower's stock negative or the pool outside
    [0, 1] are no-ops. Returns the neighbour ids this agent added to.
    """
    if len(branch_actions) != 4:
        raise ActionError(f"expected 4 distribution branches, got {len(branch_actions)}")
    me = towers[agent]
    targets = (agent,) + me.neighbours
    supplied = []
    for branch, target_id in enumerate(targets):
        act = int(branch_actions[branch])
        if act == NO_ACTION:
            continue
        if act not in (ADD, SUB):
            raise ActionError(f"distribution action {act} not in {{0, 1, 2}}")
        target = towers[target_id]
        if act == ADD:
            if me.pool_tenths >= 1:
                me.pool_tenths -= 1
                target.resources_tenths += 1
                if branch > 0:
                    supplied.append(target_id)
        else:
            if target.resources_tenths >= 1 and me.pool_tenths <= 9:
                target.resources_tenths -= 1
                me.pool_tenths += 1
    return supplied


def tower_performance(d0: Optional[float], d1: float) -> float:
    """Broken power law over the remapped normalized fire distance."""
    d1n = min(d1 / DISTANCE_THRESHOLD, 1.0)
    moving_closer = d0 is not None and d1 < d0
    d1p = 0.5 - 0.5 * d1n if moving_closer else 0.5 + 0.5 * d1n
    return (1.0 + (d1p * 1000.0 / POWER_LAW_S) ** POWER_LAW_A) ** -0.5


def self_reward(performance: float, r_supporting: float) -> float:
    return performance * r_supporting * r_supporting


def neighbour_reward(neighbour_performances: np.ndarray) -> float:
    return float(np.sum(neighbour_performances))


def collective_reward(all_performances: np.ndarray) -> float:
    mse = float(np.mean(np.square(all_performances)))
    return 1.0 - abs(1.0 - np.sqrt(mse))


class WildfireTowersEnv(MultiAgentEnv):
    ENV_ID = "wrm"
    METRIC_NAME = "individual_performance"

    terrain: TerrainGrid
    towers: list[WatchtowerState]
    fronts: list[FireFront]
    weather: dict[str, ScalarField]
    wind: WindField

    def _build_spec(self, config: EnvConfig) -> SpaceSpec:
        return SpaceSpec(
            vector_len=8,
            vector_stacks=2,
            visual_dims=None,
            visual_stacks=1,
            continuous_actions=0,
            discrete_branches=(3, 3, 3, 3),
            agent_count=9,
            episode_length=500,
        )

    def _reset_world(self):
        self.terrain = generate_terrain(
            self.config.scenario, self.seed, resolution=65, half_extent=HALF_EXTENT
        )
        self.weather = weather_fields(self.seed, half_extent=HALF_EXTENT)
        self.wind = WindField.create(self.seed, half_extent=HALF_EXTENT)
        self.towers = []
        for i in range(9):
            r, c = divmod(i, 3)
            x, y = LATTICE[c], LATTICE[r]
            z = float(self.terrain.height_at(x, y))
            self.towers.append(
                WatchtowerState(
                    position=np.array([x, y, z]),
                    resources_tenths=10,
                    pool_tenths=10,
                    neighbours=lattice_neighbours(i),
                )
            )
        self.fronts = []
        self._spawn_offsets = self.world_rng.uniform(-0.5, 0.5, size=len(FIRE_SPAWN_STEPS))
        self._spawned = 0
        self._performances = np.zeros(9)
        self._maybe_spawn_fronts()
        return self._frames(), None

    def _maybe_spawn_fronts(self) -> None:
        while self._spawned < len(FIRE_SPAWN_STEPS) and FIRE_SPAWN_STEPS[self._spawned] <= self.step_count:
            wind_dir = self.wind.direction(0.0, 0.0, float(self.step_count))
            lateral = np.array([-wind_dir[1], wind_dir[0]])
            pos2 = (
                -wind_dir * 0.95 * HALF_EXTENT
                + lateral * self._spawn_offsets[self._spawned] * HALF_EXTENT
            )
            pos2 = np.clip(pos2, -HALF_EXTENT, HALF_EXTENT)
            z = float(self.terrain.height_at(pos2[0], pos2[1]))
            self.fronts.append(
                FireFront(
                    position=np.array([pos2[0], pos2[1], z]),
                    heading=np.asarray(wind_dir, dtype=np.float64),
                    intensity=0.5 + 0.5 * self._spawn_offsets[self._spawned] + 0.25,
                )
            )
            self._spawned += 1

    def _advance_fronts(self) -> None:
        t = float(self.step_count)
        for front in self.fronts:
            x, y = front.position[0], front.position[1]
            temp = float(self.weather["temperature"].sample(x, y, t))
            humid = float(self.weather["humidity"].sample(x, y, t))
            overcast = float(self.weather["overcast"].sample(x, y, t))
            speed = max(0.0, FIRE_BASE_SPEED * (1.0 + temp - humid - 0.5 * overcast))
            front.heading = np.asarray(self.wind.direction(x, y, t), dtype=np.float64)
            nx = np.clip(x + front.heading[0] * speed, -HALF_EXTENT, HALF_EXTENT)
            ny = np.clip(y + front.heading[1] * speed, -HALF_EXTENT, HALF_EXTENT)
            front.position = np.array([nx, ny, float(self.terrain.height_at(nx, ny))])

    def _closest_fire(self, tower: WatchtowerState) -> tuple[float, Optional[np.ndarray]]:
        if not self.fronts:
            return np.inf, None
        dists = [float(np.linalg.norm(front.position - tower.position)) for front in self.fronts]
        best = int(np.argmin(dists))
        return dists[best], self.fronts[best].position

    def _frames(self) -> np.ndarray:
        t = float(self.step_count)
        rows = []
        for tower in self.towers:
            d, fire_pos = self._closest_fire(tower)
            detected = d <= DETECTION_RANGE
            if detected and fire_pos is not None:
                rel = (fire_pos - tower.position) / np.array(
                    [DETECTION_RANGE, DETECTION_RANGE, 40.0]
                )
            else:
                rel = np.zeros(3)
            x, y = tower.position[0], tower.position[1]
            rows.append(
                [
                    rel[0],
                    rel[1],
                    rel[2],
                    float(self.weather["temperature"].sample(x, y, t)),
                    float(self.weather["humidity"].sample(x, y, t)),
                    float(self.weather["overcast"].sample(x, y, t)),
                    min(tower.resources / SUPPORT_NORM_UNITS, 1.0),
                    1.0 if detected else 0.0,
                ]
            )
        return np.asarray(rows, dtype=np.float64)

    def _step_world(self, actions: Actions):
        for tower in self.towers:
            tower.pool_tenths = 10
        supplied_by = [
            apply_distribution(self.towers, agent, actions.discrete[agent])
            for agent in range(9)
        ]

        self._maybe_spawn_fronts()
        self._advance_fronts()

        performances = np.zeros(9)
        for i, tower in enumerate(self.towers):
            d1, _ = self._closest_fire(tower)
            performances[i] = tower_performance(tower.last_fire_distance, d1)
            tower.last_fire_distance = None if np.isinf(d1) else d1
        self._performances = performances

        collective = collective_reward(performances)
        breakdowns = []
        for i, tower in enumerate(self.towers):
            neigh_p = performances[list(tower.neighbours)]
            bonus = USEFUL_SUPPORT_BONUS * sum(
                1 for j in supplied_by[i] if performances[j] > USEFUL_SUPPORT_THRESHOLD
            )
            breakdowns.append(
                {
                    "tower_performance": self_reward(performances[i], tower.resources),
                    "neighbourhood_performance": neighbour_reward(neigh_p) + bonus,
                    "collective_performance": collective,
                }
            )
        dones = np.zeros(9, dtype=bool)
        metrics = {
            "individual_performance": performances.tolist(),
            "mean_performance": float(performances.mean()),
        }
        return self._frames(), None, breakdowns, dones, metrics

    def metric(self) -> float:
        return float(self._performances.mean())

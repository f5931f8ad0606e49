"""Aerial Wildfire Suppression: planes ferry water onto a spreading forest fire.

The world is a square island (half extent 600 m) ringed by water out to the
environment boundary (750 m). Planes fly at constant speed and steer
continuously; flying over the ring loads water, dropping it extinguishes
burning trees (5 each) or wets standing ones (1 each, fire-resistant until
they dry out). Fire spreads stochastically to neighbours within an
ignition radius, biased downwind and damped by humidity.

Tree lifecycle: alive -> burning -> burned (fuel out) or extinguished
(water), alive -> wet -> alive (dry-out). No transition revives a burned
or extinguished tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ecomarl.core.base import MultiAgentEnv
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec
from ecomarl.worldgen.fields import WindField, weather_fields
from ecomarl.worldgen.scatter import scatter_forest
from ecomarl.worldgen.terrain import generate_terrain

ENV_HALF_EXTENT = 750.0
ISLAND_HALF_EXTENT = 600.0
VILLAGE_RADIUS = 150.0
FIND_RADIUS = 150.0

PLANE_SPEED = 5.0  # m/step, constant
TURN_RATE_DEG = 5.0  # at full deflection

DROP_RADIUS = 20.0
IGNITION_RADIUS = 15.0
IGNITION_BASE_P = 0.15  # per neighbour per step at T = H = 0.5
WIND_BIAS = 0.5
BURN_STEPS = 60  # burning -> burned when fuel runs out
DRY_STEPS = 120  # wet -> alive again

BORDER_REWARD = -100.0
PICK_UP_REWARD = 1.0
FIRE_OUT_REWARD = 10.0
VILLAGE_DANGER_REWARD = -50.0
BURNING_STEP_REWARD = -0.01
FIND_REWARD = 100.0
EXTINGUISH_REWARD = 5.0
PREPARE_REWARD = 1.0

CAMERA_RES = 42
CAMERA_CELL = 10.0  # meters per pixel

ALIVE, BURNING, EXTINGUISHED, WET, BURNED = 0, 1, 2, 3, 4

DROP_NONE, DROP_WATER = 0, 1


@dataclass
class PlaneState:
    position: np.ndarray  # (2,)
    heading: np.ndarray  # (2,) unit
    holding_water: bool = False
    found_fire: bool = False
    found_village: bool = False


def in_water_girdle(x: float, y: float) -> bool:
    inside_env = abs(x) <= ENV_HALF_EXTENT and abs(y) <= ENV_HALF_EXTENT
    outside_island = abs(x) > ISLAND_HALF_EXTENT or abs(y) > ISLAND_HALF_EXTENT
    return inside_env and outside_island


class FireSuppressionEnv(MultiAgentEnv):
    ENV_ID = "aws"
    METRIC_NAME = "extinguishing_trees_reward"

    def _build_spec(self, config: EnvConfig) -> SpaceSpec:
        count = config.agent_count_override or 3
        return SpaceSpec(
            vector_len=8,
            vector_stacks=1,
            visual_dims=(CAMERA_RES, CAMERA_RES, 3),
            visual_stacks=1,
            continuous_actions=1,
            discrete_branches=(2,),
            agent_count=count,
            episode_length=3000,
        )

    def _reset_world(self):
        n = self.spec.agent_count
        self.terrain = generate_terrain(
            self.config.scenario, self.seed, resolution=65, half_extent=ISLAND_HALF_EXTENT
        )
        self.trees = scatter_forest(self.seed, self.terrain, half_extent=0.95 * ISLAND_HALF_EXTENT)
        n_trees = len(self.trees)
        self.tree_state = np.full(n_trees, ALIVE, dtype=np.int8)
        self.tree_timer = np.zeros(n_trees, dtype=np.int32)

        tree_index = cKDTree(self.trees)
        self._neighbours = tree_index.query_ball_point(self.trees, r=IGNITION_RADIUS)
        for i, lst in enumerate(self._neighbours):
            self._neighbours[i] = sorted(j for j in lst if j != i)

        self.weather = weather_fields(self.seed, half_extent=ENV_HALF_EXTENT)
        self.wind = WindField.create(self.seed, half_extent=ENV_HALF_EXTENT)

        self.village = self.world_rng.uniform(-400.0, 400.0, size=2)

        first = int(self.world_rng.integers(0, n_trees))
        self.tree_state[first] = BURNING
        self.tree_timer[first] = BURN_STEPS

        self._fire_out_paid = False
        self.extinguished_total = 0
        self.planes = [self._spawn_plane(self.world_rng) for _ in range(n)]
        return self._frames()

    def _spawn_plane(self, rng: np.random.Generator) -> PlaneState:
        position = rng.uniform(-0.7 * ISLAND_HALF_EXTENT, 0.7 * ISLAND_HALF_EXTENT, size=2)
        angle = rng.uniform(-np.pi, np.pi)
        return PlaneState(position=position, heading=np.array([np.cos(angle), np.sin(angle)]))

    # -- fire dynamics -------------------------------------------------------

    def fire_step(self) -> None:
        """Spread, burn-out and dry-out; runs after all agent actions."""
        t = float(self.step_count)
        burning = np.flatnonzero(self.tree_state == BURNING)
        ignite: list[int] = []
        for i in burning:
            x, y = self.trees[i]
            temp = float(self.weather["temperature"].sample(x, y, t))
            humid = float(self.weather["humidity"].sample(x, y, t))
            wind = self.wind.direction(x, y, t)
            for j in self._neighbours[i]:
                if self.tree_state[j] != ALIVE:
                    continue
                offset = self.trees[j] - self.trees[i]
                norm = np.linalg.norm(offset)
                along = float(offset @ wind) / norm if norm > 0 else 0.0
                p = IGNITION_BASE_P * (1.0 + temp - humid) * (1.0 + WIND_BIAS * along)
                p = min(max(p, 0.0), 0.95)
                if self.dyn_rng.random() < p:
                    ignite.append(j)
        for j in ignite:
            if self.tree_state[j] == ALIVE:
                self.tree_state[j] = BURNING
                self.tree_timer[j] = BURN_STEPS

        self.tree_timer[burning] -= 1
        burned_out = burning[self.tree_timer[burning] <= 0]
        self.tree_state[burned_out] = BURNED

        wet = np.flatnonzero(self.tree_state == WET)
        self.tree_timer[wet] -= 1
        dried = wet[self.tree_timer[wet] <= 0]
        self.tree_state[dried] = ALIVE

    def drop_water(self, plane: PlaneState) -> tuple[int, int]:
        """Release the load below the plane; returns (extinguished, prepared)."""
        d = np.linalg.norm(self.trees - plane.position, axis=1)
        hit = d <= DROP_RADIUS
        burning_hit = hit & (self.tree_state == BURNING)
        alive_hit = hit & (self.tree_state == ALIVE)
        self.tree_state[burning_hit] = EXTINGUISHED
        self.tree_state[alive_hit] = WET
        self.tree_timer[alive_hit] = DRY_STEPS
        plane.holding_water = False
        return int(burning_hit.sum()), int(alive_hit.sum())

    # -- observations ----------------------------------------------------------

    def _camera(self, plane: PlaneState) -> np.ndarray:
        res, cell = CAMERA_RES, CAMERA_CELL
        half = res // 2
        fwd = plane.heading
        right = np.array([fwd[1], -fwd[0]])
        idx = (np.arange(res) - half + 0.5) * cell
        fw, rt = np.meshgrid(idx, idx, indexing="ij")
        cx = plane.position[0] + fw * fwd[0] + rt * right[0]
        cy = plane.position[1] + fw * fwd[1] + rt * right[1]

        # bin trees by state into the grid
        def binned(mask: np.ndarray) -> np.ndarray:
            grid = np.zeros((res, res))
            if not mask.any():
                return grid
            pts = self.trees[mask]
            dx = pts[:, 0] - plane.position[0]
            dy = pts[:, 1] - plane.position[1]
            fwd_d = dx * fwd[0] + dy * fwd[1]
            rt_d = dx * fwd[1] - dy * fwd[0]
            rows = np.floor(fwd_d / cell).astype(int) + half
            cols = np.floor(rt_d / cell).astype(int) + half
            ok = (rows >= 0) & (rows < res) & (cols >= 0) & (cols < res)
            grid[rows[ok], cols[ok]] = 1.0
            return grid

        red = binned(self.tree_state == BURNING)
        green = binned((self.tree_state == ALIVE) | (self.tree_state == WET))
        water = ((np.abs(cx) > ISLAND_HALF_EXTENT) | (np.abs(cy) > ISLAND_HALF_EXTENT)).astype(
            np.float64
        )
        blue = np.maximum(water, binned(self.tree_state == WET))
        return np.stack([red, green, blue], axis=0)

    def _frames(self) -> tuple[np.ndarray, np.ndarray]:
        rows = []
        grids = []
        for p in self.planes:
            d = np.linalg.norm(self.trees - p.position, axis=1)
            nearest = int(np.argmin(d))
            rows.append(
                [
                    p.position[0] / ENV_HALF_EXTENT,
                    p.position[1] / ENV_HALF_EXTENT,
                    p.heading[0],
                    p.heading[1],
                    1.0 if p.holding_water else 0.0,
                    self.trees[nearest, 0] / ENV_HALF_EXTENT,
                    self.trees[nearest, 1] / ENV_HALF_EXTENT,
                    1.0 if self.tree_state[nearest] == BURNING else 0.0,
                ]
            )
            grids.append(self._camera(p))
        return np.asarray(rows, dtype=np.float64), np.asarray(grids, dtype=np.float64)

    # -- step ---------------------------------------------------------------------

    def _step_world(self, actions: Actions):
        n = self.spec.agent_count
        breakdowns: list[dict] = [dict() for _ in range(n)]
        dones = np.zeros(n, dtype=bool)

        extinguished_counts = np.zeros(n, dtype=int)
        prepared_counts = np.zeros(n, dtype=int)

        for i, plane in enumerate(self.planes):
            b = breakdowns[i]
            steer = float(np.clip(actions.continuous[i, 0], -1.0, 1.0))
            rad = np.deg2rad(steer * TURN_RATE_DEG)
            c, s = np.cos(rad), np.sin(rad)
            hx, hy = plane.heading
            plane.heading = np.array([c * hx - s * hy, s * hx + c * hy])
            plane.heading /= np.linalg.norm(plane.heading)
            plane.position = plane.position + PLANE_SPEED * plane.heading

            b["crossed_border"] = 0.0
            b["pick_up_water"] = 0.0
            x, y = plane.position
            if abs(x) > ENV_HALF_EXTENT or abs(y) > ENV_HALF_EXTENT:
                b["crossed_border"] = BORDER_REWARD
                dones[i] = True
                self.planes[i] = plane = self._spawn_plane(self.dyn_rng)
            elif in_water_girdle(x, y) and not plane.holding_water:
                plane.holding_water = True
                b["pick_up_water"] = PICK_UP_REWARD

            b["extinguishing_tree"] = 0.0
            b["preparing_tree"] = 0.0
            if int(actions.discrete[i, 0]) == DROP_WATER and plane.holding_water:
                extinguished, prepared = self.drop_water(plane)
                extinguished_counts[i] = extinguished
                prepared_counts[i] = prepared
                b["extinguishing_tree"] = EXTINGUISH_REWARD * extinguished
                b["preparing_tree"] = PREPARE_REWARD * prepared
                self.extinguished_total += extinguished

        self.fire_step()

        burning_mask = self.tree_state == BURNING
        any_burning = bool(burning_mask.any())
        fire_out = 0.0
        if not any_burning and not self._fire_out_paid:
            fire_out = FIRE_OUT_REWARD
            self._fire_out_paid = True
        village_danger = 0.0
        if any_burning:
            d_village = np.linalg.norm(self.trees[burning_mask] - self.village, axis=1)
            if (d_village <= VILLAGE_RADIUS).any():
                village_danger = VILLAGE_DANGER_REWARD

        for i, plane in enumerate(self.planes):
            b = breakdowns[i]
            b["fire_out"] = fire_out
            b["too_close_to_village"] = village_danger
            b["time_step_burning"] = BURNING_STEP_REWARD if any_burning else 0.0

            b["find_fire"] = 0.0
            if not plane.found_fire and any_burning:
                d = np.linalg.norm(self.trees[burning_mask] - plane.position, axis=1)
                if (d <= FIND_RADIUS).any():
                    plane.found_fire = True
                    b["find_fire"] = FIND_REWARD
            b["find_village"] = 0.0
            if (
                not plane.found_village
                and np.linalg.norm(plane.position - self.village) <= FIND_RADIUS
            ):
                plane.found_village = True
                b["find_village"] = FIND_REWARD

        vec, vis = self._frames()
        metrics = {
            "extinguishing_trees_reward": EXTINGUISH_REWARD * self.extinguished_total,
            "burning_trees": int(burning_mask.sum()),
        }
        return vec, vis, breakdowns, dones, metrics

    def metric(self) -> float:
        return EXTINGUISH_REWARD * self.extinguished_total

"""Drone-Based Reforestation: drones ferry seeds from a station to fertile ground.

A drop is worth something only when it lands neither on top of the forest
nor too far from it (quality ramps from 20 near trees down to 0 at 75 m)
plus a distance bonus of up to 10 for planting far from the station.
After a drop, flying home pays small increments sized so a full return
from the drop point sums to at most 20, weighted by the drop's quality.

Exploration subtasks reuse one positive-delta rule: a reward equal to the
improvement whenever a personal best (fertility potential, terrain height,
distance from the station) is exceeded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ecomarl import kernels
from ecomarl.core.base import MultiAgentEnv
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec
from ecomarl.worldgen.scatter import scatter_forest
from ecomarl.worldgen.terrain import MAX_HEIGHT, generate_terrain

HALF_EXTENT = 200.0
EPISODE_LENGTH = 2000

DRONE_SPEED = 2.0  # m/step at full throttle
CLIMB_SPEED = 1.0  # m/step at full lift
TURN_RATE_DEG = 6.0
MIN_ALTITUDE = 0.5  # meters above terrain

DOT_MIN = 2.5  # closest allowed distance to existing/new trees
DOT_MAX = 75.0  # farthest distance from existing trees that still pays
SEED_REWARD_MULTIPLIER = 20.0
DISTANCE_REWARD_MULTIPLIER = 10.0

ENERGY_COST_HOLDING = 1.0 / (EPISODE_LENGTH / 2)  # 0.001
ENERGY_COST_NO_SEED = 1.0 / EPISODE_LENGTH  # 0.0005

CHARGE_RADIUS = 7.5  # horizontal distance to the station that recharges
RUN_BACK_INCREMENT = 2.5
RUN_BACK_MAX = 20.0

GROUP_UP_DISTANCE = 5.0
GROUP_UP_REWARD = 10.0
FIND_TREE_RADIUS = 20.0
FIND_TREE_REWARD = 100.0

CAMERA_RES = 16
CAMERA_CELL = 4.0  # meters per pixel

DROP_NONE, DROP_SEED = 0, 1

STATION_XY = np.zeros(2)


@dataclass
class RunBackContext:
    """Live state of the incremental running-back reward after one drop."""

    quality: float  # r_s
    distance_bonus: float  # r_d
    initial_distance: float  # d_init, assigned at the drop
    last_increment: int  # best (lowest) increment index reached so far
    paid: float = 0.0

    @property
    def multiplier(self) -> float:
        return (self.quality + self.distance_bonus) / (
            SEED_REWARD_MULTIPLIER + DISTANCE_REWARD_MULTIPLIER
        )


@dataclass
class DroneState:
    position: np.ndarray  # (3,) x, y, altitude
    heading: np.ndarray  # (2,) unit yaw vector
    climb_dir: float = 0.0
    holding_seed: bool = True
    energy: float = 1.0
    furthest_distance: float = 0.0
    best_fertility: float = 0.0
    best_height: float = 0.0
    drop_context: Optional[RunBackContext] = None
    away_from_station: bool = False
    found_tree: bool = False


def remap(value: float, in_lo: float, in_hi: float, out_lo: float, out_hi: float) -> float:
    t = (value - in_lo) / (in_hi - in_lo)
    return out_lo + t * (out_hi - out_lo)


def drop_seed_reward(det: float, dnt: float, sdd: float) -> tuple[float, float, float]:
    """(quality r_s, distance bonus r_d, total) for a drop.

    det/dnt are the distances to the closest existing tree and closest
    previously dropped seed (infinity when none exists). The distance
    bonus only applies when the quality is strictly positive.
    """
    if not (DOT_MIN <= det <= DOT_MAX and dnt >= DOT_MIN):
        return 0.0, 0.0, 0.0
    r_s = remap(det, DOT_MIN, DOT_MAX, 1.0, 0.0) * SEED_REWARD_MULTIPLIER
    r_d = (sdd / HALF_EXTENT) * DISTANCE_REWARD_MULTIPLIER if r_s > 0 else 0.0
    return r_s, r_d, r_s + r_d


def energy_penalty(holding_seed: bool) -> float:
    return -ENERGY_COST_HOLDING if holding_seed else -ENERGY_COST_NO_SEED


def incremental_running_back(ctx: RunBackContext, station_distance: float) -> float:
    """Reward for increments crossed toward the station since the last call."""
    current = math.floor(station_distance / RUN_BACK_INCREMENT)
    if current >= ctx.last_increment:
        return 0.0
    crossed = ctx.last_increment - current
    ctx.last_increment = current
    total_increments = (ctx.initial_distance - CHARGE_RADIUS) / RUN_BACK_INCREMENT
    if total_increments <= 0:
        return 0.0
    per_increment = (RUN_BACK_MAX * ctx.multiplier) / total_increments
    per_increment = min(max(per_increment, 0.0), RUN_BACK_MAX)
    reward = min(crossed * per_increment, RUN_BACK_MAX - ctx.paid)
    reward = max(reward, 0.0)
    ctx.paid += reward
    return reward


def positive_delta(old: float, new: float) -> tuple[float, float]:
    """Reward the improvement over a personal best; best only moves up."""
    if new > old:
        return new - old, new
    return 0.0, old


def find_close_tree(distance: float, already_found: bool) -> float:
    if already_found or distance > FIND_TREE_RADIUS:
        return 0.0
    return FIND_TREE_REWARD


class ReforestationEnv(MultiAgentEnv):
    ENV_ID = "dbr"
    METRIC_NAME = "recharge_energy_count"

    def _build_spec(self, config: EnvConfig) -> SpaceSpec:
        count = config.agent_count_override or 3
        return SpaceSpec(
            vector_len=10,
            vector_stacks=2,
            visual_dims=(CAMERA_RES, CAMERA_RES, 1),
            visual_stacks=1,
            continuous_actions=3,
            discrete_branches=(2,),
            agent_count=count,
            episode_length=EPISODE_LENGTH,
        )

    def _reset_world(self):
        n = self.spec.agent_count
        self.terrain = generate_terrain(
            self.config.scenario, self.seed, resolution=65, half_extent=HALF_EXTENT
        )
        self.trees = scatter_forest(self.seed, self.terrain)
        self.dropped_seeds: list[np.ndarray] = []
        self.station_height = float(self.terrain.height_at(0.0, 0.0))
        self.recharge_count = 0

        random_spawn = self.config.task == 3  # pick-up-seed task starts away from base
        self.drones = []
        for i in range(n):
            if random_spawn:
                xy = self.world_rng.uniform(-0.8 * HALF_EXTENT, 0.8 * HALF_EXTENT, size=2)
                holding = False
            else:
                angle = 2.0 * np.pi * i / max(n, 1)
                xy = STATION_XY + 3.0 * np.array([np.cos(angle), np.sin(angle)])
                holding = True
            z = float(self.terrain.height_at(xy[0], xy[1])) + 2.0
            heading_angle = self.world_rng.uniform(-np.pi, np.pi)
            self.drones.append(
                DroneState(
                    position=np.array([xy[0], xy[1], z]),
                    heading=np.array([np.cos(heading_angle), np.sin(heading_angle)]),
                    holding_seed=holding,
                )
            )
        return self._frames()

    # -- geometry helpers --------------------------------------------------

    def _station_distance(self, xy: np.ndarray) -> float:
        return float(np.linalg.norm(xy - STATION_XY))

    def _closest_tree_distance(self, xy: np.ndarray) -> float:
        if len(self.trees) == 0:
            return np.inf
        return float(np.min(np.linalg.norm(self.trees - xy, axis=1)))

    def _closest_seed_distance(self, xy: np.ndarray) -> float:
        if not self.dropped_seeds:
            return np.inf
        seeds = np.asarray(self.dropped_seeds)
        return float(np.min(np.linalg.norm(seeds - xy, axis=1)))

    def _fertility_potential(self, xy: np.ndarray) -> float:
        det = self._closest_tree_distance(xy)
        dnt = self._closest_seed_distance(xy)
        if not (DOT_MIN <= det <= DOT_MAX and dnt >= DOT_MIN):
            return 0.0
        return remap(det, DOT_MIN, DOT_MAX, 1.0, 0.0)

    # -- observations -------------------------------------------------------

    def _camera(self, drone: DroneState) -> np.ndarray:
        res, cell = CAMERA_RES, CAMERA_CELL
        half = res // 2
        fwd = drone.heading
        right = np.array([fwd[1], -fwd[0]])
        rows = (np.arange(res) - half + 0.5) * cell
        cols = (np.arange(res) - half + 0.5) * cell
        fw, rt = np.meshgrid(rows, cols, indexing="ij")
        cx = drone.position[0] + fw * fwd[0] + rt * right[0]
        cy = drone.position[1] + fw * fwd[1] + rt * right[1]
        height = np.clip(self.terrain.height_at(cx, cy) / MAX_HEIGHT, 0.0, 1.0)
        if len(self.trees):
            counts = kernels.raster_counts(
                self.trees[:, 0],
                self.trees[:, 1],
                float(drone.position[0]),
                float(drone.position[1]),
                float(fwd[0]),
                float(fwd[1]),
                res,
                cell,
            )
            presence = np.minimum(counts, 1).astype(np.float64)
        else:
            presence = np.zeros((res, res))
        return 0.5 * height + 0.5 * presence

    def _frames(self) -> tuple[np.ndarray, np.ndarray]:
        rows = []
        grids = []
        for d in self.drones:
            ground = float(self.terrain.height_at(d.position[0], d.position[1]))
            rows.append(
                [
                    (d.position[2] - ground) / MAX_HEIGHT,
                    d.position[0] / HALF_EXTENT,
                    d.position[1] / HALF_EXTENT,
                    d.position[2] / MAX_HEIGHT,
                    d.heading[0],
                    d.heading[1],
                    d.climb_dir,
                    self.station_height / MAX_HEIGHT,
                    1.0 if d.holding_seed else 0.0,
                    d.energy,
                ]
            )
            grids.append(self._camera(d)[None, :, :])
        return np.asarray(rows, dtype=np.float64), np.asarray(grids, dtype=np.float64)

    # -- dynamics ------------------------------------------------------------

    def _move(self, drone: DroneState, throttle: float, steer: float, lift: float) -> None:
        throttle = float(np.clip(throttle, -1.0, 1.0))
        steer = float(np.clip(steer, -1.0, 1.0))
        lift = float(np.clip(lift, -1.0, 1.0))
        if drone.energy <= 0.0:
            drone.climb_dir = 0.0
            return
        rad = np.deg2rad(steer * TURN_RATE_DEG)
        c, s = np.cos(rad), np.sin(rad)
        hx, hy = drone.heading
        drone.heading = np.array([c * hx - s * hy, s * hx + c * hy])
        drone.heading /= np.linalg.norm(drone.heading)
        drone.climb_dir = lift
        xy = drone.position[:2] + throttle * DRONE_SPEED * drone.heading
        xy = np.clip(xy, -HALF_EXTENT, HALF_EXTENT)
        z = drone.position[2] + lift * CLIMB_SPEED
        ground = float(self.terrain.height_at(xy[0], xy[1]))
        z = float(np.clip(z, ground + MIN_ALTITUDE, MAX_HEIGHT))
        drone.position = np.array([xy[0], xy[1], z])

    def _step_world(self, actions: Actions):
        n = self.spec.agent_count
        breakdowns = []
        for i, drone in enumerate(self.drones):
            b: dict[str, float] = {}
            self._move(
                drone,
                actions.continuous[i, 0],
                actions.continuous[i, 1],
                actions.continuous[i, 2],
            )
            drone.energy = max(
                0.0,
                drone.energy
                - (ENERGY_COST_HOLDING if drone.holding_seed else ENERGY_COST_NO_SEED),
            )

            xy = drone.position[:2]
            station_d = self._station_distance(xy)
            b["pick_up_seed"] = 0.0
            b["_pickup_passthrough"] = 0.0
            if station_d <= CHARGE_RADIUS:
                if drone.away_from_station:
                    b["pick_up_seed"] = 1.0
                    b["_pickup_passthrough"] = drone.furthest_distance
                    self.recharge_count += 1
                    drone.away_from_station = False
                drone.holding_seed = True
                drone.energy = 1.0
                drone.drop_context = None
            else:
                drone.away_from_station = True

            b["deplete_energy_holding_seed"] = (
                energy_penalty(True) if drone.holding_seed else 0.0
            )
            b["deplete_energy_no_seed"] = (
                energy_penalty(False) if not drone.holding_seed else 0.0
            )

            b["drop_seed"] = 0.0
            if int(actions.discrete[i, 0]) == DROP_SEED and drone.holding_seed:
                det = self._closest_tree_distance(xy)
                dnt = self._closest_seed_distance(xy)
                sdd = station_d
                r_s, r_d, total = drop_seed_reward(det, dnt, sdd)
                b["drop_seed"] = total
                self.dropped_seeds.append(xy.copy())
                drone.holding_seed = False
                if sdd > CHARGE_RADIUS:
                    drone.drop_context = RunBackContext(
                        quality=r_s,
                        distance_bonus=r_d,
                        initial_distance=sdd,
                        last_increment=math.floor(sdd / RUN_BACK_INCREMENT),
                    )
                else:
                    drone.drop_context = None

            b["incremental_running_back"] = (
                incremental_running_back(drone.drop_context, station_d)
                if drone.drop_context is not None
                else 0.0
            )

            reward, drone.best_fertility = positive_delta(
                drone.best_fertility, self._fertility_potential(xy)
            )
            b["high_fertility_delta"] = reward
            reward, drone.best_height = positive_delta(
                drone.best_height, float(self.terrain.height_at(xy[0], xy[1]))
            )
            b["high_landscape_delta"] = reward
            reward, drone.furthest_distance = positive_delta(
                drone.furthest_distance, station_d
            )
            b["far_distance_delta"] = reward

            tree_d = self._closest_tree_distance(xy)
            reward = find_close_tree(tree_d, drone.found_tree)
            if reward > 0:
                drone.found_tree = True
            b["find_close_tree"] = reward

            breakdowns.append(b)

        # group-up uses post-move positions of all drones
        for i, drone in enumerate(self.drones):
            if n == 1:
                breakdowns[i]["group_up"] = 0.0
                continue
            others = [d.position for j, d in enumerate(self.drones) if j != i]
            nearest = min(float(np.linalg.norm(p - drone.position)) for p in others)
            breakdowns[i]["group_up"] = GROUP_UP_REWARD if nearest < GROUP_UP_DISTANCE else 0.0

        vec, vis = self._frames()
        dones = np.zeros(n, dtype=bool)
        metrics = {"recharge_energy_count": self.recharge_count}
        return vec, vis, breakdowns, dones, metrics

    def metric(self) -> float:
        return float(self.recharge_count)

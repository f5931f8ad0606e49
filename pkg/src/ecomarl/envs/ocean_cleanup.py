"""Ocean Plastic Collection: vessels sweep floating pebbles off a bounded sea.

Vessels carry momentum (speed decays geometrically, throttle adds a fixed
impulse) and turn at a fixed rate. Pebbles are collected on contact, each
exactly once, with simultaneous claims resolved in ascending agent order.
Crossing the border ends that agent's episode with a -100 penalty and a
seeded respawn; vessel contact costs -100 on the collision event.

Base reward components carry their signs (border -100, trash contact -1
per pebble, ...); the task scale matrix picks and weights them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecomarl import kernels
from ecomarl.core.base import MultiAgentEnv
from ecomarl.core.errors import ActionError
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec
from ecomarl.worldgen.scatter import scatter_trash

HALF_EXTENT = 200.0
TURN_RATE_DEG = 4.0
ACCELERATION = 0.4  # m/step added per throttle tick
SPEED_DECAY = 0.95
COLLECTION_RADIUS = 2.0
COLLISION_RADIUS = 3.0  # per vessel; contact when centers within twice this
CLOSE_VESSEL_THRESHOLD = 10.0
NEARBY_TRASH_RADIUS = 25.0
GRID_RES = 25
GRID_CELL = 2.0  # meters per cell
GRID_CELL_CAP = 4  # pebbles per cell that saturate the observation

BORDER_REWARD = -100.0
VESSEL_COLLISION_REWARD = -100.0
CLOSE_VESSEL_REWARD = 1.0
TRASH_CONTACT_REWARD = -1.0  # magnitude per calculation subsection: -100
LOWEST_COUNT_SCALE = 0.01

THROTTLE_IDLE, THROTTLE_ACCELERATE = 0, 1
STEER_NONE, STEER_RIGHT, STEER_LEFT = 0, 1, 2


@dataclass
class VesselState:
    position: np.ndarray  # (2,)
    heading: np.ndarray  # (2,) unit
    speed: float = 0.0
    collected_count: int = 0
    nearby_trash_old: int = 0


def _rotate(vec: np.ndarray, degrees: float) -> np.ndarray:
    rad = np.deg2rad(degrees)
    c, s = np.cos(rad), np.sin(rad)
    out = np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])
    return out / np.linalg.norm(out)


def move_vessel(vessel: VesselState, throttle: int, steer: int) -> VesselState:
    """Advance kinematics only (no collection): turn, decay+accelerate, translate."""
    if throttle not in (THROTTLE_IDLE, THROTTLE_ACCELERATE):
        raise ActionError(f"throttle {throttle} not in {{0, 1}}")
    if steer not in (STEER_NONE, STEER_RIGHT, STEER_LEFT):
        raise ActionError(f"steer {steer} not in {{0, 1, 2}}")
    heading = vessel.heading
    if steer == STEER_RIGHT:
        heading = _rotate(heading, -TURN_RATE_DEG)
    elif steer == STEER_LEFT:
        heading = _rotate(heading, TURN_RATE_DEG)
    speed = SPEED_DECAY * vessel.speed + (ACCELERATION if throttle == THROTTLE_ACCELERATE else 0.0)
    position = vessel.position + speed * heading
    return VesselState(position, heading, speed, vessel.collected_count, vessel.nearby_trash_old)


def lowest_count_reward(counts: np.ndarray) -> float:
    """Every agent earns the fleet's minimum collected count, scaled by 0.01."""
    return float(np.min(counts)) * LOWEST_COUNT_SCALE


def nearby_trash_delta(current: int, old: int) -> tuple[float, int]:
    """Positive population delta; the running count updates unconditionally."""
    return float(max(0, current - old)), current


def build_trash_grid(position: np.ndarray, heading: np.ndarray, pebbles: np.ndarray) -> np.ndarray:
    """Vessel-centered, heading-aligned 25x25 occupancy grid in [0, 1]."""
    if len(pebbles) == 0:
        return np.zeros((GRID_RES, GRID_RES))
    counts = kernels.raster_counts(
        pebbles[:, 0],
        pebbles[:, 1],
        float(position[0]),
        float(position[1]),
        float(heading[0]),
        float(heading[1]),
        GRID_RES,
        GRID_CELL,
    )
    return np.minimum(counts / GRID_CELL_CAP, 1.0)


class OceanCleanupEnv(MultiAgentEnv):
    ENV_ID = "opc"
    METRIC_NAME = "local_reward"

    def _build_spec(self, config: EnvConfig) -> SpaceSpec:
        return SpaceSpec(
            vector_len=6,
            vector_stacks=2,
            visual_dims=(GRID_RES, GRID_RES, 1),
            visual_stacks=2,
            continuous_actions=0,
            discrete_branches=(2, 3),
            agent_count=3,
            episode_length=5000,
        )

    def _reset_world(self):
        self.pebbles = scatter_trash(self.seed, HALF_EXTENT)
        self.collected = np.zeros(len(self.pebbles), dtype=bool)
        self.vessels = [self._spawn_vessel(self.world_rng) for _ in range(3)]
        self._was_in_contact = np.zeros((3, 3), dtype=bool)
        self._last_collect = np.zeros(3)
        return self._frames()

    def _spawn_vessel(self, rng: np.random.Generator) -> VesselState:
        position = rng.uniform(-0.5 * HALF_EXTENT, 0.5 * HALF_EXTENT, size=2)
        angle = rng.uniform(-np.pi, np.pi)
        return VesselState(position=position, heading=np.array([np.cos(angle), np.sin(angle)]))

    def _live_pebbles(self) -> np.ndarray:
        return self.pebbles[~self.collected]

    def _frames(self) -> tuple[np.ndarray, np.ndarray]:
        live = self._live_pebbles()
        rows = []
        grids = []
        for i, v in enumerate(self.vessels):
            others = [w for j, w in enumerate(self.vessels) if j != i]
            nearest = min(others, key=lambda w: np.linalg.norm(w.position - v.position))
            rows.append(
                [
                    v.position[0] / HALF_EXTENT,
                    v.position[1] / HALF_EXTENT,
                    v.heading[0],
                    v.heading[1],
                    nearest.position[0] / HALF_EXTENT,
                    nearest.position[1] / HALF_EXTENT,
                ]
            )
            grids.append(build_trash_grid(v.position, v.heading, live)[None, :, :])
        return np.asarray(rows, dtype=np.float64), np.asarray(grids, dtype=np.float64)

    def _step_world(self, actions: Actions):
        n = self.spec.agent_count
        breakdowns = [dict() for _ in range(n)]
        dones = np.zeros(n, dtype=bool)

        for i in range(n):
            self.vessels[i] = move_vessel(
                self.vessels[i], int(actions.discrete[i, 0]), int(actions.discrete[i, 1])
            )

        # collection resolves in ascending agent order: a pebble two hulls
        # touch the same tick goes to the lower id
        collect_counts = np.zeros(n, dtype=int)
        for i, v in enumerate(self.vessels):
            live_idx = np.flatnonzero(~self.collected)
            if len(live_idx):
                d = np.linalg.norm(self.pebbles[live_idx] - v.position, axis=1)
                hit = live_idx[d <= COLLECTION_RADIUS]
                self.collected[hit] = True
                collect_counts[i] = len(hit)
                v.collected_count += len(hit)
        self._last_collect = collect_counts.astype(float)

        positions = np.asarray([v.position for v in self.vessels])
        contact = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                contact[i, j] = contact[j, i] = (
                    np.linalg.norm(positions[i] - positions[j]) <= 2 * COLLISION_RADIUS
                )
        new_contact = contact & ~self._was_in_contact
        self._was_in_contact = contact

        counts = np.asarray([v.collected_count for v in self.vessels])
        shared_lowest = lowest_count_reward(counts)

        for i, v in enumerate(self.vessels):
            b = breakdowns[i]
            b["collect_trash"] = float(collect_counts[i])
            b["collide_with_trash"] = TRASH_CONTACT_REWARD * collect_counts[i]
            b["lowest_trash_count"] = shared_lowest
            b["vessel_collision"] = VESSEL_COLLISION_REWARD if new_contact[i].any() else 0.0

            others = np.delete(positions, i, axis=0)
            nearest_d = float(np.min(np.linalg.norm(others - v.position, axis=1)))
            b["close_to_vessel"] = CLOSE_VESSEL_REWARD if nearest_d <= CLOSE_VESSEL_THRESHOLD else 0.0

            live = self._live_pebbles()
            ntc_current = (
                int(np.sum(np.linalg.norm(live - v.position, axis=1) <= NEARBY_TRASH_RADIUS))
                if len(live)
                else 0
            )
            delta, v.nearby_trash_old = nearby_trash_delta(ntc_current, v.nearby_trash_old)
            b["nearby_trash_delta"] = delta

            crossed = abs(v.position[0]) > HALF_EXTENT or abs(v.position[1]) > HALF_EXTENT
            b["crossed_border"] = BORDER_REWARD if crossed else 0.0
            if crossed:
                dones[i] = True
                self.vessels[i] = self._spawn_vessel(self.dyn_rng)

        vec, vis = self._frames()
        metrics = {
            "local_reward": collect_counts.astype(float).tolist(),
            "collected_total": counts.tolist(),
        }
        return vec, vis, breakdowns, dones, metrics

    def metric(self) -> float:
        return float(self._last_collect.mean())

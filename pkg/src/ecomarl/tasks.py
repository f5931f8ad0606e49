"""Per-environment task reward-scale matrices and final reward assembly.

The matrices are embedded as data and dumped verbatim by the CLI so every
cell can be audited at a glance. Entries are multipliers applied to the
base reward components an environment reports each step; 0 disables a
component for that task. Two special rules exist beyond plain scaling:

* dbr task 7 pays the pick-up component as a passthrough of the furthest
  distance explored this episode (the "0-200" entry);
* dbr task 2 additionally activates the group-up base component, which
  has no row of its own in the matrix.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

import numpy as np

from ecomarl.core.errors import ConfigurationError
from ecomarl.core.spaces import ENV_IDS, TASK_COUNTS

PASSTHROUGH = "0-200"

COMPONENTS: dict[str, tuple[str, ...]] = {
    "wfc": ("generate_energy", "avoid_damage"),
    "wrm": ("tower_performance", "neighbourhood_performance", "collective_performance"),
    "opc": (
        "collect_trash",
        "lowest_trash_count",
        "crossed_border",
        "vessel_collision",
        "close_to_vessel",
        "nearby_trash_delta",
        "collide_with_trash",
    ),
    "dbr": (
        "drop_seed",
        "deplete_energy_holding_seed",
        "deplete_energy_no_seed",
        "pick_up_seed",
        "incremental_running_back",
        "high_fertility_delta",
        "high_landscape_delta",
        "far_distance_delta",
        "find_close_tree",
    ),
    "aws": (
        "crossed_border",
        "pick_up_water",
        "fire_out",
        "too_close_to_village",
        "time_step_burning",
        "find_fire",
        "find_village",
        "extinguishing_tree",
        "preparing_tree",
    ),
}

ROW_LABELS: dict[str, tuple[str, ...]] = {
    "wfc": ("1. Generate Energy", "2. Avoid Damage"),
    "wrm": (
        "1. Watch Tower Performance",
        "2. Neighbourhood Performance",
        "3. Collective Performance",
    ),
    "opc": (
        "1. Collect Trash",
        "2. Global Lowest Trash Collected",
        "3. Crossed Border",
        "4. Collided with Other Vessel",
        "5. Close to Other Vessel",
        "6. Nearby Trash Count Delta",
        "7. Collide with Trash",
    ),
    "dbr": (
        "1. Drop Seed",
        "2. Deplete Energy Holding Seed",
        "3. Deplete Energy No Seed",
        "4. Pick-up Seed",
        "5. Incremental Running Back",
        "6. High Fertility Location Delta",
        "7. High Landscape Point Delta",
        "8. Far Distance Explored Delta",
        "9. Find Close Tree",
    ),
    "aws": (
        "1. Crossed Border",
        "2. Pick-up Water",
        "3. Fire Out",
        "4. Too Close to Village",
        "5. Time Step Burning",
        "6. Find Fire",
        "7. Find Village",
        "8. Extinguishing Tree",
        "9. Preparing Tree",
    ),
}

TASK_NAMES: dict[str, tuple[str, ...]] = {
    "wfc": ("Generate Energy", "Avoid Damage"),
    "wrm": ("Distribute Resources", "Keep All", "Distribute All"),
    "opc": ("Plastic Collection", "Find Highest Polluted Area", "Group Up", "Avoid Plastic"),
    "dbr": (
        "Maximize Planted Tree Count",
        "Find Closest Tree",
        "Group Up",
        "Pick Up Seed",
        "Drop Seed",
        "Find Highest Potential Area",
        "Find Highest Terrain",
        "Explore Furthest",
    ),
    "aws": (
        "Minimize Fire and Protect Village",
        "Maximize Extinguishing Trees",
        "Maximize Preparing Trees",
        "Minimize Time Fire Burning",
        "Protect Village",
        "Pick Up Water",
        "Drop Water",
        "Find Fire",
        "Find Village",
    ),
}

# rows follow COMPONENTS order, columns the task index
SCALE_MATRIX: dict[str, list[list[Any]]] = {
    "wfc": [
        [1, 0],
        [0, 1],
    ],
    "wrm": [
        [1, 10, 1],
        [1, 1, 10],
        [1, 1, 1],
    ],
    "opc": [
        [1, 1, 1, -1],
        [1, 1, 1, 0],
        [1, 1, 1, 1],
        [1, 1, 1, 1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    "dbr": [
        [1, 0, 0, 0, 1, 0, 0, 0],
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 0, 100, 1, 1, 0, 0, PASSTHROUGH],
        [1, 0, 0, 1, 1, 0, 0, 1],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 1, 0, 0, 0, 0, 0, 0],
    ],
    "aws": [
        [1, 1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 100, 1, 0, 0],
        [1, 1, 1, 1, 1, 0, 0, 0, 0],
        [1, 1, 1, 1, 10, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [1, 10, 1, 1, 1, 1, 1, 0, 0],
        [1, 1, 5, 1, 1, 1, 1, 0, 0],
    ],
}

# the aws table groups its last two rows under a "Drop Water" heading
_AWS_SEPARATOR_BEFORE_ROW = 7

# extra breakdown keys that are not matrix rows
_EXTRA_KEYS = {
    "dbr": {"group_up", "_pickup_passthrough"},
    "wfc": set(),
    "wrm": set(),
    "opc": set(),
    "aws": set(),
}

_DBR_GROUP_UP_TASK = 2


def scale_value(env_id: str, component: str, task: int) -> Any:
    comps = COMPONENTS[env_id]
    if component not in comps:
        raise ConfigurationError(f"unknown reward component {component!r} for {env_id}")
    if not 0 <= task < TASK_COUNTS[env_id]:
        raise ConfigurationError(f"task {task} out of range for {env_id}")
    return SCALE_MATRIX[env_id][comps.index(component)][task]


def scaled_reward(env_id: str, task: int, breakdown: Mapping[str, float]) -> float:
    """Task-scaled scalar reward for one agent's component breakdown."""
    if env_id not in ENV_IDS:
        raise ConfigurationError(f"unknown env {env_id!r}")
    if not 0 <= task < TASK_COUNTS[env_id]:
        raise ConfigurationError(f"task {task} out of range for {env_id}")
    comps = COMPONENTS[env_id]
    allowed = set(comps) | _EXTRA_KEYS[env_id]
    for key in breakdown:
        if key not in allowed:
            raise ConfigurationError(f"unknown reward component {key!r} for {env_id}")
    total = 0.0
    for i, name in enumerate(comps):
        value = breakdown.get(name, 0.0)
        scale = SCALE_MATRIX[env_id][i][task]
        if scale == PASSTHROUGH:
            # pick-up event pays the furthest distance explored instead
            total += value * breakdown.get("_pickup_passthrough", 0.0)
        elif scale != 0:
            total += value * scale
    if env_id == "dbr" and task == _DBR_GROUP_UP_TASK:
        total += breakdown.get("group_up", 0.0)
    return total


def scaled_rewards(
    env_id: str, task: int, breakdowns: Sequence[Mapping[str, float]]
) -> np.ndarray:
    return np.asarray([scaled_reward(env_id, task, b) for b in breakdowns], dtype=np.float64)


def format_scale_table(env_id: str) -> str:
    """Aligned text rendering of one environment's reward-scale matrix."""
    if env_id not in ENV_IDS:
        raise ConfigurationError(f"unknown env {env_id!r}")
    labels = ROW_LABELS[env_id]
    matrix = SCALE_MATRIX[env_id]
    n_tasks = TASK_COUNTS[env_id]
    label_w = max(len(s) for s in labels + ("Reward",))
    headers = [f"{i + 1}." for i in range(n_tasks)]
    cells = [[str(v) for v in row] for row in matrix]
    col_w = [
        max(len(headers[t]), max(len(cells[r][t]) for r in range(len(matrix))))
        for t in range(n_tasks)
    ]
    lines = [f"Main- and Sub-Task Reward Scale: {env_id}"]
    lines.append(
        "  ".join(["Reward".ljust(label_w)] + [headers[t].rjust(col_w[t]) for t in range(n_tasks)])
    )
    for r, label in enumerate(labels):
        if env_id == "aws" and r == _AWS_SEPARATOR_BEFORE_ROW:
            lines.append("Drop Water")
        lines.append(
            "  ".join([label.ljust(label_w)] + [cells[r][t].rjust(col_w[t]) for t in range(n_tasks)])
        )
    return "\n".join(lines) + "\n"

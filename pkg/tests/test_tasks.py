"""Task scale matrices: dimensions, spot cells, assembly rules."""

import numpy as np
import pytest

from ecomarl import tasks
from ecomarl.core.errors import ConfigurationError


class TestMatrixData:
    def test_dimensions(self):
        expected = {"wfc": (2, 2), "wrm": (3, 3), "opc": (7, 4), "dbr": (9, 8), "aws": (9, 9)}
        for env_id, (rows, cols) in expected.items():
            matrix = tasks.SCALE_MATRIX[env_id]
            assert len(matrix) == rows
            assert all(len(row) == cols for row in matrix)
            assert len(tasks.COMPONENTS[env_id]) == rows
            assert len(tasks.TASK_NAMES[env_id]) == cols

    def test_spot_cells(self):
        assert tasks.scale_value("wfc", "generate_energy", 1) == 0
        assert tasks.scale_value("wfc", "avoid_damage", 1) == 1
        assert tasks.scale_value("wrm", "tower_performance", 1) == 10
        assert tasks.scale_value("wrm", "neighbourhood_performance", 2) == 10
        assert tasks.scale_value("opc", "collect_trash", 3) == -1
        assert tasks.scale_value("opc", "nearby_trash_delta", 1) == 1
        assert tasks.scale_value("dbr", "pick_up_seed", 2) == 100
        assert tasks.scale_value("dbr", "pick_up_seed", 7) == tasks.PASSTHROUGH
        assert tasks.scale_value("aws", "extinguishing_tree", 1) == 10
        assert tasks.scale_value("aws", "preparing_tree", 2) == 5
        assert tasks.scale_value("aws", "pick_up_water", 5) == 100

    def test_main_task_columns(self):
        # task 0 column of each matrix matches the main-task pattern
        assert [row[0] for row in tasks.SCALE_MATRIX["wfc"]] == [1, 0]
        assert [row[0] for row in tasks.SCALE_MATRIX["wrm"]] == [1, 1, 1]
        assert [row[0] for row in tasks.SCALE_MATRIX["opc"]] == [1, 1, 1, 1, 0, 0, 0]
        assert [row[0] for row in tasks.SCALE_MATRIX["dbr"]] == [1, 1, 1, 1, 1, 0, 0, 0, 0]
        assert [row[0] for row in tasks.SCALE_MATRIX["aws"]] == [1, 1, 1, 1, 0, 0, 0, 1, 1]


class TestScaledReward:
    def test_aws_extinguish_scaling(self):
        # one extinguished tree (base 5) under the maximize-extinguishing task
        breakdown = {"extinguishing_tree": 5.0}
        assert tasks.scaled_reward("aws", 1, breakdown) == pytest.approx(50.0)

    def test_wfc_avoid_damage_task_drops_energy(self):
        breakdown = {"generate_energy": 0.7, "avoid_damage": 0.2}
        assert tasks.scaled_reward("wfc", 1, breakdown) == pytest.approx(0.2)

    def test_zero_breakdown_zero_everywhere(self):
        for env_id, comps in tasks.COMPONENTS.items():
            zero = {name: 0.0 for name in comps}
            for task in range(len(tasks.TASK_NAMES[env_id])):
                assert tasks.scaled_reward(env_id, task, zero) == 0.0

    def test_linearity(self, rng):
        for env_id, comps in tasks.COMPONENTS.items():
            if env_id == "dbr":
                continue  # passthrough entry is a product of two breakdown values
            for _ in range(50):
                a = {name: float(v) for name, v in zip(comps, rng.normal(size=len(comps)))}
                b = {name: float(v) for name, v in zip(comps, rng.normal(size=len(comps)))}
                task = int(rng.integers(0, len(tasks.TASK_NAMES[env_id])))
                lhs = tasks.scaled_reward(env_id, task, {k: a[k] + b[k] for k in a})
                rhs = tasks.scaled_reward(env_id, task, a) + tasks.scaled_reward(env_id, task, b)
                assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_unknown_component_rejected(self):
        with pytest.raises(ConfigurationError):
            tasks.scaled_reward("wfc", 0, {"not_a_component": 1.0})

    def test_dbr_passthrough_pays_distance(self):
        breakdown = {"pick_up_seed": 1.0, "_pickup_passthrough": 137.5}
        assert tasks.scaled_reward("dbr", 7, breakdown) == pytest.approx(137.5)
        # ...and the plain tasks pay the scale instead
        assert tasks.scaled_reward("dbr", 2, breakdown) == pytest.approx(100.0)
        assert tasks.scaled_reward("dbr", 0, breakdown) == pytest.approx(1.0)

    def test_dbr_group_up_only_on_task_2(self):
        breakdown = {"group_up": 10.0}
        assert tasks.scaled_reward("dbr", 2, breakdown) == pytest.approx(10.0)
        for task in (0, 1, 3, 4, 5, 6, 7):
            assert tasks.scaled_reward("dbr", task, breakdown) == 0.0


class TestDump:
    def test_tables_match_committed_artifact(self):
        from pathlib import Path

        artifact = Path(__file__).parent / "data" / "task_scales.txt"
        rendered = "\n".join(tasks.format_scale_table(env) for env in tasks.SCALE_MATRIX)
        assert rendered == artifact.read_text()

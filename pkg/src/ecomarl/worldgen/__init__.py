from ecomarl.worldgen.fields import FIELD_KINDS, ScalarField, WindField, weather_fields
from ecomarl.worldgen.layouts import ARENA_HALF_EXTENT, PATTERN_NAMES, LayoutPattern, layout_turbines
from ecomarl.worldgen.scatter import scatter_forest, scatter_trash, trash_cluster_centers
from ecomarl.worldgen.terrain import MAX_HEIGHT, TerrainGrid, generate_terrain
from ecomarl.worldgen.export import write_matrix

__all__ = [
    "FIELD_KINDS",
    "ScalarField",
    "WindField",
    "weather_fields",
    "ARENA_HALF_EXTENT",
    "PATTERN_NAMES",
    "LayoutPattern",
    "layout_turbines",
    "scatter_forest",
    "scatter_trash",
    "trash_cluster_centers",
    "MAX_HEIGHT",
    "TerrainGrid",
    "generate_terrain",
    "write_matrix",
]

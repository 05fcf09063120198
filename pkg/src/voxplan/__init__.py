"""Hierarchical any-angle shortest-path planning on 3D occupancy grids."""

from .geometry import (
    Aabb,
    GridVertex,
    SubvolumeAddress,
    WorldPoint,
    aabb_of,
    are_adjacent,
    dist_point_box,
    euclidean,
    farthest_dist_point_box,
    octile3,
)
from .occupancy import (
    Occupancy,
    OccupancyOctree,
    ObstacleSpec,
    generate_clutter_map,
    inflate,
    line_of_sight,
)
from .mapio import import_voxel_list, load_map, save_map
from .planner import PlannerConfig, QuerySpec, plan
from .baselines import (
    plan_astar,
    plan_lazy_theta,
    plan_octree_leaf_astar,
    plan_theta,
)
from .results import PlanResult, PlanStatus, SearchStats
from .bench import (
    BenchRecord,
    MapSpec,
    PlannerSpec,
    SuiteConfig,
    load_suite_config,
    run_suite,
    sample_queries,
    validate_path,
    write_csv,
)

__all__ = [
    "Aabb",
    "GridVertex",
    "SubvolumeAddress",
    "WorldPoint",
    "aabb_of",
    "are_adjacent",
    "dist_point_box",
    "euclidean",
    "farthest_dist_point_box",
    "octile3",
    "Occupancy",
    "OccupancyOctree",
    "ObstacleSpec",
    "generate_clutter_map",
    "inflate",
    "line_of_sight",
    "import_voxel_list",
    "load_map",
    "save_map",
    "PlannerConfig",
    "QuerySpec",
    "plan",
    "plan_astar",
    "plan_theta",
    "plan_lazy_theta",
    "plan_octree_leaf_astar",
    "PlanResult",
    "PlanStatus",
    "SearchStats",
    "BenchRecord",
    "MapSpec",
    "PlannerSpec",
    "SuiteConfig",
    "load_suite_config",
    "run_suite",
    "sample_queries",
    "validate_path",
    "write_csv",
]

__version__ = "0.1.0"

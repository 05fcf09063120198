import numpy as np
import pytest

from voxplan import OccupancyOctree, PlannerConfig, QuerySpec, WorldPoint, plan
from voxplan.baselines import plan_astar, plan_lazy_theta, plan_octree_leaf_astar, plan_theta


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure steady state."""
    m = OccupancyOctree.from_extent(0.8, 0.1, block_height=3)
    q = QuerySpec(WorldPoint(0.05, 0.05, 0.05), WorldPoint(0.75, 0.75, 0.75))
    plan(m, PlannerConfig(), q)
    plan(m, PlannerConfig(lazy=True), q)
    plan_astar(m, q)
    plan_theta(m, q)
    plan_lazy_theta(m, q)
    plan_octree_leaf_astar(m, q)


def make_map(dense: np.ndarray, resolution: float = 0.1,
             block_height: int = 6) -> OccupancyOctree:
    from voxplan.geometry import Aabb, GridVertex
    dense = np.asarray(dense, dtype=np.uint8)
    bounds = Aabb(GridVertex(0, 0, 0),
                  GridVertex(dense.shape[0] - 1, dense.shape[1] - 1, dense.shape[2] - 1))
    return OccupancyOctree.from_dense(dense, resolution, WorldPoint(0.0, 0.0, 0.0),
                                      bounds, block_height)

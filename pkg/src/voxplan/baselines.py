"""Fixed-resolution baseline planners: A*, Theta*, LazyTheta*, and A* over
octree leaf centers.

All planners share the supercover edge semantics of the raycaster: a
26-connectivity move is valid iff every cell touched by the center-to-center
segment is free, so diagonal moves never cut corners and every returned
segment passes the independent path validator.
"""

from __future__ import annotations

import math
import time
from heapq import heappop, heappush

import numpy as np
from numba import njit

from .geometry import GridVertex, SubvolumeAddress, aabb_of
from .occupancy import FREE, OccupancyOctree
from .planner import QuerySpec
from .raycast import edge_blocked, supercover_blocked
from .results import PlanResult, PlanStatus, SearchStats, path_length

# 26-connectivity offsets in lexicographic order (deterministic expansion).
NEIGHBOR_OFFSETS = tuple(sorted(
    (dx, dy, dz)
    for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)))
_OFFSETS_ARR = np.array(NEIGHBOR_OFFSETS, dtype=np.int64)
_STEP_COSTS = np.sqrt((_OFFSETS_ARR ** 2).sum(axis=1)).astype(np.float64)

DEFAULT_LOS_CAP_CELLS = 512


@njit(cache=True)
def _octile_cells(dx: int, dy: int, dz: int) -> float:
    a = abs(dx)
    b = abs(dy)
    c = abs(dz)
    if a < b:
        a, b = b, a
    if b < c:
        b, c = c, b
    if a < b:
        a, b = b, a
    return (a - b) + math.sqrt(2.0) * (b - c) + math.sqrt(3.0) * c


@njit(cache=True)
def _astar_kernel(occ, sx, sy, sz, gx, gy, gz, res, offsets, costs, use_octile):
    nx, ny, nz = occ.shape
    n = nx * ny * nz
    g = np.full(n, np.inf)
    pred = np.full(n, np.int64(-1), dtype=np.int64)
    closed = np.zeros(n, dtype=np.uint8)
    start = (sx * ny + sy) * nz + sz
    goal = (gx * ny + gy) * nz + gz
    g[start] = 0.0
    pred[start] = start
    heap = [(0.0, 0.0, np.int64(start))]
    expansions = 0
    pushes = 1
    found = False
    while len(heap) > 0:
        _f, _ng, cur = heappop(heap)
        if closed[cur]:
            continue
        closed[cur] = 1
        if cur == goal:
            found = True
            break
        expansions += 1
        x = cur // (ny * nz)
        rem = cur % (ny * nz)
        y = rem // nz
        z = rem % nz
        gc = g[cur]
        for k in range(offsets.shape[0]):
            dx = offsets[k, 0]
            dy = offsets[k, 1]
            dz = offsets[k, 2]
            if edge_blocked(occ, x, y, z, dx, dy, dz):
                continue
            nb = ((x + dx) * ny + (y + dy)) * nz + (z + dz)
            if closed[nb]:
                continue
            ng = gc + res * costs[k]
            if ng < g[nb] - 1e-12:
                g[nb] = ng
                pred[nb] = cur
                if use_octile:
                    h = res * _octile_cells(gx - (x + dx), gy - (y + dy), gz - (z + dz))
                else:
                    h = res * math.sqrt(float((gx - x - dx) ** 2 + (gy - y - dy) ** 2
                                              + (gz - z - dz) ** 2))
                heappush(heap, (ng + h, -ng, np.int64(nb)))
                pushes += 1
    return found, g, pred, expansions, pushes


def _snap(omap: OccupancyOctree, query: QuerySpec):
    start_v = omap.vertex_of(query.start)
    goal_v = omap.vertex_of(query.goal)
    if omap.get_cell(start_v) != FREE:
        return start_v, goal_v, PlanStatus.START_BLOCKED
    if omap.get_cell(goal_v) != FREE:
        return start_v, goal_v, PlanStatus.GOAL_BLOCKED
    return start_v, goal_v, None


def plan_astar(omap: OccupancyOctree, query: QuerySpec) -> PlanResult:
    """Optimal 26-connected grid search with the octile-distance heuristic."""
    t0 = time.perf_counter()
    stats = SearchStats()
    start_v, goal_v, blocked = _snap(omap, query)
    if blocked is not None:
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(blocked, stats=stats)
    dense = omap.dense()
    bm = omap.bounds.min
    s = (start_v.x - bm.x, start_v.y - bm.y, start_v.z - bm.z)
    t = (goal_v.x - bm.x, goal_v.y - bm.y, goal_v.z - bm.z)
    found, g, pred, expansions, pushes = _astar_kernel(
        dense, s[0], s[1], s[2], t[0], t[1], t[2], omap.resolution,
        _OFFSETS_ARR, _STEP_COSTS, True)
    stats.expansions = int(expansions)
    stats.queue_pushes = int(pushes)
    stats.wall_time = time.perf_counter() - t0
    if not found:
        return PlanResult(PlanStatus.NO_PATH_FOUND, stats=stats)
    ny, nz = dense.shape[1], dense.shape[2]
    flat = (t[0] * ny + t[1]) * nz + t[2]
    start_flat = (s[0] * ny + s[1]) * nz + s[2]
    chain = []
    while True:
        chain.append(flat)
        if flat == start_flat:
            break
        flat = int(pred[flat])
    waypoints = []
    for f in reversed(chain):
        x = f // (ny * nz)
        rem = f % (ny * nz)
        waypoints.append(omap.world_of(GridVertex(x + bm.x, rem // nz + bm.y,
                                                  rem % nz + bm.z)))
    result = PlanResult(PlanStatus.PATH_FOUND, waypoints, path_length(waypoints), stats)
    return result


class _VertexSearch:
    """Shared machinery for the Theta* family (Python loop, jitted raycasts)."""

    def __init__(self, omap: OccupancyOctree, query: QuerySpec,
                 los_max_dist: float | None, lazy: bool):
        self.omap = omap
        self.res = omap.resolution
        self.dense = omap.dense()
        self.bm = omap.bounds.min
        cap = los_max_dist if los_max_dist is not None \
            else DEFAULT_LOS_CAP_CELLS * self.res
        self.cap_cells = cap / self.res
        self.lazy = lazy
        self.query = query
        self.stats = SearchStats()

    def _los(self, a: tuple, b: tuple) -> bool:
        self.stats.los_checks += 1
        if math.dist(a, b) > self.cap_cells:
            return False
        return not supercover_blocked(self.dense,
                                      a[0] + 0.5, a[1] + 0.5, a[2] + 0.5,
                                      b[0] + 0.5, b[1] + 0.5, b[2] + 0.5)

    def run(self) -> PlanResult:
        t0 = time.perf_counter()
        omap = self.omap
        start_v, goal_v, blocked = _snap(omap, self.query)
        if blocked is not None:
            self.stats.wall_time = time.perf_counter() - t0
            return PlanResult(blocked, stats=self.stats)
        dense = self.dense
        bm = self.bm
        ny, nz = dense.shape[1], dense.shape[2]
        nynz = ny * nz
        start = ((start_v.x - bm.x) * ny + (start_v.y - bm.y)) * nz + (start_v.z - bm.z)
        goal = ((goal_v.x - bm.x) * ny + (goal_v.y - bm.y)) * nz + (goal_v.z - bm.z)
        gv = (goal_v.x - bm.x, goal_v.y - bm.y, goal_v.z - bm.z)
        res = self.res
        occ = dense
        stats = self.stats
        lazy = self.lazy

        g: dict[int, float] = {start: 0.0}
        pred: dict[int, int] = {start: start}
        closed: set[int] = set()
        heap = [(res * math.dist((start // nynz, start % nynz // nz, start % nz), gv),
                 0.0, start)]
        stats.queue_pushes += 1
        offsets = NEIGHBOR_OFFSETS
        costs = [math.sqrt(dx * dx + dy * dy + dz * dz) for dx, dy, dz in offsets]
        found = False
        while heap:
            _f, _ng, cur = heappop(heap)
            if cur in closed:
                continue
            x = cur // nynz
            rem = cur % nynz
            y = rem // nz
            z = rem % nz
            if lazy and pred[cur] != cur:
                pf = pred[cur]
                pc = (pf // nynz, pf % nynz // nz, pf % nz)
                if not self._los(pc, (x, y, z)):
                    # Assumed edge is blocked: reconnect through the best
                    # closed direct neighbor (always exists: the neighbor
                    # that created this record is closed and edge-valid).
                    best = None
                    for k, (dx, dy, dz) in enumerate(offsets):
                        nb = cur + (dx * ny + dy) * nz + dz
                        if nb in closed and not edge_blocked(occ, x, y, z, dx, dy, dz):
                            cand = g[nb] + res * costs[k]
                            if best is None or cand < best[0] or \
                                    (cand == best[0] and nb < best[1]):
                                best = (cand, nb)
                    if best is None:
                        raise AssertionError("lazy repair found no closed neighbor")
                    g[cur], pred[cur] = best[0], best[1]
            closed.add(cur)
            if cur == goal:
                found = True
                break
            stats.expansions += 1
            gc = g[cur]
            pf = pred[cur]
            pc = (pf // nynz, pf % nynz // nz, pf % nz)
            gp = g[pf]
            for k, (dx, dy, dz) in enumerate(offsets):
                if edge_blocked(occ, x, y, z, dx, dy, dz):
                    continue
                nb = cur + (dx * ny + dy) * nz + dz
                if nb in closed:
                    continue
                nc = (x + dx, y + dy, z + dz)
                if lazy or self._los(pc, nc):
                    cand_g = gp + res * math.dist(pc, nc)
                    cand_pred = pf
                else:
                    cand_g = gc + res * costs[k]
                    cand_pred = cur
                if cand_g < g.get(nb, math.inf) - 1e-12:
                    g[nb] = cand_g
                    pred[nb] = cand_pred
                    heappush(heap, (cand_g + res * math.dist(nc, gv), -cand_g, nb))
                    stats.queue_pushes += 1
        stats.wall_time = time.perf_counter() - t0
        if not found:
            return PlanResult(PlanStatus.NO_PATH_FOUND, stats=self.stats)
        chain = []
        cur = goal
        while True:
            chain.append(cur)
            if cur == start:
                break
            cur = pred[cur]
        waypoints = []
        for f in reversed(chain):
            waypoints.append(omap.world_of(GridVertex(f // nynz + bm.x,
                                                      f % nynz // nz + bm.y,
                                                      f % nz + bm.z)))
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(PlanStatus.PATH_FOUND, waypoints, path_length(waypoints),
                          self.stats)


def plan_theta(omap: OccupancyOctree, query: QuerySpec,
               los_max_dist: float | None = None) -> PlanResult:
    """Any-angle search: connect each vertex to its neighbor's predecessor
    whenever that predecessor is in line of sight."""
    return _VertexSearch(omap, query, los_max_dist, lazy=False).run()


def plan_lazy_theta(omap: OccupancyOctree, query: QuerySpec,
                    los_max_dist: float | None = None) -> PlanResult:
    """Theta* with visibility assumed at update time and verified (and
    repaired through the best closed neighbor) at expansion time."""
    return _VertexSearch(omap, query, los_max_dist, lazy=True).run()


def plan_octree_leaf_astar(omap: OccupancyOctree, query: QuerySpec) -> PlanResult:
    """A* over the free occupancy-octree leaves, connecting leaf centers.

    Deliberately performs no any-angle shortcutting, so the detours caused
    by routing through coarse leaf centers remain observable.  Edges are
    still supercover-validated so returned paths are collision-free.
    """
    t0 = time.perf_counter()
    stats = SearchStats()
    start_v, goal_v, blocked = _snap(omap, query)
    if blocked is not None:
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(blocked, stats=stats)
    res = omap.resolution
    dense = omap.dense()
    bm = omap.bounds.min
    bh = omap.block_height

    nodes: dict[SubvolumeAddress, bool] = {}
    for addr, occ in omap.leaf_iter():
        if occ != FREE:
            continue
        nodes[addr] = True
        up = addr
        while up.height < bh:
            up = up.parent()
            if nodes.get(up) is False:
                break
            nodes[up] = False

    def leaf_containing(v: GridVertex) -> SubvolumeAddress | None:
        addr = SubvolumeAddress(bh, v.x >> bh, v.y >> bh, v.z >> bh)
        while True:
            kind = nodes.get(addr)
            if kind is None:
                return None
            if kind:
                return addr
            hh = addr.height - 1
            addr = SubvolumeAddress(hh, v.x >> hh, v.y >> hh, v.z >> hh)

    start_leaf = leaf_containing(start_v)
    goal_leaf = leaf_containing(goal_v)
    assert start_leaf is not None and goal_leaf is not None
    if start_leaf == goal_leaf:
        # A leaf is a uniformly free box, so the direct segment is valid.
        waypoints = [omap.world_of(start_v), omap.world_of(goal_v)]
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(PlanStatus.PATH_FOUND, waypoints, path_length(waypoints),
                          stats)

    def center_of(addr: SubvolumeAddress) -> GridVertex:
        # Query endpoints stand in for their leaves' centers so the path
        # starts and ends exactly at the query.
        if addr == start_leaf:
            return start_v
        if addr == goal_leaf:
            return goal_v
        return addr.center_vertex()

    def los(a: GridVertex, b: GridVertex) -> bool:
        stats.los_checks += 1
        return not supercover_blocked(dense,
                                      a.x - bm.x + 0.5, a.y - bm.y + 0.5, a.z - bm.z + 0.5,
                                      b.x - bm.x + 0.5, b.y - bm.y + 0.5, b.z - bm.z + 0.5)

    def neighbors(addr: SubvolumeAddress) -> list[SubvolumeAddress]:
        box = aabb_of(addr)
        out: list[SubvolumeAddress] = []

        def adjacent(node: SubvolumeAddress) -> bool:
            h = node.height
            side = 1 << h
            mx = node.cx << h
            my = node.cy << h
            mz = node.cz << h
            return (max(box.min.x, mx) - min(box.max.x, mx + side - 1) <= 1
                    and max(box.min.y, my) - min(box.max.y, my + side - 1) <= 1
                    and max(box.min.z, mz) - min(box.max.z, mz + side - 1) <= 1)

        def collect(node: SubvolumeAddress) -> None:
            kind = nodes.get(node)
            if kind is None or node == addr or not adjacent(node):
                return
            if kind:
                out.append(node)
                return
            for child in node.children():
                collect(child)

        for bx in range((box.min.x - 1) >> bh, ((box.max.x + 1) >> bh) + 1):
            for by in range((box.min.y - 1) >> bh, ((box.max.y + 1) >> bh) + 1):
                for bz in range((box.min.z - 1) >> bh, ((box.max.z + 1) >> bh) + 1):
                    collect(SubvolumeAddress(bh, bx, by, bz))
        return out

    g: dict[SubvolumeAddress, float] = {start_leaf: 0.0}
    pred: dict[SubvolumeAddress, SubvolumeAddress] = {start_leaf: start_leaf}
    closed: set[SubvolumeAddress] = set()
    heap = [(res * math.dist(start_v, goal_v), 0.0, start_leaf)]
    stats.queue_pushes += 1
    found = False
    while heap:
        _f, _ng, cur = heappop(heap)
        if cur in closed:
            continue
        closed.add(cur)
        if cur == goal_leaf:
            found = True
            break
        stats.expansions += 1
        c_cur = center_of(cur)
        gc = g[cur]
        for nb in neighbors(cur):
            if nb in closed:
                continue
            c_nb = center_of(nb)
            ng = gc + res * math.dist(c_cur, c_nb)
            if ng < g.get(nb, math.inf) - 1e-12 and los(c_cur, c_nb):
                g[nb] = ng
                pred[nb] = cur
                heappush(heap, (ng + res * math.dist(c_nb, goal_v), -ng, nb))
                stats.queue_pushes += 1
    stats.wall_time = time.perf_counter() - t0
    if not found:
        return PlanResult(PlanStatus.NO_PATH_FOUND, stats=stats)
    chain = []
    cur = goal_leaf
    while True:
        chain.append(cur)
        if cur == start_leaf:
            break
        cur = pred[cur]
    waypoints = [omap.world_of(center_of(a)) for a in reversed(chain)]
    stats.wall_time = time.perf_counter() - t0
    return PlanResult(PlanStatus.PATH_FOUND, waypoints, path_length(waypoints), stats)

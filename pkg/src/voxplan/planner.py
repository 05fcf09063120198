"""Multi-resolution any-angle planner.

The search expands octree subvolumes best-first on an admissible f-score
lower bound.  Expanding a subvolume offers two candidate predecessors to
every adjacent cost-field leaf: the expanded subvolume's own predecessor
(ray-traced connection) and its center vertex (direct neighbor
connection).  Candidate connections are line-of-sight checked against the
target leaf's center vertex, which is the only vertex of a leaf that can
become a downstream predecessor; leaves whose vertices disagree on the
best predecessor beyond the ``epsilon`` tolerance are split and
re-queued.  The lazy variant defers visibility checks to expansion time
and repairs failed assumptions through the best closed adjacent leaf.

Hot paths treat subvolume addresses as plain ``(height, cx, cy, cz)``
tuples; these hash and compare identically to
:class:`voxplan.geometry.SubvolumeAddress`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from heapq import heappop, heappush

from numba import njit

from .costfield import ABSENT, CLOSED, LEAF, CostField, CostRecord
from .geometry import GridVertex, SubvolumeAddress, WorldPoint
from .occupancy import FREE, OccupancyOctree
from .raycast import supercover_blocked
from .results import PlanResult, PlanStatus, SearchStats, path_length

DEFAULT_EPSILON = 1e-2
DEFAULT_LOS_CAP_CELLS = 512

_NOT_BETTER = 0
_STRICTLY_BETTER = 1
_AMBIGUOUS = 2

_CHILD_OFFSETS = ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1),
                  (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1))


@dataclass(frozen=True)
class QuerySpec:
    start: WorldPoint
    goal: WorldPoint


@dataclass
class PlannerConfig:
    """Settings for the hierarchical planner.

    ``r_init`` is the initialization resolution: obstacle-adjacent free
    vertices are covered by cost-field leaves no larger than this (must be
    a power-of-two multiple of the map resolution; default: map
    resolution).  ``los_max_dist`` caps visibility checks; longer segments
    are treated as not in sight (default: 512 cells).  ``init`` and
    ``refine`` exist for ablations: disabling both makes the cost field
    match the occupancy map's leaves exactly.
    """

    epsilon: float = DEFAULT_EPSILON
    r_init: float | None = None
    lazy: bool = False
    los_max_dist: float | None = None
    init: bool = True
    refine: bool = True

    def validate(self, resolution: float) -> None:
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError("epsilon must be in [0, 1)")
        if self.los_max_dist is not None and self.los_max_dist <= 0:
            raise ValueError("los_max_dist must be positive")
        if self.r_init is not None and self.r_init < resolution - 1e-12:
            raise ValueError("r_init must be at least the map resolution")


def plan(omap: OccupancyOctree, cfg: PlannerConfig, query: QuerySpec) -> PlanResult:
    """Plan on an (already inflated) occupancy map."""
    t0 = time.perf_counter()
    result = _HierarchicalSearch(omap, cfg, query).run()
    result.stats.wall_time = time.perf_counter() - t0
    return result


def compute_f_score(g_pred: float, predecessor: WorldPoint, goal: WorldPoint,
                    hull_lo: WorldPoint, hull_hi: WorldPoint) -> float:
    """Admissible lower bound of ``min over box vertices of g + c + h``.

    ``hull_lo``/``hull_hi`` span the box's vertex centers in world
    coordinates.  The detour ``|p-s| + |s-goal|`` over the hull is
    lower-bounded by combining the per-axis one-dimensional via-box
    distances (valid by Cauchy-Schwarz) with the sum of point-to-box
    distances; exact for single-vertex boxes.
    """
    p, g = predecessor, goal
    m = [abs(p[i] - g[i]) + 2 * max(0.0, hull_lo[i] - max(p[i], g[i]),
                                    min(p[i], g[i]) - hull_hi[i]) for i in range(3)]
    via = math.sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2])
    dp = [max(hull_lo[i] - p[i], 0.0, p[i] - hull_hi[i]) for i in range(3)]
    dg = [max(hull_lo[i] - g[i], 0.0, g[i] - hull_hi[i]) for i in range(3)]
    through = math.sqrt(dp[0] ** 2 + dp[1] ** 2 + dp[2] ** 2) \
        + math.sqrt(dg[0] ** 2 + dg[1] ** 2 + dg[2] ** 2)
    cert = _hull_min_certified(p[0], p[1], p[2], g[0], g[1], g[2],
                               hull_lo[0], hull_lo[1], hull_lo[2],
                               hull_hi[0], hull_hi[1], hull_hi[2])
    return g_pred + max(via, through, cert)


def _center_of(addr) -> tuple[int, int, int]:
    h = addr[0]
    if h == 0:
        return (addr[1], addr[2], addr[3])
    half = 1 << (h - 1)
    return ((addr[1] << h) + half, (addr[2] << h) + half, (addr[3] << h) + half)


@njit(cache=True)
def _classify_nb(ax: int, ay: int, az: int, ag: float,
                 bx: int, by: int, bz: int, bg: float,
                 h: int, cx: int, cy: int, cz: int,
                 eps: float, res: float) -> int:
    """Dominance margin sign via conservative hull bounds (exact at h=0)."""
    lx = cx << h
    ly = cy << h
    lz = cz << h
    if h == 0:
        # Single vertex: both bounds coincide and the test is exact.
        da = math.sqrt(float((ax - lx) ** 2 + (ay - ly) ** 2 + (az - lz) ** 2))
        db = math.sqrt(float((bx - lx) ** 2 + (by - ly) ** 2 + (bz - lz) ** 2))
        m = ag - bg + res * ((1.0 - eps) * da - db)
        if m < 0:
            return 1
        return -1
    s1 = (1 << h) - 1
    hx = lx + s1
    hy = ly + s1
    hz = lz + s1

    dx = max(lx - ax, 0, ax - hx)
    dy = max(ly - ay, 0, ay - hy)
    dz = max(lz - az, 0, az - hz)
    da = math.sqrt(float(dx * dx + dy * dy + dz * dz))
    dx = max(abs(ax - lx), abs(ax - hx))
    dy = max(abs(ay - ly), abs(ay - hy))
    dz = max(abs(az - lz), abs(az - hz))
    fa = math.sqrt(float(dx * dx + dy * dy + dz * dz))
    dx = max(lx - bx, 0, bx - hx)
    dy = max(ly - by, 0, by - hy)
    dz = max(lz - bz, 0, bz - hz)
    db = math.sqrt(float(dx * dx + dy * dy + dz * dz))
    dx = max(abs(bx - lx), abs(bx - hx))
    dy = max(abs(by - ly), abs(by - hy))
    dz = max(abs(bz - lz), abs(bz - hz))
    fb = math.sqrt(float(dx * dx + dy * dy + dz * dz))

    base = ag - bg
    if base + res * ((1.0 - eps) * fa - db) < 0:
        return 1
    if base + res * ((1.0 - eps) * da - fb) >= 0:
        return -1
    return 0


@njit(cache=True)
def _hull_min_certified(px: float, py: float, pz: float,
                        gx: float, gy: float, gz: float,
                        lx: float, ly: float, lz: float,
                        hx: float, hy: float, hz: float) -> float:
    """Certified lower bound of ``min over [l,h] of |p-s| + |s-g|``.

    Projected gradient descent locates a near-minimizer of the convex
    objective; a subgradient inequality at that point then yields a valid
    lower bound regardless of convergence quality.
    """
    sx = min(max(0.5 * (px + gx), lx), hx)
    sy = min(max(0.5 * (py + gy), ly), hy)
    sz = min(max(0.5 * (pz + gz), lz), hz)
    step = (hx - lx) + (hy - ly) + (hz - lz) + 1.0
    for _ in range(18):
        dx = sx - px
        dy = sy - py
        dz = sz - pz
        dp = math.sqrt(dx * dx + dy * dy + dz * dz)
        if dp > 1e-12:
            ux, uy, uz = dx / dp, dy / dp, dz / dp
        else:
            ux = uy = uz = 0.0
        ex = sx - gx
        ey = sy - gy
        ez = sz - gz
        dg = math.sqrt(ex * ex + ey * ey + ez * ez)
        if dg > 1e-12:
            vx, vy, vz = ex / dg, ey / dg, ez / dg
        else:
            vx = vy = vz = 0.0
        sx = min(max(sx - step * (ux + vx), lx), hx)
        sy = min(max(sy - step * (uy + vy), ly), hy)
        sz = min(max(sz - step * (uz + vz), lz), hz)
        step *= 0.5
    dx = sx - px
    dy = sy - py
    dz = sz - pz
    dp = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dp > 1e-12:
        ux, uy, uz = dx / dp, dy / dp, dz / dp
    else:
        ux = uy = uz = 0.0
    ex = sx - gx
    ey = sy - gy
    ez = sz - gz
    dg = math.sqrt(ex * ex + ey * ey + ez * ez)
    if dg > 1e-12:
        vx, vy, vz = ex / dg, ey / dg, ez / dg
    else:
        vx = vy = vz = 0.0
    wx = ux + vx
    wy = uy + vy
    wz = uz + vz
    # F(s*) >= F(s) + w . (s* - s) for the true minimizer s* in the box
    lin = (wx * ((lx - sx) if wx > 0 else (hx - sx))
           + wy * ((ly - sy) if wy > 0 else (hy - sy))
           + wz * ((lz - sz) if wz > 0 else (hz - sz)))
    return dp + dg + lin


@njit(cache=True)
def _via_box_nb(px: int, py: int, pz: int, gx: int, gy: int, gz: int,
                h: int, cx: int, cy: int, cz: int) -> float:
    """Lower bound (cells) of ``min over the leaf hull of |p-s| + |s-g|``.

    Combines per-axis one-dimensional via-box distances (valid by
    Cauchy-Schwarz), the sum of point-to-box distances, and a certified
    convex bound on the hull minimum; exact for single-vertex leaves.
    """
    lx = cx << h
    ly = cy << h
    lz = cz << h
    if h == 0:
        return (math.sqrt(float((px - lx) ** 2 + (py - ly) ** 2 + (pz - lz) ** 2))
                + math.sqrt(float((gx - lx) ** 2 + (gy - ly) ** 2 + (gz - lz) ** 2)))
    s1 = (1 << h) - 1
    hx = lx + s1
    hy = ly + s1
    hz = lz + s1
    mx = abs(px - gx) + 2 * max(0, lx - max(px, gx), min(px, gx) - hx)
    my = abs(py - gy) + 2 * max(0, ly - max(py, gy), min(py, gy) - hy)
    mz = abs(pz - gz) + 2 * max(0, lz - max(pz, gz), min(pz, gz) - hz)
    via = math.sqrt(float(mx * mx + my * my + mz * mz))
    dx = max(lx - px, 0, px - hx)
    dy = max(ly - py, 0, py - hy)
    dz = max(lz - pz, 0, pz - hz)
    d_p = math.sqrt(float(dx * dx + dy * dy + dz * dz))
    dx = max(lx - gx, 0, gx - hx)
    dy = max(ly - gy, 0, gy - hy)
    dz = max(lz - gz, 0, gz - hz)
    d_g = math.sqrt(float(dx * dx + dy * dy + dz * dz))
    if d_p + d_g > via:
        via = d_p + d_g
    cert = _hull_min_certified(float(px), float(py), float(pz),
                               float(gx), float(gy), float(gz),
                               float(lx), float(ly), float(lz),
                               float(hx), float(hy), float(hz))
    if cert > via:
        via = cert
    return via


class _HierarchicalSearch:
    def __init__(self, omap: OccupancyOctree, cfg: PlannerConfig, query: QuerySpec):
        cfg.validate(omap.resolution)
        self.omap = omap
        self.cfg = cfg
        self.res = omap.resolution
        self.dense = omap.dense()
        self.bmin = omap.bounds.min
        self.lazy = cfg.lazy
        self.epsilon = cfg.epsilon
        self.refine = cfg.refine
        cap = cfg.los_max_dist if cfg.los_max_dist is not None \
            else DEFAULT_LOS_CAP_CELLS * self.res
        self.cap_cells = cap / self.res
        self.query = query
        self.start_v = omap.vertex_of(query.start)
        self.goal_v = omap.vertex_of(query.goal)
        self.stats = SearchStats()
        self.open: list = []
        self.field: CostField | None = None
        # Optional instrumentation: per-leaf last losing candidate, used by
        # the tolerance-audit tests (set audit=True before run()).
        self.audit = False
        self.audit_rivals: dict = {}

    # -- low-level helpers -------------------------------------------------

    def _los(self, a, b) -> bool:
        """Supercover visibility between vertex centers, with distance cap."""
        self.stats.los_checks += 1
        if math.dist(a, b) > self.cap_cells:
            return False
        bm = self.bmin
        return not supercover_blocked(
            self.dense,
            a[0] - bm.x + 0.5, a[1] - bm.y + 0.5, a[2] - bm.z + 0.5,
            b[0] - bm.x + 0.5, b[1] - bm.y + 0.5, b[2] - bm.z + 0.5)

    def _classify(self, av, ag: float, bv, bg: float, addr) -> int:
        """Sign of the dominance margin of candidate a over incumbent b
        over the vertices of leaf ``addr``.

        Returns 1 (a strictly better for all vertices), -1 (provably never
        strictly better), 0 (mixed / undecided at this resolution).
        """
        if av == bv and ag == bg:
            return 1 if self.epsilon > 0 else -1
        return _classify_nb(av[0], av[1], av[2], ag, bv[0], bv[1], bv[2], bg,
                            addr[0], addr[1], addr[2], addr[3],
                            self.epsilon, self.res)

    def _f_score(self, rec: CostRecord, addr) -> float:
        p = rec.predecessor
        g = self.goal_v
        return rec.g_pred + self.res * _via_box_nb(
            p[0], p[1], p[2], g[0], g[1], g[2], addr[0], addr[1], addr[2], addr[3])

    def _push(self, addr, rec: CostRecord) -> None:
        heappush(self.open, (self._f_score(rec, addr), -rec.g_pred, addr,
                             rec.queue_version))
        self.stats.queue_pushes += 1

    def _g_of_center(self, rec: CostRecord, center) -> float:
        return rec.g_pred + self.res * math.dist(rec.predecessor, center)

    # -- main loop -----------------------------------------------------------

    def run(self) -> PlanResult:
        omap = self.omap
        if omap.get_cell(self.start_v) != FREE:
            return PlanResult(PlanStatus.START_BLOCKED, stats=self.stats)
        if omap.get_cell(self.goal_v) != FREE:
            return PlanResult(PlanStatus.GOAL_BLOCKED, stats=self.stats)
        start_w = omap.world_of(self.start_v)
        goal_w = omap.world_of(self.goal_v)
        if self.start_v == self.goal_v:
            return PlanResult(PlanStatus.PATH_FOUND, [start_w, goal_w], 0.0, self.stats)

        r_init = self.cfg.r_init if self.cfg.r_init is not None else self.res
        self.field = CostField(omap, r_init, seeds=(self.start_v, self.goal_v),
                               init_obstacle_adjacent=self.cfg.init)
        field = self.field
        start_addr = field.leaf_containing(self.start_v)
        assert start_addr is not None
        rec = CostRecord(self.start_v, 0.0)
        field.records[start_addr] = rec
        self._push(tuple(start_addr), rec)

        gx, gy, gz = self.goal_v
        records = field.records
        nodes = field.nodes
        heap = self.open
        while heap:
            _f, _ng, addr, ver = heappop(heap)
            if nodes.get(addr) != LEAF:
                continue
            rec = records.get(addr)
            if rec is None or rec.queue_version != ver or rec.state == CLOSED:
                continue
            h = addr[0]
            if (gx >> h) == addr[1] and (gy >> h) == addr[2] and (gz >> h) == addr[3]:
                result = self._finalize_goal(addr, rec)
                if result is not None:
                    return result
                continue
            if not rec.verified and not self._verify_on_expand(addr, rec):
                continue
            rec.state = CLOSED
            self.stats.expansions += 1
            self._update_from(addr, rec)
        self.stats.init_leaves = field.init_leaves
        return PlanResult(PlanStatus.NO_PATH_FOUND, stats=self.stats)

    # -- goal handling ---------------------------------------------------------

    def _finalize_goal(self, addr, rec: CostRecord) -> PlanResult | None:
        goal_v = self.goal_v
        if not self._los(rec.predecessor, goal_v):
            repaired = self._best_closed_neighbor(addr, goal_v)
            if repaired is None:
                # Unreachable through the recorded connection; forget the
                # record so another route can re-open the leaf.
                del self.field.records[addr]
                return None
            # Re-queue at the repaired cost; a pending better connection
            # may still claim the goal before this one pops again.
            rec.predecessor, rec.g_pred = repaired
            rec.queue_version += 1
            rec.verified = True
            self._push(addr, rec)
            return None
        rec.state = CLOSED
        self.stats.init_leaves = self.field.init_leaves
        waypoints = self._extract_path(rec)
        return PlanResult(PlanStatus.PATH_FOUND, waypoints, path_length(waypoints),
                          self.stats)

    def _extract_path(self, goal_rec: CostRecord) -> list[WorldPoint]:
        field = self.field
        chain = [self.goal_v]
        v = goal_rec.predecessor
        g_prev = self._g_of_center(goal_rec, self.goal_v)
        while True:
            chain.append(v)
            if v == self.start_v:
                break
            leaf = field.leaf_containing(GridVertex(*v))
            rec = field.records.get(leaf) if leaf is not None else None
            if rec is None:
                raise AssertionError("predecessor chain left the cost field")
            g_v = self._g_of_center(rec, v)
            if g_v >= g_prev or len(chain) > len(field.records) + 2:
                raise AssertionError("predecessor chain is not strictly decreasing")
            g_prev = g_v
            v = rec.predecessor
        omap = self.omap
        return [omap.world_of(GridVertex(*u)) for u in reversed(chain)]

    # -- lazy verification -------------------------------------------------------

    def _verify_on_expand(self, addr, rec: CostRecord) -> bool:
        center = _center_of(addr)
        if self._los(rec.predecessor, center):
            rec.verified = True
            return True
        repaired = self._best_closed_neighbor(addr, center)
        if repaired is not None:
            # Reconnect through the best closed neighbor, then re-queue at
            # the corrected priority rather than expanding in a stale queue
            # position (the repaired cost is never lower than the assumed
            # one, so expanding now would run ahead of better candidates).
            rec.predecessor, rec.g_pred = repaired
            rec.queue_version += 1
            rec.verified = True
            if self.audit:
                self.audit_rivals.pop(addr, None)
            self._push(addr, rec)
            return False
        # The recorded connection is invalid and nothing repairs it: forget
        # the record (the region was never validly reached) and, where
        # possible, refine the structure so future offers target finer
        # children whose centers sit closer to whatever blocked the ray.
        # Children deliberately do not inherit the invalid record; they
        # stay unreached until a real candidate arrives.
        field = self.field
        del field.records[addr]
        if self.refine and addr[0] > 0:
            self.stats.refinements += 1
            field.split(addr)
        return False

    def _best_closed_neighbor(self, addr, target) -> tuple[GridVertex, float] | None:
        """Lowest-cost visible connection through a closed adjacent leaf center."""
        field = self.field
        h = addr[0]
        side1 = (1 << h) - 1
        dminx = (addr[1] << h) - 1
        dminy = (addr[2] << h) - 1
        dminz = (addr[3] << h) - 1
        dmaxx = dminx + side1 + 2
        dmaxy = dminy + side1 + 2
        dmaxz = dminz + side1 + 2
        bh = self.omap.block_height
        nodes = field.nodes
        records = field.records
        kindf = field.kind
        res = self.res
        candidates = []
        stack = []
        for bx in range(dminx >> bh, (dmaxx >> bh) + 1):
            for by in range(dminy >> bh, (dmaxy >> bh) + 1):
                for bz in range(dminz >> bh, (dmaxz >> bh) + 1):
                    node = (bh, bx, by, bz)
                    if node != addr:
                        stack.append(node)
        while stack:
            node = stack.pop()
            code = nodes.get(node)
            if code is None:
                code = kindf(node)
            if code == ABSENT:
                continue
            if code == LEAF:
                rec = records.get(node)
                if rec is None or rec.state != CLOSED:
                    continue
                c = _center_of(node)
                g_c = rec.g_pred + res * math.dist(rec.predecessor, c)
                candidates.append((g_c + res * math.dist(c, target), node, c, g_c))
                continue
            ch = node[0] - 1
            cside1 = (1 << ch) - 1
            cx2 = node[1] << 1
            cy2 = node[2] << 1
            cz2 = node[3] << 1
            for ox, oy, oz in _CHILD_OFFSETS:
                ccx = cx2 + ox
                lx = ccx << ch
                if lx > dmaxx or lx + cside1 < dminx:
                    continue
                ccy = cy2 + oy
                ly = ccy << ch
                if ly > dmaxy or ly + cside1 < dminy:
                    continue
                ccz = cz2 + oz
                lz = ccz << ch
                if lz > dmaxz or lz + cside1 < dminz:
                    continue
                child = (ch, ccx, ccy, ccz)
                if child != addr:
                    stack.append(child)
        candidates.sort(key=lambda c: (c[0], c[1]))
        for _cost, _node, c, g_c in candidates:
            if self._los(c, target):
                return GridVertex(*c), g_c
        return None

    # -- recursive subvolume updates ------------------------------------------------

    def _update_from(self, addr, rec: CostRecord) -> None:
        """Offer the freshly closed subvolume to every adjacent leaf.

        Iterative octree walk pruned by adjacency with the expanded
        subvolume's one-cell-dilated box; equivalent to a recursive descent
        from each adjacent block root.
        """
        h = addr[0]
        side1 = (1 << h) - 1
        dminx = (addr[1] << h) - 1
        dminy = (addr[2] << h) - 1
        dminz = (addr[3] << h) - 1
        dmaxx = dminx + side1 + 2
        dmaxy = dminy + side1 + 2
        dmaxz = dminz + side1 + 2
        center = _center_of(addr)
        cand = (rec.predecessor, rec.g_pred, center, self._g_of_center(rec, center))
        self._cand = cand

        field = self.field
        bh = self.omap.block_height
        nodes = field.nodes
        records = field.records
        kindf = field.kind
        update_cost = self._update_cost
        push = self._push
        stack = []
        for bx in range(dminx >> bh, (dmaxx >> bh) + 1):
            for by in range(dminy >> bh, (dmaxy >> bh) + 1):
                for bz in range(dminz >> bh, (dmaxz >> bh) + 1):
                    node = (bh, bx, by, bz)
                    if node != addr:
                        stack.append(node)
        while stack:
            node = stack.pop()
            code = nodes.get(node)
            if code is None:
                code = kindf(node)
            if code == ABSENT:
                continue
            if code == LEAF:
                leaf_rec = records.get(node)
                if leaf_rec is not None and leaf_rec.state == CLOSED:
                    continue
                status = update_cost(node, leaf_rec)
                if status == _STRICTLY_BETTER:
                    new_rec = records[node]
                    new_rec.queue_version += 1
                    push(node, new_rec)
                    continue
                if status == _NOT_BETTER:
                    continue
                # Ambiguous: refine and fall through to the children.
                if not self.refine or node[0] == 0:
                    continue
                self.stats.refinements += 1
                children = field.split(node)
                for child in children:
                    child_rec = records.get(child)
                    if child_rec is not None:
                        push(tuple(child), child_rec)
                ch = node[0] - 1
                cside1 = (1 << ch) - 1
                for child in children:
                    lx = child.cx << ch
                    if lx > dmaxx or lx + cside1 < dminx:
                        continue
                    ly = child.cy << ch
                    if ly > dmaxy or ly + cside1 < dminy:
                        continue
                    lz = child.cz << ch
                    if lz > dmaxz or lz + cside1 < dminz:
                        continue
                    child_t = tuple(child)
                    if child_t != addr:
                        stack.append(child_t)
                continue
            ch = node[0] - 1
            cside1 = (1 << ch) - 1
            cx2 = node[1] << 1
            cy2 = node[2] << 1
            cz2 = node[3] << 1
            for ox, oy, oz in _CHILD_OFFSETS:
                ccx = cx2 + ox
                lx = ccx << ch
                if lx > dmaxx or lx + cside1 < dminx:
                    continue
                ccy = cy2 + oy
                ly = ccy << ch
                if ly > dmaxy or ly + cside1 < dminy:
                    continue
                ccz = cz2 + oz
                lz = ccz << ch
                if lz > dmaxz or lz + cside1 < dminz:
                    continue
                child = (ch, ccx, ccy, ccz)
                if child != addr:
                    stack.append(child)
        self.stats.init_leaves = field.init_leaves

    def _update_cost(self, visited, rec: CostRecord | None) -> int:
        sp, g_sp, sc, g_sc = self._cand
        if rec is not None:
            if rec.predecessor == sp:
                if self.audit:
                    self.audit_rivals[visited] = (sp, g_sp)
                return _NOT_BETTER
            # If the incumbent dominates even the stronger ray-traced
            # candidate, the outcome is NotBetter regardless of visibility
            # (the direct-neighbor candidate is never better than the
            # ray-traced one by the triangle inequality): skip the raycasts.
            if self._classify(rec.predecessor, rec.g_pred, sp, g_sp, visited) == 1:
                if self.audit:
                    self.audit_rivals[visited] = (sp, g_sp)
                return _NOT_BETTER
        center = _center_of(visited)
        if self.lazy:
            use_v, use_g = sp, g_sp
        elif self._los(sp, center):
            use_v, use_g = sp, g_sp
        elif self._los(sc, center):
            use_v, use_g = sc, g_sc
        else:
            # No valid connection into this leaf at the current resolution;
            # refining moves the target centers until grid-edge connections
            # remain, preserving grid-level connectivity.
            return _AMBIGUOUS
        if rec is None:
            self.field.records[visited] = CostRecord(GridVertex(*use_v), use_g,
                                                     verified=not self.lazy)
            return _STRICTLY_BETTER
        if rec.predecessor == use_v:
            if self.audit:
                self.audit_rivals[visited] = (use_v, use_g)
            return _NOT_BETTER
        if use_v is not sp and self._classify(rec.predecessor, rec.g_pred,
                                              use_v, use_g, visited) == 1:
            if self.audit:
                self.audit_rivals[visited] = (use_v, use_g)
            return _NOT_BETTER
        if self._classify(use_v, use_g, rec.predecessor, rec.g_pred, visited) == 1:
            if self.audit:
                self.audit_rivals[visited] = (rec.predecessor, rec.g_pred)
            rec.predecessor = GridVertex(*use_v)
            rec.g_pred = use_g
            rec.verified = not self.lazy
            return _STRICTLY_BETTER
        return _AMBIGUOUS

"""Compressed multi-resolution cost field.

The cost field is a sparse octree over free space whose leaves each store a
single ``(predecessor, g(predecessor))`` pair: the cost-to-come of any
vertex inside a leaf is ``g(predecessor) + |predecessor - vertex|``.  The
leaf partition of a hashed block is fixed the first time the search touches
the block: free occupancy leaves become candidate leaves, every free vertex
that is 26-adjacent to a non-free cell (or to the map boundary, which reads
Occupied) is covered by a leaf no larger than the initialization
resolution, and designated seed vertices (the search endpoints) get their
own finest-resolution leaves.

Structure queries are answered lazily from per-block prefix sums of the
free and obstacle-adjacent cell masks, so only the nodes the search
actually visits are materialized; the partition itself is deterministic
and independent of visit order.  Leaves are additionally split during the
search when a single predecessor cannot represent all their vertices
within the configured tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np
from scipy import ndimage

from .geometry import (
    Aabb,
    GridVertex,
    SubvolumeAddress,
    WorldPoint,
    euclidean,
    vertex_center,
    vertex_hull,
)
from .occupancy import FREE, Occupancy, OccupancyOctree

OPEN = 0
CLOSED = 1

# Node kind codes; absent from the dict means "not yet computed".
LEAF = 1
INTERNAL = 0
ABSENT = -1


class Dominance(Enum):
    ALL_BETTER = "AllBetter"
    NONE_BETTER = "NoneBetter"
    MIXED = "Mixed"


class RefinementError(Exception):
    """Raised on structurally impossible refinement requests."""


@dataclass(slots=True)
class CostRecord:
    predecessor: GridVertex
    g_pred: float
    state: int = OPEN
    queue_version: int = 0
    # True once line of sight from the predecessor to this leaf's center
    # vertex has been confirmed; False for records inherited through a
    # split or assigned under lazy-visibility assumptions.  Unverified
    # records are checked (and repaired if needed) when the leaf expands,
    # since expansion is what turns the center into a candidate
    # predecessor for downstream leaves.
    verified: bool = True


def g_at(record: CostRecord, s: GridVertex, origin: WorldPoint, resolution: float) -> float:
    """Cost-to-come of a vertex covered by the record's leaf."""
    return record.g_pred + euclidean(vertex_center(record.predecessor, origin, resolution),
                                     vertex_center(s, origin, resolution))


# -- dominance classification ------------------------------------------------

def classify_dominance(a_pos, a_g: float, b_pos, b_g: float,
                       hull_lo, hull_hi, epsilon: float) -> Dominance:
    """Classify the sign of ``g(a)+c(a,s) - g(b) - c(b,s) - eps*c(a,s)``
    over all vertices ``s`` in a box, using conservative interval bounds.

    ALL_BETTER certifies that candidate ``a`` strictly beats ``b`` for every
    vertex; NONE_BETTER certifies the margin is provably non-negative
    everywhere; MIXED requests refinement.  Since the bounds are
    conservative, a boundary case classifies as MIXED; the test is exact
    for single-vertex boxes.  Positions may be in any consistent frame
    (the classification is scale invariant as long as the g values use the
    same units as the coordinates).
    """
    if tuple(a_pos) == tuple(b_pos) and a_g == b_g:
        return Dominance.ALL_BETTER if epsilon > 0 else Dominance.NONE_BETTER
    lo, up = dominance_bounds(a_pos, a_g, b_pos, b_g, hull_lo, hull_hi, epsilon)
    if up < 0:
        return Dominance.ALL_BETTER
    if lo >= 0:
        return Dominance.NONE_BETTER
    return Dominance.MIXED


def dominance_bounds(a_pos, a_g: float, b_pos, b_g: float,
                     hull_lo, hull_hi, epsilon: float) -> tuple[float, float]:
    """Interval bounds [lower, upper] of the dominance margin over the box."""
    da = _dist_hull(a_pos, hull_lo, hull_hi)
    fa = _far_hull(a_pos, hull_lo, hull_hi)
    db = _dist_hull(b_pos, hull_lo, hull_hi)
    fb = _far_hull(b_pos, hull_lo, hull_hi)
    base = a_g - b_g
    upper = base + (1.0 - epsilon) * fa - db
    lower = base + (1.0 - epsilon) * da - fb
    return lower, upper


def _dist_hull(p, lo, hi) -> float:
    dx = max(lo[0] - p[0], 0.0, p[0] - hi[0])
    dy = max(lo[1] - p[1], 0.0, p[1] - hi[1])
    dz = max(lo[2] - p[2], 0.0, p[2] - hi[2])
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def _far_hull(p, lo, hi) -> float:
    dx = max(abs(p[0] - lo[0]), abs(p[0] - hi[0]))
    dy = max(abs(p[1] - lo[1]), abs(p[1] - hi[1]))
    dz = max(abs(p[2] - lo[2]), abs(p[2] - hi[2]))
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def suboptimality_bound(a: tuple[GridVertex, float], b: tuple[GridVertex, float],
                        box: Aabb, epsilon: float, resolution: float,
                        origin: WorldPoint = WorldPoint(0.0, 0.0, 0.0)) -> Dominance:
    """World-frame wrapper around :func:`classify_dominance`."""
    lo, hi = vertex_hull(box, origin, resolution)
    return classify_dominance(vertex_center(a[0], origin, resolution), a[1],
                              vertex_center(b[0], origin, resolution), b[1],
                              lo, hi, epsilon)


# -- per-block structure info -------------------------------------------------

_STRUCT26 = np.ones((3, 3, 3), dtype=bool)


_UNIFORM = 0   # whole window free: every sub-box is free, nothing flagged
_BOXFREE = 1   # free cells form a box (bounds-clipped block, no obstacles)
_ARRAYS = 2    # general case: prefix-sum arrays


@dataclass(slots=True)
class _BlockInfo:
    origin: tuple[int, int, int]
    mode: int
    free_cum: np.ndarray | None = None
    flag_cum: np.ndarray | None = None
    # _BOXFREE payload, local inclusive coords: the free box and its core
    # (free box shrunk by one on every side that lies on the map boundary;
    # the flagged cells are exactly free minus core).
    freebox: tuple[int, int, int, int, int, int] | None = None
    corebox: tuple[int, int, int, int, int, int] | None = None


def _cum3(mask: np.ndarray) -> np.ndarray:
    n = mask.shape[0]
    c = np.zeros((n + 1, n + 1, n + 1), dtype=np.int32)
    c[1:, 1:, 1:] = mask.astype(np.int32).cumsum(0).cumsum(1).cumsum(2)
    return c


def _box_count(c: np.ndarray, x0: int, y0: int, z0: int, x1: int, y1: int, z1: int) -> int:
    """Count of set cells in the inclusive local box (prefix-sum query)."""
    x1 += 1
    y1 += 1
    z1 += 1
    return int(c[x1, y1, z1] - c[x0, y1, z1] - c[x1, y0, z1] - c[x1, y1, z0]
               + c[x0, y0, z1] + c[x0, y1, z0] + c[x1, y0, z0] - c[x0, y0, z0])


def _build_block_info(omap: OccupancyOctree, bc: tuple[int, int, int]) -> _BlockInfo | None:
    bs = omap.block_size
    bmin = omap.bounds.min
    bmax = omap.bounds.max
    gx0, gy0, gz0 = bc[0] * bs, bc[1] * bs, bc[2] * bs
    lo = (max(gx0 - 1, bmin.x), max(gy0 - 1, bmin.y), max(gz0 - 1, bmin.z))
    hi = (min(gx0 + bs, bmax.x), min(gy0 + bs, bmax.y), min(gz0 + bs, bmax.z))
    if any(lo[i] > hi[i] for i in range(3)):
        return None
    dense = omap.dense()
    window = dense[lo[0] - bmin.x: hi[0] - bmin.x + 1,
                   lo[1] - bmin.y: hi[1] - bmin.y + 1,
                   lo[2] - bmin.z: hi[2] - bmin.z + 1]
    if not (window != int(FREE)).any():
        # No obstacles in the block or its halo: the free cells form the
        # bounds-clipped block box and only cells on the map boundary are
        # flagged, so counts reduce to box-intersection volumes.
        origin = (gx0, gy0, gz0)
        fb_lo = (max(gx0, bmin.x), max(gy0, bmin.y), max(gz0, bmin.z))
        fb_hi = (min(gx0 + bs - 1, bmax.x), min(gy0 + bs - 1, bmax.y),
                 min(gz0 + bs - 1, bmax.z))
        if fb_lo == (gx0, gy0, gz0) and fb_hi == (gx0 + bs - 1, gy0 + bs - 1, gz0 + bs - 1) \
                and lo == (gx0 - 1, gy0 - 1, gz0 - 1) and hi == (gx0 + bs, gy0 + bs, gz0 + bs):
            return _BlockInfo(origin, _UNIFORM)
        freebox = (fb_lo[0] - gx0, fb_lo[1] - gy0, fb_lo[2] - gz0,
                   fb_hi[0] - gx0, fb_hi[1] - gy0, fb_hi[2] - gz0)
        core = (freebox[0] + (1 if fb_lo[0] == bmin.x else 0),
                freebox[1] + (1 if fb_lo[1] == bmin.y else 0),
                freebox[2] + (1 if fb_lo[2] == bmin.z else 0),
                freebox[3] - (1 if fb_hi[0] == bmax.x else 0),
                freebox[4] - (1 if fb_hi[1] == bmax.y else 0),
                freebox[5] - (1 if fb_hi[2] == bmax.z else 0))
        return _BlockInfo(origin, _BOXFREE, freebox=freebox, corebox=core)
    # General case: occupancy window with a one-cell halo; everything
    # outside map bounds reads Occupied, so boundary-adjacent vertices are
    # flagged exactly like obstacle-adjacent ones.
    win = np.full((bs + 2, bs + 2, bs + 2), int(Occupancy.OCCUPIED), dtype=np.uint8)
    win[lo[0] - gx0 + 1: hi[0] - gx0 + 2,
        lo[1] - gy0 + 1: hi[1] - gy0 + 2,
        lo[2] - gz0 + 1: hi[2] - gz0 + 2] = window
    nonfree = win != int(FREE)
    free = ~nonfree[1:-1, 1:-1, 1:-1]
    if not free.any():
        return None
    flagged = free & ndimage.binary_dilation(nonfree, structure=_STRUCT26)[1:-1, 1:-1, 1:-1]
    return _BlockInfo((gx0, gy0, gz0), _ARRAYS, _cum3(free),
                      _cum3(flagged) if flagged.any() else None)


def _box_overlap(qx0: int, qy0: int, qz0: int, qx1: int, qy1: int, qz1: int,
                 b: tuple[int, int, int, int, int, int]) -> int:
    dx = min(qx1, b[3]) - max(qx0, b[0]) + 1
    if dx <= 0:
        return 0
    dy = min(qy1, b[4]) - max(qy0, b[1]) + 1
    if dy <= 0:
        return 0
    dz = min(qz1, b[5]) - max(qz0, b[2]) + 1
    if dz <= 0:
        return 0
    return dx * dy * dz


def _block_info_cache(omap: OccupancyOctree) -> dict:
    """Map-level info cache, keyed to the current dense array identity."""
    dense = omap.dense()
    cache = getattr(omap, "_cf_block_cache", None)
    if cache is None or cache[0] is not dense:
        cache = (dense, {})
        omap._cf_block_cache = cache
    return cache[1]


# -- the field ----------------------------------------------------------------

class CostField:
    """Per-query sparse octree of cost records over free space."""

    def __init__(self, omap: OccupancyOctree, r_init: float,
                 seeds: tuple[GridVertex, ...] = (), init_obstacle_adjacent: bool = True):
        res = omap.resolution
        r_cells = r_init / res
        r_int = int(round(r_cells))
        if r_int < 1 or abs(r_cells - r_int) > 1e-9 or r_int & (r_int - 1):
            raise ValueError("r_init must be a power-of-two multiple of map resolution")
        self.omap = omap
        self.r_init_cells = r_int
        self.init_obstacle_adjacent = init_obstacle_adjacent
        self.seeds = tuple(seeds)
        for s in self.seeds:
            if omap.get_cell(s) != FREE:
                raise ValueError(f"seed vertex {s} is not free")
        self.nodes: dict[SubvolumeAddress, int] = {}
        self.records: dict[SubvolumeAddress, CostRecord] = {}
        self._infos: dict[tuple[int, int, int], _BlockInfo | None] = {}
        self._shared_infos = _block_info_cache(omap)
        self.init_leaves = 0

    # -- structure queries --------------------------------------------------

    def _info(self, bc: tuple[int, int, int]) -> _BlockInfo | None:
        info = self._infos.get(bc, False)
        if info is not False:
            return info
        info = self._shared_infos.get(bc, False)
        if info is False:
            info = _build_block_info(self.omap, bc)
            self._shared_infos[bc] = info
        self._infos[bc] = info
        return info

    def kind(self, addr) -> int:
        """LEAF, INTERNAL or ABSENT; materializes lazily on first query.

        Accepts :class:`SubvolumeAddress` or a plain ``(height, cx, cy, cz)``
        tuple (they hash and compare identically).
        """
        code = self.nodes.get(addr)
        if code is not None:
            return code
        h = addr[0]
        bh = self.omap.block_height
        if h > bh:
            return ABSENT
        shift = bh - h
        bc = (addr[1] >> shift, addr[2] >> shift, addr[3] >> shift)
        info = self._info(bc)
        if info is None:
            code = ABSENT
        else:
            side = 1 << h
            x0 = (addr[1] << h) - info.origin[0]
            y0 = (addr[2] << h) - info.origin[1]
            z0 = (addr[3] << h) - info.origin[2]
            x1 = x0 + side - 1
            y1 = y0 + side - 1
            z1 = z0 + side - 1
            vol = side * side * side
            mode = info.mode
            if mode == _UNIFORM:
                fc = vol
                flags = 0
            elif mode == _BOXFREE:
                fc = _box_overlap(x0, y0, z0, x1, y1, z1, info.freebox)
                flags = fc - _box_overlap(x0, y0, z0, x1, y1, z1, info.corebox)
            else:
                fc = _box_count(info.free_cum, x0, y0, z0, x1, y1, z1)
                flags = 0
                if info.flag_cum is not None:
                    flags = _box_count(info.flag_cum, x0, y0, z0, x1, y1, z1)
            if not self.init_obstacle_adjacent:
                flags = 0
            if fc == 0:
                code = ABSENT
            elif fc < vol:
                code = INTERNAL if h > 0 else ABSENT
            else:
                needs_split = side > self.r_init_cells and flags > 0
                if not needs_split and h > 0:
                    gx0 = addr[1] << h
                    gy0 = addr[2] << h
                    gz0 = addr[3] << h
                    for s in self.seeds:
                        if (gx0 <= s[0] <= gx0 + side - 1
                                and gy0 <= s[1] <= gy0 + side - 1
                                and gz0 <= s[2] <= gz0 + side - 1):
                            needs_split = True
                            break
                code = INTERNAL if needs_split else LEAF
        self.nodes[addr] = code
        if code == LEAF:
            self.init_leaves += 1
        return code

    def is_leaf(self, addr: SubvolumeAddress) -> bool:
        return self.kind(addr) == LEAF

    def block_of_vertex(self, v: GridVertex) -> tuple[int, int, int]:
        h = self.omap.block_height
        return (v.x >> h, v.y >> h, v.z >> h)

    def leaf_containing(self, v: GridVertex) -> SubvolumeAddress | None:
        h = self.omap.block_height
        addr = SubvolumeAddress(h, v.x >> h, v.y >> h, v.z >> h)
        while True:
            code = self.kind(addr)
            if code == ABSENT:
                return None
            if code == LEAF:
                return addr
            hh = addr.height - 1
            addr = SubvolumeAddress(hh, v.x >> hh, v.y >> hh, v.z >> hh)

    def leaf_addresses(self) -> Iterator[SubvolumeAddress]:
        """Materialized leaves (the part of the partition the search touched)."""
        return (SubvolumeAddress(*a) for a, code in self.nodes.items() if code == LEAF)

    # -- eager initialization (spec-level op; the planner materializes lazily)

    def initialize_block(self, bc: tuple[int, int, int]) -> set[SubvolumeAddress]:
        """Materialize the full leaf partition of one block; returns new leaves."""
        created: set[SubvolumeAddress] = set()
        root = SubvolumeAddress(self.omap.block_height, *bc)

        def walk(addr: SubvolumeAddress) -> None:
            known = addr in self.nodes
            code = self.kind(addr)
            if code == LEAF:
                if not known:
                    created.add(addr)
            elif code == INTERNAL:
                for child in addr.children():
                    walk(child)

        walk(root)
        return created

    def initialize_region(self, region: Aabb) -> set[SubvolumeAddress]:
        """Materialize every block overlapping ``region``."""
        bh = self.omap.block_height
        created: set[SubvolumeAddress] = set()
        for bx in range(region.min.x >> bh, (region.max.x >> bh) + 1):
            for by in range(region.min.y >> bh, (region.max.y >> bh) + 1):
                for bz in range(region.min.z >> bh, (region.max.z >> bh) + 1):
                    created |= self.initialize_block((bx, by, bz))
        return created

    # -- dynamic refinement ----------------------------------------------------

    def split(self, addr) -> list[SubvolumeAddress]:
        """Replace a leaf by its 8 children; children inherit the record."""
        if self.nodes.get(addr) != LEAF:
            raise RefinementError(f"{addr} is not a present leaf")
        if addr[0] == 0:
            raise RefinementError("cannot split a finest-resolution leaf")
        addr = SubvolumeAddress(*addr)
        rec = self.records.pop(addr, None)
        if rec is not None and rec.state == CLOSED:
            raise RefinementError("cannot split a closed leaf")
        self.nodes[addr] = INTERNAL
        children = []
        for child in addr.children():
            self.nodes[child] = LEAF
            if rec is not None:
                # Children inherit the record, but visibility was only ever
                # established toward the parent's center, not theirs.
                self.records[child] = CostRecord(rec.predecessor, rec.g_pred,
                                                 OPEN, 0, verified=False)
            children.append(child)
        return children

    # -- debug export ------------------------------------------------------------

    def export_dump(self, path: str, include_obstacles: bool = True) -> None:
        """Write the materialized leaf set (and occupied map leaves) as text."""
        omap = self.omap
        with open(path, "w", encoding="utf-8") as f:
            f.write("# costfield dump v1\n")
            f.write(f"# resolution {omap.resolution!r}\n")
            f.write(f"# origin {omap.origin.x!r} {omap.origin.y!r} {omap.origin.z!r}\n")
            f.write("# columns: kind height cx cy cz [pred_x pred_y pred_z g_pred state]\n")
            for addr in sorted(self.leaf_addresses()):
                rec = self.records.get(addr)
                if rec is None:
                    f.write(f"leaf {addr.height} {addr.cx} {addr.cy} {addr.cz} "
                            f"- - - - unreached\n")
                else:
                    state = "closed" if rec.state == CLOSED else "open"
                    p = rec.predecessor
                    f.write(f"leaf {addr.height} {addr.cx} {addr.cy} {addr.cz} "
                            f"{p.x} {p.y} {p.z} {rec.g_pred!r} {state}\n")
            if include_obstacles:
                for addr, occ in omap.leaf_iter():
                    if occ != FREE:
                        f.write(f"obstacle {addr.height} {addr.cx} {addr.cy} {addr.cz}\n")

"""Hashed-block ternary occupancy store with multi-resolution leaf iteration.

The map is the single source of traversability and visibility truth.
Storage is a hash table of fixed-size dense blocks (``2**block_height``
cells per side); a consolidated dense array over the map bounds is cached
for fast raycasting and bulk operations.  Unknown space is non-traversable
everywhere, and reads outside the declared bounds return Occupied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np
from scipy import ndimage

from .geometry import (
    Aabb,
    GridVertex,
    SubvolumeAddress,
    WorldPoint,
    aabb_of,
    euclidean,
    vertex_center,
    world_to_vertex,
)
from . import raycast


class Occupancy(IntEnum):
    FREE = 0
    OCCUPIED = 1
    UNKNOWN = 2


FREE = Occupancy.FREE
OCCUPIED = Occupancy.OCCUPIED
UNKNOWN = Occupancy.UNKNOWN


class OccupancyOctree:
    """Ternary occupancy map over a bounded signed-index grid."""

    def __init__(self, resolution: float, origin: WorldPoint, bounds: Aabb,
                 block_height: int = 6, fill: Occupancy = FREE):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.resolution = float(resolution)
        self.origin = WorldPoint(*origin)
        self.bounds = bounds
        self.block_height = int(block_height)
        self.block_size = 1 << self.block_height
        self.fill = Occupancy(fill)
        self.blocks: dict[tuple[int, int, int], np.ndarray] = {}
        self._dense: np.ndarray | None = None

    @classmethod
    def from_extent(cls, extent: float, resolution: float,
                    block_height: int = 6, fill: Occupancy = FREE) -> "OccupancyOctree":
        n = int(round(extent / resolution))
        if abs(n * resolution - extent) > 1e-9 * max(1.0, extent):
            raise ValueError("extent must be divisible by resolution")
        bounds = Aabb(GridVertex(0, 0, 0), GridVertex(n - 1, n - 1, n - 1))
        return cls(resolution, WorldPoint(0.0, 0.0, 0.0), bounds, block_height, fill)

    @classmethod
    def from_dense(cls, dense: np.ndarray, resolution: float, origin: WorldPoint,
                   bounds: Aabb, block_height: int = 6) -> "OccupancyOctree":
        m = cls(resolution, origin, bounds, block_height)
        expected = (bounds.max.x - bounds.min.x + 1,
                    bounds.max.y - bounds.min.y + 1,
                    bounds.max.z - bounds.min.z + 1)
        if dense.shape != expected:
            raise ValueError(f"dense shape {dense.shape} != bounds extent {expected}")
        dense = np.ascontiguousarray(dense, dtype=np.uint8)
        for bc in m._blocks_overlapping_bounds():
            arr = m._new_block_array(bc)
            lo, hi, slo, shi = m._block_intersection(bc)
            arr[slo[0]:shi[0], slo[1]:shi[1], slo[2]:shi[2]] = \
                dense[lo[0]:hi[0], lo[1]:hi[1], lo[2]:hi[2]]
            m.blocks[bc] = arr
        m._dense = dense
        return m

    # -- coordinates -------------------------------------------------------

    def world_of(self, v: GridVertex) -> WorldPoint:
        return vertex_center(v, self.origin, self.resolution)

    def vertex_of(self, p: WorldPoint) -> GridVertex:
        return world_to_vertex(p, self.origin, self.resolution)

    def in_bounds(self, v: GridVertex) -> bool:
        return self.bounds.contains(v)

    def extent_cells(self) -> tuple[int, int, int]:
        b = self.bounds
        return (b.max.x - b.min.x + 1, b.max.y - b.min.y + 1, b.max.z - b.min.z + 1)

    # -- block plumbing ----------------------------------------------------

    def _block_of(self, v: GridVertex) -> tuple[int, int, int]:
        h = self.block_height
        return (v.x >> h, v.y >> h, v.z >> h)

    def _blocks_overlapping_bounds(self) -> Iterator[tuple[int, int, int]]:
        h = self.block_height
        b = self.bounds
        for bx in range(b.min.x >> h, (b.max.x >> h) + 1):
            for by in range(b.min.y >> h, (b.max.y >> h) + 1):
                for bz in range(b.min.z >> h, (b.max.z >> h) + 1):
                    yield (bx, by, bz)

    def _block_intersection(self, bc: tuple[int, int, int]):
        """Index ranges of the block/bounds overlap, in dense and block frames."""
        bs = self.block_size
        bmin = (bc[0] * bs, bc[1] * bs, bc[2] * bs)
        lo = tuple(max(bmin[i], self.bounds.min[i]) - self.bounds.min[i] for i in range(3))
        hi = tuple(min(bmin[i] + bs - 1, self.bounds.max[i]) - self.bounds.min[i] + 1
                   for i in range(3))
        slo = tuple(lo[i] + self.bounds.min[i] - bmin[i] for i in range(3))
        shi = tuple(hi[i] + self.bounds.min[i] - bmin[i] for i in range(3))
        return lo, hi, slo, shi

    def _new_block_array(self, bc: tuple[int, int, int]) -> np.ndarray:
        bs = self.block_size
        arr = np.full((bs, bs, bs), int(self.fill), dtype=np.uint8)
        # Cells of the block outside map bounds always read Occupied.
        bmin = (bc[0] * bs, bc[1] * bs, bc[2] * bs)
        for axis in range(3):
            lo = self.bounds.min[axis] - bmin[axis]
            hi = self.bounds.max[axis] - bmin[axis]
            idx = [slice(None)] * 3
            if lo > 0:
                idx[axis] = slice(0, lo)
                arr[tuple(idx)] = int(OCCUPIED)
            if hi < bs - 1:
                idx[axis] = slice(hi + 1, bs)
                arr[tuple(idx)] = int(OCCUPIED)
        return arr

    def _block(self, bc: tuple[int, int, int]) -> np.ndarray:
        arr = self.blocks.get(bc)
        if arr is None:
            arr = self._new_block_array(bc)
            self.blocks[bc] = arr
        return arr

    # -- cell access -------------------------------------------------------

    def get_cell(self, v: GridVertex) -> Occupancy:
        if not self.in_bounds(v):
            return OCCUPIED
        bc = self._block_of(v)
        arr = self.blocks.get(bc)
        if arr is None:
            return self.fill
        bs = self.block_size
        return Occupancy(int(arr[v[0] - bc[0] * bs, v[1] - bc[1] * bs, v[2] - bc[2] * bs]))

    def set_cell(self, v: GridVertex, occ: Occupancy) -> None:
        if not self.in_bounds(v):
            return
        bc = self._block_of(v)
        arr = self._block(bc)
        bs = self.block_size
        arr[v[0] - bc[0] * bs, v[1] - bc[1] * bs, v[2] - bc[2] * bs] = int(occ)
        self._dense = None

    def dense(self) -> np.ndarray:
        """Consolidated read-only array over bounds (cached until mutation)."""
        if self._dense is None:
            ext = self.extent_cells()
            dense = np.full(ext, int(self.fill), dtype=np.uint8)
            for bc, arr in self.blocks.items():
                lo, hi, slo, shi = self._block_intersection(bc)
                if any(lo[i] >= hi[i] for i in range(3)):
                    continue
                dense[lo[0]:hi[0], lo[1]:hi[1], lo[2]:hi[2]] = \
                    arr[slo[0]:shi[0], slo[1]:shi[1], slo[2]:shi[2]]
            self._dense = dense
        return self._dense

    def is_free(self, v: GridVertex) -> bool:
        return self.get_cell(v) == FREE

    # -- leaf iteration ----------------------------------------------------

    def leaf_iter(self) -> Iterator[tuple[SubvolumeAddress, Occupancy]]:
        """Yield maximal uniform octree nodes exactly partitioning bounds.

        Nodes straddling the (possibly non-aligned) boundary are subdivided
        so every emitted leaf lies fully inside bounds.
        """
        dense = self.dense()
        bmin = self.bounds.min
        for bc in self._blocks_overlapping_bounds():
            root = SubvolumeAddress(self.block_height, *bc)
            yield from self._leaves_under(root, dense, bmin)

    def _leaves_under(self, addr: SubvolumeAddress, dense: np.ndarray,
                      bmin: GridVertex) -> Iterator[tuple[SubvolumeAddress, Occupancy]]:
        box = aabb_of(addr)
        b = self.bounds
        if (box.min.x > b.max.x or box.max.x < b.min.x
                or box.min.y > b.max.y or box.max.y < b.min.y
                or box.min.z > b.max.z or box.max.z < b.min.z):
            return
        inside = (box.min.x >= b.min.x and box.max.x <= b.max.x
                  and box.min.y >= b.min.y and box.max.y <= b.max.y
                  and box.min.z >= b.min.z and box.max.z <= b.max.z)
        if inside:
            sub = dense[box.min.x - bmin.x: box.max.x - bmin.x + 1,
                        box.min.y - bmin.y: box.max.y - bmin.y + 1,
                        box.min.z - bmin.z: box.max.z - bmin.z + 1]
            v0 = sub.flat[0]
            if addr.height == 0 or (sub == v0).all():
                yield addr, Occupancy(int(v0))
                return
        for child in addr.children():
            yield from self._leaves_under(child, dense, bmin)


# -- obstacle inflation ------------------------------------------------------

def inflate(omap: OccupancyOctree, radius: float) -> OccupancyOctree:
    """Dilate all non-free cells by a Euclidean ball of ``radius`` meters.

    A free cell becomes Occupied iff some in-bounds non-free cell center
    lies within ``radius`` of its center (exact squared distance transform).
    Unknown cells remain Unknown.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    dense = omap.dense()
    if radius == 0:
        return OccupancyOctree.from_dense(dense.copy(), omap.resolution, omap.origin,
                                          omap.bounds, omap.block_height)
    nonfree = dense != int(FREE)
    if not nonfree.any():
        return OccupancyOctree.from_dense(dense.copy(), omap.resolution, omap.origin,
                                          omap.bounds, omap.block_height)
    dist = ndimage.distance_transform_edt(~nonfree)
    # Offsets between cell centers are integers, so the squared transform is
    # integral; round away float fuzz before thresholding.
    d2 = np.rint(dist * dist)
    r_cells = radius / omap.resolution
    within = d2 <= r_cells * r_cells + 1e-9
    out = np.where(within, np.uint8(OCCUPIED), dense).astype(np.uint8)
    out[dense == int(UNKNOWN)] = int(UNKNOWN)
    return OccupancyOctree.from_dense(out, omap.resolution, omap.origin,
                                      omap.bounds, omap.block_height)


# -- line of sight -----------------------------------------------------------

def line_of_sight(omap: OccupancyOctree, a: WorldPoint, b: WorldPoint,
                  max_dist: float = math.inf) -> bool:
    """Supercover visibility between two world points.

    Segments longer than ``max_dist`` are reported as not in sight.
    """
    if euclidean(a, b) > max_dist:
        return False
    dense = omap.dense()
    res = omap.resolution
    o = omap.origin
    bmin = omap.bounds.min
    ax = (a.x - o.x) / res - bmin.x
    ay = (a.y - o.y) / res - bmin.y
    az = (a.z - o.z) / res - bmin.z
    bx = (b.x - o.x) / res - bmin.x
    by = (b.y - o.y) / res - bmin.y
    bz = (b.z - o.z) / res - bmin.z
    return not raycast.supercover_blocked(dense, ax, ay, az, bx, by, bz)


# -- synthetic worlds --------------------------------------------------------

@dataclass(frozen=True)
class ObstacleSpec:
    """One synthetic obstacle; extents are full side lengths / diameters."""

    shape: str  # box | sphere | cylinder
    center: WorldPoint
    extents: tuple[float, float, float]

    def __post_init__(self):
        if self.shape not in ("box", "sphere", "cylinder"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if min(self.extents) <= 0:
            raise ValueError("obstacle extents must be positive")


def _rasterize(dense: np.ndarray, omap: OccupancyOctree, spec: ObstacleSpec) -> None:
    res = omap.resolution
    o = omap.origin
    bmin = omap.bounds.min
    c = spec.center
    hx, hy, hz = (e / 2.0 for e in spec.extents)
    if spec.shape == "sphere":
        hx = hy = hz = spec.extents[0] / 2.0
    reach = (hx, hy, hz)
    lo = [max(0, math.floor((c[i] - reach[i] - o[i]) / res) - bmin[i]) for i in range(3)]
    hi = [min(dense.shape[i] - 1, math.floor((c[i] + reach[i] - o[i]) / res) - bmin[i])
          for i in range(3)]
    if any(lo[i] > hi[i] for i in range(3)):
        return
    xs = (np.arange(lo[0], hi[0] + 1) + bmin.x + 0.5) * res + o.x - c.x
    ys = (np.arange(lo[1], hi[1] + 1) + bmin.y + 0.5) * res + o.y - c.y
    zs = (np.arange(lo[2], hi[2] + 1) + bmin.z + 0.5) * res + o.z - c.z
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij", sparse=True)
    if spec.shape == "box":
        mask = (np.abs(X) <= hx) & (np.abs(Y) <= hy) & (np.abs(Z) <= hz)
    elif spec.shape == "sphere":
        r = spec.extents[0] / 2.0
        mask = X * X + Y * Y + Z * Z <= r * r
    else:  # cylinder, axis along z
        r = spec.extents[0] / 2.0
        mask = (X * X + Y * Y <= r * r) & (np.abs(Z) <= hz)
    region = dense[lo[0]:hi[0] + 1, lo[1]:hi[1] + 1, lo[2]:hi[2] + 1]
    region[mask] = int(OCCUPIED)


_SHAPES = ("box", "sphere", "cylinder")
_EXTENT_RANGE = (0.5, 4.0)


def draw_obstacles(extent: float, n_obstacles: int, seed: int) -> list[ObstacleSpec]:
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(n_obstacles):
        shape = _SHAPES[int(rng.integers(0, 3))]
        center = WorldPoint(*(float(v) for v in rng.uniform(0.0, extent, 3)))
        ext = rng.uniform(*_EXTENT_RANGE, 3)
        if shape == "sphere":
            extents = (float(ext[0]),) * 3
        elif shape == "cylinder":
            extents = (float(ext[0]), float(ext[0]), float(ext[1]))
        else:
            extents = tuple(float(v) for v in ext)
        specs.append(ObstacleSpec(shape, center, extents))
    return specs


def generate_clutter_map(extent: float, resolution: float, n_obstacles: int,
                         seed: int, block_height: int = 6) -> OccupancyOctree:
    """Deterministic random-clutter world: convex shapes in an empty cube."""
    omap = OccupancyOctree.from_extent(extent, resolution, block_height)
    ext = omap.extent_cells()
    dense = np.zeros(ext, dtype=np.uint8)
    for spec in draw_obstacles(extent, n_obstacles, seed):
        _rasterize(dense, omap, spec)
    return OccupancyOctree.from_dense(dense, omap.resolution, omap.origin,
                                      omap.bounds, omap.block_height)

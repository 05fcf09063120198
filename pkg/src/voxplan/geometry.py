"""Grid coordinate systems, boxes and distance metrics.

Conventions used throughout the package:

* The world is discretized into cubic cells of side ``resolution`` meters.
  Cell ``(i, j, k)`` spans the half-open world cube
  ``[origin + i*res, origin + (i+1)*res)`` per axis.
* A *vertex* is the center of a finest-resolution cell, so
  ``world = origin + (index + 0.5) * resolution`` exactly.
* A *subvolume* is an axis-aligned octree node: at ``height`` h it covers
  ``2**h`` cells per side, with the covered finest-cell range
  ``[c * 2**h, (c+1) * 2**h - 1]`` per axis.

All functions here are pure and safe to call from any thread.
"""

from __future__ import annotations

import math
from typing import Iterator, NamedTuple

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


class GridVertex(NamedTuple):
    x: int
    y: int
    z: int


class WorldPoint(NamedTuple):
    x: float
    y: float
    z: float


class Aabb(NamedTuple):
    """Inclusive axis-aligned box of finest-resolution cells."""

    min: GridVertex
    max: GridVertex

    def contains(self, v: GridVertex) -> bool:
        return (self.min.x <= v.x <= self.max.x
                and self.min.y <= v.y <= self.max.y
                and self.min.z <= v.z <= self.max.z)

    def volume(self) -> int:
        return ((self.max.x - self.min.x + 1)
                * (self.max.y - self.min.y + 1)
                * (self.max.z - self.min.z + 1))

    def iter_cells(self) -> Iterator[GridVertex]:
        for x in range(self.min.x, self.max.x + 1):
            for y in range(self.min.y, self.max.y + 1):
                for z in range(self.min.z, self.max.z + 1):
                    yield GridVertex(x, y, z)


class SubvolumeAddress(NamedTuple):
    """Octree node identifier: height 0 is a single finest cell."""

    height: int
    cx: int
    cy: int
    cz: int

    def parent(self) -> "SubvolumeAddress":
        # Arithmetic right shift floors toward -inf, which is exactly the
        # octree parent rule for signed coordinates.
        return SubvolumeAddress(self.height + 1, self.cx >> 1, self.cy >> 1, self.cz >> 1)

    def child(self, bx: int, by: int, bz: int) -> "SubvolumeAddress":
        return SubvolumeAddress(self.height - 1,
                                2 * self.cx + bx, 2 * self.cy + by, 2 * self.cz + bz)

    def children(self) -> Iterator["SubvolumeAddress"]:
        for bx in (0, 1):
            for by in (0, 1):
                for bz in (0, 1):
                    yield self.child(bx, by, bz)

    def contains_vertex(self, v: GridVertex) -> bool:
        h = self.height
        return (v.x >> h == self.cx) and (v.y >> h == self.cy) and (v.z >> h == self.cz)

    def center_vertex(self) -> GridVertex:
        """Representative vertex of the node.

        For height >= 1 the geometric center falls on a cell corner; we pick
        the cell on its +x/+y/+z side so the choice is deterministic.
        """
        h = self.height
        if h == 0:
            return GridVertex(self.cx, self.cy, self.cz)
        half = 1 << (h - 1)
        return GridVertex((self.cx << h) + half, (self.cy << h) + half, (self.cz << h) + half)


def address_of_vertex(v: GridVertex, height: int) -> SubvolumeAddress:
    return SubvolumeAddress(height, v.x >> height, v.y >> height, v.z >> height)


def aabb_of(address: SubvolumeAddress) -> Aabb:
    """Inclusive finest-cell range covered by the subvolume."""
    h = address.height
    side = 1 << h
    lo = GridVertex(address.cx << h, address.cy << h, address.cz << h)
    hi = GridVertex(lo.x + side - 1, lo.y + side - 1, lo.z + side - 1)
    return Aabb(lo, hi)


def are_adjacent(a: Aabb, b: Aabb) -> bool:
    """True iff the boxes overlap or touch by face, edge or corner.

    Equivalent to: the componentwise gap between the boxes is at most one
    finest cell along every axis.
    """
    return (max(a.min.x, b.min.x) - min(a.max.x, b.max.x) <= 1
            and max(a.min.y, b.min.y) - min(a.max.y, b.max.y) <= 1
            and max(a.min.z, b.min.z) - min(a.max.z, b.max.z) <= 1)


def euclidean(a: WorldPoint, b: WorldPoint) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def octile3(a: GridVertex, b: GridVertex, resolution: float) -> float:
    """Exact shortest-path cost on an empty 26-connected grid.

    Axis moves cost 1, planar diagonals sqrt(2), space diagonals sqrt(3),
    all scaled by ``resolution``.
    """
    d1, d2, d3 = sorted((abs(a.x - b.x), abs(a.y - b.y), abs(a.z - b.z)), reverse=True)
    return resolution * ((d1 - d2) + SQRT2 * (d2 - d3) + SQRT3 * d3)


def vertex_center(v: GridVertex, origin: WorldPoint, resolution: float) -> WorldPoint:
    return WorldPoint(origin.x + (v.x + 0.5) * resolution,
                      origin.y + (v.y + 0.5) * resolution,
                      origin.z + (v.z + 0.5) * resolution)


def world_to_vertex(p: WorldPoint, origin: WorldPoint, resolution: float) -> GridVertex:
    return GridVertex(math.floor((p.x - origin.x) / resolution),
                      math.floor((p.y - origin.y) / resolution),
                      math.floor((p.z - origin.z) / resolution))


def vertex_hull(box: Aabb, origin: WorldPoint, resolution: float) -> tuple[WorldPoint, WorldPoint]:
    """World-space hull spanned by the vertex centers of ``box``."""
    lo = vertex_center(box.min, origin, resolution)
    hi = vertex_center(box.max, origin, resolution)
    return lo, hi


_ORIGIN0 = WorldPoint(0.0, 0.0, 0.0)


def dist_point_box(p: WorldPoint, box: Aabb, resolution: float,
                   origin: WorldPoint = _ORIGIN0) -> float:
    """Minimum distance from ``p`` to the hull of the box's vertex centers."""
    lo, hi = vertex_hull(box, origin, resolution)
    dx = max(lo.x - p.x, 0.0, p.x - hi.x)
    dy = max(lo.y - p.y, 0.0, p.y - hi.y)
    dz = max(lo.z - p.z, 0.0, p.z - hi.z)
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def farthest_dist_point_box(p: WorldPoint, box: Aabb, resolution: float,
                            origin: WorldPoint = _ORIGIN0) -> float:
    """Maximum distance from ``p`` to any vertex center of the box.

    Attained at one of the eight corner vertex centers.
    """
    lo, hi = vertex_hull(box, origin, resolution)
    dx = max(abs(p.x - lo.x), abs(p.x - hi.x))
    dy = max(abs(p.y - lo.y), abs(p.y - hi.y))
    dz = max(abs(p.z - lo.z), abs(p.z - hi.z))
    return math.sqrt(dx * dx + dy * dy + dz * dz)

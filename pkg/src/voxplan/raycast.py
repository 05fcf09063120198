"""Supercover segment traversal over a dense occupancy array.

The supercover of a segment is the set of every cell whose *closed* unit
cube the closed segment touches.  Unlike Bresenham-style traversals this
includes all cells met exactly at shared faces, edges or corners, so a
segment grazing the corner between two occupied cells is blocked.  This
errs on the safe side and prevents corner-cutting paths.

Coordinates are in "u-space": cell units relative to the dense array, so
cell ``(i, j, k)`` spans ``[i, i+1] x [j, j+1] x [k, k+1]`` and a vertex
center sits at half-integer coordinates.  Cells outside the array are
treated as occupied.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Tolerance for detecting simultaneous axis crossings (exact corner/edge
# hits land well within this; genuinely distinct crossings this close are
# conservatively treated as ties, which only adds cells).
_TIE_TOL = 1e-9


@njit(cache=True)
def _cell_blocked(occ: np.ndarray, x: int, y: int, z: int) -> bool:
    if (x < 0 or y < 0 or z < 0
            or x >= occ.shape[0] or y >= occ.shape[1] or z >= occ.shape[2]):
        return True
    return occ[x, y, z] != 0


@njit(cache=True)
def _endpoint_blocked(occ: np.ndarray, ux: float, uy: float, uz: float) -> bool:
    # An endpoint lying exactly on a grid plane touches the cells on both
    # sides of that plane; check the full incident set.
    ix = int(np.floor(ux))
    iy = int(np.floor(uy))
    iz = int(np.floor(uz))
    x0, x1 = ix, ix
    y0, y1 = iy, iy
    z0, z1 = iz, iz
    fx = ux - ix
    fy = uy - iy
    fz = uz - iz
    if fx <= _TIE_TOL:
        x0 = ix - 1
    elif fx >= 1.0 - _TIE_TOL:
        x1 = ix + 1
    if fy <= _TIE_TOL:
        y0 = iy - 1
    elif fy >= 1.0 - _TIE_TOL:
        y1 = iy + 1
    if fz <= _TIE_TOL:
        z0 = iz - 1
    elif fz >= 1.0 - _TIE_TOL:
        z1 = iz + 1
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            for z in range(z0, z1 + 1):
                if _cell_blocked(occ, x, y, z):
                    return True
    return False


@njit(cache=True)
def supercover_blocked(occ: np.ndarray,
                       ax: float, ay: float, az: float,
                       bx: float, by: float, bz: float) -> bool:
    """True iff any cell touched by the closed segment a-b is not free."""
    if _endpoint_blocked(occ, ax, ay, az) or _endpoint_blocked(occ, bx, by, bz):
        return True

    dx = bx - ax
    dy = by - ay
    dz = bz - az

    cx = int(np.floor(ax))
    cy = int(np.floor(ay))
    cz = int(np.floor(az))

    sx = 1 if dx > 0.0 else -1
    sy = 1 if dy > 0.0 else -1
    sz = 1 if dz > 0.0 else -1

    # Parameter of the next grid-plane crossing per axis, in [0, 1].
    inf = np.inf
    if dx != 0.0:
        tx = ((cx + (1 if sx > 0 else 0)) - ax) / dx
        dtx = abs(1.0 / dx)
    else:
        tx, dtx = inf, inf
    if dy != 0.0:
        ty = ((cy + (1 if sy > 0 else 0)) - ay) / dy
        dty = abs(1.0 / dy)
    else:
        ty, dty = inf, inf
    if dz != 0.0:
        tz = ((cz + (1 if sz > 0 else 0)) - az) / dz
        dtz = abs(1.0 / dz)
    else:
        tz, dtz = inf, inf

    while True:
        t = min(tx, ty, tz)
        if t > 1.0 + _TIE_TOL:
            break
        stepx = tx - t <= _TIE_TOL
        stepy = ty - t <= _TIE_TOL
        stepz = tz - t <= _TIE_TOL
        # Visit every cell incident to the crossed face/edge/corner: all
        # combinations of advancing the tied axes.
        nx0, nx1 = (0, 1) if stepx else (0, 0)
        ny0, ny1 = (0, 1) if stepy else (0, 0)
        nz0, nz1 = (0, 1) if stepz else (0, 0)
        for ex in range(nx0, nx1 + 1):
            for ey in range(ny0, ny1 + 1):
                for ez in range(nz0, nz1 + 1):
                    if _cell_blocked(occ, cx + ex * sx, cy + ey * sy, cz + ez * sz):
                        return True
        if stepx:
            cx += sx
            tx += dtx
        if stepy:
            cy += sy
            ty += dty
        if stepz:
            cz += sz
            tz += dtz
    return False


@njit(cache=True)
def edge_blocked(occ: np.ndarray, x: int, y: int, z: int,
                 dx: int, dy: int, dz: int) -> bool:
    """Supercover validity of a 26-connectivity grid edge.

    The center-to-center segment of a unit move touches exactly the cells
    of the ``{0,dx} x {0,dy} x {0,dz}`` block around the source cell.
    """
    for ex in (0, dx):
        for ey in (0, dy):
            for ez in (0, dz):
                if _cell_blocked(occ, x + ex, y + ey, z + ez):
                    return True
    return False


def segment_blocked(occ: np.ndarray,
                    a: tuple[float, float, float],
                    b: tuple[float, float, float]) -> bool:
    """Python-facing wrapper around the jitted supercover test."""
    return bool(supercover_blocked(occ, a[0], a[1], a[2], b[0], b[1], b[2]))

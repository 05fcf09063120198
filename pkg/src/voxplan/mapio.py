"""Binary map format (WVOX1) and voxel-list text import.

WVOX1 layout, little-endian:

* magic ``WVOX1`` (4-byte family tag + 1 version digit)
* header: resolution f64, origin 3*f64, bounds min/max 6*i64, block_height u8
* block count u32, then per block (sorted by coordinate):
  coordinate 3*i64, run count u32, runs of (length u32, value u8)

Runs encode the full block in Morton (bit-interleaved) cell order,
including the Occupied padding of cells outside map bounds, so files are
byte-identical for cell-identical maps regardless of how the map was built.
"""

from __future__ import annotations

import io
import struct
from functools import lru_cache

import numpy as np

from .geometry import Aabb, GridVertex, WorldPoint
from .occupancy import Occupancy, OccupancyOctree

MAGIC_FAMILY = b"WVOX"
MAGIC = b"WVOX1"
_HEADER = struct.Struct("<d3d6qB")


class MapIOError(Exception):
    pass


class MalformedHeaderError(MapIOError):
    pass


class VersionMismatchError(MapIOError):
    pass


class TruncatedPayloadError(MapIOError):
    pass


class MalformedPayloadError(MapIOError):
    pass


def _compact_bits(v: np.ndarray, nbits: int) -> np.ndarray:
    out = np.zeros_like(v)
    for b in range(nbits):
        out |= ((v >> np.uint64(3 * b)) & np.uint64(1)) << np.uint64(b)
    return out


@lru_cache(maxsize=8)
def _morton_flat_indices(block_height: int) -> np.ndarray:
    """Flat (C-order) array indices listed in Morton cell order."""
    side = 1 << block_height
    codes = np.arange(side ** 3, dtype=np.uint64)
    x = _compact_bits(codes, block_height)
    y = _compact_bits(codes >> np.uint64(1), block_height)
    z = _compact_bits(codes >> np.uint64(2), block_height)
    return ((x * side + y) * side + z).astype(np.int64)


def _rle_encode(values: np.ndarray) -> list[tuple[int, int]]:
    change = np.flatnonzero(np.diff(values)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(values)]))
    return [(int(e - s), int(values[s])) for s, e in zip(starts, ends)]


def save_map(omap: OccupancyOctree, path: str) -> None:
    dense = omap.dense()
    morton = _morton_flat_indices(omap.block_height)
    bs = omap.block_size
    blocks = sorted(omap._blocks_overlapping_bounds())
    with open(path, "wb") as f:
        f.write(MAGIC)
        b = omap.bounds
        f.write(_HEADER.pack(omap.resolution,
                             omap.origin.x, omap.origin.y, omap.origin.z,
                             b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z,
                             omap.block_height))
        f.write(struct.pack("<I", len(blocks)))
        for bc in blocks:
            arr = np.full((bs, bs, bs), int(Occupancy.OCCUPIED), dtype=np.uint8)
            lo, hi, slo, shi = omap._block_intersection(bc)
            arr[slo[0]:shi[0], slo[1]:shi[1], slo[2]:shi[2]] = \
                dense[lo[0]:hi[0], lo[1]:hi[1], lo[2]:hi[2]]
            runs = _rle_encode(arr.reshape(-1)[morton])
            f.write(struct.pack("<3qI", *bc, len(runs)))
            f.write(b"".join(struct.pack("<IB", n, v) for n, v in runs))


def _read_exact(f: io.BufferedReader, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise TruncatedPayloadError(f"unexpected end of file while reading {what}")
    return data


def load_map(path: str) -> OccupancyOctree:
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if len(magic) < len(MAGIC) or magic[:4] != MAGIC_FAMILY:
            raise MalformedHeaderError(f"not a WVOX map file: bad magic {magic!r}")
        if magic != MAGIC:
            raise VersionMismatchError(f"unsupported map format version {magic!r}")
        raw = f.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise MalformedHeaderError("header record incomplete")
        (res, ox, oy, oz, minx, miny, minz, maxx, maxy, maxz, bh) = _HEADER.unpack(raw)
        if res <= 0 or minx > maxx or miny > maxy or minz > maxz or bh < 1 or bh > 16:
            raise MalformedHeaderError("header fields out of range")
        bounds = Aabb(GridVertex(minx, miny, minz), GridVertex(maxx, maxy, maxz))
        omap = OccupancyOctree(res, WorldPoint(ox, oy, oz), bounds, bh)
        ext = omap.extent_cells()
        dense = np.full(ext, int(Occupancy.FREE), dtype=np.uint8)
        (n_blocks,) = struct.unpack("<I", _read_exact(f, 4, "block count"))
        expected = sorted(omap._blocks_overlapping_bounds())
        if n_blocks != len(expected):
            raise MalformedPayloadError(
                f"block count {n_blocks} does not match bounds ({len(expected)} expected)")
        morton = _morton_flat_indices(bh)
        bs = omap.block_size
        cells_per_block = bs ** 3
        for want in expected:
            bx, by, bz, n_runs = struct.unpack("<3qI", _read_exact(f, 28, "block header"))
            if (bx, by, bz) != want:
                raise MalformedPayloadError(f"unexpected block coordinate {(bx, by, bz)}")
            flat = np.empty(cells_per_block, dtype=np.uint8)
            pos = 0
            for _ in range(n_runs):
                n, v = struct.unpack("<IB", _read_exact(f, 5, "run"))
                if pos + n > cells_per_block:
                    raise MalformedPayloadError("run-length data overruns block")
                flat[pos:pos + n] = v
                pos += n
            if pos != cells_per_block:
                raise TruncatedPayloadError("run-length data does not cover block")
            arr = np.empty(cells_per_block, dtype=np.uint8)
            arr[morton] = flat
            arr = arr.reshape(bs, bs, bs)
            lo, hi, slo, shi = omap._block_intersection(want)
            dense[lo[0]:hi[0], lo[1]:hi[1], lo[2]:hi[2]] = \
                arr[slo[0]:shi[0], slo[1]:shi[1], slo[2]:shi[2]]
        if f.read(1):
            raise MalformedPayloadError("trailing data after final block")
    return OccupancyOctree.from_dense(dense, res, WorldPoint(ox, oy, oz), bounds, bh)


def import_voxel_list(path: str, resolution: float, bounds: Aabb,
                      origin: WorldPoint = WorldPoint(0.0, 0.0, 0.0),
                      block_height: int = 6) -> OccupancyOctree:
    """Read a ``x y z state`` text file into a map (unlisted cells Unknown)."""
    omap = OccupancyOctree(resolution, origin, bounds, block_height,
                           fill=Occupancy.UNKNOWN)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise MalformedPayloadError(
                    f"{path}:{lineno}: expected 'x y z state', got {line!r}")
            try:
                x, y, z, state = (int(p) for p in parts)
                occ = Occupancy(state)
            except ValueError as exc:
                raise MalformedPayloadError(f"{path}:{lineno}: {exc}") from None
            omap.set_cell(GridVertex(x, y, z), occ)
    return omap

"""Deterministic benchmark harness.

Generates worlds and queries from declared seeds, runs each configured
planner on each query with per-query wall-time measurement, validates every
successful path with an independent checker, and emits one CSV row per
(map, planner, query).  Two runs with the same suite config produce
byte-identical CSVs except for the wall-time column.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import baselines
from .geometry import GridVertex, WorldPoint, euclidean
from .occupancy import FREE, OccupancyOctree, generate_clutter_map, inflate
from .planner import PlannerConfig, QuerySpec, plan
from .raycast import supercover_blocked
from .results import PlanResult

CSV_HEADER = ("map_id,planner_id,query_id,seed,success,status,path_length_m,"
              "wall_time_s,expansions,los_checks,refinements,init_leaves")

PLANNER_KINDS = ("astar", "theta", "lazytheta", "octree-astar", "wavestar")


class SuiteError(Exception):
    pass


class PathValidationError(SuiteError):
    """A planner returned a path that fails independent validation."""


@dataclass
class BenchRecord:
    map_id: str
    planner_id: str
    query_id: int
    seed: int
    success: bool
    status: str
    path_length: float | None
    wall_time: float
    expansions: int
    los_checks: int
    refinements: int
    init_leaves: int

    def csv_row(self) -> str:
        length = repr(self.path_length) if self.path_length is not None else ""
        return (f"{self.map_id},{self.planner_id},{self.query_id},{self.seed},"
                f"{'true' if self.success else 'false'},{self.status},{length},"
                f"{self.wall_time:.6f},{self.expansions},{self.los_checks},"
                f"{self.refinements},{self.init_leaves}")


@dataclass
class MapSpec:
    map_id: str
    extent: float = 20.0
    resolution: float = 0.1
    obstacles: int = 0
    seed: int = 0
    file: str | None = None

    def build(self) -> OccupancyOctree:
        if self.file is not None:
            from .mapio import load_map
            return load_map(self.file)
        return generate_clutter_map(self.extent, self.resolution, self.obstacles,
                                    self.seed)


@dataclass
class PlannerSpec:
    planner_id: str
    kind: str
    epsilon: float = 1e-2
    r_init: float | None = None
    lazy: bool = False
    los_max_dist: float | None = None
    init: bool = True
    refine: bool = True

    def __post_init__(self):
        if self.kind not in PLANNER_KINDS:
            raise SuiteError(f"unknown planner kind {self.kind!r}")

    def run(self, omap: OccupancyOctree, query: QuerySpec) -> PlanResult:
        if self.kind == "astar":
            return baselines.plan_astar(omap, query)
        if self.kind == "theta":
            return baselines.plan_theta(omap, query, self.los_max_dist)
        if self.kind == "lazytheta":
            return baselines.plan_lazy_theta(omap, query, self.los_max_dist)
        if self.kind == "octree-astar":
            return baselines.plan_octree_leaf_astar(omap, query)
        cfg = PlannerConfig(epsilon=self.epsilon, r_init=self.r_init, lazy=self.lazy,
                            los_max_dist=self.los_max_dist, init=self.init,
                            refine=self.refine)
        return plan(omap, cfg, query)


@dataclass
class SuiteConfig:
    maps: list[MapSpec]
    planners: list[PlannerSpec]
    inflation_radius: float = 0.0
    queries_per_map: int = 10
    query_seed: int = 0

    def __post_init__(self):
        ids = [p.planner_id for p in self.planners]
        if len(set(ids)) != len(ids):
            raise SuiteError("duplicate planner ids")
        mids = [m.map_id for m in self.maps]
        if len(set(mids)) != len(mids):
            raise SuiteError("duplicate map ids")


def sample_queries(omap: OccupancyOctree, n: int, seed: int) -> list[QuerySpec]:
    """Uniform random free-cell-center pairs (rejection sampling on occupancy
    only; mutual reachability is deliberately not checked)."""
    dense = omap.dense()
    if not (dense == int(FREE)).any():
        raise SuiteError("map has no free cells")
    rng = np.random.default_rng(seed)
    b = omap.bounds
    ext = omap.extent_cells()

    def draw() -> GridVertex:
        while True:
            x = int(rng.integers(0, ext[0]))
            y = int(rng.integers(0, ext[1]))
            z = int(rng.integers(0, ext[2]))
            if dense[x, y, z] == int(FREE):
                return GridVertex(x + b.min.x, y + b.min.y, z + b.min.z)

    queries = []
    for _ in range(n):
        start = draw()
        goal = draw()
        while goal == start:
            goal = draw()
        queries.append(QuerySpec(omap.world_of(start), omap.world_of(goal)))
    return queries


# -- independent path validation ----------------------------------------------

def validate_path(omap: OccupancyOctree, waypoints: list[WorldPoint],
                  query: QuerySpec | None = None) -> bool:
    """True iff every segment touches only free cells, checked both by
    supercover traversal and by dense sampling at resolution/20 steps, and
    the endpoints match the query within half a cell diagonal."""
    if len(waypoints) < 2:
        return False
    if query is not None:
        half_diag = 0.5 * math.sqrt(3.0) * omap.resolution
        if euclidean(waypoints[0], query.start) > half_diag + 1e-9:
            return False
        if euclidean(waypoints[-1], query.goal) > half_diag + 1e-9:
            return False
    dense = omap.dense()
    res = omap.resolution
    o = omap.origin
    bm = omap.bounds.min
    step = res / 20.0
    for a, b in zip(waypoints, waypoints[1:]):
        au = ((a.x - o.x) / res - bm.x, (a.y - o.y) / res - bm.y,
              (a.z - o.z) / res - bm.z)
        bu = ((b.x - o.x) / res - bm.x, (b.y - o.y) / res - bm.y,
              (b.z - o.z) / res - bm.z)
        if supercover_blocked(dense, au[0], au[1], au[2], bu[0], bu[1], bu[2]):
            return False
        n = max(2, int(math.ceil(euclidean(a, b) / step)) + 1)
        ts = np.linspace(0.0, 1.0, n)
        px = au[0] + (bu[0] - au[0]) * ts
        py = au[1] + (bu[1] - au[1]) * ts
        pz = au[2] + (bu[2] - au[2]) * ts
        ix = np.floor(px).astype(np.int64)
        iy = np.floor(py).astype(np.int64)
        iz = np.floor(pz).astype(np.int64)
        if (ix < 0).any() or (iy < 0).any() or (iz < 0).any() \
                or (ix >= dense.shape[0]).any() or (iy >= dense.shape[1]).any() \
                or (iz >= dense.shape[2]).any():
            return False
        if (dense[ix, iy, iz] != int(FREE)).any():
            return False
    return True


# -- suite execution ------------------------------------------------------------

_WORKER_STATE: dict = {}


def _run_one(omap: OccupancyOctree, spec: PlannerSpec, query: QuerySpec,
             map_id: str, query_id: int, seed: int) -> BenchRecord:
    try:
        result = spec.run(omap, query)
    except Exception as exc:  # planner defect: record and continue the suite
        return BenchRecord(map_id, spec.planner_id, query_id, seed, False,
                           f"Error({type(exc).__name__})", None, 0.0, 0, 0, 0, 0)
    if result.success:
        if not validate_path(omap, result.waypoints, query):
            raise PathValidationError(
                f"{spec.planner_id} returned an invalid path on "
                f"{map_id} query {query_id}")
    st = result.stats
    return BenchRecord(map_id, spec.planner_id, query_id, seed, result.success,
                       result.status.value,
                       result.length if result.success else None,
                       st.wall_time, st.expansions, st.los_checks,
                       st.refinements, st.init_leaves)


def _worker(task: tuple[int, int, int]) -> tuple[int, BenchRecord]:
    idx, planner_idx, query_idx = task
    omap = _WORKER_STATE["map"]
    spec = _WORKER_STATE["planners"][planner_idx]
    query = _WORKER_STATE["queries"][query_idx]
    rec = _run_one(omap, spec, query, _WORKER_STATE["map_id"], query_idx,
                   _WORKER_STATE["seed"])
    return idx, rec


def run_suite(cfg: SuiteConfig, jobs: int = 1,
              progress=None) -> list[BenchRecord]:
    records: list[BenchRecord] = []
    for mspec in cfg.maps:
        omap = mspec.build()
        if cfg.inflation_radius > 0:
            omap = inflate(omap, cfg.inflation_radius)
        qseed = cfg.query_seed + mspec.seed
        queries = sample_queries(omap, cfg.queries_per_map, qseed)
        tasks = [(i, pi, qi)
                 for i, (pi, qi) in enumerate(
                     (pi, qi) for pi in range(len(cfg.planners))
                     for qi in range(len(queries)))]
        out: list[BenchRecord | None] = [None] * len(tasks)
        if jobs > 1:
            import multiprocessing as mp
            _WORKER_STATE.update(map=omap, planners=cfg.planners, queries=queries,
                                 map_id=mspec.map_id, seed=qseed)
            ctx = mp.get_context("fork")
            with ctx.Pool(jobs) as pool:
                for idx, rec in pool.imap_unordered(_worker, tasks, chunksize=4):
                    out[idx] = rec
                    if progress:
                        progress(mspec.map_id, rec)
            _WORKER_STATE.clear()
        else:
            for idx, pi, qi in tasks:
                rec = _run_one(omap, cfg.planners[pi], queries[qi],
                               mspec.map_id, qi, qseed)
                out[idx] = rec
                if progress:
                    progress(mspec.map_id, rec)
        records.extend(out)  # type: ignore[arg-type]
    return records


def write_csv(records: list[BenchRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(CSV_HEADER + "\n")
        for rec in records:
            f.write(rec.csv_row() + "\n")


# -- suite config file -----------------------------------------------------------

_SECTION_KEYS = {
    "suite": {"inflation_radius", "queries_per_map", "query_seed"},
    "map": {"id", "extent", "resolution", "obstacles", "seed", "file"},
    "planner": {"id", "kind", "epsilon", "r_init", "lazy", "los_max_dist",
                "init", "refine"},
}


def _parse_value(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def load_suite_config(path: str) -> SuiteConfig:
    """Parse the declarative suite file: ``[suite]`` once, then repeated
    ``[map]`` and ``[planner]`` blocks of ``key = value`` lines."""
    suite: dict = {}
    maps: list[dict] = []
    planners: list[dict] = []
    current: dict | None = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip().lower()
                if section == "suite":
                    current = suite
                elif section == "map":
                    maps.append({})
                    current = maps[-1]
                elif section == "planner":
                    planners.append({})
                    current = planners[-1]
                else:
                    raise SuiteError(f"{path}:{lineno}: unknown section [{section}]")
                current["__section__"] = section
                continue
            if current is None or "=" not in line:
                raise SuiteError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (s.strip() for s in line.split("=", 1))
            section = current["__section__"]
            if key not in _SECTION_KEYS[section]:
                raise SuiteError(f"{path}:{lineno}: unknown key {key!r} in [{section}]")
            current[key] = _parse_value(raw)
    suite.pop("__section__", None)
    if not maps:
        raise SuiteError(f"{path}: no [map] blocks")
    if not planners:
        raise SuiteError(f"{path}: no [planner] blocks")
    map_specs = []
    for i, m in enumerate(maps):
        m.pop("__section__", None)
        map_specs.append(MapSpec(
            map_id=str(m.get("id", f"map{i}")),
            extent=float(m.get("extent", 20.0)),
            resolution=float(m.get("resolution", 0.1)),
            obstacles=int(m.get("obstacles", 0)),
            seed=int(m.get("seed", 0)),
            file=m.get("file")))
    planner_specs = []
    for i, p in enumerate(planners):
        p.pop("__section__", None)
        if "kind" not in p:
            raise SuiteError(f"{path}: planner block {i} missing 'kind'")
        planner_specs.append(PlannerSpec(
            planner_id=str(p.get("id", p["kind"])),
            kind=str(p["kind"]),
            epsilon=float(p.get("epsilon", 1e-2)),
            r_init=float(p["r_init"]) if "r_init" in p else None,
            lazy=bool(p.get("lazy", False)),
            los_max_dist=float(p["los_max_dist"]) if "los_max_dist" in p else None,
            init=bool(p.get("init", True)),
            refine=bool(p.get("refine", True))))
    return SuiteConfig(maps=map_specs, planners=planner_specs,
                       inflation_radius=float(suite.get("inflation_radius", 0.0)),
                       queries_per_map=int(suite.get("queries_per_map", 10)),
                       query_seed=int(suite.get("query_seed", 0)))

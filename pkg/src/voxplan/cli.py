"""Command-line interface.

Exit codes for ``plan``: 0 path found, 2 no path, 3 blocked endpoint,
1 any other error.  Results go to stdout (JSON for single plans, CSV for
suites); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bench import (
    PLANNER_KINDS,
    PlannerSpec,
    SuiteError,
    load_suite_config,
    run_suite,
    validate_path,
    write_csv,
)
from .geometry import WorldPoint
from .mapio import MapIOError, load_map, save_map
from .occupancy import FREE, OccupancyOctree, generate_clutter_map, inflate
from .planner import PlannerConfig, QuerySpec, plan
from .results import PlanStatus


def _parse_point(text: str) -> WorldPoint:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z — got {text!r}")
    return WorldPoint(*(float(p) for p in parts))


def _load_inflated(args) -> OccupancyOctree:
    omap = load_map(args.map)
    if getattr(args, "inflate", 0.0):
        omap = inflate(omap, args.inflate)
    return omap


def _planner_spec(args) -> PlannerSpec:
    return PlannerSpec(
        planner_id=args.planner, kind=args.planner,
        epsilon=args.epsilon, r_init=args.r_init, lazy=args.lazy,
        los_max_dist=args.los_cap, init=not args.no_init,
        refine=not args.no_refine)


def _add_planner_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--planner", choices=PLANNER_KINDS, default="wavestar",
                   help="planner to run (default: wavestar)")
    p.add_argument("--start", type=_parse_point, required=True, metavar="X,Y,Z")
    p.add_argument("--goal", type=_parse_point, required=True, metavar="X,Y,Z")
    p.add_argument("--inflate", type=float, default=0.0, metavar="R",
                   help="inflate obstacles by this radius in meters (default: 0)")
    p.add_argument("--epsilon", type=float, default=1e-2,
                   help="relative per-edge suboptimality tolerance (default: 1e-2)")
    p.add_argument("--r-init", dest="r_init", type=float, default=None,
                   help="initialization resolution in meters "
                        "(default: map resolution)")
    p.add_argument("--lazy", action="store_true",
                   help="defer visibility checks to expansion time")
    p.add_argument("--los-cap", dest="los_cap", type=float, default=None,
                   help="visibility check distance cap in meters "
                        "(default: 512 cells)")
    p.add_argument("--no-init", action="store_true",
                   help="disable obstacle-adjacent initialization (ablation)")
    p.add_argument("--no-refine", action="store_true",
                   help="disable dynamic refinement (ablation)")


def cmd_gen_map(args) -> int:
    omap = generate_clutter_map(args.extent, args.res, args.obstacles, args.seed)
    save_map(omap, args.out)
    frac = float((omap.dense() != int(FREE)).mean())
    print(f"wrote {args.out}: {args.extent} m cube at {args.res} m, "
          f"{args.obstacles} obstacles, occupied fraction {frac:.4f}",
          file=sys.stderr)
    return 0


def cmd_inflate(args) -> int:
    omap = load_map(args.map)
    save_map(inflate(omap, args.radius), args.out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def cmd_plan(args) -> int:
    omap = _load_inflated(args)
    spec = _planner_spec(args)
    result = spec.run(omap, QuerySpec(args.start, args.goal))
    json.dump(result.as_dict(), sys.stdout, indent=2)
    print()
    if result.status == PlanStatus.PATH_FOUND:
        return 0
    if result.status == PlanStatus.NO_PATH_FOUND:
        return 2
    return 3


def cmd_bench(args) -> int:
    cfg = load_suite_config(args.suite)
    done = {"n": 0}
    total = len(cfg.maps) * len(cfg.planners) * cfg.queries_per_map

    def progress(map_id, rec):
        done["n"] += 1
        if args.verbose:
            print(f"[{done['n']}/{total}] {map_id} {rec.planner_id} "
                  f"q{rec.query_id}: {rec.status} {rec.wall_time:.3f}s",
                  file=sys.stderr)

    records = run_suite(cfg, jobs=args.jobs, progress=progress)
    write_csv(records, args.out)
    print(f"wrote {args.out}: {len(records)} records", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    omap = _load_inflated(args)
    with open(args.path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    waypoints = [WorldPoint(*p) for p in doc.get("waypoints", [])]
    query = None
    if waypoints:
        query = QuerySpec(waypoints[0], waypoints[-1])
    ok = validate_path(omap, waypoints, query)
    print("valid" if ok else "INVALID", file=sys.stderr)
    return 0 if ok else 1


def cmd_export_costfield(args) -> int:
    omap = _load_inflated(args)
    if args.planner != "wavestar":
        print("export-costfield requires --planner wavestar", file=sys.stderr)
        return 1
    cfg = PlannerConfig(epsilon=args.epsilon, r_init=args.r_init, lazy=args.lazy,
                        los_max_dist=args.los_cap, init=not args.no_init,
                        refine=not args.no_refine)
    from .planner import _HierarchicalSearch
    search = _HierarchicalSearch(omap, cfg, QuerySpec(args.start, args.goal))
    result = search.run()
    if search.field is None:
        print("endpoints blocked; no cost field to export", file=sys.stderr)
        return 3
    search.field.export_dump(args.out)
    print(f"wrote {args.out} ({result.status.value})", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="voxplan",
        description="Hierarchical any-angle path planning on 3D occupancy grids")
    ap.add_argument("--version", action="version", version=f"voxplan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-map", help="generate a synthetic clutter map")
    p.add_argument("--extent", type=float, required=True, help="cube side in meters")
    p.add_argument("--res", type=float, required=True, help="cell size in meters")
    p.add_argument("--obstacles", type=int, default=0, help="number of obstacles")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="output WVOX1 file")
    p.set_defaults(fn=cmd_gen_map)

    p = sub.add_parser("inflate", help="inflate obstacles by a robot radius")
    p.add_argument("--map", required=True)
    p.add_argument("--radius", type=float, required=True, help="radius in meters")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_inflate)

    p = sub.add_parser("plan", help="plan one query, JSON result on stdout")
    p.add_argument("--map", required=True)
    _add_planner_args(p)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("bench", help="run a benchmark suite, CSV output")
    p.add_argument("--suite", required=True, help="suite config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("validate", help="validate a plan JSON against a map")
    p.add_argument("--map", required=True)
    p.add_argument("--inflate", type=float, default=0.0, metavar="R")
    p.add_argument("--path", required=True, help="plan JSON file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("export-costfield",
                       help="plan a query and dump the cost-field leaves")
    p.add_argument("--map", required=True)
    _add_planner_args(p)
    p.add_argument("--out", required=True, help="output dump file")
    p.set_defaults(fn=cmd_export_costfield)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (MapIOError, SuiteError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

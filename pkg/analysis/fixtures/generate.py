#!/usr/bin/env python3
"""Regenerate the analysis test fixtures from the primary package.

Produces:
  ablation_small.csv  — bench CSV of the hierarchical-planner ablation cells
                        plus the Theta* baseline on one small clutter world
  fig3_dump.txt       — cost-field dump of the single-obstacle scenario whose
                        slice shows exactly three predecessor regions
  fig3_map.wvox       — the map behind that dump

Run from this directory: python3 generate.py
"""

import pathlib
import subprocess
import sys

import numpy as np

from voxplan import (
    MapSpec,
    OccupancyOctree,
    PlannerSpec,
    SuiteConfig,
    run_suite,
    save_map,
    write_csv,
)
from voxplan.geometry import Aabb, GridVertex, WorldPoint

HERE = pathlib.Path(__file__).resolve().parent


def make_ablation_csv() -> None:
    cfg = SuiteConfig(
        maps=[MapSpec("small", extent=6.4, resolution=0.1, obstacles=8, seed=21)],
        planners=[
            PlannerSpec("theta", "theta"),
            PlannerSpec("ours", "wavestar", epsilon=1e-2),
            PlannerSpec("ours-lazy", "wavestar", epsilon=1e-2, lazy=True),
            PlannerSpec("init-only", "wavestar", epsilon=1e-2, refine=False),
            PlannerSpec("ref-only", "wavestar", epsilon=1e-2, init=False),
            PlannerSpec("match-map", "wavestar", epsilon=1e-2, init=False,
                        refine=False),
        ],
        inflation_radius=0.2, queries_per_map=12, query_seed=5)
    write_csv(run_suite(cfg), str(HERE / "ablation_small.csv"))


def make_fig3_dump() -> None:
    dense = np.zeros((128, 80, 1), dtype=np.uint8)
    dense[40:80, 0:50, :] = 1  # box on the floor; routes wrap its top corners
    omap = OccupancyOctree.from_dense(
        dense, 0.1, WorldPoint(0.0, 0.0, 0.0),
        Aabb(GridVertex(0, 0, 0), GridVertex(127, 79, 0)), block_height=6)
    map_path = HERE / "fig3_map.wvox"
    save_map(omap, str(map_path))
    subprocess.run(
        [sys.executable, "-m", "voxplan.cli", "export-costfield",
         "--map", str(map_path), "--planner", "wavestar", "--epsilon", "0.01",
         "--start", "1.05,2.55,0.05", "--goal", "12.05,1.05,0.05",
         "--out", str(HERE / "fig3_dump.txt")],
        check=True)


if __name__ == "__main__":
    make_ablation_csv()
    make_fig3_dump()
    print("fixtures written to", HERE)

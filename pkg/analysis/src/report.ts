// Turns a bench CSV into summary tables (Markdown + CSV) and box plots of
// path-length ratio and speedup relative to the Theta* baseline (rendered
// as SVG with the baseline drawn at 1.0).

import { BenchRecord, parseBenchCsv } from "./csv.js";
import { boxplotSvg } from "./svg.js";
import { BoxGroup } from "./svg.js";
import { boxStats, mean, median, quantile, std } from "./stats.js";

export const BASELINE_ID = "theta";

// Ablation grid cell ids (initialization x refinement), when present.
const GRID_CELLS: Record<string, [string, string]> = {
  "match-map": ["None", "None"],
  "init-only": ["10 cm", "None"],
  "ref-only": ["None", "1e-2"],
  ours: ["10 cm", "1e-2"],
};

export interface Report {
  files: Map<string, string>;
  notices: string[];
}

interface Joined {
  plannerId: string;
  ratios: number[];
  speedups: number[];
}

function groupBy<T>(xs: T[], key: (x: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const x of xs) {
    const k = key(x);
    const arr = out.get(k);
    if (arr) arr.push(x);
    else out.set(k, [x]);
  }
  return out;
}

function fmt(x: number, digits = 3): string {
  return Number.isFinite(x) ? x.toFixed(digits) : "-";
}

/** Relative metrics joined against the baseline on queries where the
 * baseline succeeded (queries without a baseline success are excluded). */
export function joinAgainstBaseline(records: BenchRecord[]): Joined[] {
  const base = new Map<string, BenchRecord>();
  for (const r of records) {
    if (r.plannerId === BASELINE_ID && r.success) {
      base.set(`${r.mapId}|${r.queryId}`, r);
    }
  }
  const joined: Joined[] = [];
  for (const [pid, rows] of groupBy(records, (r) => r.plannerId)) {
    if (pid === BASELINE_ID) continue;
    const ratios: number[] = [];
    const speedups: number[] = [];
    for (const r of rows) {
      const b = base.get(`${r.mapId}|${r.queryId}`);
      if (!b || !r.success || r.pathLength === null || b.pathLength === null) {
        continue;
      }
      ratios.push(r.pathLength / b.pathLength);
      if (r.wallTime > 0 && b.wallTime > 0) speedups.push(b.wallTime / r.wallTime);
    }
    joined.push({ plannerId: pid, ratios, speedups });
  }
  return joined;
}

function summaryTables(records: BenchRecord[]): string {
  const lines: string[] = ["# Benchmark summary", ""];
  const maps = [...new Set(records.map((r) => r.mapId))].sort();
  const planners = [...new Set(records.map((r) => r.plannerId))].sort();

  lines.push("## Path length (m, mean ± std over solved queries)", "");
  lines.push(`| planner | ${maps.join(" | ")} |`);
  lines.push(`|---${"|---".repeat(maps.length)}|`);
  for (const p of planners) {
    const cells = maps.map((m) => {
      const ls = records
        .filter((r) => r.plannerId === p && r.mapId === m && r.success)
        .map((r) => r.pathLength as number);
      return ls.length ? `${fmt(mean(ls), 2)} ± ${fmt(std(ls), 2)}` : "-";
    });
    lines.push(`| ${p} | ${cells.join(" | ")} |`);
  }

  lines.push("", "## Runtime (s, mean over all queries)", "");
  lines.push(`| planner | ${maps.join(" | ")} |`);
  lines.push(`|---${"|---".repeat(maps.length)}|`);
  for (const p of planners) {
    const cells = maps.map((m) => {
      const ts = records
        .filter((r) => r.plannerId === p && r.mapId === m)
        .map((r) => r.wallTime);
      return ts.length ? fmt(mean(ts), 3) : "-";
    });
    lines.push(`| ${p} | ${cells.join(" | ")} |`);
  }
  lines.push("");
  return lines.join("\n");
}

function successRateCsv(records: BenchRecord[]): string {
  const maps = [...new Set(records.map((r) => r.mapId))].sort();
  const planners = [...new Set(records.map((r) => r.plannerId))].sort();
  const lines = [`planner,${maps.join(",")}`];
  for (const p of planners) {
    const cells = maps.map((m) => {
      const rows = records.filter((r) => r.plannerId === p && r.mapId === m);
      const rate = (100 * rows.filter((r) => r.success).length) / rows.length;
      return rate.toFixed(1);
    });
    lines.push(`${p},${cells.join(",")}`);
  }
  return lines.join("\n") + "\n";
}

function ratioStatsCsv(joined: Joined[]): string {
  const lines = [
    "planner_id,n,median_length_ratio,mean_length_ratio,q1_length_ratio," +
      "q3_length_ratio,median_speedup,mean_speedup",
  ];
  for (const j of joined) {
    if (!j.ratios.length) continue;
    lines.push(
      [
        j.plannerId,
        j.ratios.length,
        median(j.ratios).toPrecision(17),
        mean(j.ratios).toPrecision(17),
        quantile(j.ratios, 0.25).toPrecision(17),
        quantile(j.ratios, 0.75).toPrecision(17),
        j.speedups.length ? median(j.speedups).toPrecision(17) : "",
        j.speedups.length ? mean(j.speedups).toPrecision(17) : "",
      ].join(","),
    );
  }
  return lines.join("\n") + "\n";
}

function ablationGrid(records: BenchRecord[]): string | null {
  const present = new Set(records.map((r) => r.plannerId));
  const cellIds = Object.keys(GRID_CELLS);
  if (!cellIds.every((c) => present.has(c)) || !present.has(BASELINE_ID)) {
    return null;
  }
  // mean relative length per cell over queries solved by the baseline and
  // every cell (excess over the baseline, in percent)
  const base = new Map<string, BenchRecord>();
  for (const r of records) {
    if (r.plannerId === BASELINE_ID && r.success) {
      base.set(`${r.mapId}|${r.queryId}`, r);
    }
  }
  const byCell = new Map<string, Map<string, BenchRecord>>();
  for (const c of cellIds) {
    byCell.set(
      c,
      new Map(
        records
          .filter((r) => r.plannerId === c && r.success)
          .map((r) => [`${r.mapId}|${r.queryId}`, r]),
      ),
    );
  }
  const joint = [...base.keys()].filter((k) =>
    cellIds.every((c) => byCell.get(c)!.has(k)),
  );
  const excess = new Map<string, number[]>();
  for (const c of cellIds) {
    excess.set(
      c,
      joint.map(
        (k) =>
          100 *
          ((byCell.get(c)!.get(k)!.pathLength as number) /
            (base.get(k)!.pathLength as number) -
            1),
      ),
    );
  }
  const cell = (c: string) => {
    const xs = excess.get(c)!;
    return `${fmt(mean(xs), 3)}% ± ${fmt(std(xs), 3)}%`;
  };
  return [
    "# Ablation grid: path length excess over the baseline",
    "",
    `(${joint.length} queries solved by every configuration)`,
    "",
    "| refinement \\ initialization | None | 10 cm |",
    "|---|---|---|",
    `| None | ${cell("match-map")} | ${cell("init-only")} |`,
    `| 1e-2 | ${cell("ref-only")} | ${cell("ours")} |`,
    "",
  ].join("\n");
}

export function buildReport(csvText: string): Report {
  const records = parseBenchCsv(csvText);
  const files = new Map<string, string>();
  const notices: string[] = [];

  files.set("summary_tables.md", summaryTables(records));
  files.set("success_rates.csv", successRateCsv(records));

  const planners = new Set(records.map((r) => r.plannerId));
  if (!planners.has(BASELINE_ID) || planners.size < 2) {
    notices.push(
      `baseline '${BASELINE_ID}' missing or single planner: relative plots skipped`,
    );
    return { files, notices };
  }

  const joined = joinAgainstBaseline(records).filter((j) => j.ratios.length > 0);
  files.set("ratio_stats.csv", ratioStatsCsv(joined));
  const ratioGroups: BoxGroup[] = joined.map((j) => ({
    label: j.plannerId,
    stats: boxStats(j.ratios),
    points: j.ratios,
  }));
  files.set(
    "length_ratio_boxplot.svg",
    boxplotSvg("Path length relative to baseline", "length ratio", ratioGroups, 1.0),
  );
  const speedGroups: BoxGroup[] = joined
    .filter((j) => j.speedups.length)
    .map((j) => ({
      label: j.plannerId,
      stats: boxStats(j.speedups),
      points: j.speedups,
    }));
  if (speedGroups.length) {
    files.set(
      "speedup_boxplot.svg",
      boxplotSvg("Speedup relative to baseline", "speedup", speedGroups, 1.0, true),
    );
  }
  const grid = ablationGrid(records);
  if (grid !== null) {
    files.set("ablation_grid.md", grid);
  } else {
    notices.push("ablation configurations not present: grid skipped");
  }
  return { files, notices };
}

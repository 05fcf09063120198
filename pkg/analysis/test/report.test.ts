import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { EXPECTED_COLUMNS } from "../src/csv.js";
import { buildReport } from "../src/report.js";

const HEADER = EXPECTED_COLUMNS.join(",");
const FIXTURES = join(__dirname, "..", "fixtures");

function row(
  mapId: string, planner: string, q: number, length: number | null,
  time = 0.1, success = length !== null,
): string {
  return [
    mapId, planner, q, 11, success ? "true" : "false",
    success ? "PathFound" : "NoPathFound",
    length === null ? "" : String(length), time.toFixed(6), 5, 6, 0, 1,
  ].join(",");
}

describe("report generation", () => {
  it("reports the exact median ratio for a constructed 1.1x planner", () => {
    // ACCEPTANCE 11 (ratio half): planner B's lengths are exactly 1.1x the
    // baseline's, so the reported median ratio must be 1.1 to 1e-12.
    const lines = [HEADER];
    for (let q = 0; q < 9; q++) {
      const len = 5 + q;
      lines.push(row("m", "theta", q, len, 0.2));
      lines.push(row("m", "planner-b", q, 1.1 * len, 0.05));
    }
    const report = buildReport(lines.join("\n") + "\n");
    const stats = report.files.get("ratio_stats.csv")!;
    const data = stats.split("\n")[1].split(",");
    expect(data[0]).toBe("planner-b");
    expect(Math.abs(Number(data[2]) - 1.1)).toBeLessThanOrEqual(1e-12);
    expect(report.files.has("length_ratio_boxplot.svg")).toBe(true);
    expect(report.files.get("length_ratio_boxplot.svg")).toContain("<svg");
  });

  it("emits the ablation grid and boxplots from the suite fixture", () => {
    // ACCEPTANCE 11 (artifact half): a real suite CSV containing the four
    // initialization x refinement cells produces the grid and both plots.
    const csv = readFileSync(join(FIXTURES, "ablation_small.csv"), "utf-8");
    const report = buildReport(csv);
    expect(report.files.has("ablation_grid.md")).toBe(true);
    const grid = report.files.get("ablation_grid.md")!;
    expect(grid).toContain("| refinement \\ initialization | None | 10 cm |");
    expect(grid.match(/%/g)!.length).toBeGreaterThanOrEqual(8);
    expect(report.files.has("length_ratio_boxplot.svg")).toBe(true);
    expect(report.files.has("speedup_boxplot.svg")).toBe(true);
    expect(report.files.has("summary_tables.md")).toBe(true);
    expect(report.files.has("success_rates.csv")).toBe(true);
  });

  it("skips relative plots with a notice when only one planner exists", () => {
    const lines = [HEADER];
    for (let q = 0; q < 4; q++) lines.push(row("m", "astar", q, 3 + q));
    const report = buildReport(lines.join("\n") + "\n");
    expect(report.files.has("summary_tables.md")).toBe(true);
    expect(report.files.has("length_ratio_boxplot.svg")).toBe(false);
    expect(report.notices.some((n) => n.includes("skipped"))).toBe(true);
  });

  it("excludes queries without a baseline success from relative metrics", () => {
    const lines = [
      HEADER,
      row("m", "theta", 0, 10),
      row("m", "theta", 1, null),
      row("m", "b", 0, 12),
      row("m", "b", 1, 100),
    ];
    const report = buildReport(lines.join("\n") + "\n");
    const stats = report.files.get("ratio_stats.csv")!.split("\n")[1].split(",");
    expect(Number(stats[1])).toBe(1); // only query 0 joins
    expect(Number(stats[2])).toBeCloseTo(1.2, 12);
  });

  it("is deterministic for identical input", () => {
    const csv = readFileSync(join(FIXTURES, "ablation_small.csv"), "utf-8");
    const a = buildReport(csv);
    const b = buildReport(csv);
    expect([...a.files.keys()]).toEqual([...b.files.keys()]);
    for (const [name, content] of a.files) {
      expect(b.files.get(name)).toBe(content);
    }
  });
});

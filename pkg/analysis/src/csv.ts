// Bench CSV schema (must match the planner harness exactly; any column
// difference is reported as an explicit diff).

export const EXPECTED_COLUMNS = [
  "map_id",
  "planner_id",
  "query_id",
  "seed",
  "success",
  "status",
  "path_length_m",
  "wall_time_s",
  "expansions",
  "los_checks",
  "refinements",
  "init_leaves",
] as const;

export interface BenchRecord {
  mapId: string;
  plannerId: string;
  queryId: number;
  seed: number;
  success: boolean;
  status: string;
  pathLength: number | null;
  wallTime: number;
  expansions: number;
  losChecks: number;
  refinements: number;
  initLeaves: number;
}

export class SchemaError extends Error {
  constructor(missing: string[], unexpected: string[]) {
    super(
      "bench CSV schema mismatch" +
        (missing.length ? `; missing columns: ${missing.join(", ")}` : "") +
        (unexpected.length ? `; unexpected columns: ${unexpected.join(", ")}` : ""),
    );
    this.name = "SchemaError";
  }
}

export function parseBenchCsv(text: string): BenchRecord[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError([...EXPECTED_COLUMNS], []);
  const header = lines[0].split(",");
  const missing = EXPECTED_COLUMNS.filter((c) => !header.includes(c));
  const unexpected = header.filter(
    (c) => !(EXPECTED_COLUMNS as readonly string[]).includes(c),
  );
  if (
    missing.length ||
    unexpected.length ||
    header.length !== EXPECTED_COLUMNS.length ||
    header.some((c, i) => c !== EXPECTED_COLUMNS[i])
  ) {
    throw new SchemaError(missing, unexpected);
  }
  const records: BenchRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cols = lines[i].split(",");
    if (cols.length !== EXPECTED_COLUMNS.length) {
      throw new Error(`row ${i + 1}: expected ${EXPECTED_COLUMNS.length} fields, got ${cols.length}`);
    }
    const success = cols[4] === "true";
    records.push({
      mapId: cols[0],
      plannerId: cols[1],
      queryId: Number(cols[2]),
      seed: Number(cols[3]),
      success,
      status: cols[5],
      pathLength: cols[6] === "" ? null : Number(cols[6]),
      wallTime: Number(cols[7]),
      expansions: Number(cols[8]),
      losChecks: Number(cols[9]),
      refinements: Number(cols[10]),
      initLeaves: Number(cols[11]),
    });
  }
  return records;
}

import { describe, expect, it } from "vitest";
import { EXPECTED_COLUMNS, SchemaError, parseBenchCsv } from "../src/csv.js";

const HEADER = EXPECTED_COLUMNS.join(",");

describe("bench CSV parsing", () => {
  it("parses typed rows", () => {
    const text = `${HEADER}\nm1,theta,0,42,true,PathFound,12.5,0.125,10,20,0,5\n` +
      `m1,theta,1,42,false,NoPathFound,,0.5,100,200,3,7\n`;
    const rows = parseBenchCsv(text);
    expect(rows).toHaveLength(2);
    expect(rows[0].pathLength).toBeCloseTo(12.5, 12);
    expect(rows[0].success).toBe(true);
    expect(rows[1].pathLength).toBeNull();
    expect(rows[1].success).toBe(false);
    expect(rows[1].refinements).toBe(3);
  });

  it("reports missing and unexpected columns explicitly", () => {
    const bad = HEADER.replace("path_length_m", "length") + "\n";
    let err: unknown;
    try {
      parseBenchCsv(bad);
    } catch (e) {
      err = e;
    }
    expect(err).toBeInstanceOf(SchemaError);
    const msg = (err as Error).message;
    expect(msg).toContain("missing columns: path_length_m");
    expect(msg).toContain("unexpected columns: length");
  });

  it("rejects reordered columns", () => {
    const cols = [...EXPECTED_COLUMNS];
    [cols[0], cols[1]] = [cols[1], cols[0]];
    expect(() => parseBenchCsv(cols.join(",") + "\n")).toThrow(SchemaError);
  });

  it("rejects short rows", () => {
    expect(() => parseBenchCsv(`${HEADER}\nm1,theta,0\n`)).toThrow(/row 2/);
  });
});

// voxplan-analysis CLI:
//   node dist/cli.js make-report <results.csv> <out-dir>
//   node dist/cli.js plot-slice <dump.txt> <z-index> <out.svg>

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { buildReport } from "./report.js";
import { parseDump, renderSlice } from "./slice.js";

function usage(): never {
  console.error(
    "usage: cli make-report <results.csv> <out-dir>\n" +
      "       cli plot-slice <dump.txt> <z-index> <out.svg>",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const [cmd, ...rest] = argv;
  if (cmd === "make-report") {
    if (rest.length !== 2) usage();
    const [csvPath, outDir] = rest;
    const report = buildReport(readFileSync(csvPath, "utf-8"));
    mkdirSync(outDir, { recursive: true });
    for (const [name, content] of report.files) {
      writeFileSync(join(outDir, name), content);
      console.error(`wrote ${join(outDir, name)}`);
    }
    for (const n of report.notices) console.error(`note: ${n}`);
    return 0;
  }
  if (cmd === "plot-slice") {
    if (rest.length !== 3) usage();
    const [dumpPath, z, outPath] = rest;
    const dump = parseDump(readFileSync(dumpPath, "utf-8"));
    const result = renderSlice(dump, Number(z));
    writeFileSync(outPath, result.svg);
    console.error(
      `wrote ${outPath}: ${result.rectCount} rects, ` +
        `${result.regionCount} predecessor regions`,
    );
    return 0;
  }
  usage();
}

const isMain = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() as string,
);
if (isMain) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}

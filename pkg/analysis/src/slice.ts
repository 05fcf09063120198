// Cost-field dump parsing and 2D slice rendering: leaves intersecting the
// requested z index become rectangles sized by their octree height and
// colored by predecessor identity; obstacle leaves are overlaid in dark
// grey, unreached leaves in light grey.

import { SliceRect, sliceSvg } from "./svg.js";

export interface DumpLeaf {
  height: number;
  cx: number;
  cy: number;
  cz: number;
  pred: [number, number, number] | null;
  g: number | null;
  state: string;
}

export interface Dump {
  resolution: number;
  origin: [number, number, number];
  leaves: DumpLeaf[];
  obstacles: { height: number; cx: number; cy: number; cz: number }[];
}

export function parseDump(text: string): Dump {
  let resolution = 1.0;
  let origin: [number, number, number] = [0, 0, 0];
  const leaves: DumpLeaf[] = [];
  const obstacles: Dump["obstacles"] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const m = line.match(/^# resolution (.+)$/);
      if (m) resolution = Number(m[1]);
      const o = line.match(/^# origin (\S+) (\S+) (\S+)$/);
      if (o) origin = [Number(o[1]), Number(o[2]), Number(o[3])];
      continue;
    }
    const parts = line.split(/\s+/);
    if (parts[0] === "obstacle") {
      obstacles.push({
        height: Number(parts[1]),
        cx: Number(parts[2]),
        cy: Number(parts[3]),
        cz: Number(parts[4]),
      });
    } else if (parts[0] === "leaf") {
      const unreached = parts[5] === "-";
      leaves.push({
        height: Number(parts[1]),
        cx: Number(parts[2]),
        cy: Number(parts[3]),
        cz: Number(parts[4]),
        pred: unreached
          ? null
          : [Number(parts[5]), Number(parts[6]), Number(parts[7])],
        g: unreached ? null : Number(parts[8]),
        state: parts[9],
      });
    } else {
      throw new Error(`unrecognized dump line: ${line}`);
    }
  }
  return { resolution, origin, leaves, obstacles };
}

// Colorblind-safe-ish cycle for predecessor regions.
const PALETTE = [
  "#63CBA9", "#82A7D1", "#EAC595", "#D98994", "#B39CD9",
  "#8FBF7F", "#E0B660", "#7FB2C9", "#C98FB8", "#A9A9E0",
];

export interface SliceResult {
  svg: string;
  regionCount: number;
  rectCount: number;
}

function intersectsZ(height: number, cz: number, zIndex: number): boolean {
  return cz === zIndex >> height;
}

export function renderSlice(dump: Dump, zIndex: number): SliceResult {
  const leaves = dump.leaves.filter((l) => intersectsZ(l.height, l.cz, zIndex));
  const obstacles = dump.obstacles.filter((o) =>
    intersectsZ(o.height, o.cz, zIndex),
  );
  if (leaves.length === 0 && obstacles.length === 0) {
    throw new Error(`no leaves intersect slice z=${zIndex}`);
  }
  // stable predecessor -> color mapping, sorted for determinism
  const predKeys = [
    ...new Set(
      leaves.filter((l) => l.pred !== null).map((l) => l.pred!.join(",")),
    ),
  ].sort();
  const color = new Map(predKeys.map((k, i) => [k, PALETTE[i % PALETTE.length]]));

  const rects: SliceRect[] = [];
  let maxX = 0;
  let maxY = 0;
  const push = (
    h: number, cx: number, cy: number, fill: string, stroke?: string,
  ) => {
    const side = 1 << h;
    rects.push({ x: cx * side, y: cy * side, w: side, h: side, fill, stroke });
    maxX = Math.max(maxX, (cx + 1) * side);
    maxY = Math.max(maxY, (cy + 1) * side);
  };
  for (const l of leaves) {
    const fill = l.pred === null ? "#f0f0f0" : color.get(l.pred.join(","))!;
    push(l.height, l.cx, l.cy, fill, "#ffffff");
  }
  for (const o of obstacles) {
    push(o.height, o.cx, o.cy, "#444444");
  }
  const legend = predKeys.map((k) => ({
    label: `predecessor (${k})`,
    fill: color.get(k)!,
  }));
  const svg = sliceSvg(
    `Cost-field slice at z=${zIndex} (${predKeys.length} predecessor regions)`,
    rects, maxX, maxY, legend,
  );
  return { svg, regionCount: predKeys.length, rectCount: rects.length };
}

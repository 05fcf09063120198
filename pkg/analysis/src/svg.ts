// Hand-rolled SVG output: deterministic, no DOM or canvas dependency.

import { BoxStats } from "./stats.js";

const W = 640;
const H = 420;
const MARGIN = { top: 36, right: 24, bottom: 64, left: 72 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface BoxGroup {
  label: string;
  stats: BoxStats;
  points: number[];
}

/** Vertical box plots per group with an optional horizontal baseline. */
export function boxplotSvg(
  title: string,
  yLabel: string,
  groups: BoxGroup[],
  baseline?: number,
  logScale = false,
): string {
  const innerW = W - MARGIN.left - MARGIN.right;
  const innerH = H - MARGIN.top - MARGIN.bottom;
  const values = groups.flatMap((g) => [g.stats.min, g.stats.max]);
  if (baseline !== undefined) values.push(baseline);
  const tr = (v: number) => (logScale ? Math.log10(v) : v);
  let lo = Math.min(...values.map(tr));
  let hi = Math.max(...values.map(tr));
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;
  const y = (v: number) => MARGIN.top + innerH * (1 - (tr(v) - lo) / (hi - lo));
  const slot = innerW / groups.length;
  const boxW = Math.min(46, slot * 0.5);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif" font-size="12">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="20" text-anchor="middle" font-size="14">${esc(title)}</text>`,
    `<text transform="rotate(-90 16 ${H / 2})" x="16" y="${H / 2}" text-anchor="middle">${esc(yLabel)}</text>`,
  );
  // y ticks
  for (let t = 0; t <= 4; t++) {
    const v = lo + ((hi - lo) * t) / 4;
    const vv = logScale ? Math.pow(10, v) : v;
    const yy = MARGIN.top + innerH * (1 - t / 4);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${yy.toFixed(2)}" x2="${W - MARGIN.right}" y2="${yy.toFixed(2)}" stroke="#eee"/>`,
      `<text x="${MARGIN.left - 6}" y="${(yy + 4).toFixed(2)}" text-anchor="end">${vv.toPrecision(4)}</text>`,
    );
  }
  if (baseline !== undefined) {
    const yb = y(baseline);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${yb.toFixed(2)}" x2="${W - MARGIN.right}" y2="${yb.toFixed(2)}" stroke="#0073B2" stroke-width="1.5"/>`,
    );
  }
  groups.forEach((g, i) => {
    const cx = MARGIN.left + slot * (i + 0.5);
    const s = g.stats;
    // jittered dots (deterministic pseudo-jitter from the index)
    g.points.forEach((p, k) => {
      const dx = ((k * 2654435761) % 1000) / 1000 - 0.5;
      parts.push(
        `<circle cx="${(cx + dx * boxW).toFixed(2)}" cy="${y(p).toFixed(2)}" r="1.6" fill="#888" fill-opacity="0.35"/>`,
      );
    });
    parts.push(
      `<line x1="${cx.toFixed(2)}" y1="${y(s.loWhisker).toFixed(2)}" x2="${cx.toFixed(2)}" y2="${y(s.q1).toFixed(2)}" stroke="black"/>`,
      `<line x1="${cx.toFixed(2)}" y1="${y(s.q3).toFixed(2)}" x2="${cx.toFixed(2)}" y2="${y(s.hiWhisker).toFixed(2)}" stroke="black"/>`,
      `<rect x="${(cx - boxW / 2).toFixed(2)}" y="${y(s.q3).toFixed(2)}" width="${boxW.toFixed(2)}" height="${(y(s.q1) - y(s.q3)).toFixed(2)}" fill="#cfe8cf" stroke="black"/>`,
      `<line x1="${(cx - boxW / 2).toFixed(2)}" y1="${y(s.median).toFixed(2)}" x2="${(cx + boxW / 2).toFixed(2)}" y2="${y(s.median).toFixed(2)}" stroke="black" stroke-width="2"/>`,
      `<text x="${cx.toFixed(2)}" y="${H - MARGIN.bottom + 18}" text-anchor="middle" transform="rotate(30 ${cx.toFixed(2)} ${H - MARGIN.bottom + 18})">${esc(g.label)}</text>`,
    );
  });
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${H - MARGIN.bottom}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${H - MARGIN.bottom}" x2="${W - MARGIN.right}" y2="${H - MARGIN.bottom}" stroke="black"/>`,
    `</svg>`,
  );
  return parts.join("\n");
}

export interface SliceRect {
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  stroke?: string;
}

export function sliceSvg(
  title: string,
  rects: SliceRect[],
  extentX: number,
  extentY: number,
  legend: { label: string; fill: string }[],
): string {
  const plotW = 560;
  const scale = plotW / extentX;
  const plotH = extentY * scale;
  const height = plotH + 64 + 18 * legend.length;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${plotW + 40}" height="${height.toFixed(0)}" font-family="sans-serif" font-size="12">`,
    `<rect width="${plotW + 40}" height="${height.toFixed(0)}" fill="white"/>`,
    `<text x="${(plotW + 40) / 2}" y="20" text-anchor="middle" font-size="14">${esc(title)}</text>`,
  );
  // y axis points up: flip
  for (const r of rects) {
    const sx = 20 + r.x * scale;
    const sy = 32 + (extentY - r.y - r.h) * scale;
    parts.push(
      `<rect x="${sx.toFixed(2)}" y="${sy.toFixed(2)}" width="${(r.w * scale).toFixed(2)}" height="${(r.h * scale).toFixed(2)}" fill="${r.fill}"` +
        (r.stroke ? ` stroke="${r.stroke}" stroke-width="0.4"` : "") +
        `/>`,
    );
  }
  legend.forEach((l, i) => {
    const yy = plotH + 48 + 18 * i;
    parts.push(
      `<rect x="24" y="${yy - 10}" width="12" height="12" fill="${l.fill}"/>`,
      `<text x="42" y="${yy}">${esc(l.label)}</text>`,
    );
  });
  parts.push(`</svg>`);
  return parts.join("\n");
}

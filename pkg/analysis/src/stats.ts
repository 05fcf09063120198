// Small numeric helpers shared by the report builders.

export function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function std(xs: number[]): number {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  return Math.sqrt(xs.reduce((a, x) => a + (x - m) * (x - m), 0) / (xs.length - 1));
}

/** Linear-interpolation quantile of a sorted copy (same convention as
 * numpy's default). */
export function quantile(xs: number[], q: number): number {
  const s = [...xs].sort((a, b) => a - b);
  if (s.length === 1) return s[0];
  const pos = q * (s.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return s[lo];
  return s[lo] + (s[hi] - s[lo]) * (pos - lo);
}

export function median(xs: number[]): number {
  return quantile(xs, 0.5);
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  loWhisker: number;
  hiWhisker: number;
  n: number;
}

/** Five-number summary with 1.5 IQR whiskers clamped to the data. */
export function boxStats(xs: number[]): BoxStats {
  const q1 = quantile(xs, 0.25);
  const q3 = quantile(xs, 0.75);
  const iqr = q3 - q1;
  const lo = Math.min(...xs);
  const hi = Math.max(...xs);
  const loW = Math.min(...xs.filter((x) => x >= q1 - 1.5 * iqr));
  const hiW = Math.max(...xs.filter((x) => x <= q3 + 1.5 * iqr));
  return {
    min: lo, q1, median: median(xs), q3, max: hi,
    loWhisker: loW, hiWhisker: hiW, n: xs.length,
  };
}

/** Figure builders: log-log exponent fits and the sine-collapse overlay. */

import { groupObservable, ResultRow, TooFewPointsError } from "./csv";
import { bootstrapSlope, fitLogLog } from "./stats";
import { Mark, Scene } from "./scene";

const W = 640;
const H = 480;
const MARGIN = { left: 70, right: 20, top: 36, bottom: 48 };
const BLUE = "#1f5fa8";
const GRAY = "#888888";
const DARK = "#222222";
const RED = "#b03030";

interface Axes {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  sx: (v: number) => number;
  sy: (v: number) => number;
}

function logAxes(xs: number[], ys: number[]): Axes {
  const pad = 0.08;
  const lx = xs.map(Math.log10);
  const ly = ys.map(Math.log10);
  const x0 = Math.min(...lx) - pad;
  const x1 = Math.max(...lx) + pad;
  const y0 = Math.min(...ly) - pad * 2;
  const y1 = Math.max(...ly) + pad * 2;
  return {
    x0,
    x1,
    y0,
    y1,
    sx: (v) => MARGIN.left + ((Math.log10(v) - x0) / (x1 - x0)) * (W - MARGIN.left - MARGIN.right),
    sy: (v) =>
      H - MARGIN.bottom - ((Math.log10(v) - y0) / (y1 - y0)) * (H - MARGIN.top - MARGIN.bottom),
  };
}

function linAxes(xs: number[], ys: number[]): Axes {
  const prx = Math.max(...xs) - Math.min(...xs) || 1;
  const pry = Math.max(...ys) - Math.min(...ys) || 1;
  const x0 = Math.min(...xs) - 0.05 * prx;
  const x1 = Math.max(...xs) + 0.05 * prx;
  const y0 = Math.min(0, Math.min(...ys)) - 0.05 * pry;
  const y1 = Math.max(...ys) + 0.05 * pry;
  return {
    x0,
    x1,
    y0,
    y1,
    sx: (v) => MARGIN.left + ((v - x0) / (x1 - x0)) * (W - MARGIN.left - MARGIN.right),
    sy: (v) => H - MARGIN.bottom - ((v - y0) / (y1 - y0)) * (H - MARGIN.top - MARGIN.bottom),
  };
}

function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) < 0.01 || Math.abs(v) >= 10000)) {
    return v.toExponential(0).replace("+", "");
  }
  return (Math.round(v * 1000) / 1000).toString();
}

function frame(marks: Mark[], ax: Axes, log: boolean, xlabel: string, ylabel: string) {
  const xb = H - MARGIN.bottom;
  marks.push({
    kind: "line",
    pts: [
      [MARGIN.left, MARGIN.top],
      [MARGIN.left, xb],
      [W - MARGIN.right, xb],
    ],
    color: DARK,
    width: 1,
  });
  const ticks = (lo: number, hi: number): number[] => {
    if (log) {
      const out: number[] = [];
      for (let d = Math.floor(lo); d <= Math.ceil(hi); d++) {
        for (const m of [1, 2, 5]) {
          const v = Math.log10(m) + d;
          if (v >= lo && v <= hi) out.push(Math.pow(10, v));
        }
      }
      return out;
    }
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
    const mult = span / step > 8 ? 2 : 1;
    const out: number[] = [];
    for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi; v += step * mult) {
      out.push(Math.round(v * 1e9) / 1e9);
    }
    return out;
  };
  for (const v of ticks(ax.x0, ax.x1)) {
    const x = ax.sx(v);
    marks.push({ kind: "line", pts: [[x, xb], [x, xb + 5]], color: DARK, width: 1 });
    marks.push({
      kind: "text", x, y: xb + 18, text: fmtTick(v), size: 10, color: DARK, anchor: "middle",
    });
  }
  for (const v of ticks(ax.y0, ax.y1)) {
    const y = ax.sy(v);
    marks.push({ kind: "line", pts: [[MARGIN.left - 5, y], [MARGIN.left, y]], color: DARK, width: 1 });
    marks.push({
      kind: "text", x: MARGIN.left - 8, y: y + 4, text: fmtTick(v), size: 10, color: DARK, anchor: "end",
    });
  }
  marks.push({
    kind: "text", x: (MARGIN.left + W - MARGIN.right) / 2, y: H - 12, text: xlabel,
    size: 12, color: DARK, anchor: "middle",
  });
  marks.push({
    kind: "text", x: MARGIN.left, y: MARGIN.top - 12, text: ylabel,
    size: 12, color: DARK, anchor: "start",
  });
}

function paramValue(p: string): number {
  const tail = p.includes(":") ? p.split(":").pop()! : p;
  const v = Number(tail.replace(/^[A-Za-z]+/, ""));
  return v;
}

export interface LogLogResult {
  scene: Scene;
  slope: number;
  lo: number;
  hi: number;
}

export function plotLogLog(rows: ResultRow[], observable: string): LogLogResult {
  const groups = groupObservable(rows, observable);
  const entries = [...groups.entries()]
    .map(([p, vals]) => ({ x: paramValue(p), vals }))
    .filter((e) => Number.isFinite(e.x) && e.x > 0)
    .sort((a, b) => a.x - b.x);
  if (entries.length < 3) {
    throw new TooFewPointsError(entries.length, 3);
  }
  const xs = entries.map((e) => e.x);
  const samples = entries.map((e) => e.vals);
  const boot = bootstrapSlope(xs, samples, 1000);
  const means = samples.map((s) => s.reduce((a, b) => a + b, 0) / s.length);
  const ax = logAxes(xs, [...means, ...boot.bandLo, ...boot.bandHi]);
  const marks: Mark[] = [];
  // bootstrap band around the per-param means
  const band: Array<[number, number]> = [];
  xs.forEach((x, i) => band.push([ax.sx(x), ax.sy(boot.bandHi[i])]));
  for (let i = xs.length - 1; i >= 0; i--) band.push([ax.sx(xs[i]), ax.sy(boot.bandLo[i])]);
  marks.push({ kind: "polygon", pts: band, fill: BLUE, opacity: 0.18 });
  // fitted power law through the mean point
  const fit = fitLogLog(xs, means);
  const fx = [xs[0], xs[xs.length - 1]];
  marks.push({
    kind: "line",
    pts: fx.map((x) => [ax.sx(x), ax.sy(Math.exp(fit.intercept + fit.slope * Math.log(x)))]) as Array<
      [number, number]
    >,
    color: GRAY,
    width: 1.5,
    dash: "6 3",
  });
  marks.push({
    kind: "line",
    pts: xs.map((x, i) => [ax.sx(x), ax.sy(means[i])]) as Array<[number, number]>,
    color: BLUE,
    width: 2,
  });
  xs.forEach((x, i) =>
    marks.push({ kind: "circle", x: ax.sx(x), y: ax.sy(means[i]), r: 4, fill: BLUE }),
  );
  frame(marks, ax, true, "param", `mean ${observable}`);
  const label = `slope = ${boot.slope.toFixed(4)} [${boot.lo.toFixed(3)}, ${boot.hi.toFixed(3)}]`;
  marks.push({
    kind: "text", x: W - MARGIN.right, y: MARGIN.top + 2, text: label,
    size: 13, color: RED, anchor: "end",
  });
  return { scene: { width: W, height: H, marks }, slope: boot.slope, lo: boot.lo, hi: boot.hi };
}

export interface CollapseResult {
  scene: Scene;
  points: Array<{ s: number; y: number }>;
  cubicScale: number;
}

/**
 * Rescaled hitting probability against the sine observable with the cubic
 * reference c s^3; expects the one-point experiment's angle rows (hits,
 * samples, sine).
 */
export function plotSineCollapse(rows: ResultRow[], radius = 32): CollapseResult {
  const hits = groupObservable(rows, "hits");
  const samples = groupObservable(rows, "samples");
  const sines = groupObservable(rows, "sine");
  const pts: Array<{ s: number; y: number }> = [];
  for (const [param, sv] of sines.entries()) {
    if (!param.startsWith("angle:")) continue;
    const h = hits.get(param);
    const n = samples.get(param);
    if (!h || !n || n[0] === 0) continue;
    pts.push({ s: sv[0], y: (h[0] / n[0]) * Math.pow(radius, 0.75) });
  }
  if (pts.length === 0) {
    throw new TooFewPointsError(0, 1);
  }
  pts.sort((a, b) => a.s - b.s);
  // least-squares scale of the cubic reference
  let num = 0;
  let den = 0;
  for (const p of pts) {
    num += p.y * Math.pow(p.s, 3);
    den += Math.pow(p.s, 6);
  }
  const c = num / den;
  const ax = linAxes(
    pts.map((p) => p.s),
    [...pts.map((p) => p.y), c],
  );
  const marks: Mark[] = [];
  const ref: Array<[number, number]> = [];
  for (let i = 0; i <= 60; i++) {
    const s = ax.x0 + ((ax.x1 - ax.x0) * i) / 60;
    if (s < 0) continue;
    ref.push([ax.sx(s), ax.sy(c * Math.pow(s, 3))]);
  }
  marks.push({ kind: "line", pts: ref, color: GRAY, width: 1.5, dash: "6 3" });
  for (const p of pts) {
    marks.push({ kind: "circle", x: ax.sx(p.s), y: ax.sy(p.y), r: 4, fill: BLUE });
  }
  frame(marks, ax, false, "sine S", "P * r^(3/4)");
  marks.push({
    kind: "text", x: W - MARGIN.right, y: MARGIN.top + 2,
    text: `cubic reference c = ${c.toFixed(4)}`, size: 13, color: RED, anchor: "end",
  });
  return { scene: { width: W, height: H, marks }, points: pts, cubicScale: c };
}

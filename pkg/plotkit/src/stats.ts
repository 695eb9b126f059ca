/** Least-squares fits and a seeded bootstrap for slope confidence bands. */

export interface LinearFit {
  slope: number;
  intercept: number;
}

export function fitLine(xs: number[], ys: number[]): LinearFit {
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}

export function fitLogLog(xs: number[], ys: number[]): LinearFit {
  return fitLine(
    xs.map((x) => Math.log(x)),
    ys.map((y) => Math.log(y)),
  );
}

/** mulberry32: tiny deterministic PRNG, enough for resampling. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface SlopeBootstrap {
  slope: number;
  lo: number;
  hi: number;
  /** per-x mean band quantiles used for drawing */
  bandLo: number[];
  bandHi: number[];
}

/**
 * Percentile bootstrap of the log-log slope over replicate resamples.
 * Params with a single replicate contribute no resampling variance.
 */
export function bootstrapSlope(
  xs: number[],
  samples: number[][],
  nBoot = 1000,
  seed = 0x5eed,
): SlopeBootstrap {
  const means = samples.map(
    (s) => s.reduce((a, b) => a + b, 0) / s.length,
  );
  const point = fitLogLog(xs, means);
  const rand = mulberry32(seed);
  const slopes: number[] = [];
  const bandsLog: number[][] = xs.map(() => []);
  for (let b = 0; b < nBoot; b++) {
    const ys = samples.map((s) => {
      let acc = 0;
      for (let i = 0; i < s.length; i++) {
        acc += s[Math.floor(rand() * s.length)];
      }
      return acc / s.length;
    });
    if (ys.some((y) => y <= 0)) continue;
    slopes.push(fitLogLog(xs, ys).slope);
    ys.forEach((y, i) => bandsLog[i].push(Math.log(y)));
  }
  slopes.sort((a, b) => a - b);
  const q = (arr: number[], p: number) =>
    arr[Math.min(arr.length - 1, Math.max(0, Math.floor(p * arr.length)))];
  const bandLo = bandsLog.map((col) => {
    col.sort((a, b) => a - b);
    return Math.exp(q(col, 0.025));
  });
  const bandHi = bandsLog.map((col) => {
    col.sort((a, b) => a - b);
    return Math.exp(q(col, 0.975));
  });
  return {
    slope: point.slope,
    lo: slopes.length ? q(slopes, 0.025) : point.slope,
    hi: slopes.length ? q(slopes, 0.975) : point.slope,
    bandLo,
    bandHi,
  };
}

import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { MissingColumnsError, parseResults, TooFewPointsError } from "../src/csv";
import { plotLogLog, plotSineCollapse } from "../src/figures";
import { toSvg } from "../src/scene";
import { toPng } from "../src/raster";
import { main } from "../src/cli";

function powerLawCsv(exponent = -0.75, replicasPerParam = 1): string {
  const lines = ["experiment,param,replica,observable,value"];
  for (const x of [8, 16, 32, 64, 128]) {
    for (let r = 0; r < replicasPerParam; r++) {
      lines.push(`synthetic,${x},${r},obs,${Math.pow(x, exponent)}`);
    }
  }
  return lines.join("\n") + "\n";
}

describe("csv parsing", () => {
  it("parses the documented schema", () => {
    const rows = parseResults(powerLawCsv());
    expect(rows).toHaveLength(5);
    expect(rows[0]).toMatchObject({ experiment: "synthetic", observable: "obs" });
  });

  it("raises MissingColumns on a wrong header", () => {
    expect(() => parseResults("a,b,c\n1,2,3\n")).toThrow(MissingColumnsError);
  });

  it("raises MissingColumns on empty input", () => {
    expect(() => parseResults("")).toThrow(MissingColumnsError);
  });
});

describe("loglog figure", () => {
  it("recovers an exact power-law slope to 1e-3", () => {
    const fig = plotLogLog(parseResults(powerLawCsv(-0.75)), "obs");
    expect(Math.abs(fig.slope - -0.75)).toBeLessThanOrEqual(0.001);
    const svg = toSvg(fig.scene);
    expect(svg).toContain("slope = -0.7500");
  });

  it("needs at least three distinct params", () => {
    const csv =
      "experiment,param,replica,observable,value\ns,2,0,obs,1\ns,4,0,obs,0.5\n";
    expect(() => plotLogLog(parseResults(csv), "obs")).toThrow(TooFewPointsError);
  });

  it("handles replica scatter with a bootstrap band", () => {
    const fig = plotLogLog(parseResults(powerLawCsv(-0.75, 40)), "obs");
    expect(fig.hi).toBeGreaterThanOrEqual(fig.lo);
  });
});

describe("sine collapse", () => {
  it("matches an exact cubic overlay", () => {
    const lines = ["experiment,param,replica,observable,value"];
    const r = 32;
    for (const s of [0.2, 0.4, 0.6, 0.8, 1.0]) {
      const p = (0.5 * Math.pow(s, 3)) / Math.pow(r, 0.75);
      lines.push(`one-point,angle:${s},-1,sine,${s}`);
      lines.push(`one-point,angle:${s},-1,hits,${Math.round(p * 1e7)}`);
      lines.push(`one-point,angle:${s},-1,samples,${1e7}`);
    }
    const fig = plotSineCollapse(parseResults(lines.join("\n")), r);
    expect(Math.abs(fig.cubicScale - 0.5)).toBeLessThan(0.01);
    const ys = fig.points.map((p) => p.y);
    for (let i = 1; i < ys.length; i++) expect(ys[i]).toBeGreaterThan(ys[i - 1]);
  });

  it("rejects empty input", () => {
    expect(() =>
      plotSineCollapse(parseResults("experiment,param,replica,observable,value\n")),
    ).toThrow(TooFewPointsError);
  });
});

describe("byte stability", () => {
  it("renders identical svg and png across runs", () => {
    const rows = parseResults(powerLawCsv(-0.75, 10));
    const a = plotLogLog(rows, "obs");
    const b = plotLogLog(rows, "obs");
    expect(toSvg(a.scene)).toEqual(toSvg(b.scene));
    expect(toPng(a.scene).equals(toPng(b.scene))).toBe(true);
  });
});

describe("cli", () => {
  it("writes figures and reports the slope, exit 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "lerwplot-"));
    const csv = join(dir, "results.csv");
    writeFileSync(csv, powerLawCsv(-0.75, 5));
    for (const name of ["fig.svg", "fig.png"]) {
      const rc = main(["loglog", "--in", csv, "--out", join(dir, name), "--observable", "obs"]);
      expect(rc).toBe(0);
      expect(readFileSync(join(dir, name)).length).toBeGreaterThan(500);
    }
    // rerun is byte-identical
    const first = readFileSync(join(dir, "fig.png"));
    main(["loglog", "--in", csv, "--out", join(dir, "fig.png"), "--observable", "obs"]);
    expect(readFileSync(join(dir, "fig.png")).equals(first)).toBe(true);
  });

  it("fails cleanly on bad input", () => {
    const dir = mkdtempSync(join(tmpdir(), "lerwplot-"));
    const csv = join(dir, "bad.csv");
    writeFileSync(csv, "nope\n1\n");
    const rc = main(["loglog", "--in", csv, "--out", join(dir, "f.svg"), "--observable", "obs"]);
    expect(rc).toBe(1);
    expect(main([])).toBe(2);
  });
});

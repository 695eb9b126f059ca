#!/usr/bin/env node
/**
 * lerwplot <figure-kind> --in results.csv --out fig.svg|fig.png
 *
 * figure kinds:
 *   loglog         --observable NAME   log-log scatter with fitted slope
 *   sine-collapse  [--radius R]        hitting probability vs sine, cubic ref
 */

import { writeFileSync } from "fs";
import { loadResults, MissingColumnsError, TooFewPointsError } from "./csv";
import { plotLogLog, plotSineCollapse } from "./figures";
import { Scene, toSvg } from "./scene";
import { toPng } from "./raster";

interface Args {
  kind: string;
  input: string;
  output: string;
  observable?: string;
  radius: number;
}

function parseArgs(argv: string[]): Args {
  const kind = argv[0];
  const args: Args = { kind, input: "", output: "", radius: 32 };
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") args.input = argv[++i];
    else if (a === "--out") args.output = argv[++i];
    else if (a === "--observable") args.observable = argv[++i];
    else if (a === "--radius") args.radius = Number(argv[++i]);
    else throw new Error(`unknown argument ${a}`);
  }
  if (!kind || !args.input || !args.output) {
    throw new Error(
      "usage: lerwplot <loglog|sine-collapse> --in results.csv --out fig.svg " +
        "[--observable NAME] [--radius R]",
    );
  }
  return args;
}

function writeScene(scene: Scene, path: string) {
  if (path.endsWith(".png")) {
    writeFileSync(path, toPng(scene));
  } else {
    writeFileSync(path, toSvg(scene));
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error((e as Error).message);
    return 2;
  }
  try {
    const rows = loadResults(args.input);
    if (args.kind === "loglog") {
      if (!args.observable) {
        console.error("loglog requires --observable");
        return 2;
      }
      const fig = plotLogLog(rows, args.observable);
      writeScene(fig.scene, args.output);
      console.log(
        JSON.stringify({
          figure: "loglog",
          observable: args.observable,
          slope: Number(fig.slope.toFixed(6)),
          ci: [Number(fig.lo.toFixed(6)), Number(fig.hi.toFixed(6))],
          out: args.output,
        }),
      );
    } else if (args.kind === "sine-collapse") {
      const fig = plotSineCollapse(rows, args.radius);
      writeScene(fig.scene, args.output);
      console.log(
        JSON.stringify({
          figure: "sine-collapse",
          points: fig.points.length,
          cubic_scale: Number(fig.cubicScale.toFixed(6)),
          out: args.output,
        }),
      );
    } else {
      console.error(`unknown figure kind ${args.kind}`);
      return 2;
    }
  } catch (e) {
    if (e instanceof MissingColumnsError || e instanceof TooFewPointsError) {
      console.error(e.message);
      return 1;
    }
    throw e;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

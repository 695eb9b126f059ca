/**
 * Reader for the harness results table.
 *
 * Long format, one observation per row:
 *   experiment,param,replica,observable,value
 */

import { readFileSync } from "fs";

export const REQUIRED_COLUMNS = [
  "experiment",
  "param",
  "replica",
  "observable",
  "value",
] as const;

export interface ResultRow {
  experiment: string;
  param: string;
  replica: number;
  observable: string;
  value: number;
}

export class MissingColumnsError extends Error {
  constructor(missing: string[]) {
    super(`results table is missing columns: ${missing.join(", ")}`);
    this.name = "MissingColumnsError";
  }
}

export class TooFewPointsError extends Error {
  constructor(n: number, need: number) {
    super(`need at least ${need} distinct param values, got ${n}`);
    this.name = "TooFewPointsError";
  }
}

export function parseResults(text: string): ResultRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new MissingColumnsError([...REQUIRED_COLUMNS]);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const idx = new Map(header.map((h, i) => [h, i]));
  const missing = REQUIRED_COLUMNS.filter((c) => !idx.has(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(missing);
  }
  const rows: ResultRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    const value = Number(parts[idx.get("value")!]);
    const replica = Number(parts[idx.get("replica")!]);
    if (!Number.isFinite(value)) {
      continue; // tolerate nan diagnostics rows
    }
    rows.push({
      experiment: parts[idx.get("experiment")!],
      param: parts[idx.get("param")!],
      replica,
      observable: parts[idx.get("observable")!],
      value,
    });
  }
  return rows;
}

export function loadResults(path: string): ResultRow[] {
  return parseResults(readFileSync(path, "utf8"));
}

/** Per-param replica values of one observable, insertion-ordered. */
export function groupObservable(
  rows: ResultRow[],
  observable: string,
): Map<string, number[]> {
  const out = new Map<string, number[]>();
  for (const r of rows) {
    if (r.observable !== observable) continue;
    if (!out.has(r.param)) out.set(r.param, []);
    out.get(r.param)!.push(r.value);
  }
  return out;
}

/** Artifact readers: trajectory/curve CSVs and JSON reports emitted by the
 * experiment CLI.  Columns are parsed as numbers; headers are preserved. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Table {
  columns: string[];
  /** column name -> values, row order preserved */
  data: Map<string, number[]>;
  rows: number;
}

export class ArtifactError extends Error {}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, number>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new ArtifactError(`${path}: CSV parse error: ${first.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0) {
    throw new ArtifactError(`${path}: no header row`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const row of parsed.data) {
    for (const c of columns) {
      const v = row[c];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new ArtifactError(`${path}: non-numeric value in column ${c}`);
      }
      data.get(c)!.push(v);
    }
  }
  return { columns, data, rows: parsed.data.length };
}

export function column(table: Table, name: string, path = "table"): number[] {
  const col = table.data.get(name);
  if (!col) {
    throw new ArtifactError(
      `${path}: missing column ${name} (has: ${table.columns.join(", ")})`,
    );
  }
  return col;
}

export function readReport(path: string): Record<string, unknown> {
  const payload = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof payload !== "object" || payload === null) {
    throw new ArtifactError(`${path}: report is not a JSON object`);
  }
  return payload as Record<string, unknown>;
}

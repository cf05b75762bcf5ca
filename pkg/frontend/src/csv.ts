/**
 * Reader for the experiment CLI's CSV files: plain comma separation,
 * one header row, no quoting. Errors always name the offending file.
 */

import * as fs from "fs";

import { InputError } from "./errors";

export interface Table {
  file: string;
  header: string[];
  rows: string[][];
}

export function readCsv(file: string): Table {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf8");
  } catch {
    throw new InputError(`cannot read CSV file ${file}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l !== "");
  if (lines.length === 0) {
    throw new InputError(`empty CSV file ${file}`);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((l) => l.split(",").map((c) => c.trim()));
  if (rows.length === 0) {
    throw new InputError(`no data rows in CSV file ${file}`);
  }
  for (let i = 0; i < rows.length; i++) {
    if (rows[i].length !== header.length) {
      throw new InputError(
        `row ${i + 2} of ${file} has ${rows[i].length} fields, ` +
          `expected ${header.length}`
      );
    }
  }
  return { file, header, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new InputError(`missing column '${name}' in ${table.file}`);
  }
  return idx;
}

/** Check all required columns up front so one error lists the file. */
export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) columnIndex(table, name);
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row, i) => {
    const v = Number(row[idx]);
    if (!Number.isFinite(v)) {
      throw new InputError(
        `column '${name}' row ${i + 2} of ${table.file}: ` +
          `'${row[idx]}' is not a number`
      );
    }
    return v;
  });
}

/**
 * Parser for the experiment harness CSV format: an optional leading
 * comment line (`# config: ...`), a header row, then data rows.
 */

export interface Table {
  /** Text of the leading `#` comment lines, without the marker. */
  comments: string[];
  columns: string[];
  /** Row-major cell values, same length as `columns`. */
  rows: string[][];
}

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  constructor(public readonly column: string) {
    super(`missing column: ${column}`);
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  const comments: string[] = [];
  let i = 0;
  while (i < lines.length && lines[i].startsWith("#")) {
    comments.push(lines[i].replace(/^#\s*/, ""));
    i += 1;
  }
  if (i >= lines.length) {
    throw new CsvError("no header row found");
  }
  const columns = lines[i].split(",").map((c) => c.trim());
  const rows = lines.slice(i + 1).map((line) => line.split(","));
  return { comments, columns, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(name);
  }
  return idx;
}

/** Values of one column as raw strings. */
export function column(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx] ?? "");
}

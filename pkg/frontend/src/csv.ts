/**
 * Minimal reader for the harness CSV artifacts.
 *
 * Files are UTF-8, comma-separated with a single header row and LF line
 * endings; no quoting is used by the producer. Schema checks name the
 * offending column so a mismatched input fails with an actionable message.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV input");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

export function requireColumns(table: Table, columns: string[], source: string): void {
  for (const column of columns) {
    if (!table.header.includes(column)) {
      throw new SchemaError(`${source}: missing required column "${column}" ` +
        `(found: ${table.header.join(", ")})`);
    }
  }
}

export function numberColumn(table: Table, name: string, source: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new SchemaError(`${source}: missing required column "${name}"`);
  }
  return table.rows.map((row, i) => {
    const value = Number(row[index]);
    if (Number.isNaN(value)) {
      throw new SchemaError(`${source}: row ${i + 1}, column "${name}" is not numeric: ${row[index]}`);
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string, source: string): string[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new SchemaError(`${source}: missing required column "${name}"`);
  }
  return table.rows.map((row) => row[index]);
}

/** Rows of truth.csv for one field name, as [coordinate, value] pairs. */
export function truthField(table: Table, field: string, source: string): Array<[number, number]> {
  requireColumns(table, ["field", "coordinate", "value"], source);
  const fieldIdx = table.header.indexOf("field");
  const coordIdx = table.header.indexOf("coordinate");
  const valueIdx = table.header.indexOf("value");
  return table.rows
    .filter((row) => row[fieldIdx] === field)
    .map((row) => [Number(row[coordIdx]), Number(row[valueIdx])]);
}

/**
 * Parser for the schema-1 CSV emitted by the nongauss sweep command:
 * comment lines start with '#' (the first is `#schema=1`), then one header
 * row, then comma-separated data rows with '.' decimals.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseSchema1(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  const content = lines.filter((line) => !line.startsWith("#"));
  if (content.length === 0) {
    throw new CsvError("no rows: input has no header line");
  }
  const header = content[0].split(",").map((h) => h.trim());
  const rows = content.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    return cells;
  });
  if (rows.length === 0) {
    throw new CsvError("no rows: CSV body is empty");
  }
  return { header, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column: ${name}`);
  }
  return idx;
}

/**
 * Grouping of a parsed table into plottable series: one series per distinct
 * value of the group column, points kept in row order.
 */

import { CsvError, Table, columnIndex } from "./csv.js";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export function extractSeries(
  table: Table,
  xCol: string,
  yCol: string,
  groupCol: string,
): Series[] {
  const xi = columnIndex(table, xCol);
  const yi = columnIndex(table, yCol);
  const gi = columnIndex(table, groupCol);
  const byLabel = new Map<string, Series>();
  for (const row of table.rows) {
    const label = row[gi].trim();
    const x = Number(row[xi]);
    const y = Number(row[yi]);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new CsvError(
        `non-numeric cell in columns ${xCol}/${yCol}: '${row[xi]}', '${row[yi]}'`,
      );
    }
    let series = byLabel.get(label);
    if (series === undefined) {
      series = { label, points: [] };
      byLabel.set(label, series);
    }
    series.points.push({ x, y });
  }
  // Map preserves insertion order, so series come out in first-seen order
  return [...byLabel.values()];
}

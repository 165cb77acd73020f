import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseSchema1 } from "../src/csv.js";
import { extractSeries } from "../src/series.js";
import { GOLDEN } from "./golden.js";

describe("extractSeries", () => {
  it("splits the golden sweep into one series per noise level", () => {
    const table = parseSchema1(readFileSync(GOLDEN, "utf-8"));
    const series = extractSeries(table, "state_param", "value", "noise_param");
    expect(series.map((s) => s.label)).toEqual(["0.0", "0.01"]);
    expect(series[0].points).toHaveLength(5);
    expect(series[1].points).toHaveLength(5);
  });

  it("reproduces every CSV row exactly, in row order", () => {
    const text = readFileSync(GOLDEN, "utf-8");
    const table = parseSchema1(text);
    const series = extractSeries(table, "state_param", "value", "noise_param");
    const xi = table.header.indexOf("state_param");
    const yi = table.header.indexOf("value");
    const gi = table.header.indexOf("noise_param");
    const seen = new Map(series.map((s) => [s.label, [...s.points]]));
    for (const row of table.rows) {
      const points = seen.get(row[gi])!;
      const next = points.shift()!;
      expect(next.x).toBe(Number(row[xi]));
      expect(next.y).toBe(Number(row[yi]));
    }
    for (const leftover of seen.values()) {
      expect(leftover).toHaveLength(0);
    }
  });

  it("rejects non-numeric cells", () => {
    const table = parseSchema1("x,y,g\n1,oops,a\n");
    expect(() => extractSeries(table, "x", "y", "g")).toThrowError(/non-numeric/);
  });

  it("propagates missing-column errors", () => {
    const table = parseSchema1("x,y,g\n1,2,a\n");
    expect(() => extractSeries(table, "x", "value", "g")).toThrowError(
      /missing column: value/,
    );
  });
});

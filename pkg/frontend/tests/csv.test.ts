import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { CsvError, columnIndex, parseSchema1 } from "../src/csv.js";
import { GOLDEN } from "./golden.js";

describe("parseSchema1", () => {
  it("parses the golden sweep file", () => {
    const table = parseSchema1(readFileSync(GOLDEN, "utf-8"));
    expect(table.header).toEqual([
      "state_param", "noise_param", "measure", "value",
      "leakage", "cutoff", "quad_order", "seed",
    ]);
    expect(table.rows).toHaveLength(10);
  });

  it("skips comment lines", () => {
    const table = parseSchema1("#schema=1\n# extra note\na,b\n1,2\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([["1", "2"]]);
  });

  it("rejects an empty body with a 'no rows' error", () => {
    expect(() => parseSchema1("#schema=1\na,b\n")).toThrowError(/no rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseSchema1("a,b\n1,2,3\n")).toThrowError(/expected 2/);
  });

  it("names the missing column", () => {
    const table = parseSchema1("a,b\n1,2\n");
    expect(() => columnIndex(table, "value")).toThrowError(
      new CsvError("missing column: value"),
    );
  });
});

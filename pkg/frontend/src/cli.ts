/**
 * figplots render CLI:
 *
 *   figplots render --in sweep.csv --x state_param --y value \
 *                   --group noise_param --out panel.svg [--title ...]
 *
 * Exit codes: 0 ok, 1 data error (missing column, no rows), 2 usage.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { CsvError, parseSchema1 } from "./csv.js";
import { extractSeries } from "./series.js";
import { renderPanel } from "./svg.js";

export function runRender(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        x: { type: "string" },
        y: { type: "string" },
        group: { type: "string" },
        out: { type: "string" },
        title: { type: "string" },
      },
    }));
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  const missing = ["in", "x", "y", "group", "out"].filter(
    (k) => values[k as keyof typeof values] === undefined,
  );
  if (missing.length > 0) {
    console.error(`usage error: missing --${missing.join(", --")}`);
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(values.in as string, "utf-8");
  } catch (err) {
    console.error(`cannot read ${values.in}: ${(err as Error).message}`);
    return 1;
  }
  try {
    const table = parseSchema1(text);
    const series = extractSeries(
      table,
      values.x as string,
      values.y as string,
      values.group as string,
    );
    const svg = renderPanel(series, {
      xLabel: values.x as string,
      yLabel: values.y as string,
      title: values.title,
    });
    writeFileSync(values.out as string, svg, "utf-8");
    console.log(`wrote ${values.out} (${series.length} series)`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    console.error("usage: figplots render --in <csv> --x <col> --y <col> --group <col> --out <img>");
    return 2;
  }
  return runRender(argv.slice(1));
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("figplots")) {
  process.exit(main(process.argv.slice(2)));
}

import { mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";
import { GOLDEN } from "./golden.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "figplots-"));
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("figplots render", () => {
  it("renders the golden sweep to a nonempty SVG", () => {
    const out = join(tmp(), "panel.svg");
    const code = main([
      "render", "--in", GOLDEN, "--x", "state_param", "--y", "value",
      "--group", "noise_param", "--out", out,
    ]);
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.match(/<polyline /g)).toHaveLength(2);
  });

  it("exits nonzero naming a missing column", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main([
      "render", "--in", GOLDEN, "--x", "state_param", "--y", "nope",
      "--group", "noise_param", "--out", join(tmp(), "x.svg"),
    ]);
    expect(code).toBe(1);
    expect(err).toHaveBeenCalledWith("missing column: nope");
  });

  it("exits nonzero on an empty CSV body", () => {
    const empty = join(tmp(), "empty.csv");
    writeFileSync(empty, "#schema=1\nstate_param,value,noise_param\n");
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main([
      "render", "--in", empty, "--x", "state_param", "--y", "value",
      "--group", "noise_param", "--out", join(tmp(), "x.svg"),
    ]);
    expect(code).toBe(1);
    expect(err.mock.calls[0][0]).toMatch(/no rows/);
  });

  it("exits 2 on missing flags", () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["render", "--in", GOLDEN])).toBe(2);
  });

  it("exits 2 on an unknown subcommand", () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["plotz"])).toBe(2);
  });
});

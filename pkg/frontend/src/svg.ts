/**
 * Deterministic SVG line-panel renderer. Same series in, same bytes out:
 * styling comes from a fixed palette and all coordinates are formatted
 * with a fixed precision.
 */

import { Series } from "./series.js";

export interface PanelOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { left: 64, right: 150, top: 36, bottom: 48 };

function fmt(v: number): string {
  return v.toFixed(2);
}

function niceNumber(v: number): string {
  const s = v.toPrecision(5);
  return String(Number(s));
}

function extent(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

export function renderPanel(seriesList: Series[], opts: PanelOptions = {}): string {
  if (seriesList.length === 0) {
    throw new Error("no series to render");
  }
  const width = opts.width ?? 640;
  const height = opts.height ?? 440;
  const xs = seriesList.flatMap((s) => s.points.map((p) => p.x));
  const ys = seriesList.flatMap((s) => s.points.map((p) => p.y));
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - ((y - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  // axes
  const ax = MARGIN.left;
  const ay = MARGIN.top + plotH;
  parts.push(
    `<line x1="${ax}" y1="${ay}" x2="${ax + plotW}" y2="${ay}" stroke="black"/>`,
    `<line x1="${ax}" y1="${MARGIN.top}" x2="${ax}" y2="${ay}" stroke="black"/>`,
  );
  // min/max tick labels on both axes
  parts.push(
    `<text x="${ax}" y="${ay + 18}" text-anchor="middle">${niceNumber(x0)}</text>`,
    `<text x="${ax + plotW}" y="${ay + 18}" text-anchor="middle">${niceNumber(x1)}</text>`,
    `<text x="${ax - 8}" y="${ay + 4}" text-anchor="end">${niceNumber(y0)}</text>`,
    `<text x="${ax - 8}" y="${MARGIN.top + 4}" text-anchor="end">${niceNumber(y1)}</text>`,
  );
  if (opts.xLabel) {
    parts.push(
      `<text x="${ax + plotW / 2}" y="${height - 10}" text-anchor="middle">` +
        `${escapeXml(opts.xLabel)}</text>`,
    );
  }
  if (opts.yLabel) {
    const cx = 16;
    const cy = MARGIN.top + plotH / 2;
    parts.push(
      `<text x="${cx}" y="${cy}" text-anchor="middle" ` +
        `transform="rotate(-90 ${cx} ${cy})">${escapeXml(opts.yLabel)}</text>`,
    );
  }
  if (opts.title) {
    parts.push(
      `<text x="${ax + plotW / 2}" y="20" text-anchor="middle" font-size="14">` +
        `${escapeXml(opts.title)}</text>`,
    );
  }
  seriesList.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = series.points
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`)
      .join(" ");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${coords}"/>`,
    );
    for (const p of series.points) {
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="2.5" fill="${color}"/>`,
      );
    }
    // legend entry
    const ly = MARGIN.top + 14 + i * 18;
    const lx = MARGIN.left + plotW + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 18}" y2="${ly - 4}" ` +
        `stroke="${color}" stroke-width="1.5"/>`,
      `<text x="${lx + 24}" y="${ly}" class="legend">${escapeXml(series.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

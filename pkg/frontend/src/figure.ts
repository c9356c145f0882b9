/**
 * Deterministic SVG rendering of error-bar curves: one series per value of
 * the series column, y = mean column with std-column error bars, and an
 * optional logarithmic x axis.
 */

import { Table, column } from "./csv.js";

export interface FigureSpec {
  xColumn: string;
  seriesColumn: string;
  yColumn: string;
  stdColumn: string;
  logX: boolean;
}

export class FigureError extends Error {}

interface Point {
  x: number;
  y: number;
  std: number;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 150, bottom: 56, left: 72 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(value: number): string {
  return value.toFixed(2);
}

function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) >= 10000 || Math.abs(value) < 0.01)) {
    return value.toExponential(0);
  }
  return String(Number(value.toPrecision(6)));
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / count;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((s) => (hi - lo) / s <= count) ?? candidates[3];
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    const v = Math.pow(10, e);
    if (v >= lo * 0.999 && v <= hi * 1.001) {
      ticks.push(v);
    }
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

/** Group rows into sorted per-series point lists, dropping non-finite rows. */
export function collectSeries(
  table: Table,
  spec: FigureSpec
): Map<string, Point[]> {
  const xs = column(table, spec.xColumn).map(Number);
  const ys = column(table, spec.yColumn).map(Number);
  const stds = column(table, spec.stdColumn).map(Number);
  const keys = column(table, spec.seriesColumn);
  const series = new Map<string, Point[]>();
  for (let i = 0; i < keys.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) {
      continue; // skipped grid points carry nan means
    }
    const std = Number.isFinite(stds[i]) ? stds[i] : 0;
    if (!series.has(keys[i])) {
      series.set(keys[i], []);
    }
    series.get(keys[i])!.push({ x: xs[i], y: ys[i], std });
  }
  for (const points of series.values()) {
    points.sort((a, b) => a.x - b.x);
  }
  return new Map([...series.entries()].sort(([a], [b]) => a.localeCompare(b)));
}

export function renderSvg(table: Table, spec: FigureSpec): string {
  const series = collectSeries(table, spec);
  const all = [...series.values()].flat();
  if (all.length === 0) {
    throw new FigureError("no plottable rows in the CSV");
  }

  let xLo = Math.min(...all.map((p) => p.x));
  let xHi = Math.max(...all.map((p) => p.x));
  if (spec.logX && xLo <= 0) {
    throw new FigureError("log-scale x axis requires positive x values");
  }
  let yLo = Math.min(...all.map((p) => p.y - p.std));
  let yHi = Math.max(...all.map((p) => p.y + p.std));
  if (xLo === xHi) {
    [xLo, xHi] = [xLo - 1, xHi + 1];
  }
  if (yLo === yHi) {
    [yLo, yHi] = [yLo - 1, yHi + 1];
  }
  const yPad = 0.05 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const xPos = (x: number) => {
    const t = spec.logX
      ? (Math.log10(x) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))
      : (x - xLo) / (xHi - xLo);
    return MARGIN.left + t * plotW;
  };
  const yPos = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  const title = table.comments[0] ?? "";
  if (title) {
    const safe = title
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .slice(0, 110);
    parts.push(
      `<text x="${MARGIN.left}" y="24" font-family="sans-serif" font-size="11" fill="#444">${safe}</text>`
    );
  }

  // Axes and ticks.
  const axisY = MARGIN.top + plotH;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + plotW}" y2="${axisY}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`
  );
  const xTicks = spec.logX ? logTicks(xLo, xHi) : linearTicks(xLo, xHi);
  for (const t of xTicks) {
    const px = xPos(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${axisY}" x2="${fmt(px)}" y2="${axisY + 5}" stroke="black"/>`,
      `<text x="${fmt(px)}" y="${axisY + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${tickLabel(t)}</text>`
    );
  }
  for (const t of linearTicks(yLo, yHi)) {
    const py = yPos(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="black"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 3.5)}" text-anchor="end" font-family="sans-serif" font-size="11">${tickLabel(t)}</text>`
    );
  }
  const xLabel = spec.logX ? `${spec.xColumn} (log scale)` : spec.xColumn;
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${xLabel}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${spec.yColumn}</text>`
  );

  // Series: error bars underneath, then the line and markers.
  let colorIdx = 0;
  const legend: Array<{ label: string; color: string }> = [];
  for (const [label, points] of series) {
    const color = PALETTE[colorIdx % PALETTE.length];
    colorIdx += 1;
    legend.push({ label, color });
    for (const p of points) {
      if (p.std > 0) {
        const px = xPos(p.x);
        const top = yPos(p.y + p.std);
        const bottom = yPos(p.y - p.std);
        parts.push(
          `<g class="errorbar" stroke="${color}" stroke-width="1">` +
            `<line x1="${fmt(px)}" y1="${fmt(top)}" x2="${fmt(px)}" y2="${fmt(bottom)}"/>` +
            `<line x1="${fmt(px - 4)}" y1="${fmt(top)}" x2="${fmt(px + 4)}" y2="${fmt(top)}"/>` +
            `<line x1="${fmt(px - 4)}" y1="${fmt(bottom)}" x2="${fmt(px + 4)}" y2="${fmt(bottom)}"/>` +
            `</g>`
        );
      }
    }
    const path = points
      .map((p) => `${fmt(xPos(p.x))},${fmt(yPos(p.y))}`)
      .join(" ");
    parts.push(
      `<polyline class="series" data-series="${label}" fill="none" stroke="${color}" stroke-width="1.8" points="${path}"/>`
    );
    for (const p of points) {
      parts.push(
        `<circle cx="${fmt(xPos(p.x))}" cy="${fmt(yPos(p.y))}" r="2.6" fill="${color}"/>`
      );
    }
  }

  // Legend.
  const lx = MARGIN.left + plotW + 14;
  legend.forEach(({ label, color }, i) => {
    const ly = MARGIN.top + 10 + i * 20;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="1.8"/>`,
      `<text x="${lx + 28}" y="${ly + 4}" font-family="sans-serif" font-size="12">${spec.seriesColumn}=${label}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

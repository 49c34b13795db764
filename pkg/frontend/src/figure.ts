import { readFileSync, writeFileSync } from "node:fs";
import { scaleLinear, type ScaleLinear } from "d3-scale";

import { parseMetricsCsv, type MetricsTable } from "./csv.js";

export interface FigureSpec {
  csvPath: string;
  outPath: string;
  /** title hint, e.g. "stirap" or "fstirap" */
  scenario?: string;
  /** pulse time scale used to express the x axis in units of tau (default 1) */
  tau?: number;
}

interface SeriesDef {
  column: string;
  label: string;
  color: string;
}

interface PanelDef {
  tag: string; // (a) .. (e)
  yLabel: string;
  series: SeriesDef[];
}

// fixed five-panel layout: drives, key populations, error probability,
// photon population, excited-atom population
export const PANELS: PanelDef[] = [
  {
    tag: "a",
    yLabel: "Ω/Ω₀",
    series: [
      { column: "OmegaA", label: "Ω_A", color: "#1f77b4" },
      { column: "OmegaB", label: "Ω_B", color: "#d62728" },
    ],
  },
  {
    tag: "b",
    yLabel: "P",
    series: [
      { column: "P1", label: "P₁", color: "#2ca02c" },
      { column: "P5", label: "P₅", color: "#1f77b4" },
      { column: "P8", label: "P₈", color: "#d62728" },
    ],
  },
  {
    tag: "c",
    yLabel: "P_e",
    series: [{ column: "Pe", label: "P_e", color: "#9467bd" }],
  },
  {
    tag: "d",
    yLabel: "P_p",
    series: [{ column: "Pp", label: "P_p", color: "#ff7f0e" }],
  },
  {
    tag: "e",
    yLabel: "P_ea",
    series: [{ column: "Pea", label: "P_ea", color: "#8c564b" }],
  },
];

const WIDTH = 760;
const PANEL_HEIGHT = 96;
const PANEL_GAP = 14;
const MARGIN = { top: 30, right: 18, bottom: 40, left: 66 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(x: number): string {
  // fixed-precision pixel coordinates keep the output stable across runs
  return x.toFixed(2);
}

function tickLabel(v: number): string {
  // strip float noise from d3's already-round tick values
  return String(Number(v.toPrecision(12)));
}

/** Split a series into runs of consecutive finite points (gaps = missing cells). */
function finiteRuns(xs: number[], ys: number[]): Array<Array<[number, number]>> {
  const runs: Array<Array<[number, number]>> = [];
  let current: Array<[number, number]> = [];
  for (let i = 0; i < ys.length; i++) {
    if (Number.isFinite(ys[i]) && Number.isFinite(xs[i])) {
      current.push([xs[i], ys[i]]);
    } else if (current.length > 0) {
      runs.push(current);
      current = [];
    }
  }
  if (current.length > 0) runs.push(current);
  return runs;
}

function yDomain(series: SeriesDef[], table: MetricsTable): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of table.values.get(s.column) ?? []) {
      if (!Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) return [0, 1]; // all-missing column (e.g. Pe with no dark state)
  lo = Math.min(0, lo);
  if (hi <= lo) hi = lo + 1;
  const pad = 0.06 * (hi - lo);
  return [lo, hi + pad];
}

function seriesSvg(
  def: SeriesDef,
  table: MetricsTable,
  xsScaled: number[],
  x: ScaleLinear<number, number>,
  y: ScaleLinear<number, number>,
): string {
  const rawCells = table.raw.get(def.column) ?? [];
  const ys = table.values.get(def.column) ?? [];
  const runs = finiteRuns(xsScaled, ys);
  const parts: string[] = [];
  parts.push(
    `<g class="series" data-column="${esc(def.column)}" data-values="${esc(
      rawCells.join(","),
    )}">`,
  );
  for (const run of runs) {
    if (run.length === 1) {
      const [px, py] = run[0];
      parts.push(
        `<circle cx="${fmt(x(px))}" cy="${fmt(y(py))}" r="2.5" fill="${def.color}"/>`,
      );
    } else {
      const points = run.map(([px, py]) => `${fmt(x(px))},${fmt(y(py))}`).join(" ");
      parts.push(
        `<polyline points="${points}" fill="none" stroke="${def.color}" stroke-width="1.4"/>`,
      );
    }
  }
  parts.push(`</g>`);
  return parts.join("\n");
}

export function renderSvg(table: MetricsTable, opts: { scenario?: string; tau?: number } = {}): string {
  const tau = opts.tau ?? 1;
  if (!(tau > 0)) {
    throw new Error(`tau must be > 0, got ${tau}`);
  }
  const tRaw = table.values.get("t") ?? [];
  const xsScaled = tRaw.map((v) => v / tau);
  const finite = xsScaled.filter(Number.isFinite);
  if (finite.length === 0) {
    throw new Error("t column has no finite values");
  }
  let xLo = Math.min(...finite);
  let xHi = Math.max(...finite);
  if (xHi === xLo) {
    xLo -= 0.5;
    xHi += 0.5;
  }

  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const height =
    MARGIN.top + PANELS.length * PANEL_HEIGHT + (PANELS.length - 1) * PANEL_GAP + MARGIN.bottom;
  const x = scaleLinear().domain([xLo, xHi]).range([MARGIN.left, MARGIN.left + innerW]);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
      `viewBox="0 0 ${WIDTH} ${height}" font-family="sans-serif" font-size="11">`,
  );
  out.push(`<rect width="${WIDTH}" height="${height}" fill="white"/>`);
  if (opts.scenario) {
    out.push(
      `<text x="${MARGIN.left}" y="18" font-size="13" font-weight="bold">` +
        `${esc(opts.scenario)}</text>`,
    );
  }
  // the shared time axis data rides along once at figure level
  out.push(
    `<g class="axis-data" data-column="t" data-values="${esc(
      (table.raw.get("t") ?? []).join(","),
    )}"/>`,
  );

  PANELS.forEach((panel, i) => {
    const top = MARGIN.top + i * (PANEL_HEIGHT + PANEL_GAP);
    const bottom = top + PANEL_HEIGHT;
    const y = scaleLinear().domain(yDomain(panel.series, table)).range([bottom, top]);

    out.push(`<g class="panel" data-panel="${panel.tag}">`);
    out.push(
      `<rect x="${MARGIN.left}" y="${top}" width="${innerW}" height="${PANEL_HEIGHT}" ` +
        `fill="none" stroke="#333" stroke-width="0.8"/>`,
    );
    out.push(
      `<text x="${MARGIN.left + 6}" y="${top + 14}" font-style="italic">(${panel.tag})</text>`,
    );
    // y ticks
    for (const tv of y.ticks(3)) {
      const py = y(tv);
      out.push(
        `<line x1="${MARGIN.left}" x2="${MARGIN.left + 4}" y1="${fmt(py)}" y2="${fmt(py)}" stroke="#333" stroke-width="0.8"/>`,
      );
      out.push(
        `<text x="${MARGIN.left - 6}" y="${fmt(py + 3.5)}" text-anchor="end">${tickLabel(tv)}</text>`,
      );
    }
    out.push(
      `<text x="${MARGIN.left - 44}" y="${top + PANEL_HEIGHT / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 ${MARGIN.left - 44} ${top + PANEL_HEIGHT / 2})">${esc(panel.yLabel)}</text>`,
    );
    for (const def of panel.series) {
      out.push(seriesSvg(def, table, xsScaled, x, y));
    }
    // per-panel legend, top right
    panel.series.forEach((def, k) => {
      const lx = MARGIN.left + innerW - 64;
      const ly = top + 14 + 13 * k;
      out.push(
        `<line x1="${lx}" x2="${lx + 16}" y1="${ly - 4}" y2="${ly - 4}" stroke="${def.color}" stroke-width="1.4"/>`,
      );
      out.push(`<text x="${lx + 20}" y="${ly}">${esc(def.label)}</text>`);
    });
    out.push(`</g>`);
  });

  // shared x axis on the last panel
  const axisY = MARGIN.top + PANELS.length * PANEL_HEIGHT + (PANELS.length - 1) * PANEL_GAP;
  for (const tv of x.ticks(8)) {
    const px = x(tv);
    out.push(
      `<line x1="${fmt(px)}" x2="${fmt(px)}" y1="${axisY}" y2="${axisY + 4}" stroke="#333" stroke-width="0.8"/>`,
    );
    out.push(
      `<text x="${fmt(px)}" y="${axisY + 16}" text-anchor="middle">${tickLabel(tv)}</text>`,
    );
  }
  out.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${axisY + 32}" text-anchor="middle">t/τ</text>`,
  );
  out.push(`</svg>`);
  return out.join("\n") + "\n";
}

export function render(spec: FigureSpec): void {
  const text = readFileSync(spec.csvPath, "utf-8");
  const table = parseMetricsCsv(text);
  const svg = renderSvg(table, { scenario: spec.scenario, tau: spec.tau });
  writeFileSync(spec.outPath, svg, "utf-8");
}

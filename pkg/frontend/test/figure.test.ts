import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseMetricsCsv } from "../src/csv.js";
import { renderSvg } from "../src/figure.js";

const FIXTURES = join(__dirname, "..", "fixtures");

function loadFixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

/** Column cells split straight from the CSV bytes, independent of the parser
 *  used by the renderer. The simulator never quotes cells, so a plain split
 *  is exact. */
function rawColumns(text: string): Map<string, string[]> {
  const lines = text.split("\r\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  const header = lines[0].split(",");
  const cols = new Map<string, string[]>(header.map((h) => [h, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    header.forEach((h, j) => cols.get(h)!.push(cells[j] ?? ""));
  }
  return cols;
}

function embeddedSeries(svg: string): Map<string, string> {
  const out = new Map<string, string>();
  const re = /data-column="([^"]+)" data-values="([^"]*)"/g;
  for (const match of svg.matchAll(re)) {
    out.set(match[1], match[2]);
  }
  return out;
}

const PLOTTED = ["t", "OmegaA", "OmegaB", "P1", "P5", "P8", "Pe", "Pp", "Pea"];

describe.each(["stirap_metrics.csv", "fstirap_metrics.csv"])("%s", (name) => {
  const text = loadFixture(name);
  const svg = renderSvg(parseMetricsCsv(text));

  it("renders a five-panel figure without error", () => {
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.match(/class="panel"/g)).toHaveLength(5);
    for (const tag of ["a", "b", "c", "d", "e"]) {
      expect(svg).toContain(`data-panel="${tag}"`);
    }
  });

  it("embeds every plotted series byte-identical to its CSV column", () => {
    const columns = rawColumns(text);
    const series = embeddedSeries(svg);
    for (const column of PLOTTED) {
      expect(series.has(column), `series ${column} present`).toBe(true);
      expect(series.get(column), `series ${column} bytes`).toBe(
        columns.get(column)!.join(","),
      );
    }
  });

  it("is deterministic", () => {
    expect(renderSvg(parseMetricsCsv(text))).toBe(svg);
  });
});

describe("panel content", () => {
  it("sequential-transfer fixture shows P5 and P8 rising toward 0.5", () => {
    const table = parseMetricsCsv(loadFixture("stirap_metrics.csv"));
    for (const column of ["P5", "P8"]) {
      const values = table.values.get(column)!;
      expect(values[0]).toBeLessThan(0.01);
      expect(values[values.length - 1]).toBeGreaterThan(0.45);
    }
  });

  it("balanced-split fixture ends with three populations near 1/3", () => {
    const table = parseMetricsCsv(loadFixture("fstirap_metrics.csv"));
    for (const column of ["P1", "P5", "P8"]) {
      const values = table.values.get(column)!;
      expect(Math.abs(values[values.length - 1] - 1 / 3)).toBeLessThan(0.05);
    }
  });
});

const HEADER = "t,P1,P5,P8,Pe,Pp,Pea,OmegaA,OmegaB";

describe("edge cases", () => {
  it("draws markers, not lines, for a single-row CSV", () => {
    const text = [HEADER, "1.5,1,0,0,0.2,0,0,0.3,0.9", ""].join("\r\n");
    const svg = renderSvg(parseMetricsCsv(text));
    expect(svg).toContain("<circle");
    expect(svg).not.toContain("<polyline");
  });

  it("splits a series with missing cells into separate segments", () => {
    const rows = [
      "0,1,0,0,0.1,0,0,0.5,1",
      "1,1,0,0,0.2,0,0,0.5,1",
      "2,1,0,0,,0,0,0.5,1",
      "3,1,0,0,0.4,0,0,0.5,1",
      "4,1,0,0,0.5,0,0,0.5,1",
    ];
    const svg = renderSvg(parseMetricsCsv([HEADER, ...rows, ""].join("\r\n")));
    const peGroup = svg.match(
      /<g class="series" data-column="Pe"[\s\S]*?<\/g>/,
    )![0];
    expect(peGroup.match(/<polyline/g)).toHaveLength(2);
    // the gap stays visible in the embedded bytes too
    expect(peGroup).toContain('data-values="0.1,0.2,,0.4,0.5"');
  });

  it("survives an all-missing optional series", () => {
    const rows = ["0,1,0,0,,0,0,0.5,1", "1,1,0,0,,0,0,0.5,1"];
    const svg = renderSvg(parseMetricsCsv([HEADER, ...rows, ""].join("\r\n")));
    const peGroup = svg.match(
      /<g class="series" data-column="Pe"[\s\S]*?<\/g>/,
    )![0];
    expect(peGroup).not.toContain("<polyline");
    expect(peGroup).toContain('data-values=",');
  });

  it("rejects a non-positive tau", () => {
    const table = parseMetricsCsv([HEADER, "0,1,0,0,0,0,0,1,1", ""].join("\r\n"));
    expect(() => renderSvg(table, { tau: 0 })).toThrowError(/tau/);
  });

  it("shows the scenario title when given", () => {
    const table = parseMetricsCsv([HEADER, "0,1,0,0,0,0,0,1,1", ""].join("\r\n"));
    const svg = renderSvg(table, { scenario: "stirap" });
    expect(svg).toContain(">stirap</text>");
  });
});

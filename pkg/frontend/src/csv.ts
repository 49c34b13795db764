import Papa from "papaparse";

/** Columns the five panels draw from. The simulator CSV has more (P2..P7,
 * norm, fidelities); extras are carried along untouched. */
export const REQUIRED_COLUMNS = [
  "t",
  "P1",
  "P5",
  "P8",
  "Pe",
  "Pp",
  "Pea",
  "OmegaA",
  "OmegaB",
] as const;

export interface MetricsTable {
  columns: string[];
  /** exact cell text per column, in row order — empty string for missing values */
  raw: Map<string, string[]>;
  /** Number(cell); NaN where the cell is empty */
  values: Map<string, number[]>;
  nRows: number;
}

export function parseMetricsCsv(text: string): MetricsTable {
  if (text.trim() === "") {
    throw new Error("CSV is empty");
  }
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new Error("CSV is empty");
  }
  const columns = rows[0];
  const missing = REQUIRED_COLUMNS.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    throw new Error(`CSV is missing required columns: ${missing.join(", ")}`);
  }
  const body = rows.slice(1);
  if (body.length === 0) {
    throw new Error("CSV has a header but no data rows");
  }
  const raw = new Map<string, string[]>();
  const values = new Map<string, number[]>();
  columns.forEach((name, j) => {
    const cells = body.map((row) => row[j] ?? "");
    raw.set(name, cells);
    values.set(
      name,
      cells.map((cell) => (cell === "" ? NaN : Number(cell))),
    );
  });
  return { columns, raw, values, nRows: body.length };
}

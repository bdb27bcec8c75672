import Papa from "papaparse";

/** One evaluation row from a run log. */
export interface RunRow {
  runId: string;
  baseline: string;
  env: string;
  teamId: string;
  seed: number;
  totalStep: number;
  meanReturn: number;
  ci95: number;
  /** Per-agent influence rates; null where the run logged blanks. */
  doeRates: (number | null)[];
  /** Per-sub-team source-task returns; null where the run logged blanks. */
  sourceReturns: (number | null)[];
}

export interface RunLog {
  rows: RunRow[];
  doeColumns: string[];
  sourceColumns: string[];
}

export interface SweepRow {
  parameter: string;
  value: number;
  seed: number;
  auc: number;
}

/** Raised for anything wrong with an input file; the message names the file. */
export class SchemaError extends Error {}

const RUN_FIXED = [
  "run_id",
  "baseline",
  "env",
  "team_id",
  "seed",
  "total_step",
  "mean_return",
  "ci95",
];

const SWEEP_HEADER = ["parameter", "value", "seed", "auc"];

function splitCsv(text: string, label: string): string[][] {
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  for (const err of parsed.errors) {
    // papaparse recovers from most things; only hard failures land here
    if (err.code !== "UndetectableDelimiter") {
      throw new SchemaError(`${label}: ${err.message} (row ${err.row ?? "?"})`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${label}: file is empty`);
  }
  return parsed.data;
}

function toNumber(raw: string, label: string, column: string, row: number): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new SchemaError(
      `${label}: column '${column}' has non-numeric value '${raw}' at data row ${row}`,
    );
  }
  return v;
}

function toNullableNumber(
  raw: string,
  label: string,
  column: string,
  row: number,
): number | null {
  if (raw.trim() === "") return null;
  return toNumber(raw, label, column, row);
}

/**
 * Parse one run log written by `medoe run`.
 *
 * The header is a fixed prefix followed by any number of doe_rate_agent_N
 * columns and then any number of source_return_subteam_N columns. Anything
 * else is rejected with the offending column named.
 */
export function parseRunLog(text: string, label: string): RunLog {
  const data = splitCsv(text, label);
  const header = data[0];
  for (let i = 0; i < RUN_FIXED.length; i++) {
    if (header[i] !== RUN_FIXED[i]) {
      throw new SchemaError(
        `${label}: expected column '${RUN_FIXED[i]}' at position ${i + 1}, ` +
          `found '${header[i] ?? "end of header"}'`,
      );
    }
  }
  const doeColumns: string[] = [];
  const sourceColumns: string[] = [];
  for (const name of header.slice(RUN_FIXED.length)) {
    if (/^doe_rate_agent_\d+$/.test(name) && sourceColumns.length === 0) {
      doeColumns.push(name);
    } else if (/^source_return_subteam_\d+$/.test(name)) {
      sourceColumns.push(name);
    } else {
      throw new SchemaError(`${label}: unexpected column '${name}'`);
    }
  }
  if (data.length === 1) {
    throw new SchemaError(`${label}: no data rows`);
  }

  const rows: RunRow[] = [];
  for (let r = 1; r < data.length; r++) {
    const cells = data[r];
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${label}: data row ${r} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    const doeRates = doeColumns.map((col, i) =>
      toNullableNumber(cells[RUN_FIXED.length + i], label, col, r),
    );
    const sourceReturns = sourceColumns.map((col, i) =>
      toNullableNumber(cells[RUN_FIXED.length + doeColumns.length + i], label, col, r),
    );
    rows.push({
      runId: cells[0],
      baseline: cells[1],
      env: cells[2],
      teamId: cells[3],
      seed: toNumber(cells[4], label, "seed", r),
      totalStep: toNumber(cells[5], label, "total_step", r),
      meanReturn: toNumber(cells[6], label, "mean_return", r),
      ci95: toNumber(cells[7], label, "ci95", r),
      doeRates,
      sourceReturns,
    });
  }
  return { rows, doeColumns, sourceColumns };
}

/** Parse one sweep table written by `medoe sweep`. */
export function parseSweep(text: string, label: string): SweepRow[] {
  const data = splitCsv(text, label);
  const header = data[0];
  for (let i = 0; i < SWEEP_HEADER.length; i++) {
    if (header[i] !== SWEEP_HEADER[i]) {
      throw new SchemaError(
        `${label}: expected column '${SWEEP_HEADER[i]}' at position ${i + 1}, ` +
          `found '${header[i] ?? "end of header"}'`,
      );
    }
  }
  if (header.length > SWEEP_HEADER.length) {
    throw new SchemaError(`${label}: unexpected column '${header[SWEEP_HEADER.length]}'`);
  }
  if (data.length === 1) {
    throw new SchemaError(`${label}: no data rows`);
  }
  const rows: SweepRow[] = [];
  for (let r = 1; r < data.length; r++) {
    const cells = data[r];
    rows.push({
      parameter: cells[0],
      value: toNumber(cells[1], label, "value", r),
      seed: toNumber(cells[2], label, "seed", r),
      auc: toNumber(cells[3], label, "auc", r),
    });
  }
  return rows;
}

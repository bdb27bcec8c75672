#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";
import { SchemaError } from "./csv.js";
import { NamedCsv, PLOT_KINDS, PlotKind } from "./plots.js";
import { renderPng } from "./raster.js";
import { renderSvg } from "./svg.js";

const USAGE = `usage: medoe-plot <kind> --csv PATH [--csv PATH ...] --out PATH [--raster]

kinds:
  training     mean return per baseline with a confidence band across runs
  sensitivity  swept-parameter scatter with a running median, log x axis
  forgetting   per-sub-team source-task return, one panel per sub-team

Output is SVG by default; pass --raster to write a PNG instead.`;

export function main(argv: string[]): number {
  const kind = argv[0];
  if (kind === "--help" || kind === "-h") {
    console.log(USAGE);
    return 0;
  }
  if (!kind || !(kind in PLOT_KINDS)) {
    console.error(`medoe-plot: unknown plot kind '${kind ?? ""}'`);
    console.error(USAGE);
    return 2;
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: argv.slice(1),
      options: {
        csv: { type: "string", multiple: true },
        out: { type: "string" },
        raster: { type: "boolean", default: false },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`medoe-plot: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  const csvPaths = parsed.values.csv ?? [];
  const out = parsed.values.out;
  if (csvPaths.length === 0 || !out) {
    console.error("medoe-plot: --csv and --out are both required");
    console.error(USAGE);
    return 2;
  }

  let files: NamedCsv[];
  try {
    files = csvPaths.map((path) => ({ label: path, text: readFileSync(path, "utf8") }));
  } catch (err) {
    console.error(`medoe-plot: ${(err as NodeJS.ErrnoException).message}`);
    return 1;
  }

  // render fully before touching the output path so a bad CSV leaves no file
  let payload: string | Buffer;
  try {
    const figure = PLOT_KINDS[kind as PlotKind](files);
    payload = parsed.values.raster ? renderPng(figure) : renderSvg(figure);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`medoe-plot: ${err.message}`);
      return 1;
    }
    throw err;
  }
  try {
    writeFileSync(out, payload);
  } catch (err) {
    console.error(`medoe-plot: ${(err as NodeJS.ErrnoException).message}`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}

import { max, min } from "d3-array";
import { parseRunLog, parseSweep, RunLog, SchemaError } from "./csv.js";
import {
  axes,
  DEFAULT_FRAME,
  Figure,
  Frame,
  legend,
  linearScale,
  logScale,
  PALETTE,
  Shape,
} from "./figure.js";
import {
  BandSeries,
  bandByBaseline,
  forgettingPanels,
  sensitivitySeries,
} from "./series.js";

export interface NamedCsv {
  /** Shown in error messages; usually the file path. */
  label: string;
  text: string;
}

function parseLogs(files: NamedCsv[]): { log: RunLog; label: string }[] {
  if (files.length === 0) throw new SchemaError("no input files given");
  return files.map((f) => ({ log: parseRunLog(f.text, f.label), label: f.label }));
}

function bandExtent(series: BandSeries[]): [number, number, number, number] {
  const x0 = min(series, (s) => s.steps[0])!;
  const x1 = max(series, (s) => s.steps[s.steps.length - 1])!;
  const y0 = min(series, (s) => min(s.lo)!)!;
  const y1 = max(series, (s) => max(s.hi)!)!;
  return [x0, x1, y0, y1];
}

function drawBands(series: BandSeries[], x: (v: number) => number, y: (v: number) => number): Shape[] {
  const shapes: Shape[] = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const upper = s.steps.map((step, j) => ({ x: x(step), y: y(s.hi[j]) }));
    const lower = s.steps.map((step, j) => ({ x: x(step), y: y(s.lo[j]) }));
    shapes.push({
      kind: "polygon",
      points: [...upper, ...lower.reverse()],
      fill: color,
      opacity: 0.18,
    });
    shapes.push({
      kind: "line",
      points: s.steps.map((step, j) => ({ x: x(step), y: y(s.mean[j]) })),
      color,
      width: 2,
    });
  });
  return shapes;
}

/**
 * Mean training curve per baseline with a 95% confidence band across runs.
 * Any number of run logs can be given; rows are pooled before grouping, so
 * one file per run and one file for a whole experiment both work.
 */
export function trainingFigure(files: NamedCsv[]): Figure {
  const logs = parseLogs(files);
  const rows = logs.flatMap((l) => l.log.rows);
  const series = bandByBaseline(rows, (row) => row.meanReturn);
  const frame = DEFAULT_FRAME;
  const [x0, x1, y0, y1] = bandExtent(series);
  const x = linearScale(x0, x1, frame.left, frame.width - frame.right);
  const y = linearScale(y1, y0, frame.top, frame.height - frame.bottom);
  const env = rows[0].env;
  const shapes = axes(frame, x, y, {
    title: `${env}: adjustment training`,
    xLabel: "environment steps",
    yLabel: "mean episodic return",
  });
  shapes.push(...drawBands(series, x, y));
  shapes.push(
    ...legend(
      frame,
      series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
    ),
  );
  return { width: frame.width, height: frame.height, shapes };
}

/**
 * Sweep scatter on a log-x axis with a running median through the samples.
 */
export function sensitivityFigure(files: NamedCsv[]): Figure {
  if (files.length === 0) throw new SchemaError("no input files given");
  const rows = files.flatMap((f) => parseSweep(f.text, f.label));
  const { parameter, points, medianLine } = sensitivitySeries(rows);
  const frame = DEFAULT_FRAME;
  const x = logScale(
    points[0].value,
    points[points.length - 1].value,
    frame.left,
    frame.width - frame.right,
  );
  const aucLo = min(points, (p) => p.auc)!;
  const aucHi = max(points, (p) => p.auc)!;
  const y = linearScale(aucHi, aucLo, frame.top, frame.height - frame.bottom);
  const shapes = axes(frame, x, y, {
    title: `sensitivity to ${parameter}`,
    xLabel: parameter,
    yLabel: "area under return curve",
  });
  for (const p of points) {
    shapes.push({
      kind: "circle",
      x: x(p.value),
      y: y(p.auc),
      r: 2,
      fill: PALETTE[0],
      opacity: 0.35,
    });
  }
  shapes.push({
    kind: "line",
    points: medianLine.map((p) => ({ x: x(p.value), y: y(p.auc) })),
    color: PALETTE[1],
    width: 2.5,
  });
  shapes.push(
    ...legend(frame, [
      { label: "samples", color: PALETTE[0] },
      { label: "running median", color: PALETTE[1] },
    ]),
  );
  return { width: frame.width, height: frame.height, shapes };
}

/**
 * One panel per sub-team showing source-task return over adjustment steps,
 * one banded line per baseline inside each panel.
 */
export function forgettingFigure(files: NamedCsv[]): Figure {
  const logs = parseLogs(files);
  const panels = forgettingPanels(logs);
  const frame: Frame = { ...DEFAULT_FRAME, width: 440, left: 64 };
  // shared y range so retention is comparable across panels
  let y0 = Infinity;
  let y1 = -Infinity;
  for (const panel of panels) {
    const [, , lo, hi] = bandExtent(panel.series);
    y0 = Math.min(y0, lo);
    y1 = Math.max(y1, hi);
  }
  const shapes: Shape[] = [];
  panels.forEach((panel, p) => {
    const offsetX = p * frame.width;
    const [x0, x1] = bandExtent(panel.series);
    const x = linearScale(x0, x1, offsetX + frame.left, offsetX + frame.width - frame.right);
    const y = linearScale(y1, y0, frame.top, frame.height - frame.bottom);
    const subTeam = panel.column.replace("source_return_subteam_", "sub-team ");
    shapes.push(
      ...axes(
        frame,
        x,
        y,
        {
          title: subTeam,
          xLabel: "environment steps",
          yLabel: p === 0 ? "source-task return" : "",
        },
        offsetX,
      ),
    );
    shapes.push(...drawBands(panel.series, x, y));
    shapes.push(
      ...legend(
        frame,
        panel.series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
        offsetX,
      ),
    );
  });
  return { width: frame.width * panels.length, height: frame.height, shapes };
}

export type PlotKind = "training" | "sensitivity" | "forgetting";

export const PLOT_KINDS: Record<PlotKind, (files: NamedCsv[]) => Figure> = {
  training: trainingFigure,
  sensitivity: sensitivityFigure,
  forgetting: forgettingFigure,
};

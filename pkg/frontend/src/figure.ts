import { ticks } from "d3-array";
import { format } from "d3-format";

/**
 * Figures are plain shape lists in pixel space so the SVG and PNG backends
 * can share everything above the final serialization step.
 */
export interface LineShape {
  kind: "line";
  points: { x: number; y: number }[];
  color: string;
  width: number;
  dash?: number[];
}

export interface PolygonShape {
  kind: "polygon";
  points: { x: number; y: number }[];
  fill: string;
  opacity: number;
}

export interface CircleShape {
  kind: "circle";
  x: number;
  y: number;
  r: number;
  fill: string;
  opacity: number;
}

export interface TextShape {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  color: string;
  anchor: "start" | "middle" | "end";
}

export type Shape = LineShape | PolygonShape | CircleShape | TextShape;

export interface Figure {
  width: number;
  height: number;
  shapes: Shape[];
}

export const PALETTE = ["#2166ac", "#d6604d", "#4dac26", "#b8860b", "#7b3294", "#35978f"];
export const AXIS_COLOR = "#444444";
export const GRID_COLOR = "#dddddd";

export interface Scale {
  (v: number): number;
  ticks: number[];
  /** Tick positions formatted for display. */
  labels: string[];
}

const linearLabel = format("~s");
const logLabel = format("~g");

function clampDomain(lo: number, hi: number): [number, number] {
  if (lo === hi) {
    // degenerate data still deserves a visible axis
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

export function linearScale(
  domainLo: number,
  domainHi: number,
  rangeLo: number,
  rangeHi: number,
): Scale {
  const [lo, hi] = clampDomain(domainLo, domainHi);
  const f = (v: number) => rangeLo + ((v - lo) / (hi - lo)) * (rangeHi - rangeLo);
  const s = f as Scale;
  s.ticks = ticks(lo, hi, 6);
  s.labels = s.ticks.map((t) => linearLabel(t));
  return s;
}

export function logScale(
  domainLo: number,
  domainHi: number,
  rangeLo: number,
  rangeHi: number,
): Scale {
  const [lo, hi] = clampDomain(Math.log10(domainLo), Math.log10(domainHi));
  const f = (v: number) => rangeLo + ((Math.log10(v) - lo) / (hi - lo)) * (rangeHi - rangeLo);
  const s = f as Scale;
  // decade ticks, thinned to at most six so labels stay readable
  let decades: number[] = [];
  for (let d = Math.ceil(lo); d <= Math.floor(hi); d++) decades.push(d);
  if (decades.length === 0) decades = ticks(lo, hi, 4);
  const stride = Math.ceil(decades.length / 6);
  decades = decades.filter((_, i) => i % stride === 0);
  s.ticks = decades.map((d) => 10 ** d);
  s.labels = s.ticks.map((t) => logLabel(t));
  return s;
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 640,
  height: 420,
  left: 70,
  right: 20,
  top: 40,
  bottom: 50,
};

/**
 * Grid, tick labels, axis titles and figure title for one cartesian panel.
 * Scales must already map into absolute pixel coordinates; `offsetX` only
 * shifts the panel frame itself (for multi-panel layouts).
 */
export function axes(
  frame: Frame,
  x: Scale,
  y: Scale,
  labels: { title: string; xLabel: string; yLabel: string },
  offsetX = 0,
): Shape[] {
  const shapes: Shape[] = [];
  const left = offsetX + frame.left;
  const right = offsetX + frame.width - frame.right;
  for (const [t, text] of x.ticks.map((t, i) => [t, x.labels[i]] as const)) {
    const px = x(t);
    if (px < left - 0.5 || px > right + 0.5) continue;
    shapes.push({
      kind: "line",
      points: [
        { x: px, y: frame.top },
        { x: px, y: frame.height - frame.bottom },
      ],
      color: GRID_COLOR,
      width: 1,
    });
    shapes.push({
      kind: "text",
      x: px,
      y: frame.height - frame.bottom + 16,
      text,
      size: 11,
      color: AXIS_COLOR,
      anchor: "middle",
    });
  }
  for (const [t, text] of y.ticks.map((t, i) => [t, y.labels[i]] as const)) {
    const py = y(t);
    if (py < frame.top - 0.5 || py > frame.height - frame.bottom + 0.5) continue;
    shapes.push({
      kind: "line",
      points: [
        { x: left, y: py },
        { x: right, y: py },
      ],
      color: GRID_COLOR,
      width: 1,
    });
    shapes.push({
      kind: "text",
      x: left - 6,
      y: py + 4,
      text,
      size: 11,
      color: AXIS_COLOR,
      anchor: "end",
    });
  }
  shapes.push({
    kind: "line",
    points: [
      { x: left, y: frame.top },
      { x: left, y: frame.height - frame.bottom },
      { x: right, y: frame.height - frame.bottom },
    ],
    color: AXIS_COLOR,
    width: 1.5,
  });
  shapes.push({
    kind: "text",
    x: (left + right) / 2,
    y: frame.height - frame.bottom + 34,
    text: labels.xLabel,
    size: 12,
    color: AXIS_COLOR,
    anchor: "middle",
  });
  shapes.push({
    kind: "text",
    x: left,
    y: frame.top - 18,
    text: labels.yLabel,
    size: 12,
    color: AXIS_COLOR,
    anchor: "start",
  });
  shapes.push({
    kind: "text",
    x: (left + right) / 2,
    y: 20,
    text: labels.title,
    size: 14,
    color: "#111111",
    anchor: "middle",
  });
  return shapes;
}

/** Small color-keyed legend in the top-right corner of a panel. */
export function legend(frame: Frame, entries: { label: string; color: string }[], offsetX = 0): Shape[] {
  const shapes: Shape[] = [];
  const x0 = offsetX + frame.width - frame.right - 10;
  entries.forEach((entry, i) => {
    const y = frame.top + 14 + i * 16;
    shapes.push({
      kind: "line",
      points: [
        { x: x0 - 22, y: y - 4 },
        { x: x0 - 6, y: y - 4 },
      ],
      color: entry.color,
      width: 2.5,
    });
    shapes.push({
      kind: "text",
      x: x0 - 26,
      y,
      text: entry.label,
      size: 11,
      color: AXIS_COLOR,
      anchor: "end",
    });
  });
  return shapes;
}

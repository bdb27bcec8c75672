import { describe, expect, it } from "vitest";
import { SchemaError } from "../src/csv.js";
import { PolygonShape, TextShape } from "../src/figure.js";
import { forgettingFigure, sensitivityFigure, trainingFigure } from "../src/plots.js";
import { renderSvg } from "../src/svg.js";
import { fixture } from "./helpers.js";

const TRAINING_FILES = [
  "medoe-expert-s0.csv",
  "medoe-expert-s1.csv",
  "pre-skilled-bp-s0.csv",
  "pre-skilled-bp-s1.csv",
].map((name) => ({ label: name, text: fixture(name) }));

function texts(fig: { shapes: { kind: string }[] }): string[] {
  return fig.shapes.filter((s) => s.kind === "text").map((s) => (s as TextShape).text);
}

function polygons(fig: { shapes: { kind: string }[] }): PolygonShape[] {
  return fig.shapes.filter((s) => s.kind === "polygon") as PolygonShape[];
}

describe("trainingFigure", () => {
  it("draws one labelled banded line per baseline", () => {
    const fig = trainingFigure(TRAINING_FILES);
    expect(polygons(fig).length).toBe(2);
    const labels = texts(fig);
    expect(labels).toContain("medoe-expert");
    expect(labels).toContain("pre-skilled-BP");
    expect(labels).toContain("chainball: adjustment training");
    const svg = renderSvg(fig);
    expect(svg.startsWith("<svg ")).toBe(true);
    expect((svg.match(/<polyline/g) ?? []).length).toBeGreaterThan(2);
  });

  it("collapses the band to the mean line for a single run", () => {
    const fig = trainingFigure([TRAINING_FILES[0]]);
    const [band] = polygons(fig);
    // upper edge followed by reversed lower edge: they must coincide
    const n = band.points.length / 2;
    const upper = band.points.slice(0, n);
    const lower = band.points.slice(n).reverse();
    expect(lower).toEqual(upper);
  });

  it("is a pure function of its input", () => {
    const a = renderSvg(trainingFigure(TRAINING_FILES));
    const b = renderSvg(trainingFigure(TRAINING_FILES));
    expect(a).toBe(b);
  });

  it("propagates schema errors", () => {
    expect(() => trainingFigure([{ label: "empty.csv", text: fixture("empty.csv") }])).toThrow(
      SchemaError,
    );
    expect(() => trainingFigure([])).toThrow(/no input files/);
  });
});

describe("sensitivityFigure", () => {
  it("renders the committed 1024-sample sweep", () => {
    const fig = sensitivityFigure([
      { label: "sweep.csv", text: fixture("sweep-temperature_boost.csv") },
    ]);
    const circles = fig.shapes.filter((s) => s.kind === "circle");
    expect(circles.length).toBe(1024);
    const labels = texts(fig);
    expect(labels).toContain("sensitivity to temperature_boost");
    expect(labels).toContain("running median");
    const svg = renderSvg(fig);
    expect(svg).toContain("<circle");
  });

  it("rejects a run log passed as a sweep", () => {
    expect(() =>
      sensitivityFigure([{ label: "log.csv", text: fixture("medoe-expert-s0.csv") }]),
    ).toThrow(/expected column 'parameter' at position 1/);
  });
});

describe("forgettingFigure", () => {
  const files = [
    "medoe-expert-s0.csv",
    "medoe-expert-s1.csv",
    "medoe-expert-no-bp-s0.csv",
    "medoe-expert-no-bp-s1.csv",
  ].map((name) => ({ label: name, text: fixture(name) }));

  it("lays out one panel per sub-team with both baselines in each", () => {
    const fig = forgettingFigure(files);
    expect(polygons(fig).length).toBe(4);
    const labels = texts(fig);
    expect(labels).toContain("sub-team 1");
    expect(labels).toContain("sub-team 2");
    expect(labels.filter((t) => t === "medoe-expert").length).toBe(2);
    expect(labels.filter((t) => t === "medoe-expert-no-BP").length).toBe(2);
    expect(fig.width).toBe(880);
  });

  it("names the column that is blank", () => {
    expect(() =>
      forgettingFigure([
        { label: "no-source-returns.csv", text: fixture("no-source-returns.csv") },
      ]),
    ).toThrow(/column 'source_return_subteam_1' is blank/);
  });

  it("keeps a constant metric flat", () => {
    const header =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95,source_return_subteam_1\n";
    const body = [0, 100, 200, 300]
      .map((s) => `r,b,chainball,t,0,${s},${s / 100},0.0,1.5\n`)
      .join("");
    const fig = forgettingFigure([{ label: "const.csv", text: header + body }]);
    const lines = fig.shapes.filter((s) => s.kind === "line");
    const flat = lines.filter(
      (l) =>
        "points" in l &&
        (l as { points: { x: number; y: number }[] }).points.length === 4 &&
        new Set((l as { points: { y: number }[] }).points.map((p) => p.y)).size === 1,
    );
    expect(flat.length).toBeGreaterThanOrEqual(1);
  });
});

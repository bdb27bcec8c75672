import { PNG } from "pngjs";
import { describe, expect, it } from "vitest";
import { trainingFigure } from "../src/plots.js";
import { renderPng } from "../src/raster.js";
import { fixture } from "./helpers.js";

const FILES = [{ label: "medoe-expert-s0.csv", text: fixture("medoe-expert-s0.csv") }];

describe("renderPng", () => {
  it("writes a decodable PNG at twice the figure size", () => {
    const fig = trainingFigure(FILES);
    const buf = renderPng(fig);
    expect([...buf.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    const png = PNG.sync.read(buf);
    expect(png.width).toBe(fig.width * 2);
    expect(png.height).toBe(fig.height * 2);
  });

  it("paints a white background with visible ink", () => {
    const png = PNG.sync.read(renderPng(trainingFigure(FILES)));
    // top-left corner is margin
    expect(png.data[0]).toBe(0xff);
    expect(png.data[1]).toBe(0xff);
    expect(png.data[2]).toBe(0xff);
    let inked = 0;
    for (let i = 0; i < png.data.length; i += 4) {
      if (png.data[i] !== 0xff || png.data[i + 1] !== 0xff || png.data[i + 2] !== 0xff) inked++;
    }
    expect(inked).toBeGreaterThan(1000);
  });

  it("is byte-stable across calls", () => {
    const a = renderPng(trainingFigure(FILES));
    const b = renderPng(trainingFigure(FILES));
    expect(a.equals(b)).toBe(true);
  });
});

import { PNG } from "pngjs";
import { Figure, Shape } from "./figure.js";

/**
 * Raster fallback for viewers without SVG support. Rendering is deliberately
 * plain: solid 1px-ish strokes, scanline polygon fill, a 5x7 bitmap font with
 * lowercase mapped onto the uppercase glyphs. The SVG backend is the default
 * and the reference; this one only has to be legible and deterministic.
 */

const SCALE = 2;

// classic 5x7 font, one byte per column, bit 0 = top row
const FONT: Record<string, number[]> = {
  " ": [0x00, 0x00, 0x00, 0x00, 0x00],
  "-": [0x08, 0x08, 0x08, 0x08, 0x08],
  "+": [0x08, 0x08, 0x3e, 0x08, 0x08],
  ".": [0x00, 0x60, 0x60, 0x00, 0x00],
  ",": [0x00, 0x50, 0x30, 0x00, 0x00],
  ":": [0x00, 0x36, 0x36, 0x00, 0x00],
  "(": [0x00, 0x1c, 0x22, 0x41, 0x00],
  ")": [0x00, 0x41, 0x22, 0x1c, 0x00],
  "/": [0x20, 0x10, 0x08, 0x04, 0x02],
  "%": [0x23, 0x13, 0x08, 0x64, 0x62],
  "=": [0x14, 0x14, 0x14, 0x14, 0x14],
  _: [0x40, 0x40, 0x40, 0x40, 0x40],
  "'": [0x00, 0x05, 0x03, 0x00, 0x00],
  "0": [0x3e, 0x51, 0x49, 0x45, 0x3e],
  "1": [0x00, 0x42, 0x7f, 0x40, 0x00],
  "2": [0x42, 0x61, 0x51, 0x49, 0x46],
  "3": [0x21, 0x41, 0x45, 0x4b, 0x31],
  "4": [0x18, 0x14, 0x12, 0x7f, 0x10],
  "5": [0x27, 0x45, 0x45, 0x45, 0x39],
  "6": [0x3c, 0x4a, 0x49, 0x49, 0x30],
  "7": [0x01, 0x71, 0x09, 0x05, 0x03],
  "8": [0x36, 0x49, 0x49, 0x49, 0x36],
  "9": [0x06, 0x49, 0x49, 0x29, 0x1e],
  A: [0x7e, 0x11, 0x11, 0x11, 0x7e],
  B: [0x7f, 0x49, 0x49, 0x49, 0x36],
  C: [0x3e, 0x41, 0x41, 0x41, 0x22],
  D: [0x7f, 0x41, 0x41, 0x22, 0x1c],
  E: [0x7f, 0x49, 0x49, 0x49, 0x41],
  F: [0x7f, 0x09, 0x09, 0x09, 0x01],
  G: [0x3e, 0x41, 0x49, 0x49, 0x7a],
  H: [0x7f, 0x08, 0x08, 0x08, 0x7f],
  I: [0x00, 0x41, 0x7f, 0x41, 0x00],
  J: [0x20, 0x40, 0x41, 0x3f, 0x01],
  K: [0x7f, 0x08, 0x14, 0x22, 0x41],
  L: [0x7f, 0x40, 0x40, 0x40, 0x40],
  M: [0x7f, 0x02, 0x0c, 0x02, 0x7f],
  N: [0x7f, 0x04, 0x08, 0x10, 0x7f],
  O: [0x3e, 0x41, 0x41, 0x41, 0x3e],
  P: [0x7f, 0x09, 0x09, 0x09, 0x06],
  Q: [0x3e, 0x41, 0x51, 0x21, 0x5e],
  R: [0x7f, 0x09, 0x19, 0x29, 0x46],
  S: [0x46, 0x49, 0x49, 0x49, 0x31],
  T: [0x01, 0x01, 0x7f, 0x01, 0x01],
  U: [0x3f, 0x40, 0x40, 0x40, 0x3f],
  V: [0x1f, 0x20, 0x40, 0x20, 0x1f],
  W: [0x3f, 0x40, 0x38, 0x40, 0x3f],
  X: [0x63, 0x14, 0x08, 0x14, 0x63],
  Y: [0x07, 0x08, 0x70, 0x08, 0x07],
  Z: [0x61, 0x51, 0x49, 0x45, 0x43],
};
const UNKNOWN_GLYPH = [0x7f, 0x41, 0x41, 0x41, 0x7f];

function parseColor(color: string): [number, number, number] {
  const m = /^#([0-9a-f]{6})$/i.exec(color);
  if (!m) return [0, 0, 0];
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

class Canvas {
  png: PNG;

  constructor(width: number, height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(0xff);
  }

  blend(x: number, y: number, rgb: [number, number, number], alpha: number) {
    if (x < 0 || y < 0 || x >= this.png.width || y >= this.png.height) return;
    const i = (y * this.png.width + x) * 4;
    const d = this.png.data;
    d[i] = Math.round(d[i] * (1 - alpha) + rgb[0] * alpha);
    d[i + 1] = Math.round(d[i + 1] * (1 - alpha) + rgb[1] * alpha);
    d[i + 2] = Math.round(d[i + 2] * (1 - alpha) + rgb[2] * alpha);
    d[i + 3] = 0xff;
  }

  dot(x: number, y: number, rgb: [number, number, number], alpha: number, thickness: number) {
    const r = Math.max(0, Math.floor(thickness / 2));
    for (let dy = -r; dy <= r; dy++) {
      for (let dx = -r; dx <= r; dx++) {
        this.blend(x + dx, y + dy, rgb, alpha);
      }
    }
  }

  segment(
    x0: number,
    y0: number,
    x1: number,
    y1: number,
    rgb: [number, number, number],
    alpha: number,
    thickness: number,
  ) {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.dot(ax, ay, rgb, alpha, thickness);
      if (ax === bx && ay === by) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  fillPolygon(points: { x: number; y: number }[], rgb: [number, number, number], alpha: number) {
    if (points.length < 3) return;
    const ys = points.map((p) => p.y);
    const y0 = Math.max(0, Math.floor(Math.min(...ys)));
    const y1 = Math.min(this.png.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = y0; y <= y1; y++) {
      const crossings: number[] = [];
      const mid = y + 0.5;
      for (let i = 0; i < points.length; i++) {
        const a = points[i];
        const b = points[(i + 1) % points.length];
        if (a.y <= mid === b.y <= mid) continue;
        crossings.push(a.x + ((mid - a.y) / (b.y - a.y)) * (b.x - a.x));
      }
      crossings.sort((p, q) => p - q);
      for (let i = 0; i + 1 < crossings.length; i += 2) {
        const xa = Math.max(0, Math.round(crossings[i]));
        const xb = Math.min(this.png.width - 1, Math.round(crossings[i + 1]));
        for (let x = xa; x <= xb; x++) this.blend(x, y, rgb, alpha);
      }
    }
  }

  fillCircle(cx: number, cy: number, r: number, rgb: [number, number, number], alpha: number) {
    const x0 = Math.floor(cx - r);
    const x1 = Math.ceil(cx + r);
    const y0 = Math.floor(cy - r);
    const y1 = Math.ceil(cy + r);
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const d = (x + 0.5 - cx) ** 2 + (y + 0.5 - cy) ** 2;
        if (d <= r * r) this.blend(x, y, rgb, alpha);
      }
    }
  }

  text(
    xLeft: number,
    yBase: number,
    text: string,
    pixel: number,
    rgb: [number, number, number],
  ) {
    let cx = Math.round(xLeft);
    const top = Math.round(yBase) - 7 * pixel;
    for (const ch of text) {
      const glyph = FONT[ch] ?? FONT[ch.toUpperCase()] ?? UNKNOWN_GLYPH;
      for (let col = 0; col < 5; col++) {
        for (let row = 0; row < 7; row++) {
          if ((glyph[col] >> row) & 1) {
            for (let py = 0; py < pixel; py++) {
              for (let px = 0; px < pixel; px++) {
                this.blend(cx + col * pixel + px, top + row * pixel + py, rgb, 1);
              }
            }
          }
        }
      }
      cx += 6 * pixel;
    }
  }
}

function textWidth(text: string, pixel: number): number {
  return text.length * 6 * pixel - pixel;
}

function drawShape(canvas: Canvas, shape: Shape) {
  switch (shape.kind) {
    case "line": {
      const rgb = parseColor(shape.color);
      const thickness = Math.max(1, Math.round(shape.width * SCALE * 0.75));
      for (let i = 0; i + 1 < shape.points.length; i++) {
        canvas.segment(
          shape.points[i].x * SCALE,
          shape.points[i].y * SCALE,
          shape.points[i + 1].x * SCALE,
          shape.points[i + 1].y * SCALE,
          rgb,
          1,
          thickness,
        );
      }
      break;
    }
    case "polygon":
      canvas.fillPolygon(
        shape.points.map((p) => ({ x: p.x * SCALE, y: p.y * SCALE })),
        parseColor(shape.fill),
        shape.opacity,
      );
      break;
    case "circle":
      canvas.fillCircle(
        shape.x * SCALE,
        shape.y * SCALE,
        shape.r * SCALE,
        parseColor(shape.fill),
        shape.opacity,
      );
      break;
    case "text": {
      const pixel = Math.max(1, Math.round((shape.size * SCALE) / 8));
      const width = textWidth(shape.text, pixel);
      let x = shape.x * SCALE;
      if (shape.anchor === "middle") x -= width / 2;
      if (shape.anchor === "end") x -= width;
      canvas.text(x, shape.y * SCALE, shape.text, pixel, parseColor(shape.color));
      break;
    }
  }
}

export function renderPng(figure: Figure): Buffer {
  const canvas = new Canvas(figure.width * SCALE, figure.height * SCALE);
  for (const shape of figure.shapes) drawShape(canvas, shape);
  return PNG.sync.write(canvas.png);
}

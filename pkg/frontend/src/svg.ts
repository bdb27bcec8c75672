import { Figure, Shape } from "./figure.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// fixed precision keeps output byte-stable across runs
function px(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

function pointList(points: { x: number; y: number }[]): string {
  return points.map((p) => `${px(p.x)},${px(p.y)}`).join(" ");
}

function shapeToSvg(shape: Shape): string {
  switch (shape.kind) {
    case "line": {
      const dash = shape.dash ? ` stroke-dasharray="${shape.dash.join(" ")}"` : "";
      return (
        `<polyline points="${pointList(shape.points)}" fill="none" ` +
        `stroke="${shape.color}" stroke-width="${px(shape.width)}"` +
        `${dash} stroke-linejoin="round" stroke-linecap="round"/>`
      );
    }
    case "polygon":
      return (
        `<polygon points="${pointList(shape.points)}" fill="${shape.fill}" ` +
        `fill-opacity="${shape.opacity}" stroke="none"/>`
      );
    case "circle":
      return (
        `<circle cx="${px(shape.x)}" cy="${px(shape.y)}" r="${px(shape.r)}" ` +
        `fill="${shape.fill}" fill-opacity="${shape.opacity}"/>`
      );
    case "text":
      return (
        `<text x="${px(shape.x)}" y="${px(shape.y)}" font-size="${shape.size}" ` +
        `font-family="Helvetica, Arial, sans-serif" fill="${shape.color}" ` +
        `text-anchor="${shape.anchor}">${esc(shape.text)}</text>`
      );
  }
}

export function renderSvg(figure: Figure): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${figure.width}" ` +
      `height="${figure.height}" viewBox="0 0 ${figure.width} ${figure.height}">`,
    `<rect width="${figure.width}" height="${figure.height}" fill="#ffffff"/>`,
  ];
  for (const shape of figure.shapes) lines.push(shapeToSvg(shape));
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}

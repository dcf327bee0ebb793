/** Shared 8-axis star glyph used by the cluster view and the entity browser. */

import { MEASURE_KEYS, colorOf } from "./colors.js";

/** Polygon vertices for 8 normalized axis values, radius r, center (cx, cy).
 * A zero value still gets a small visible stub (10% of r). */
export function starPoints(axes: number[], cx: number, cy: number,
                           r: number): Array<[number, number]> {
  return axes.map((value, i) => {
    const angle = (Math.PI * 2 * i) / axes.length - Math.PI / 2;
    const radius = r * (0.1 + 0.9 * Math.max(0, Math.min(1, value)));
    return [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)];
  });
}

function fmt(x: number): string {
  return x.toFixed(2);
}

/** SVG fragment: colored axis spokes plus the filled star polygon. */
export function starGlyphSvg(axes: number[], cx: number, cy: number, r: number,
                             withSpokes = true): string {
  const points = starPoints(axes, cx, cy, r);
  const parts: string[] = [];
  if (withSpokes) {
    for (let i = 0; i < axes.length; i++) {
      const angle = (Math.PI * 2 * i) / axes.length - Math.PI / 2;
      const x = cx + r * Math.cos(angle);
      const y = cy + r * Math.sin(angle);
      parts.push(
        `<line x1="${fmt(cx)}" y1="${fmt(cy)}" x2="${fmt(x)}" y2="${fmt(y)}" ` +
        `stroke="${colorOf(MEASURE_KEYS[i])}" stroke-width="1.4" opacity="0.85"/>`);
    }
  }
  const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  parts.push(
    `<polygon points="${path}" fill="#49565f" fill-opacity="0.45" ` +
    `stroke="#2c3338" stroke-width="1"/>`);
  return parts.join("");
}

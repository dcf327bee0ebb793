/** Shared SVG bar rendering for the filter view's histograms. */

import { HistogramJson } from "../api.js";
import { fmtCount, fmtEdge } from "../format.js";

export interface HistGeometry {
  width: number;
  height: number;
  padLeft: number;
  padBottom: number;
}

export const PANEL_GEOM: HistGeometry = { width: 230, height: 74, padLeft: 4, padBottom: 14 };
export const TIME_GEOM: HistGeometry = { width: 960, height: 120, padLeft: 8, padBottom: 16 };

function xScale(hist: HistogramJson, geom: HistGeometry): (v: number) => number {
  const inner = geom.width - 2 * geom.padLeft;
  const lo = hist.edges[0];
  const hi = hist.edges[hist.edges.length - 1];
  if (hist.scale === "log10" && lo > 0 && hi > lo) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return (v) => geom.padLeft + ((Math.log10(Math.max(v, lo)) - llo) / (lhi - llo)) * inner;
  }
  const span = hi > lo ? hi - lo : 1;
  return (v) => geom.padLeft + ((v - lo) / span) * inner;
}

/** Inverse of the x scale, for converting pointer pixels back to values. */
export function pixelToValue(hist: HistogramJson, geom: HistGeometry, px: number): number {
  const inner = geom.width - 2 * geom.padLeft;
  const t = Math.max(0, Math.min(1, (px - geom.padLeft) / inner));
  const lo = hist.edges[0];
  const hi = hist.edges[hist.edges.length - 1];
  if (hist.scale === "log10" && lo > 0 && hi > lo) {
    return Math.pow(10, Math.log10(lo) + t * (Math.log10(hi) - Math.log10(lo)));
  }
  return lo + t * (hi - lo);
}

export function histogramBarsSvg(hist: HistogramJson, geom: HistGeometry,
                                 color: string,
                                 brush: [number, number] | null): string {
  const x = xScale(hist, geom);
  const plotH = geom.height - geom.padBottom;
  const maxCount = Math.max(1, ...hist.counts);
  const parts: string[] = [];
  for (let i = 0; i < hist.counts.length; i++) {
    const x0 = x(hist.edges[i]);
    const x1 = x(hist.edges[i + 1]);
    const h = (hist.counts[i] / maxCount) * (plotH - 4);
    parts.push(
      `<rect x="${x0.toFixed(1)}" y="${(plotH - h).toFixed(1)}" ` +
      `width="${Math.max(x1 - x0 - 0.5, 0.5).toFixed(1)}" height="${h.toFixed(1)}" ` +
      `fill="${color}"><title>${fmtEdge(hist.key, hist.edges[i])} – ` +
      `${fmtEdge(hist.key, hist.edges[i + 1])}: ${hist.counts[i]}</title></rect>`);
  }
  if (brush) {
    const bx0 = x(brush[0]);
    const bx1 = x(brush[1]);
    parts.push(
      `<rect class="brush" x="${bx0.toFixed(1)}" y="0" ` +
      `width="${Math.max(bx1 - bx0, 1).toFixed(1)}" height="${plotH}"/>`);
  }
  const first = fmtEdge(hist.key, hist.edges[0]);
  const last = fmtEdge(hist.key, hist.edges[hist.edges.length - 1]);
  parts.push(
    `<text x="${geom.padLeft}" y="${geom.height - 3}" class="tick">${first}</text>`,
    `<text x="${geom.width - geom.padLeft}" y="${geom.height - 3}" ` +
    `class="tick" text-anchor="end">${last}</text>`,
    `<text x="${geom.width / 2}" y="10" class="tick" text-anchor="middle">` +
    `max ${fmtCount(maxCount)}</text>`);
  return parts.join("");
}

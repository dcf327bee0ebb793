/** Filter view: transaction-volume overview plus one brushable histogram per
 * activity measure, each with a variant toggle and a filter-commit button. */

import { State } from "../store.js";
import { colorOf, variantsOf } from "../colors.js";
import { escapeHtml, fmtCount, fmtDate } from "../format.js";
import {
  PANEL_GEOM,
  TIME_GEOM,
  histogramBarsSvg,
} from "./histogram_svg.js";

function volumeSvg(state: State): string {
  const volume = state.volume;
  if (!volume || volume.buckets.length === 0) {
    return `<svg width="${TIME_GEOM.width}" height="${TIME_GEOM.height}"></svg>`;
  }
  const starts = volume.buckets.map((b) => b.start);
  const bucketSpan = volume.bucket === "day" ? 86400 : 31 * 86400;
  const lo = starts[0];
  const hi = starts[starts.length - 1] + bucketSpan;
  const geom = TIME_GEOM;
  const inner = geom.width - 2 * geom.padLeft;
  const plotH = geom.height - geom.padBottom;
  const maxCount = Math.max(1, ...volume.buckets.map((b) => b.count));
  const x = (v: number) => geom.padLeft + ((v - lo) / (hi - lo)) * inner;
  const parts: string[] = [];
  for (const bucket of volume.buckets) {
    const x0 = x(bucket.start);
    const x1 = x(Math.min(bucket.start + bucketSpan, hi));
    const h = (bucket.count / maxCount) * (plotH - 4);
    parts.push(
      `<rect x="${x0.toFixed(1)}" y="${(plotH - h).toFixed(1)}" ` +
      `width="${Math.max(x1 - x0 - 0.6, 0.6).toFixed(1)}" height="${h.toFixed(1)}" ` +
      `fill="#49565f"><title>${fmtDate(bucket.start)}: ${bucket.count} txs</title></rect>`);
  }
  if (state.timeBrush) {
    const b0 = x(state.timeBrush[0]);
    const b1 = x(state.timeBrush[1]);
    parts.push(`<rect class="brush" x="${b0.toFixed(1)}" y="0" ` +
               `width="${Math.max(b1 - b0, 1).toFixed(1)}" height="${plotH}"/>`);
  }
  parts.push(
    `<text x="${geom.padLeft}" y="${geom.height - 3}" class="tick">${fmtDate(lo)}</text>`,
    `<text x="${geom.width - geom.padLeft}" y="${geom.height - 3}" class="tick" ` +
    `text-anchor="end">${fmtDate(hi)}</text>`,
    `<text x="${geom.width / 2}" y="10" class="tick" text-anchor="middle">` +
    `${fmtCount(maxCount)} txs/${volume.bucket} max</text>`);
  return `<svg width="${geom.width}" height="${geom.height}" class="time-hist" ` +
         `data-brushable="time" data-lo="${lo}" data-hi="${hi}" ` +
         `data-pad="${geom.padLeft}" data-w="${geom.width}">${parts.join("")}</svg>`;
}

export function renderTimePanel(state: State): string {
  const applyDisabled = state.timeBrush ? "" : "disabled";
  return `
    <div class="panel-title">transactions over time
      <span class="muted">range ${fmtDate(state.range.from)} → ${fmtDate(state.range.to)}</span>
      <span class="spacer"></span>
      <button data-action="apply-time" ${applyDisabled}>set range</button>
      <button data-action="reset-range">whole corpus</button>
    </div>
    ${volumeSvg(state)}`;
}

export function renderFilterView(state: State): string {
  const panels = state.panels.map((panel) => {
    const hist = panel.histogram;
    const variants = variantsOf(panel.key);
    const toggle = variants
      ? `<span class="variants">` + variants.map((v) =>
          `<button class="variant ${v === panel.variant ? "on" : ""}" ` +
          `data-action="variant" data-key="${panel.key}" data-variant="${v}">` +
          `${v}</button>`).join("") + `</span>`
      : "";
    const body = hist
      ? `<svg width="${PANEL_GEOM.width}" height="${PANEL_GEOM.height}" ` +
        `data-brushable="measure" data-key="${panel.key}">` +
        histogramBarsSvg(hist, PANEL_GEOM, colorOf(panel.key), panel.brush) +
        `</svg>`
      : `<div class="empty">loading…</div>`;
    const undef = hist && hist.undefined_count
      ? `<span class="muted">${fmtCount(hist.undefined_count)} undefined</span>` : "";
    const brushText = panel.brush
      ? `<input class="bound" data-key="${panel.key}" data-bound="lo" ` +
        `value="${panel.brush[0]}"/> – ` +
        `<input class="bound" data-key="${panel.key}" data-bound="hi" ` +
        `value="${panel.brush[1]}"/>`
      : `<span class="muted">brush or type a range</span>
         <input class="bound" data-key="${panel.key}" data-bound="lo" placeholder="min"/> –
         <input class="bound" data-key="${panel.key}" data-bound="hi" placeholder="max"/>`;
    return `
      <div class="measure-panel" data-panel="${panel.key}">
        <div class="panel-title">
          <span class="swatch" style="background:${colorOf(panel.key)}"></span>
          ${escapeHtml(panel.key)} ${toggle} ${undef}
        </div>
        ${body}
        <div class="panel-actions">
          ${brushText}
          <button data-action="commit-filter" data-key="${panel.key}"
                  ${panel.brush ? "" : "disabled"}>filter</button>
        </div>
      </div>`;
  });
  return `<div class="filter-view">${panels.join("")}</div>`;
}

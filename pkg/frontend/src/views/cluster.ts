/** Cluster view: feature checkboxes, k, run/cancel, and one 8-axis star
 * glyph per cluster; hovering a glyph reveals the exact value ranges. */

import { ClusterSummaryJson } from "../api.js";
import { ALL_SERIES_IDS, MEASURE_KEYS } from "../colors.js";
import { escapeHtml, fmtBtcFromSat, fmtCount, fmtDate } from "../format.js";
import { starGlyphSvg } from "../glyph.js";
import { State } from "../store.js";

function statLine(key: string, stats: [number, number, number] | null): string {
  if (!stats) return `${key}: –`;
  const f = (v: number) => {
    if (key === "amount_rec" || key === "amount_sent") return fmtBtcFromSat(v);
    if (key === "time_first" || key === "time_last") return fmtDate(v);
    return v >= 100 ? fmtCount(Math.round(v)) : v.toFixed(2);
  };
  return `${key}: ${f(stats[0])} / ${f(stats[1])} / ${f(stats[2])}`;
}

export function glyphTooltip(summary: ClusterSummaryJson): string {
  const lines = MEASURE_KEYS.map((key) =>
    statLine(key, summary.stats[key] ?? null));
  return [`cluster ${summary.cluster_id}: ${summary.count} entities`,
          `min / mean / max`, ...lines].join("\n");
}

const GLYPH_R = 34;

export function renderClusterView(state: State): string {
  const cluster = state.cluster;
  const boxes = ALL_SERIES_IDS.map((sid) => `
    <label class="feature">
      <input type="checkbox" data-action="toggle-feature" data-series="${sid}"
             ${cluster.features.includes(sid) ? "checked" : ""}/>
      ${escapeHtml(sid)}
    </label>`);
  const running = cluster.status === "running";
  const header = `
    <div class="panel-title">cluster view</div>
    <div class="cluster-controls">
      <div class="features">${boxes.join("")}</div>
      <div class="cluster-run">
        k <input id="cluster-k" type="number" min="2" value="${cluster.k}"
                 data-action="cluster-k"/>
        seed <input id="cluster-seed" type="number" value="${cluster.seed}"
                    data-action="cluster-seed"/>
        <button data-action="run-cluster" ${running ? "disabled" : ""}>
          ${running ? "clustering…" : "run"}</button>
        <button data-action="cancel-cluster" ${running ? "" : "disabled"}>cancel</button>
      </div>
    </div>`;
  let body = "";
  if (cluster.status === "error") {
    body = `<div class="error">clustering failed: ${escapeHtml(cluster.error ?? "")}</div>`;
  } else if (running) {
    body = `<div class="muted progress">job ${cluster.jobId ?? ""} running…</div>`;
  } else if (cluster.result) {
    const result = cluster.result;
    const glyphs = result.clusters.map((summary) => {
      const size = GLYPH_R * 2 + 10;
      return `
        <div class="cluster-glyph" data-action="browse-cluster"
             data-cluster="${summary.cluster_id}">
          <svg width="${size}" height="${size}">
            <title>${escapeHtml(glyphTooltip(summary))}</title>
            ${starGlyphSvg(summary.axes, size / 2, size / 2, GLYPH_R)}
          </svg>
          <div class="glyph-caption">
            <b>${fmtCount(summary.count)}</b> entities
            <button data-action="materialize" data-cluster="${summary.cluster_id}">
              to tree</button>
          </div>
        </div>`;
    });
    body = `
      <div class="muted">k=${result.k} seed=${result.seed}
        · ${result.iterations} iterations
        · ${result.excluded_count} excluded (undefined features)</div>
      <div class="cluster-glyphs">${glyphs.join("")}</div>`;
  } else {
    body = `<div class="muted">pick measures and run to group the selected node</div>`;
  }
  return header + body;
}

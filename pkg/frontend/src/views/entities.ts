/** Entity browser: a 20x20 grid of small glyphs (up to 400 per page) with
 * sorting and paging; clicking a glyph magnifies it and loads its timeline. */

import { EntityCardJson } from "../api.js";
import { ALL_SERIES_IDS } from "../colors.js";
import { escapeHtml, fmtCount, fmtMeasure } from "../format.js";
import { starGlyphSvg } from "../glyph.js";
import { State } from "../store.js";

export const GRID_COLS = 20;
const CELL = 26;

export function cardTooltip(card: EntityCardJson): string {
  const lines = [`entity ${card.entity_id}` +
                 (card.label ? ` — ${card.label} (${card.category})` : "")];
  for (const sid of ALL_SERIES_IDS) {
    lines.push(`${sid}: ${fmtMeasure(sid, card.measures[sid] ?? null)}`);
  }
  return lines.join("\n");
}

export function renderEntityBrowser(state: State): string {
  const browser = state.browser;
  const data = browser.data;
  const options = ALL_SERIES_IDS.map((sid) =>
    `<option value="${sid}" ${sid === browser.sort ? "selected" : ""}>${sid}</option>`);
  const header = `
    <div class="panel-title">entity browser
      <span class="muted">
        ${data ? `${fmtCount(data.total)} entities` : ""}
        ${browser.cluster !== null ? ` · cluster ${browser.cluster}` : ""}
      </span>
      <span class="spacer"></span>
      sort <select data-action="sort-key">${options.join("")}</select>
      <button data-action="sort-order">${browser.order === "desc" ? "▼ desc" : "▲ asc"}</button>
      <button data-action="page-prev" ${browser.page > 0 ? "" : "disabled"}>‹</button>
      page ${browser.page}
      <button data-action="page-next"
              ${data && (browser.page + 1) * data.page_size < data.total ? "" : "disabled"}>›</button>
      ${browser.cluster !== null
        ? `<button data-action="browse-node">whole node</button>` : ""}
    </div>`;
  if (!data) return header + `<div class="empty">loading…</div>`;
  if (data.entities.length === 0) {
    return header + `<div class="empty">no entities on this page</div>`;
  }
  const rows = Math.ceil(data.entities.length / GRID_COLS);
  const cells = data.entities.map((card, i) => {
    const col = i % GRID_COLS;
    const row = Math.floor(i / GRID_COLS);
    const cx = col * CELL + CELL / 2;
    const cy = row * CELL + CELL / 2;
    const selected = card.entity_id === state.selectedEntity;
    return `
      <g class="entity-cell ${selected ? "selected" : ""}"
         data-action="select-entity" data-entity="${card.entity_id}">
        <rect x="${col * CELL}" y="${row * CELL}" width="${CELL}" height="${CELL}"
              class="cell-bg"><title>${escapeHtml(cardTooltip(card))}</title></rect>
        ${starGlyphSvg(card.glyph, cx, cy, CELL / 2 - 3, false)}
        ${card.label ? `<circle cx="${col * CELL + 4}" cy="${row * CELL + 4}" r="2.4"
              class="tag-dot"/>` : ""}
      </g>`;
  });
  const selectedCard = data.entities.find((c) => c.entity_id === state.selectedEntity);
  const magnified = selectedCard ? `
    <div class="magnified">
      <svg width="120" height="120">
        <title>${escapeHtml(cardTooltip(selectedCard))}</title>
        ${starGlyphSvg(selectedCard.glyph, 60, 60, 52)}
      </svg>
      <div>
        <b>entity ${selectedCard.entity_id}</b>
        ${selectedCard.label
          ? `<div class="tag">${escapeHtml(selectedCard.label)}
             (${escapeHtml(selectedCard.category ?? "")})</div>` : ""}
        <pre class="measures">${escapeHtml(cardTooltip(selectedCard)
          .split("\n").slice(1).join("\n"))}</pre>
      </div>
    </div>` : "";
  return header + `
    <div class="browser-body">
      <svg width="${GRID_COLS * CELL}" height="${rows * CELL}" class="entity-grid">
        ${cells.join("")}
      </svg>
      ${magnified}
    </div>`;
}

/** Transaction view: one entity's transactions on a timeline; circle AREA is
 * proportional to the amount (log-area fallback when max/min > 1e4). */

import { TxPointJson } from "../api.js";
import { escapeHtml, fmtBtcFromSat, fmtDateTime } from "../format.js";
import { State } from "../store.js";

const WIDTH = 960;
const HEIGHT = 110;
const R_MAX = 16;
const R_MIN = 1.6;
const LOG_FALLBACK_RATIO = 1e4;

export interface TimelinePoint {
  x: number;
  r: number;
  tx: TxPointJson;
}

/** Pure layout: x from time over the active range, radius from amount. */
export function timelineLayout(txs: TxPointJson[], rangeFrom: number,
                               rangeTo: number): TimelinePoint[] {
  if (txs.length === 0) return [];
  const amounts = txs.map((t) => t.amount.sat);
  const maxAmount = Math.max(...amounts);
  const minAmount = Math.min(...amounts);
  const useLog = minAmount > 0 && maxAmount / minAmount > LOG_FALLBACK_RATIO;
  const span = Math.max(1, rangeTo - rangeFrom);
  return txs.map((tx) => {
    let areaNorm: number;
    if (maxAmount <= 0) {
      areaNorm = 0;
    } else if (useLog) {
      areaNorm = Math.log10(1 + tx.amount.sat) / Math.log10(1 + maxAmount);
    } else {
      areaNorm = tx.amount.sat / maxAmount;
    }
    return {
      x: 10 + ((tx.time - rangeFrom) / span) * (WIDTH - 20),
      r: Math.max(R_MIN, R_MAX * Math.sqrt(areaNorm)),
      tx,
    };
  });
}

export function renderTransactionView(state: State): string {
  const role = state.txRole;
  const toggle = `
    <span class="variants">
      <button class="variant ${role === "sender" ? "on" : ""}"
              data-action="tx-role" data-role="sender">sender</button>
      <button class="variant ${role === "receiver" ? "on" : ""}"
              data-action="tx-role" data-role="receiver">receiver</button>
    </span>`;
  const title = state.selectedEntity === null
    ? `<span class="muted">click an entity glyph to load its transactions</span>`
    : `<span class="muted">entity ${state.selectedEntity} as ${role}</span>`;
  const header = `<div class="panel-title">transaction view ${toggle} ${title}</div>`;
  if (state.selectedEntity === null || state.txs === null) {
    return header + `<svg width="${WIDTH}" height="${HEIGHT}" class="tx-view"></svg>`;
  }
  const points = timelineLayout(state.txs, state.range.from, state.range.to);
  const circles = points.map((p) => `
    <circle cx="${p.x.toFixed(1)}" cy="${HEIGHT / 2}" r="${p.r.toFixed(1)}"
            class="tx-dot">
      <title>${fmtDateTime(p.tx.time)}
${fmtBtcFromSat(p.tx.amount.sat)}
${escapeHtml(p.tx.txid)}</title>
    </circle>`);
  const axis = `<line x1="0" y1="${HEIGHT / 2}" x2="${WIDTH}" y2="${HEIGHT / 2}"
                      class="axis"/>`;
  const empty = points.length === 0
    ? `<text x="${WIDTH / 2}" y="${HEIGHT / 2 - 12}" class="tick"
             text-anchor="middle">no ${role} transactions in range</text>` : "";
  return header +
    `<svg width="${WIDTH}" height="${HEIGHT}" class="tx-view">${axis}${circles.join("")}${empty}</svg>`;
}

/** Tree view: the classification hierarchy as an icicle with equal-width
 * nodes; a small bar glyph inside each node shows its relative entity count.
 */

import { TreeJson, TreeNodeJson } from "../api.js";
import { State } from "../store.js";
import { escapeHtml, fmtCount } from "../format.js";

export interface IcicleCell {
  nodeId: number;
  depth: number;
  x: number;          // [0, 1) offset
  width: number;      // fraction of the root width
  label: string;
  count: number;
  kind: string;
  selected: boolean;
}

/** Equal-width layout: each split halves its parent's width. */
export function icicleLayout(tree: TreeJson): IcicleCell[] {
  const byId = new Map<number, TreeNodeJson>(tree.nodes.map((n) => [n.node_id, n]));
  const cells: IcicleCell[] = [];
  const walk = (id: number, depth: number, x: number, width: number) => {
    const node = byId.get(id)!;
    cells.push({
      nodeId: id, depth, x, width,
      label: node.label, count: node.count, kind: node.kind,
      selected: id === tree.selected,
    });
    if (node.children.length === 2) {
      walk(node.children[0], depth + 1, x, width / 2);
      walk(node.children[1], depth + 1, x + width / 2, width / 2);
    }
  };
  walk(0, 0, 0, 1);
  return cells;
}

const CELL_H = 34;
const WIDTH = 560;

export function renderTreeView(state: State): string {
  const cells = icicleLayout(state.tree);
  const rootCount = Math.max(1, cells[0].count);
  const depth = Math.max(...cells.map((c) => c.depth));
  const height = (depth + 1) * CELL_H + 2;
  const rects = cells.map((cell) => {
    const x = cell.x * WIDTH;
    const w = cell.width * WIDTH;
    const y = cell.depth * CELL_H;
    const barW = Math.max(1, (cell.count / rootCount) * (w - 10));
    const cls = `icicle ${cell.kind}${cell.selected ? " selected" : ""}`;
    const title = `${escapeHtml(cell.label)}: ${cell.count} entities ` +
      `(${((cell.count / rootCount) * 100).toFixed(1)}% of root)`;
    const shortLabel = cell.label.length > Math.floor(w / 7)
      ? cell.label.slice(0, Math.max(1, Math.floor(w / 7) - 1)) + "…"
      : cell.label;
    return `
      <g class="${cls}" data-action="select-node" data-node="${cell.nodeId}">
        <rect x="${(x + 1).toFixed(1)}" y="${y + 1}" width="${(w - 2).toFixed(1)}"
              height="${CELL_H - 4}" rx="3"><title>${title}</title></rect>
        <text x="${(x + 6).toFixed(1)}" y="${y + 14}" class="label">
          ${escapeHtml(shortLabel)}</text>
        <rect class="count-glyph" x="${(x + 5).toFixed(1)}" y="${y + 20}"
              width="${barW.toFixed(1)}" height="5"/>
        <text x="${(x + 6).toFixed(1)}" y="${y + CELL_H - 7}" class="count">
          ${fmtCount(cell.count)}</text>
      </g>`;
  });
  const selected = state.tree.nodes.find((n) => n.node_id === state.selectedNode)!;
  const canDelete = selected.kind !== "root";
  return `
    <div class="panel-title">classification tree
      <span class="muted">selected: ${escapeHtml(selected.label)}</span>
      <span class="spacer"></span>
      <button data-action="relabel-node" data-node="${selected.node_id}">relabel</button>
      <button data-action="delete-node" data-node="${selected.node_id}"
              ${canDelete ? "" : "disabled"}>delete row</button>
      <button data-action="export-doc">export</button>
      <button data-action="import-doc">import</button>
    </div>
    <svg width="${WIDTH}" height="${height}" class="tree-view">${rects.join("")}</svg>`;
}

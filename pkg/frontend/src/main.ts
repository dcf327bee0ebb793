/** Bootstrap and DOM wiring. Views re-render only from store state, which in
 * turn changes only after server confirmation. */

import { HttpApi } from "./api.js";
import { MeasureKey } from "./colors.js";
import { Store } from "./store.js";
import { renderClusterView } from "./views/cluster.js";
import { renderEntityBrowser } from "./views/entities.js";
import { renderFilterView, renderTimePanel } from "./views/filter.js";
import { PANEL_GEOM, pixelToValue } from "./views/histogram_svg.js";
import { renderTreeView } from "./views/tree.js";
import { renderTransactionView } from "./views/txs.js";

const store = new Store(new HttpApi());

function el(id: string): HTMLElement {
  return document.getElementById(id)!;
}

function render(): void {
  const state = store.state;
  el("time-panel").innerHTML = renderTimePanel(state);
  el("filter-view").innerHTML = renderFilterView(state);
  el("tree-view").innerHTML = renderTreeView(state);
  el("cluster-view").innerHTML = renderClusterView(state);
  el("entity-browser").innerHTML = renderEntityBrowser(state);
  el("tx-view").innerHTML = renderTransactionView(state);
  el("status").textContent = state.error
    ? `error: ${state.error}`
    : state.busy ? "working…" : `session ${state.sessionId.slice(0, 8)}`;
  el("status").className = state.error ? "error" : "muted";
}

// ---- click actions (event delegation) --------------------------------------

const actions: Record<string, (target: HTMLElement) => void> = {
  "variant": (t) => void store.setVariant(
    t.dataset.key as MeasureKey, t.dataset.variant as any),
  "commit-filter": (t) => {
    const key = t.dataset.key as MeasureKey;
    const label = window.prompt("label for the matching set", `${key} filter`);
    if (label !== null) void store.commitFilter(key, label || undefined);
  },
  "apply-time": () => void store.commitTimeRange(),
  "reset-range": () => void store.resetRange(),
  "select-node": (t) => void store.selectNode(Number(t.dataset.node)),
  "relabel-node": (t) => {
    const label = window.prompt("new label");
    if (label) void store.relabel(Number(t.dataset.node), label);
  },
  "delete-node": (t) => void store.deleteRow(Number(t.dataset.node)),
  "export-doc": () => {
    void store.exportDocument().then((doc) => {
      const blob = new Blob([JSON.stringify(doc, null, 2)],
                            { type: "application/json" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "classification-tree.json";
      a.click();
      URL.revokeObjectURL(a.href);
    });
  },
  "import-doc": () => {
    const input = document.createElement("input");
    input.type = "file";
    input.accept = "application/json";
    input.onchange = () => {
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then((text) => store.importDocument(JSON.parse(text)));
    };
    input.click();
  },
  "toggle-feature": (t) => store.toggleFeature(t.dataset.series!),
  "run-cluster": () => void store.runCluster(),
  "cancel-cluster": () => void store.cancelCluster(),
  "materialize": (t) => {
    const label = window.prompt("label for the new class", "cluster");
    if (label) void store.materializeCluster(Number(t.dataset.cluster), label);
  },
  "browse-cluster": (t) => void store.browseCluster(Number(t.dataset.cluster)),
  "browse-node": () => void store.browseCluster(null),
  "sort-order": () => void store.setSort(
    store.state.browser.sort,
    store.state.browser.order === "desc" ? "asc" : "desc"),
  "page-prev": () => void store.setPage(store.state.browser.page - 1),
  "page-next": () => void store.setPage(store.state.browser.page + 1),
  "select-entity": (t) => void store.selectEntity(Number(t.dataset.entity)),
  "tx-role": (t) => void store.setTxRole(t.dataset.role as "sender" | "receiver"),
};

document.addEventListener("click", (event) => {
  let target = event.target as HTMLElement | null;
  while (target && target !== document.body) {
    const action = target.dataset?.action;
    if (action && actions[action]) {
      if (action === "toggle-feature" || target.tagName !== "INPUT") {
        actions[action](target);
      }
      return;
    }
    target = target.parentElement;
  }
});

document.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.dataset?.action === "sort-key") {
    void store.setSort((target as HTMLSelectElement).value, store.state.browser.order);
  } else if (target.dataset?.action === "cluster-k") {
    store.setClusterK(Number((target as HTMLInputElement).value));
  } else if (target.dataset?.action === "cluster-seed") {
    store.setClusterSeed(Number((target as HTMLInputElement).value));
  } else if (target.classList?.contains("bound")) {
    const key = target.dataset.key as MeasureKey;
    const panel = store.state.panels.find((p) => p.key === key)!;
    const root = target.closest(".panel-actions")!;
    const lo = (root.querySelector('[data-bound="lo"]') as HTMLInputElement).value;
    const hi = (root.querySelector('[data-bound="hi"]') as HTMLInputElement).value;
    const brush: [number, number] = [
      lo === "" ? (panel.histogram?.edges[0] ?? 0) : Number(lo),
      hi === "" ? (panel.histogram?.edges.at(-1) ?? 0) : Number(hi),
    ];
    store.brushPanel(key, brush);
  }
});

// ---- histogram brushing ------------------------------------------------------

let dragging: { kind: "time" | "measure"; key?: string; svg: SVGSVGElement;
                startPx: number } | null = null;

function svgX(svg: SVGSVGElement, event: PointerEvent): number {
  return event.clientX - svg.getBoundingClientRect().left;
}

document.addEventListener("pointerdown", (event) => {
  const svg = (event.target as Element).closest("svg[data-brushable]");
  if (!svg) return;
  const kind = svg.getAttribute("data-brushable") as "time" | "measure";
  dragging = {
    kind,
    key: svg.getAttribute("data-key") ?? undefined,
    svg: svg as SVGSVGElement,
    startPx: svgX(svg as SVGSVGElement, event),
  };
});

function applyDrag(event: PointerEvent): void {
  if (!dragging) return;
  const { kind, key, svg, startPx } = dragging;
  const endPx = svgX(svg, event);
  const [a, b] = startPx <= endPx ? [startPx, endPx] : [endPx, startPx];
  if (Math.abs(endPx - startPx) < 3) return;
  if (kind === "time") {
    const lo = Number(svg.getAttribute("data-lo"));
    const hi = Number(svg.getAttribute("data-hi"));
    const pad = Number(svg.getAttribute("data-pad"));
    const width = Number(svg.getAttribute("data-w"));
    const toValue = (px: number) =>
      lo + Math.max(0, Math.min(1, (px - pad) / (width - 2 * pad))) * (hi - lo);
    store.brushTime([toValue(a), toValue(b)]);
  } else if (key) {
    const panel = store.state.panels.find((p) => p.key === key);
    if (panel?.histogram) {
      store.brushPanel(key as MeasureKey, [
        pixelToValue(panel.histogram, PANEL_GEOM, a),
        pixelToValue(panel.histogram, PANEL_GEOM, b),
      ]);
    }
  }
}

document.addEventListener("pointermove", (event) => {
  if (dragging) applyDrag(event);
});

document.addEventListener("pointerup", (event) => {
  if (dragging) {
    applyDrag(event);
    dragging = null;
  }
});

// ---- go ---------------------------------------------------------------------

store.subscribe(render);
store.init().catch((err) => {
  el("status").textContent = `failed to start: ${err}`;
  el("status").className = "error";
});

/** View-model and rendering tests: icicle layout, glyph geometry, timeline
 * area rules, and measure-color constancy across all five views. */

import { describe, expect, it } from "vitest";

import { TreeJson, TxPointJson } from "../src/api.js";
import { ALL_SERIES_IDS, MEASURE_COLORS, MEASURE_KEYS } from "../src/colors.js";
import { starGlyphSvg, starPoints } from "../src/glyph.js";
import { Store } from "../src/store.js";
import { renderClusterView } from "../src/views/cluster.js";
import { cardTooltip, renderEntityBrowser } from "../src/views/entities.js";
import { renderFilterView } from "../src/views/filter.js";
import { icicleLayout, renderTreeView } from "../src/views/tree.js";
import { renderTransactionView, timelineLayout } from "../src/views/txs.js";
import { FakeApi } from "./fake_api.js";

function sampleTree(): TreeJson {
  return {
    session_id: "s", corpus_id: "c", range: { from: 0, to: 100 }, selected: 1,
    nodes: [
      { node_id: 0, parent: null, kind: "root", label: "all", count: 100,
        children: [1, 2], predicate: null, cluster: null },
      { node_id: 1, parent: 0, kind: "match", label: "one-timers", count: 85,
        children: [], predicate: { key: "num_txs", variant: "receiver", lo: 1, hi: 1 },
        cluster: null },
      { node_id: 2, parent: 0, kind: "remainder", label: "multi-timers", count: 15,
        children: [3, 4], predicate: null, cluster: null },
      { node_id: 3, parent: 2, kind: "match", label: "big", count: 5,
        children: [], predicate: { key: "amount_rec", variant: "largest", lo: 0, hi: 1 },
        cluster: null },
      { node_id: 4, parent: 2, kind: "remainder", label: "small", count: 10,
        children: [], predicate: null, cluster: null },
    ],
  };
}

describe("icicle layout", () => {
  it("halves widths per split and keeps rows aligned", () => {
    const cells = icicleLayout(sampleTree());
    const byId = new Map(cells.map((c) => [c.nodeId, c]));
    expect(byId.get(0)).toMatchObject({ depth: 0, x: 0, width: 1 });
    expect(byId.get(1)).toMatchObject({ depth: 1, x: 0, width: 0.5 });
    expect(byId.get(2)).toMatchObject({ depth: 1, x: 0.5, width: 0.5 });
    expect(byId.get(3)).toMatchObject({ depth: 2, x: 0.5, width: 0.25 });
    expect(byId.get(4)).toMatchObject({ depth: 2, x: 0.75, width: 0.25 });
    expect(byId.get(1)!.selected).toBe(true);
  });
});

describe("star glyph", () => {
  it("clamps axis values into a visible radius band", () => {
    const points = starPoints([0, 0.5, 1, 2, -1, 0.3, 0.7, 0.1], 50, 50, 40);
    expect(points.length).toBe(8);
    for (const [x, y] of points) {
      const r = Math.hypot(x - 50, y - 50);
      expect(r).toBeGreaterThanOrEqual(40 * 0.1 - 1e-9);
      expect(r).toBeLessThanOrEqual(40 + 1e-9);
    }
  });

  it("draws one spoke per measure in its fixed color", () => {
    const svg = starGlyphSvg([0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5], 40, 40, 30);
    for (const key of MEASURE_KEYS) {
      expect(svg).toContain(`stroke="${MEASURE_COLORS[key]}"`);
    }
  });
});

describe("timeline layout", () => {
  const mk = (sat: number, time: number): TxPointJson =>
    ({ time, amount: { sat, btc: "0" }, txid: `t${time}` });

  it("scales circle area linearly with amount", () => {
    const points = timelineLayout([mk(100, 10), mk(400, 20)], 0, 100);
    const [small, large] = points.map((p) => p.r);
    // area ratio 4 -> radius ratio 2
    expect(large / small).toBeCloseTo(2, 5);
  });

  it("falls back to log area when max/min exceeds 1e4", () => {
    const points = timelineLayout([mk(1, 10), mk(10 ** 8, 20)], 0, 100);
    const [small, large] = points.map((p) => p.r);
    expect(large / small).toBeLessThan(100);   // not the linear sqrt(1e8)=1e4 ratio
    expect(large).toBeGreaterThan(small);
  });

  it("positions x within the active range", () => {
    const points = timelineLayout([mk(5, 0), mk(5, 100)], 0, 100);
    expect(points[0].x).toBeLessThan(points[1].x);
  });
});

describe("entity card tooltip", () => {
  it("lists every measure series", () => {
    const measures = Object.fromEntries(ALL_SERIES_IDS.map((sid) => [sid, null]));
    const tooltip = cardTooltip({
      entity_id: 7, label: "MtGox", category: "exchange",
      measures, glyph: new Array(8).fill(0.5),
    });
    expect(tooltip).toContain("entity 7 — MtGox (exchange)");
    for (const sid of ALL_SERIES_IDS) expect(tooltip).toContain(sid);
  });
});

describe("measure-color constancy", () => {
  it("palette pins 8 measures in 4 hue pairs", () => {
    expect(Object.keys(MEASURE_COLORS).sort()).toEqual([...MEASURE_KEYS].sort());
    expect(new Set(Object.values(MEASURE_COLORS)).size).toBe(8);
    expect(MEASURE_COLORS).toMatchSnapshot();
  });

  it("every view renders measure marks only in palette colors", async () => {
    const api = new FakeApi();
    const store = new Store(api, async () => {});
    await store.init();
    store.state.cluster.k = 2;
    await store.runCluster(0);
    await store.selectEntity(store.state.browser.data!.entities[0].entity_id);

    const palette = new Set(Object.values(MEASURE_COLORS));
    const views: Array<[string, string, RegExp]> = [
      ["filter", renderFilterView(store.state), /background:(#[0-9a-f]{6})/g],
      ["filter-bars", renderFilterView(store.state), /fill="(#[0-9a-f]{6})"><title/g],
      ["cluster", renderClusterView(store.state), /stroke="(#[0-9a-f]{6})" stroke-width="1.4"/g],
      ["browser", renderEntityBrowser(store.state), /stroke="(#[0-9a-f]{6})" stroke-width="1.4"/g],
    ];
    for (const [name, html, pattern] of views) {
      const seen = [...html.matchAll(pattern)].map((m) => m[1]);
      expect(seen.length, `${name} should carry measure colors`).toBeGreaterThan(0);
      for (const color of seen) {
        expect(palette.has(color), `${name} uses off-palette ${color}`).toBe(true);
      }
    }
    // filter panels show each measure in exactly its own color, in order
    const filterHtml = renderFilterView(store.state);
    const swatches = [...filterHtml.matchAll(/background:(#[0-9a-f]{6})/g)].map((m) => m[1]);
    expect(swatches).toEqual(MEASURE_KEYS.map((k) => MEASURE_COLORS[k]));
    // tree and timeline views render; snapshot the structural SVG of the tree
    expect(renderTreeView(store.state)).toContain("classification tree");
    expect(renderTransactionView(store.state)).toContain("<circle");
  });
});

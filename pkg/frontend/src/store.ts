/** Central state: one (session, selected node, range) triple drives all five
 * views. Every action awaits server confirmation and then refreshes the
 * affected view payloads — nothing is computed or guessed locally, and views
 * re-render only from the payloads stored here.
 */

import {
  ApiClient,
  ClusterResultJson,
  EntitiesPageJson,
  HistogramJson,
  PredicateJson,
  Range,
  TreeJson,
  TreeNodeJson,
  TxPointJson,
  Variant,
  VolumeJson,
} from "./api.js";
import { MEASURE_KEYS, MeasureKey, variantsOf } from "./colors.js";

export interface PanelState {
  key: MeasureKey;
  variant: Variant;
  histogram: HistogramJson | null;
  /** value-space brush [lo, hi], inclusive; null = no brush */
  brush: [number, number] | null;
}

export interface ClusterPanelState {
  features: string[];
  k: number;
  seed: number;
  jobId: string | null;
  status: "idle" | "running" | "done" | "error" | "cancelled";
  error: string | null;
  result: ClusterResultJson | null;
}

export interface BrowserState {
  cluster: number | null;      // browsing a cluster of the selected node
  sort: string;
  order: "asc" | "desc";
  page: number;
  data: EntitiesPageJson | null;
}

export interface State {
  sessionId: string;
  corpusId: string;
  range: Range;
  corpusSpan: Range;
  tree: TreeJson;
  selectedNode: number;
  volume: VolumeJson | null;
  timeBrush: [number, number] | null;
  panels: PanelState[];
  cluster: ClusterPanelState;
  browser: BrowserState;
  selectedEntity: number | null;
  txRole: "sender" | "receiver";
  txs: TxPointJson[] | null;
  busy: boolean;
  error: string | null;
}

const DEFAULT_VARIANT: Record<string, Variant> = {
  num_txs: "receiver",
  amount_rec: "largest",
  amount_sent: "largest",
  num_inputs: "smallest",
  num_outputs: "smallest",
};

function freshPanels(): PanelState[] {
  return MEASURE_KEYS.map((key) => ({
    key,
    variant: DEFAULT_VARIANT[key] ?? null,
    histogram: null,
    brush: null,
  }));
}

export class Store {
  state!: State;
  private listeners: Array<(s: State) => void> = [];

  constructor(private api: ApiClient,
              private sleep: (ms: number) => Promise<void> =
                (ms) => new Promise((r) => setTimeout(r, ms))) {}

  subscribe(listener: (s: State) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  node(id: number): TreeNodeJson {
    const node = this.state.tree.nodes.find((n) => n.node_id === id);
    if (!node) throw new Error(`node ${id} not in tree`);
    return node;
  }

  get selectedNode(): TreeNodeJson {
    return this.node(this.state.selectedNode);
  }

  /** Create the session over the whole corpus span and load every view. */
  async init(): Promise<void> {
    const info = await this.api.corpusInfo();
    const span = info.time_span ?? { from: 0, to: 86400 };
    const tree = await this.api.createSession(span);
    this.state = {
      sessionId: tree.session_id,
      corpusId: tree.corpus_id,
      range: tree.range,
      corpusSpan: span,
      tree,
      selectedNode: tree.selected,
      volume: null,
      timeBrush: null,
      panels: freshPanels(),
      cluster: { features: ["num_txs_receiver", "amount_rec_largest"], k: 3,
                 seed: 1, jobId: null, status: "idle", error: null, result: null },
      browser: { cluster: null, sort: "num_txs_receiver", order: "desc",
                 page: 0, data: null },
      selectedEntity: null,
      txRole: "receiver",
      txs: null,
      busy: false,
      error: null,
    };
    await this.refreshAll();
  }

  private async run<T>(work: () => Promise<T>): Promise<T | undefined> {
    this.state.busy = true;
    this.state.error = null;
    this.emit();
    try {
      return await work();
    } catch (err) {
      this.state.error = err instanceof Error ? err.message : String(err);
      return undefined;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Re-fetch every payload for the current (session, node, range) triple. */
  private async refreshAll(): Promise<void> {
    const { sessionId, selectedNode } = this.state;
    this.state.volume = await this.api.volume(
      sessionId, selectedNode, this.rangeDays() <= 92 ? "day" : "month");
    for (const panel of this.state.panels) {
      panel.histogram = await this.api.histogram(
        sessionId, selectedNode, panel.key, panel.variant);
    }
    await this.refreshBrowser();
    this.emit();
  }

  private rangeDays(): number {
    return (this.state.range.to - this.state.range.from) / 86400;
  }

  private async refreshBrowser(): Promise<void> {
    const { sessionId, selectedNode, browser } = this.state;
    browser.data = await this.api.entities(
      sessionId, selectedNode, browser.cluster, browser.sort, browser.order,
      browser.page);
    if (this.state.selectedEntity !== null) {
      const visible = browser.data.entities.some(
        (card) => card.entity_id === this.state.selectedEntity);
      if (visible) {
        this.state.txs = await this.api.entityTxs(
          sessionId, this.state.selectedEntity, this.state.txRole);
      } else {
        this.state.selectedEntity = null;
        this.state.txs = null;
      }
    }
  }

  private adoptTree(tree: TreeJson): void {
    this.state.tree = tree;
    this.state.selectedNode = tree.selected;
    this.state.range = tree.range;
  }

  // -- filter view ------------------------------------------------------------

  async setVariant(key: MeasureKey, variant: Variant): Promise<void> {
    const allowed = variantsOf(key);
    if (allowed && (!variant || !allowed.includes(variant))) return;
    const panel = this.state.panels.find((p) => p.key === key)!;
    await this.run(async () => {
      panel.variant = variant;
      panel.brush = null;
      panel.histogram = await this.api.histogram(
        this.state.sessionId, this.state.selectedNode, key, variant);
    });
  }

  brushPanel(key: MeasureKey, brush: [number, number] | null): void {
    const panel = this.state.panels.find((p) => p.key === key)!;
    panel.brush = brush && brush[0] <= brush[1] ? brush : null;
    this.emit();
  }

  brushTime(brush: [number, number] | null): void {
    this.state.timeBrush = brush && brush[0] < brush[1] ? brush : null;
    this.emit();
  }

  /** Commit a panel brush as a split of the selected node. */
  async commitFilter(key: MeasureKey, matchLabel?: string,
                     remainderLabel?: string): Promise<void> {
    const panel = this.state.panels.find((p) => p.key === key)!;
    if (!panel.brush) return;
    const predicate: PredicateJson = {
      key, variant: panel.variant, lo: panel.brush[0], hi: panel.brush[1],
    };
    await this.run(async () => {
      const resp = await this.api.split(
        this.state.sessionId, this.state.selectedNode, predicate,
        matchLabel ?? `${key} filter`, remainderLabel ?? "remainder");
      this.adoptTree(resp.tree);
      panel.brush = null;
      await this.refreshAll();
    });
  }

  /** Commit the time brush as the session's measure-computation range. */
  async commitTimeRange(): Promise<void> {
    const brush = this.state.timeBrush;
    if (!brush) return;
    await this.setRange({ from: Math.floor(brush[0]), to: Math.ceil(brush[1]) });
  }

  async setRange(range: Range): Promise<void> {
    await this.run(async () => {
      const tree = await this.api.setRange(this.state.sessionId, range);
      this.adoptTree(tree);
      this.state.timeBrush = null;
      this.invalidateCluster();
      await this.refreshAll();
    });
  }

  async resetRange(): Promise<void> {
    await this.setRange(this.state.corpusSpan);
  }

  // -- tree view ---------------------------------------------------------------

  async selectNode(nodeId: number): Promise<void> {
    await this.run(async () => {
      this.adoptTree(await this.api.select(this.state.sessionId, nodeId));
      this.state.browser.cluster = null;
      this.state.browser.page = 0;
      await this.refreshAll();
    });
  }

  async relabel(nodeId: number, label: string): Promise<void> {
    if (!label) return;
    await this.run(async () => {
      this.adoptTree(await this.api.relabel(this.state.sessionId, nodeId, label));
    });
  }

  async deleteRow(nodeId: number): Promise<void> {
    await this.run(async () => {
      const tree = await this.api.deleteRow(this.state.sessionId, nodeId);
      const moved = tree.selected !== this.state.selectedNode;
      this.adoptTree(tree);
      if (moved) {
        this.state.browser.cluster = null;
        await this.refreshAll();
      }
    });
  }

  async exportDocument(): Promise<unknown> {
    return this.api.exportDocument(this.state.sessionId);
  }

  async importDocument(doc: unknown): Promise<void> {
    await this.run(async () => {
      this.adoptTree(await this.api.importDocument(this.state.sessionId, doc));
      this.invalidateCluster();
      await this.refreshAll();
    });
  }

  // -- cluster view --------------------------------------------------------------

  private invalidateCluster(): void {
    this.state.cluster.result = null;
    this.state.cluster.jobId = null;
    this.state.cluster.status = "idle";
  }

  toggleFeature(seriesId: string): void {
    const features = this.state.cluster.features;
    const at = features.indexOf(seriesId);
    if (at >= 0) features.splice(at, 1);
    else features.push(seriesId);
    this.emit();
  }

  setClusterK(k: number): void {
    // k=1 is rejected client-side: the view exists to compare >= 2 groups
    if (Number.isInteger(k) && k >= 2) {
      this.state.cluster.k = k;
      this.emit();
    }
  }

  setClusterSeed(seed: number): void {
    this.state.cluster.seed = seed;
    this.emit();
  }

  /** Start a clustering job on the selected node and poll it to completion. */
  async runCluster(pollMs = 1000): Promise<void> {
    const cluster = this.state.cluster;
    if (cluster.features.length === 0 || cluster.k < 2) return;
    const node = this.state.selectedNode;
    await this.run(async () => {
      const { job_id } = await this.api.startCluster(
        this.state.sessionId, node, [...cluster.features], cluster.k, cluster.seed);
      cluster.jobId = job_id;
      cluster.status = "running";
      cluster.result = null;
      this.emit();
      for (;;) {
        const job = await this.api.getJob(job_id);
        if (job.status === "done") {
          cluster.status = "done";
          cluster.result = job.result ?? null;
          break;
        }
        if (job.status === "error" || job.status === "cancelled") {
          cluster.status = job.status === "error" ? "error" : "cancelled";
          cluster.error = job.error ?? null;
          break;
        }
        await this.sleep(pollMs);
      }
    });
  }

  async cancelCluster(): Promise<void> {
    if (this.state.cluster.jobId) {
      await this.api.cancelJob(this.state.cluster.jobId);
    }
  }

  /** Materialize one cluster as a tree leaf and browse its members. */
  async materializeCluster(clusterId: number, label: string): Promise<void> {
    const result = this.state.cluster.result;
    if (!result) return;
    await this.run(async () => {
      const resp = await this.api.materialize(
        this.state.sessionId, result.node, clusterId, label);
      this.adoptTree(resp.tree);
      this.adoptTree(await this.api.select(this.state.sessionId, resp.match));
      this.invalidateCluster();
      this.state.browser.cluster = null;
      this.state.browser.page = 0;
      await this.refreshAll();
    });
  }

  /** Browse a cluster's members without materializing it. */
  async browseCluster(clusterId: number | null): Promise<void> {
    await this.run(async () => {
      this.state.browser.cluster = clusterId;
      this.state.browser.page = 0;
      await this.refreshBrowser();
    });
  }

  // -- entity browser ---------------------------------------------------------

  async setSort(sort: string, order: "asc" | "desc"): Promise<void> {
    await this.run(async () => {
      this.state.browser.sort = sort;
      this.state.browser.order = order;
      this.state.browser.page = 0;
      await this.refreshBrowser();
    });
  }

  async setPage(page: number): Promise<void> {
    if (page < 0) return;
    await this.run(async () => {
      this.state.browser.page = page;
      await this.refreshBrowser();
    });
  }

  // -- transaction view --------------------------------------------------------

  async selectEntity(entityId: number): Promise<void> {
    await this.run(async () => {
      this.state.selectedEntity = entityId;
      this.state.txs = await this.api.entityTxs(
        this.state.sessionId, entityId, this.state.txRole);
    });
  }

  async setTxRole(role: "sender" | "receiver"): Promise<void> {
    await this.run(async () => {
      this.state.txRole = role;
      if (this.state.selectedEntity !== null) {
        this.state.txs = await this.api.entityTxs(
          this.state.sessionId, this.state.selectedEntity, role);
      }
    });
  }
}

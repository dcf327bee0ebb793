/** In-memory stand-in for the backend implementing the documented /api/v1
 * contract at toy scale. It records every response it hands out so tests can
 * assert that each number a view displays traces back to an API payload. */

import {
  ApiClient,
  ClusterResultJson,
  CorpusInfoJson,
  EntitiesPageJson,
  EntityCardJson,
  HistogramJson,
  JobJson,
  PredicateJson,
  Range,
  SplitResponseJson,
  TreeJson,
  TreeNodeJson,
  TxPointJson,
  Variant,
  VolumeJson,
} from "../src/api.js";
import { ALL_SERIES_IDS, seriesId } from "../src/colors.js";

const T0 = 1_300_000_000;
const DAY = 86400;

interface FakeEntity {
  id: number;
  series: Record<string, number | null>;
  t0: number;
  t1: number;
  glyph: number[];
  label: string | null;
}

interface FakeNode {
  node: TreeNodeJson;
  ents: number[];
}

function makeEntities(n: number): FakeEntity[] {
  const out: FakeEntity[] = [];
  for (let i = 0; i < n; i++) {
    const receiver = 1 + (i % 7);
    const sender = i % 3 === 0 ? 0 : i % 5;
    const first = T0 + (i % 50) * DAY;
    const last = first + (i % 9) * DAY;
    const series: Record<string, number | null> = {};
    for (const sid of ALL_SERIES_IDS) series[sid] = null;
    series["num_txs_receiver"] = receiver;
    series["num_txs_sender"] = sender;
    series["time_first"] = first;
    series["time_last"] = last;
    series["time_active"] = (last - first) / DAY;
    for (const v of ["smallest", "average", "largest"]) {
      series[seriesId("amount_rec", v)] = 1000 * (i + 1) * (v === "largest" ? 3 : 1);
      series[seriesId("amount_sent", v)] = sender === 0 ? null : 500 * (i + 1);
      series[seriesId("num_inputs", v)] = i % 4;
      series[seriesId("num_outputs", v)] = 1 + (i % 3);
    }
    out.push({
      id: i,
      series,
      t0: first,
      t1: last,
      glyph: Array.from({ length: 8 }, (_, k) => ((i + k) % 10) / 9),
      label: i === 0 ? "MtGox" : null,
    });
  }
  return out;
}

export class FakeApi implements ApiClient {
  dataset = makeEntities(24);
  corpusId = "fake-corpus";
  sessionId = "fake-session";
  range: Range = { from: T0, to: T0 + 60 * DAY };
  nodes = new Map<number, FakeNode>();
  selected = 0;
  nextId = 1;
  jobs = new Map<string, { polls: number; result: ClusterResultJson }>();

  /** Ledger of responses, keyed by endpoint name, for traceability checks. */
  log: Record<string, unknown[]> = {};

  private record<T>(endpoint: string, payload: T): T {
    (this.log[endpoint] ??= []).push(payload);
    return payload;
  }

  lastOf<T>(endpoint: string): T {
    const entries = this.log[endpoint] ?? [];
    return entries[entries.length - 1] as T;
  }

  private inRange(e: FakeEntity, range: Range): boolean {
    return e.t0 < range.to && e.t1 >= range.from;
  }

  private rootEnts(): number[] {
    return this.dataset.filter((e) => this.inRange(e, this.range)).map((e) => e.id);
  }

  private value(id: number, key: string, variant: Variant): number | null {
    return this.dataset[id].series[seriesId(key, variant ?? null)] ?? null;
  }

  private evalPredicate(ids: number[], p: PredicateJson): [number[], number[]] {
    const match: number[] = [];
    const rest: number[] = [];
    for (const id of ids) {
      const v = this.value(id, p.key, p.variant);
      const ok = v !== null && (p.lo === null || v >= p.lo) && (p.hi === null || v <= p.hi);
      (ok ? match : rest).push(id);
    }
    return [match, rest];
  }

  private treeJson(): TreeJson {
    return {
      session_id: this.sessionId,
      corpus_id: this.corpusId,
      range: { ...this.range },
      selected: this.selected,
      nodes: [...this.nodes.values()]
        .map((f) => ({ ...f.node, count: f.ents.length }))
        .sort((a, b) => a.node_id - b.node_id),
    };
  }

  private recompute(): void {
    const root = this.nodes.get(0)!;
    root.ents = this.rootEnts();
    const walk = (id: number) => {
      const parent = this.nodes.get(id)!;
      if (parent.node.children.length !== 2) return;
      const [mid, rid] = parent.node.children;
      const match = this.nodes.get(mid)!;
      const rest = this.nodes.get(rid)!;
      if (match.node.predicate) {
        [match.ents, rest.ents] = this.evalPredicate(parent.ents, match.node.predicate);
      } else {
        match.ents = match.ents.filter((e) => parent.ents.includes(e));
        rest.ents = parent.ents.filter((e) => !match.ents.includes(e));
      }
      walk(mid);
      walk(rid);
    };
    walk(0);
  }

  async corpusInfo(): Promise<CorpusInfoJson> {
    return this.record("corpusInfo", {
      corpus_id: this.corpusId,
      n_transactions: 999,
      n_addresses: 48,
      n_entities: this.dataset.length,
      time_span: { ...this.range },
    });
  }

  async createSession(range: Range): Promise<TreeJson> {
    this.range = { ...range };
    this.nodes.clear();
    this.nodes.set(0, {
      node: { node_id: 0, parent: null, kind: "root", label: "all entities",
              count: 0, children: [], predicate: null, cluster: null },
      ents: this.rootEnts(),
    });
    this.selected = 0;
    return this.record("createSession", this.treeJson());
  }

  async getTree(): Promise<TreeJson> {
    return this.record("getTree", this.treeJson());
  }

  async setRange(_sid: string, range: Range): Promise<TreeJson> {
    this.range = { ...range };
    this.recompute();
    return this.record("setRange", this.treeJson());
  }

  async split(_sid: string, node: number, predicate: PredicateJson,
              matchLabel: string, remainderLabel: string): Promise<SplitResponseJson> {
    const parent = this.nodes.get(node);
    if (!parent) throw new Error("404: unknown node");
    if (parent.node.children.length) throw new Error("409: already split");
    const [matchEnts, restEnts] = this.evalPredicate(parent.ents, predicate);
    const mid = this.nextId++;
    const rid = this.nextId++;
    this.nodes.set(mid, {
      node: { node_id: mid, parent: node, kind: "match", label: matchLabel,
              count: 0, children: [], predicate, cluster: null },
      ents: matchEnts,
    });
    this.nodes.set(rid, {
      node: { node_id: rid, parent: node, kind: "remainder", label: remainderLabel,
              count: 0, children: [], predicate: null, cluster: null },
      ents: restEnts,
    });
    parent.node.children = [mid, rid];
    return this.record("split", { match: mid, remainder: rid, tree: this.treeJson() });
  }

  async select(_sid: string, node: number): Promise<TreeJson> {
    if (!this.nodes.has(node)) throw new Error("404: unknown node");
    this.selected = node;
    return this.record("select", this.treeJson());
  }

  async relabel(_sid: string, node: number, label: string): Promise<TreeJson> {
    this.nodes.get(node)!.node.label = label;
    return this.record("relabel", this.treeJson());
  }

  async deleteRow(_sid: string, node: number): Promise<TreeJson> {
    const target = this.nodes.get(node);
    if (!target || target.node.parent === null) throw new Error("400: cannot delete");
    const parent = this.nodes.get(target.node.parent)!;
    const doomed: number[] = [];
    const collect = (id: number) => {
      doomed.push(id);
      this.nodes.get(id)!.node.children.forEach(collect);
    };
    parent.node.children.forEach(collect);
    doomed.forEach((id) => this.nodes.delete(id));
    parent.node.children = [];
    if (doomed.includes(this.selected)) this.selected = parent.node.node_id;
    return this.record("deleteRow", this.treeJson());
  }

  async histogram(_sid: string, node: number, key: string, variant: Variant,
                  bins = 24): Promise<HistogramJson> {
    const ents = this.nodes.get(node)!.ents;
    const values = ents
      .map((id) => this.value(id, key, variant))
      .filter((v): v is number => v !== null);
    const undefinedCount = ents.length - values.length;
    let edges: number[];
    let counts: number[];
    if (values.length === 0) {
      edges = [0, 1];
      counts = [0];
    } else {
      const lo = Math.min(...values);
      const hi = Math.max(...values);
      if (lo === hi) {
        edges = [lo, lo + 1];
        counts = [values.length];
      } else {
        edges = Array.from({ length: bins + 1 }, (_, i) => lo + ((hi - lo) * i) / bins);
        counts = new Array(bins).fill(0);
        for (const v of values) {
          const at = v === hi ? bins - 1
            : Math.min(bins - 1, Math.floor(((v - lo) / (hi - lo)) * bins));
          counts[at]++;
        }
      }
    }
    return this.record(`histogram:${key}`, {
      key, variant, edges, counts, undefined_count: undefinedCount,
      scale: "linear" as const,
    });
  }

  async volume(_sid: string, node: number, bucket: "month" | "day"): Promise<VolumeJson> {
    const size = this.nodes.get(node)!.ents.length;
    const buckets = Array.from({ length: 6 }, (_, i) => ({
      start: this.range.from + i * 10 * DAY,
      count: size * (i + 1),
    }));
    return this.record("volume", { bucket, buckets });
  }

  async startCluster(_sid: string, node: number, features: string[], k: number,
                     seed: number): Promise<{ job_id: string }> {
    const ents = [...this.nodes.get(node)!.ents].sort((a, b) => a - b);
    const clusters = Array.from({ length: k }, (_, c) => {
      const members = ents.filter((_, i) => i % k === c);
      return {
        cluster_id: c,
        count: members.length,
        stats: Object.fromEntries([
          ["num_txs", [1, 2, 3] as [number, number, number]],
          ["amount_rec", [1000, 2000, 3000] as [number, number, number]],
        ]),
        axes: Array.from({ length: 8 }, (_, a) => ((c + a) % 8) / 7),
      };
    });
    const result: ClusterResultJson = {
      node, k, seed, features, iterations: 4,
      excluded_count: 0, included_count: ents.length, clusters,
    };
    const jobId = `job-${this.jobs.size}`;
    this.jobs.set(jobId, { polls: 0, result });
    (this as any)[`members:${node}`] = (c: number) => ents.filter((_, i) => i % k === c);
    return this.record("startCluster", { job_id: jobId });
  }

  async getJob(jobId: string): Promise<JobJson> {
    const job = this.jobs.get(jobId);
    if (!job) throw new Error("404: unknown job");
    job.polls++;
    if (job.polls < 3) {
      return this.record("getJob", { job_id: jobId, status: "running" as const });
    }
    return this.record("getJob", {
      job_id: jobId, status: "done" as const, result: job.result,
    });
  }

  async cancelJob(jobId: string): Promise<JobJson> {
    return this.record("cancelJob", { job_id: jobId, status: "cancelled" as const });
  }

  async materialize(_sid: string, node: number, clusterId: number,
                    label: string): Promise<SplitResponseJson> {
    const parent = this.nodes.get(node)!;
    const members: number[] = ((this as any)[`members:${node}`])(clusterId);
    const mid = this.nextId++;
    const rid = this.nextId++;
    this.nodes.set(mid, {
      node: { node_id: mid, parent: node, kind: "match", label, count: 0,
              children: [], predicate: null, cluster: { cluster_id: clusterId } },
      ents: members,
    });
    this.nodes.set(rid, {
      node: { node_id: rid, parent: node, kind: "remainder", label: "other clusters",
              count: 0, children: [], predicate: null, cluster: null },
      ents: parent.ents.filter((e) => !members.includes(e)),
    });
    parent.node.children = [mid, rid];
    return this.record("materialize", { match: mid, remainder: rid, tree: this.treeJson() });
  }

  async entities(_sid: string, node: number, cluster: number | null, sort: string,
                 order: "asc" | "desc", page: number): Promise<EntitiesPageJson> {
    let ids = [...this.nodes.get(node)!.ents];
    if (cluster !== null) {
      ids = ((this as any)[`members:${node}`])(cluster);
    }
    const value = (id: number) => {
      const [key, variant] = splitSeries(sort);
      return this.value(id, key, variant);
    };
    ids.sort((a, b) => {
      const va = value(a);
      const vb = value(b);
      if (va === null && vb === null) return a - b;
      if (va === null) return 1;
      if (vb === null) return -1;
      const d = order === "desc" ? vb - va : va - vb;
      return d !== 0 ? d : a - b;
    });
    const pageSize = 400;
    const cards: EntityCardJson[] = ids
      .slice(page * pageSize, (page + 1) * pageSize)
      .map((id) => {
        const e = this.dataset[id];
        const measures: Record<string, number | null> = {};
        for (const sid of ALL_SERIES_IDS) measures[sid] = e.series[sid] ?? null;
        return {
          entity_id: id, label: e.label,
          category: e.label ? "exchange" : null,
          measures, glyph: e.glyph,
        };
      });
    return this.record("entities", {
      total: ids.length, page, page_size: pageSize, entities: cards,
    });
  }

  async entityTxs(_sid: string, entityId: number,
                  role: "sender" | "receiver"): Promise<TxPointJson[]> {
    const e = this.dataset[entityId];
    const n = e.series[`num_txs_${role}`] ?? 0;
    const txs: TxPointJson[] = Array.from({ length: n as number }, (_, i) => ({
      time: e.t0 + i * DAY,
      amount: { sat: 1000 * (i + 1) * (entityId + 1), btc: "0.0" },
      txid: `${role}-${entityId}-${i}`,
    }));
    return this.record("entityTxs", txs);
  }

  async exportDocument(): Promise<unknown> {
    return this.record("exportDocument", {
      version: 1, corpus_id: this.corpusId,
      range: { ...this.range }, splits: [],
    });
  }

  async importDocument(): Promise<TreeJson> {
    return this.record("importDocument", this.treeJson());
  }
}

function splitSeries(sid: string): [string, Variant] {
  for (const key of ["num_txs", "amount_rec", "amount_sent", "num_inputs", "num_outputs"]) {
    if (sid.startsWith(key + "_")) return [key, sid.slice(key.length + 1) as Variant];
  }
  return [sid, null];
}

/** Wire types and client for the /api/v1 analytics service. */

export type Variant = "sender" | "receiver" | "smallest" | "average" | "largest" | null;

export interface Range {
  from: number;
  to: number;
}

export interface PredicateJson {
  key: string;
  variant: Variant;
  lo: number | null;
  hi: number | null;
}

export interface TreeNodeJson {
  node_id: number;
  parent: number | null;
  kind: "root" | "match" | "remainder";
  label: string;
  count: number;
  children: number[];
  predicate: PredicateJson | null;
  cluster: { cluster_id: number } | null;
}

export interface TreeJson {
  session_id: string;
  corpus_id: string;
  range: Range;
  selected: number;
  nodes: TreeNodeJson[];
}

export interface HistogramJson {
  key: string;
  variant: Variant;
  edges: number[];
  counts: number[];
  undefined_count: number;
  scale: "linear" | "log10";
}

export interface VolumeBucket {
  start: number;
  count: number;
}

export interface VolumeJson {
  bucket: "month" | "day";
  buckets: VolumeBucket[];
}

export interface AmountJson {
  sat: number;
  btc: string;
}

export interface EntityCardJson {
  entity_id: number;
  label: string | null;
  category: string | null;
  measures: Record<string, number | AmountJson | null>;
  glyph: number[];
}

export interface EntitiesPageJson {
  total: number;
  page: number;
  page_size: number;
  entities: EntityCardJson[];
}

export interface ClusterSummaryJson {
  cluster_id: number;
  count: number;
  stats: Record<string, [number, number, number] | null>;
  axes: number[];
}

export interface ClusterResultJson {
  node: number;
  k: number;
  seed: number;
  features: string[];
  iterations: number;
  excluded_count: number;
  included_count: number;
  clusters: ClusterSummaryJson[];
}

export interface JobJson {
  job_id: string;
  status: "queued" | "running" | "done" | "error" | "cancelled";
  result?: ClusterResultJson;
  error?: string;
}

export interface TxPointJson {
  time: number;
  amount: AmountJson;
  txid: string;
}

export interface CorpusInfoJson {
  corpus_id: string;
  n_transactions: number;
  n_addresses: number;
  n_entities: number;
  time_span: Range | null;
}

export interface SplitResponseJson {
  match: number;
  remainder: number;
  tree: TreeJson;
}

/** Everything the UI may ask of the backend; no analytics happen client-side. */
export interface ApiClient {
  corpusInfo(): Promise<CorpusInfoJson>;
  createSession(range: Range): Promise<TreeJson>;
  getTree(sid: string): Promise<TreeJson>;
  setRange(sid: string, range: Range): Promise<TreeJson>;
  split(sid: string, node: number, predicate: PredicateJson,
        matchLabel: string, remainderLabel: string): Promise<SplitResponseJson>;
  select(sid: string, node: number): Promise<TreeJson>;
  relabel(sid: string, node: number, label: string): Promise<TreeJson>;
  deleteRow(sid: string, node: number): Promise<TreeJson>;
  histogram(sid: string, node: number, key: string, variant: Variant,
            bins?: number): Promise<HistogramJson>;
  volume(sid: string, node: number, bucket: "month" | "day"): Promise<VolumeJson>;
  startCluster(sid: string, node: number, features: string[], k: number,
               seed: number): Promise<{ job_id: string }>;
  getJob(jobId: string): Promise<JobJson>;
  cancelJob(jobId: string): Promise<JobJson>;
  materialize(sid: string, node: number, clusterId: number,
              label: string): Promise<SplitResponseJson>;
  entities(sid: string, node: number, cluster: number | null, sort: string,
           order: "asc" | "desc", page: number): Promise<EntitiesPageJson>;
  entityTxs(sid: string, entityId: number,
            role: "sender" | "receiver"): Promise<TxPointJson[]>;
  exportDocument(sid: string): Promise<unknown>;
  importDocument(sid: string, doc: unknown): Promise<TreeJson>;
}

async function check(resp: Response): Promise<any> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      detail = (await resp.json()).error ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new Error(`${resp.status}: ${detail}`);
  }
  return resp.json();
}

/** fetch-based client; `base` is the API prefix, default same-origin /api/v1. */
export class HttpApi implements ApiClient {
  constructor(private base: string = "/api/v1") {}

  private get(path: string): Promise<any> {
    return fetch(this.base + path).then(check);
  }

  private send(method: string, path: string, body?: unknown): Promise<any> {
    return fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    }).then(check);
  }

  corpusInfo() { return this.get("/corpus"); }
  createSession(range: Range) { return this.send("POST", "/sessions", { range }); }
  getTree(sid: string) { return this.get(`/sessions/${sid}/tree`); }
  setRange(sid: string, range: Range) {
    return this.send("PUT", `/sessions/${sid}/range`, range);
  }
  split(sid: string, node: number, predicate: PredicateJson,
        matchLabel: string, remainderLabel: string) {
    return this.send("POST", `/sessions/${sid}/tree/${node}/split`, {
      predicate, match_label: matchLabel, remainder_label: remainderLabel,
    });
  }
  select(sid: string, node: number) {
    return this.send("POST", `/sessions/${sid}/tree/${node}/select`);
  }
  relabel(sid: string, node: number, label: string) {
    return this.send("PUT", `/sessions/${sid}/tree/${node}/label`, { label });
  }
  deleteRow(sid: string, node: number) {
    return this.send("DELETE", `/sessions/${sid}/tree/${node}`);
  }
  histogram(sid: string, node: number, key: string, variant: Variant, bins = 24) {
    const params = new URLSearchParams({ key, node: String(node), bins: String(bins) });
    if (variant) params.set("variant", variant);
    return this.get(`/sessions/${sid}/histogram?${params}`);
  }
  volume(sid: string, node: number, bucket: "month" | "day") {
    return this.get(`/sessions/${sid}/volume?bucket=${bucket}&node=${node}`);
  }
  startCluster(sid: string, node: number, features: string[], k: number, seed: number) {
    return this.send("POST", `/sessions/${sid}/cluster`, { features, k, seed, node });
  }
  getJob(jobId: string) { return this.get(`/jobs/${jobId}`); }
  cancelJob(jobId: string) { return this.send("DELETE", `/jobs/${jobId}`); }
  materialize(sid: string, node: number, clusterId: number, label: string) {
    return this.send("POST", `/sessions/${sid}/tree/${node}/materialize`, {
      cluster_id: clusterId, label,
    });
  }
  entities(sid: string, node: number, cluster: number | null, sort: string,
           order: "asc" | "desc", page: number) {
    const params = new URLSearchParams({
      node: String(node), sort, order, page: String(page),
    });
    if (cluster !== null) params.set("cluster", String(cluster));
    return this.get(`/sessions/${sid}/entities?${params}`);
  }
  entityTxs(sid: string, entityId: number, role: "sender" | "receiver") {
    return this.get(`/sessions/${sid}/entity/${entityId}/txs?role=${role}`)
      .then((r: any) => r.transactions);
  }
  exportDocument(sid: string) { return this.get(`/sessions/${sid}/tree-document`); }
  importDocument(sid: string, doc: unknown) {
    return this.send("POST", `/sessions/${sid}/tree-document`, doc);
  }
}

"""Server-side analysis sessions: active range, measure table, tree, clusters.

A session pins a corpus and a time range; the root tree node holds every
entity active in that range. Changing the range recomputes the measure table
and replays the tree's splits against it (seeded cluster splits re-run), and
invalidates cluster panel results. Mutations on one session are serialized by
its lock; distinct sessions share nothing mutable.
"""

from __future__ import annotations

import threading
import time
import uuid

import numpy as np

from .clustering import ClusterRequest, ClusterResult, cluster as run_cluster
from .corpus import Corpus
from .errors import ConflictError, InputError, NotFoundError
from .filters import Histogram, Predicate, histogram, tx_volume
from .ingest import btc_str
from .measures import (
    ALL_SERIES_IDS,
    AMOUNT_KEYS,
    compute_measures,
    entity_transactions,
    normalize_axes,
    parse_series_id,
)
from .tree import ClassificationTree, TreeDocument, replay_document

DEFAULT_PAGE_SIZE = 400
DEFAULT_IDLE_TIMEOUT = 7200.0


def _amount_json(sat) -> dict:
    return {"sat": sat if isinstance(sat, int) else float(sat),
            "btc": btc_str(round(sat))}


class Session:
    def __init__(self, corpus: Corpus, t0: int, t1: int, session_id: str | None = None):
        self.session_id = session_id or uuid.uuid4().hex
        self.corpus = corpus
        self.created_at = time.time()
        self.last_access = self.created_at
        self.lock = threading.RLock()
        self.active_job: str | None = None
        self.t0 = self.t1 = 0
        self.table = None
        self.tree: ClassificationTree | None = None
        # node id -> (ClusterResult, node children revision marker)
        self.cluster_results: dict[int, ClusterResult] = {}
        self._reset_range(t0, t1)

    def touch(self) -> None:
        self.last_access = time.time()

    def _compute_table(self, t0: int, t1: int) -> None:
        t0, t1 = int(t0), int(t1)
        if t0 >= t1:
            raise InputError(f"invalid range: {t0} >= {t1}")
        table = compute_measures(self.corpus.slices, None, t0, t1)
        self.t0, self.t1 = t0, t1
        self.table = table
        self.cluster_results = {}

    def _reset_range(self, t0: int, t1: int) -> None:
        self._compute_table(t0, t1)
        self.tree = ClassificationTree(self.table.ents.astype(np.int64))

    def set_range(self, t0: int, t1: int) -> None:
        """Recompute measures for the new range and replay the tree's splits.

        Structure, node ids, labels, and selection survive; entity sets and
        counts are re-evaluated and cluster panel results are invalidated.
        """
        with self.lock:
            self._compute_table(t0, t1)
            self.tree.recompute(self.table, self.table.ents.astype(np.int64))

    # -- entity set resolution ------------------------------------------------

    def node_ents(self, node_id: int | None = None) -> np.ndarray:
        node_id = self.tree.selected_id if node_id is None else node_id
        return self.tree.node(node_id).ents

    def cluster_ents(self, node_id: int, cluster_id: int) -> np.ndarray:
        result = self.cluster_results.get(node_id)
        if result is None:
            raise NotFoundError(f"no cluster result for node {node_id}")
        if cluster_id < 0 or cluster_id >= result.request.k:
            raise NotFoundError(f"unknown cluster id {cluster_id}")
        return np.sort(result.members(cluster_id))

    # -- query operations ------------------------------------------------------

    def histogram(self, node_id: int | None, key: str, variant: str | None,
                  bins: int, scale: str) -> Histogram:
        return histogram(self.table, self.node_ents(node_id), key, variant, bins, scale)

    def volume(self, node_id: int | None, bucket: str) -> list[tuple[int, int]]:
        ents = self.node_ents(node_id)
        full = len(ents) == len(self.table)
        return tx_volume(self.corpus.slices, None if full else ents,
                         self.t0, self.t1, bucket)

    def split(self, node_id: int, predicate: Predicate,
              match_label: str, remainder_label: str) -> tuple[int, int]:
        with self.lock:
            return self.tree.split(self.table, node_id, predicate,
                                   match_label, remainder_label)

    def select(self, node_id: int) -> None:
        with self.lock:
            self.tree.select(node_id)

    def relabel(self, node_id: int, label: str) -> None:
        with self.lock:
            self.tree.relabel(node_id, label)

    def delete_split(self, node_id: int) -> None:
        with self.lock:
            self.tree.delete_split(node_id)
            self.cluster_results = {
                nid: res for nid, res in self.cluster_results.items()
                if nid in self.tree.nodes
            }

    def run_cluster(self, node_id: int | None, request: ClusterRequest,
                    should_stop=None) -> ClusterResult:
        node_id = self.tree.selected_id if node_id is None else node_id
        table = self.table
        ents = self.node_ents(node_id)
        result = run_cluster(table, ents, request, should_stop)
        with self.lock:
            # Drop results that became stale while the job ran (range change
            # swaps the table; deletes remove the node).
            if self.table is table and node_id in self.tree.nodes:
                self.cluster_results[node_id] = result
        return result

    def materialize_cluster(self, node_id: int, cluster_id: int, label: str) -> tuple[int, int]:
        with self.lock:
            result = self.cluster_results.get(node_id)
            if result is None:
                raise NotFoundError(f"no cluster result for node {node_id}")
            node = self.tree.node(node_id)
            if not node.is_leaf:
                raise ConflictError(f"node {node_id} was split after clustering")
            return self.tree.materialize_cluster(node_id, result, cluster_id, label)

    def export_document(self) -> TreeDocument:
        return self.tree.export_document(self.corpus.corpus_id, self.t0, self.t1)

    def import_document(self, doc: TreeDocument) -> bool:
        """Replace the tree by replaying a document; returns a mismatch warning flag.

        The document's range becomes the session's active range so that
        replaying on the same corpus reproduces its counts exactly.
        """
        with self.lock:
            mismatch = bool(doc.corpus_id) and doc.corpus_id != self.corpus.corpus_id
            self._reset_range(doc.range_from, doc.range_to)
            self.tree = replay_document(doc, self.table, self.table.ents.astype(np.int64))
            return mismatch

    # -- entity listing ---------------------------------------------------------

    def _sorted_positions(self, ents: np.ndarray, sort: str, order: str) -> np.ndarray:
        key, variant = parse_series_id(sort)
        values, defined = self.table.series(key, variant)
        pos = self.table.positions(ents)
        v, d = values[pos], defined[pos]
        v = np.where(d, v, 0.0)
        if order == "desc":
            v = -v
        elif order != "asc":
            raise InputError(f"order must be asc|desc, got {order!r}")
        # Undefined values sort last regardless of direction; ties break on
        # entity id ascending for a stable total order.
        rank = (~d).astype(np.int8)
        return pos[np.lexsort((ents, v, rank))]

    def entity_card(self, position: int, axes: list[float]) -> dict:
        m = self.table.row(position)
        ordinal = int(self.table.ents[position])
        tag = self.corpus.index.tag_of(ordinal)
        measures: dict[str, object] = {}
        for sid in ALL_SERIES_IDS:
            key, variant = parse_series_id(sid)
            value = m.value(key, variant)
            if value is not None and key in AMOUNT_KEYS:
                measures[sid] = _amount_json(value)
            else:
                measures[sid] = value
        return {
            "entity_id": m.entity_id,
            "label": tag.label if tag else None,
            "category": tag.category if tag else None,
            "measures": measures,
            "glyph": axes,
        }

    def list_entities(self, node_id: int | None = None, cluster_id: int | None = None,
                      sort: str = "num_txs_receiver", order: str = "desc",
                      page: int = 0, page_size: int = DEFAULT_PAGE_SIZE) -> dict:
        """One page of entity cards over a node's (or cluster's) set.

        Stable total order: sort series, then entity id; undefined sort values
        last. Glyph axes are normalized against the node's whole set so cards
        stay comparable with the cluster view.
        """
        if page < 0 or page_size < 1:
            raise InputError("page must be >= 0 and page_size >= 1")
        node_id = self.tree.selected_id if node_id is None else node_id
        node_ents = self.node_ents(node_id)
        ents = node_ents if cluster_id is None else self.cluster_ents(node_id, cluster_id)
        sorted_pos = self._sorted_positions(ents, sort, order)
        lo = page * page_size
        page_pos = sorted_pos[lo:lo + page_size]

        node_scalars = self.table.glyph_scalars(self.table.positions(node_ents))
        node_axes = normalize_axes(node_scalars)
        pos_to_axis = {int(p): i for i, p in enumerate(self.table.positions(node_ents))}
        cards = [
            self.entity_card(int(p), [float(a) for a in node_axes[pos_to_axis[int(p)]]])
            for p in page_pos
        ]
        return {
            "total": int(len(ents)),
            "page": page,
            "page_size": page_size,
            "entities": cards,
        }

    def entity_txs(self, entity_id: int, role: str,
                   t0: int | None = None, t1: int | None = None) -> list[dict]:
        try:
            ordinal = self.corpus.index.ordinal_of(int(entity_id))
        except KeyError as exc:
            raise NotFoundError(str(exc)) from exc
        t0 = self.t0 if t0 is None else int(t0)
        t1 = self.t1 if t1 is None else int(t1)
        rows = entity_transactions(self.corpus.slices, ordinal, role, t0, t1)
        return [{"time": ts, "amount": _amount_json(amount), "txid": txid}
                for ts, amount, txid in rows]

    # -- tree serialization ------------------------------------------------------

    def tree_json(self) -> dict:
        nodes = []
        for node in self.tree.nodes.values():
            nodes.append({
                "node_id": node.node_id,
                "parent": node.parent,
                "kind": node.kind,
                "label": node.label,
                "count": node.count,
                "children": list(node.children),
                "predicate": node.predicate.to_json() if node.predicate else None,
                "cluster": node.cluster,
            })
        nodes.sort(key=lambda n: n["node_id"])
        return {
            "session_id": self.session_id,
            "corpus_id": self.corpus.corpus_id,
            "range": {"from": self.t0, "to": self.t1},
            "selected": self.tree.selected_id,
            "nodes": nodes,
        }


class SessionManager:
    """In-memory session registry with idle expiry."""

    def __init__(self, corpus: Corpus, idle_timeout: float = DEFAULT_IDLE_TIMEOUT):
        self.corpus = corpus
        self.idle_timeout = idle_timeout
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, t0: int, t1: int, corpus_id: str | None = None) -> Session:
        if corpus_id and corpus_id != self.corpus.corpus_id:
            raise NotFoundError(f"unknown corpus {corpus_id}")
        session = Session(self.corpus, t0, t1)
        with self._lock:
            self._expire_locked()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._expire_locked()
            session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown session {session_id}")
        session.touch()
        return session

    def drop(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def _expire_locked(self) -> None:
        if self.idle_timeout <= 0:
            return
        cutoff = time.time() - self.idle_timeout
        dead = [sid for sid, s in self._sessions.items() if s.last_access < cutoff]
        for sid in dead:
            del self._sessions[sid]

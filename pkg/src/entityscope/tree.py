"""Hierarchical classification of entities as a tree of match/remainder splits.

Every split bipartitions its node's entity set: the match child holds the
entities satisfying a predicate (or a materialized cluster), the remainder
child holds the rest. Any leaf may be split; deleting a node removes the
whole split row (node, sibling, and all their descendants).

Trees serialize to a TreeDocument: replaying its ordered splits on the same
corpus and range reproduces identical node counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .clustering import ClusterRequest, ClusterResult, cluster as run_cluster
from .errors import ConflictError, InputError, NotFoundError
from .filters import Predicate, apply_filter
from .measures import MeasureTable

DOCUMENT_VERSION = 1


@dataclass
class Node:
    node_id: int
    parent: int | None
    kind: str                     # "root" | "match" | "remainder"
    label: str
    ents: np.ndarray              # sorted entity ordinals
    predicate: Predicate | None = None
    cluster: dict | None = None   # {"request": ..., "cluster_id": int} provenance
    children: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.ents)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class SplitSpec:
    path: list[int]               # child indices from root to the split node
    match_label: str
    remainder_label: str
    predicate: Predicate | None = None
    cluster: dict | None = None

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "predicate": self.predicate.to_json() if self.predicate else None,
            "cluster": self.cluster,
            "match_label": self.match_label,
            "remainder_label": self.remainder_label,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SplitSpec":
        if not isinstance(obj, dict):
            raise InputError("split entry must be an object")
        path = obj.get("path")
        if not isinstance(path, list) or not all(c in (0, 1) for c in path):
            raise InputError("split path must be a list of 0/1 child indices")
        predicate = obj.get("predicate")
        clus = obj.get("cluster")
        if (predicate is None) == (clus is None):
            raise InputError("split needs exactly one of predicate or cluster")
        return cls(
            path=list(path),
            match_label=str(obj.get("match_label", "match")),
            remainder_label=str(obj.get("remainder_label", "remainder")),
            predicate=Predicate.from_json(predicate) if predicate else None,
            cluster=clus,
        )


@dataclass
class TreeDocument:
    corpus_id: str
    range_from: int
    range_to: int
    splits: list[SplitSpec]
    version: int = DOCUMENT_VERSION

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "corpus_id": self.corpus_id,
            "range": {"from": self.range_from, "to": self.range_to},
            "splits": [s.to_json() for s in self.splits],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "TreeDocument":
        if not isinstance(obj, dict):
            raise InputError("tree document must be a JSON object")
        if obj.get("version") != DOCUMENT_VERSION:
            raise InputError(f"unsupported tree document version {obj.get('version')!r}")
        rng = obj.get("range") or {}
        try:
            return cls(
                corpus_id=str(obj.get("corpus_id", "")),
                range_from=int(rng["from"]),
                range_to=int(rng["to"]),
                splits=[SplitSpec.from_json(s) for s in obj.get("splits", [])],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed tree document: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "TreeDocument":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed tree document: {exc.msg}") from exc
        return cls.from_json(obj)


class ClassificationTree:
    """Mutable per-session tree; the root holds all in-range entities."""

    def __init__(self, root_ents: np.ndarray, root_label: str = "all entities"):
        self._next_id = 1
        root = Node(0, None, "root", root_label, np.asarray(root_ents, dtype=np.int64))
        self.nodes: dict[int, Node] = {0: root}
        self.selected_id = 0
        self._split_order: list[int] = []   # parent node ids, creation order

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def node(self, node_id: int) -> Node:
        node = self.nodes.get(node_id)
        if node is None:
            raise NotFoundError(f"unknown tree node {node_id}")
        return node

    def _add_children(self, parent: Node, match_ents, remainder_ents,
                      match_label, remainder_label, predicate=None, cluster=None):
        if not parent.is_leaf:
            raise ConflictError(f"node {parent.node_id} is already split")
        if not match_label or not remainder_label:
            raise InputError("split labels must be non-empty")
        mid, rid = self._next_id, self._next_id + 1
        self._next_id += 2
        self.nodes[mid] = Node(mid, parent.node_id, "match", match_label,
                               match_ents, predicate=predicate, cluster=cluster)
        self.nodes[rid] = Node(rid, parent.node_id, "remainder", remainder_label,
                               remainder_ents)
        parent.children = [mid, rid]
        self._split_order.append(parent.node_id)
        return mid, rid

    def split(self, table: MeasureTable, node_id: int, predicate: Predicate,
              match_label: str, remainder_label: str) -> tuple[int, int]:
        parent = self.node(node_id)
        match, remainder = apply_filter(table, parent.ents, predicate)
        return self._add_children(parent, match, remainder, match_label,
                                  remainder_label, predicate=predicate)

    def materialize_cluster(self, node_id: int, result: ClusterResult,
                            cluster_id: int, label: str) -> tuple[int, int]:
        """Turn one cluster of a node's cluster result into a child split.

        The match child holds exactly the cluster's entities; the remainder
        combines the other clusters plus the entities excluded for undefined
        features.
        """
        parent = self.node(node_id)
        if cluster_id < 0 or cluster_id >= result.request.k:
            raise NotFoundError(f"unknown cluster id {cluster_id}")
        match = np.sort(result.members(cluster_id)).astype(np.int64)
        remainder = np.setdiff1d(parent.ents, match)
        provenance = {"request": result.request.to_json(), "cluster_id": int(cluster_id)}
        return self._add_children(parent, match, remainder, label, "other clusters",
                                  cluster=provenance)

    def select(self, node_id: int) -> Node:
        node = self.node(node_id)
        self.selected_id = node_id
        return node

    def relabel(self, node_id: int, label: str) -> None:
        if not label:
            raise InputError("label must be non-empty")
        self.node(node_id).label = label

    def _subtree(self, node_id: int) -> list[int]:
        out, stack = [], [node_id]
        while stack:
            nid = stack.pop()
            out.append(nid)
            stack.extend(self.nodes[nid].children)
        return out

    def delete_split(self, node_id: int) -> None:
        node = self.node(node_id)
        if node.kind == "root":
            raise InputError("cannot delete the root")
        parent = self.nodes[node.parent]
        doomed = []
        for child_id in parent.children:
            doomed.extend(self._subtree(child_id))
        doomed_set = set(doomed)
        for nid in doomed:
            del self.nodes[nid]
        self._split_order = [
            pid for pid in self._split_order
            if pid not in doomed_set and pid != parent.node_id
        ]
        parent.children = []
        if self.selected_id in doomed_set:
            self.selected_id = parent.node_id

    def path_of(self, node_id: int) -> list[int]:
        path = []
        node = self.node(node_id)
        while node.parent is not None:
            parent = self.nodes[node.parent]
            path.append(parent.children.index(node.node_id))
            node = parent
        path.reverse()
        return path

    def node_at_path(self, path: list[int]) -> Node:
        node = self.root
        for idx in path:
            if idx >= len(node.children):
                raise InputError(f"tree path {path} does not resolve")
            node = self.nodes[node.children[idx]]
        return node

    def export_document(self, corpus_id: str, t0: int, t1: int) -> TreeDocument:
        splits = []
        for parent_id in self._split_order:
            parent = self.nodes[parent_id]
            match = self.nodes[parent.children[0]]
            remainder = self.nodes[parent.children[1]]
            splits.append(SplitSpec(
                path=self.path_of(parent_id),
                match_label=match.label,
                remainder_label=remainder.label,
                predicate=match.predicate,
                cluster=match.cluster,
            ))
        return TreeDocument(corpus_id, t0, t1, splits)

    def recompute(self, table: MeasureTable, root_ents: np.ndarray) -> None:
        """Re-evaluate every split against a new measure table, in place.

        Node ids, labels, structure, and selection survive; only the entity
        sets and counts change. Cluster splits re-run their recorded seeded
        request; one that can no longer run (k exceeds the usable entities of
        the shrunken set) degrades to an empty match child.
        """
        self.root.ents = np.asarray(root_ents, dtype=np.int64)
        stack = [0]
        while stack:
            node = self.nodes[stack.pop()]
            if node.is_leaf:
                continue
            match_node = self.nodes[node.children[0]]
            remainder_node = self.nodes[node.children[1]]
            match_node.ents, remainder_node.ents = _split_sets(
                table, node.ents, match_node.predicate, match_node.cluster)
            stack.extend(node.children)

    def verify_partition(self) -> None:
        """Assert the match/remainder partition invariant at every split."""
        for node in self.nodes.values():
            if node.is_leaf:
                continue
            match = self.nodes[node.children[0]]
            remainder = self.nodes[node.children[1]]
            combined = np.concatenate([match.ents, remainder.ents])
            assert len(combined) == len(node.ents), "split loses or duplicates entities"
            assert np.array_equal(np.sort(combined), node.ents), "split is not a partition"
            assert len(np.intersect1d(match.ents, remainder.ents)) == 0


def _split_sets(table: MeasureTable, ents: np.ndarray,
                predicate: Predicate | None, cluster_info: dict | None):
    """(match, remainder) sets for one split definition over an entity set."""
    if predicate is not None:
        return apply_filter(table, ents, predicate)
    request = ClusterRequest.from_json(cluster_info.get("request", {}))
    try:
        result = run_cluster(table, ents, request)
    except InputError:
        # Not enough usable entities to re-run the recorded clustering.
        return np.zeros(0, dtype=np.int64), np.asarray(ents, dtype=np.int64)
    match = np.sort(result.members(int(cluster_info.get("cluster_id", 0))))
    return match.astype(np.int64), np.setdiff1d(ents, match)


def replay_document(doc: TreeDocument, table: MeasureTable,
                    root_ents: np.ndarray) -> ClassificationTree:
    """Rebuild a tree by replaying a document's splits in order.

    Predicate splits re-apply their filter; cluster splits re-run the
    recorded seeded clustering and materialize the recorded cluster id.
    """
    tree = ClassificationTree(root_ents)
    for spec in doc.splits:
        target = tree.node_at_path(spec.path)
        match, remainder = _split_sets(table, target.ents, spec.predicate, spec.cluster)
        tree._add_children(target, match, remainder, spec.match_label,
                           spec.remainder_label, predicate=spec.predicate,
                           cluster=spec.cluster)
    return tree

"""Entity resolution: input-address heuristic with transitive closure.

All input addresses of one transaction are treated as controlled by the same
entity; co-spending links close transitively. Addresses that only ever appear
in outputs become singleton entities. The canonical entity id is the smallest
member address id, which makes the index independent of union order.
"""

from __future__ import annotations

import csv
from collections import Counter

import numpy as np

from .ingest import Tag, TagTable, TransactionStore


class UnionFind:
    """Array-backed disjoint sets with union by size and path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


class EntityIndex:
    """Partition of the address set into entities.

    Entities are addressed two ways: the *canonical id* (smallest member
    address id, stable across transaction orderings) and the *ordinal*
    (dense 0..n_entities-1 rank of the canonical id) used to index internal
    arrays. ``entity_ids[ordinal]`` converts ordinal to canonical.
    """

    def __init__(self, addr_ordinal: np.ndarray, entity_ids: np.ndarray,
                 member_start: np.ndarray, member_addr: np.ndarray,
                 tags: dict[int, Tag] | None = None):
        self.addr_ordinal = addr_ordinal        # address id -> entity ordinal
        self.entity_ids = entity_ids            # ordinal -> canonical id
        self.member_start = member_start        # CSR over ordinals
        self.member_addr = member_addr          # member address ids, sorted
        self.tags = tags or {}                  # ordinal -> Tag

    @property
    def n_entities(self) -> int:
        return len(self.entity_ids)

    @property
    def n_addresses(self) -> int:
        return len(self.addr_ordinal)

    def ordinal_of(self, entity_id: int) -> int:
        """Ordinal of a canonical entity id; raises KeyError if unknown."""
        pos = int(np.searchsorted(self.entity_ids, entity_id))
        if pos >= len(self.entity_ids) or self.entity_ids[pos] != entity_id:
            raise KeyError(f"unknown entity id {entity_id}")
        return pos

    def members(self, ordinal: int) -> np.ndarray:
        """Sorted member address ids of one entity."""
        return self.member_addr[self.member_start[ordinal]:self.member_start[ordinal + 1]]

    def tag_of(self, ordinal: int) -> Tag | None:
        return self.tags.get(ordinal)

    def partition(self) -> list[frozenset[int]]:
        """All entities as frozensets of address ids (testing convenience)."""
        return [
            frozenset(int(a) for a in self.members(o)) for o in range(self.n_entities)
        ]


def build_entities(store: TransactionStore) -> EntityIndex:
    """Union all input addresses of each transaction; close transitively.

    Output-only addresses stay singletons. Deterministic for a fixed corpus:
    canonical ids do not depend on the order unions were applied.
    """
    n_addr = store.n_addresses
    uf = UnionFind(n_addr)
    in_addr = store.in_addr
    in_start = store.in_start
    for i in range(store.n_transactions):
        lo, hi = in_start[i], in_start[i + 1]
        if hi - lo < 2:
            continue
        first = in_addr[lo]
        for j in range(lo + 1, hi):
            uf.union(first, in_addr[j])

    if n_addr == 0:
        empty32 = np.zeros(0, dtype=np.int32)
        return EntityIndex(empty32, empty32.copy(), np.zeros(1, dtype=np.int64), empty32.copy())

    roots = np.fromiter((uf.find(a) for a in range(n_addr)), dtype=np.int64, count=n_addr)
    # Canonical id per root = smallest member address id.
    canon = np.full(n_addr, n_addr, dtype=np.int64)
    np.minimum.at(canon, roots, np.arange(n_addr, dtype=np.int64))
    addr_canon = canon[roots]

    entity_ids, addr_ordinal = np.unique(addr_canon, return_inverse=True)
    addr_ordinal = addr_ordinal.astype(np.int32)
    order = np.argsort(addr_ordinal, kind="stable").astype(np.int32)
    counts = np.bincount(addr_ordinal, minlength=len(entity_ids))
    member_start = np.concatenate([[0], np.cumsum(counts, dtype=np.int64)])
    return EntityIndex(addr_ordinal, entity_ids.astype(np.int32), member_start, order)


def entity_of(index: EntityIndex, store: TransactionStore, address: str) -> int | None:
    """Canonical entity id containing ``address``, or None if unknown."""
    aid = store.addr_ids.get(address)
    if aid is None:
        return None
    return int(index.entity_ids[index.addr_ordinal[aid]])


def attach_tags(index: EntityIndex, tags: TagTable, store: TransactionStore) -> EntityIndex:
    """Attach per-entity tags by majority vote over tagged member addresses.

    Ties break on the lexicographically smallest (label, category). Entities
    with no tagged member stay untagged. Returns a new index sharing the
    partition arrays.
    """
    by_id = tags.resolve(store)
    votes: dict[int, Counter] = {}
    for aid, tag in by_id.items():
        votes.setdefault(int(index.addr_ordinal[aid]), Counter())[tag] += 1
    entity_tags = {}
    for ordinal, counter in votes.items():
        best = min(counter.items(), key=lambda kv: (-kv[1], kv[0].label, kv[0].category))
        entity_tags[ordinal] = best[0]
    return EntityIndex(
        index.addr_ordinal, index.entity_ids, index.member_start, index.member_addr,
        entity_tags,
    )


def export_members_csv(index: EntityIndex, store: TransactionStore, path) -> int:
    """Write ``entity_id,address`` rows (one per member); returns row count."""
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "address"])
        for ordinal in range(index.n_entities):
            eid = int(index.entity_ids[ordinal])
            for aid in index.members(ordinal):
                writer.writerow([eid, store.address_of(int(aid))])
                rows += 1
    return rows


def export_tags_csv(index: EntityIndex, path) -> int:
    """Write ``entity_id,label,category`` for tagged entities."""
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "label", "category"])
        for ordinal in sorted(index.tags):
            tag = index.tags[ordinal]
            writer.writerow([int(index.entity_ids[ordinal]), tag.label, tag.category])
            rows += 1
    return rows

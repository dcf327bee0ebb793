from __future__ import annotations

import io
import random

import numpy as np
import pytest

from entityscope.entities import attach_tags, build_entities, entity_of
from entityscope.ingest import build_store, import_tags

from .conftest import make_records, make_store
from .oracles import co_input_components, random_records


def partition_of(index) -> set[frozenset[int]]:
    return set(index.partition())


def test_transitive_linking():
    store = make_store([
        (0, [("A", 10), ("B", 5)], [("Z", 15)]),
        (1, [("B", 7), ("C", 7)], [("Z", 14)]),
    ])
    index = build_entities(store)
    abc = {store.addr_ids[a] for a in "ABC"}
    assert frozenset(abc) in partition_of(index)
    assert entity_of(index, store, "A") == entity_of(index, store, "C")


def test_coinbase_only_singletons():
    store = make_store([
        (0, [], [("D", 50)]),
        (1, [], [("E", 50)]),
    ])
    index = build_entities(store)
    assert index.n_entities == 2
    assert all(len(index.members(o)) == 1 for o in range(2))


def test_random_corpus_matches_component_oracle():
    rng = random.Random(42)
    store = build_store(random_records(rng, n_addresses=50, n_txs=200))
    index = build_entities(store)
    assert partition_of(index) == co_input_components(store)


def test_order_independence():
    rng = random.Random(7)
    records = random_records(rng, n_addresses=30, n_txs=80)
    base = build_entities(build_store(list(records)))
    for seed in (1, 2, 3):
        shuffled = list(records)
        random.Random(seed).shuffle(shuffled)
        index = build_entities(build_store(shuffled))
        assert np.array_equal(index.addr_ordinal, base.addr_ordinal)
        assert np.array_equal(index.entity_ids, base.entity_ids)
        assert np.array_equal(index.member_addr, base.member_addr)


def test_output_cooccurrence_never_links():
    store = make_store([
        (0, [("S", 30)], [("A", 10), ("B", 10)]),
        (1, [("S", 30)], [("A", 10), ("B", 10)]),
    ])
    index = build_entities(store)
    assert entity_of(index, store, "A") != entity_of(index, store, "B")


def test_canonical_id_is_smallest_member():
    store = make_store([(0, [("A", 10), ("B", 5)], [("Z", 15)])])
    index = build_entities(store)
    eid = entity_of(index, store, "B")
    members = index.members(index.ordinal_of(eid))
    assert eid == int(members.min())


def test_entity_of_unknown_address(bob_alice_store):
    index = build_entities(bob_alice_store)
    assert entity_of(index, bob_alice_store, "nope") is None


def test_entity_of_agrees_for_all_members(mixed_built):
    store, index, _ = mixed_built
    for ordinal in range(0, index.n_entities, 17):
        members = index.members(ordinal)
        ids = {entity_of(index, store, store.address_of(int(a))) for a in members}
        assert len(ids) == 1


def test_partition_covers_all_addresses(mixed_built):
    store, index, _ = mixed_built
    seen = np.sort(index.member_addr)
    assert np.array_equal(seen, np.arange(store.n_addresses))


class TestAttachTags:
    def _index(self, store):
        return build_entities(store)

    def test_single_tagged_member(self):
        store = make_store([(0, [("A", 10), ("B", 10)], [("Z", 20)])])
        tags = import_tags(io.StringIO("address,label,category\nA,MtGox,exchange\n"))
        index = attach_tags(self._index(store), tags, store)
        ordinal = index.ordinal_of(entity_of(index, store, "A"))
        assert index.tag_of(ordinal).label == "MtGox"

    def test_majority_vote(self):
        store = make_store([(0, [("A", 1), ("B", 1), ("C", 1)], [("Z", 3)])])
        tags = import_tags(io.StringIO(
            "address,label,category\nA,X,wallet\nB,X,wallet\nC,Y,wallet\n"))
        index = attach_tags(self._index(store), tags, store)
        ordinal = index.ordinal_of(entity_of(index, store, "A"))
        assert index.tag_of(ordinal).label == "X"

    def test_tie_breaks_lexicographic(self):
        store = make_store([(0, [("A", 1), ("B", 1)], [("Z", 2)])])
        tags = import_tags(io.StringIO("address,label,category\nA,Y,wallet\nB,X,wallet\n"))
        index = attach_tags(self._index(store), tags, store)
        ordinal = index.ordinal_of(entity_of(index, store, "A"))
        assert index.tag_of(ordinal).label == "X"

    def test_untagged_entities_stay_untagged(self):
        store = make_store([(0, [("A", 1)], [("Z", 1)])])
        tags = import_tags(io.StringIO("address,label,category\nA,X,wallet\n"))
        index = attach_tags(self._index(store), tags, store)
        z_ord = index.ordinal_of(entity_of(index, store, "Z"))
        assert index.tag_of(z_ord) is None


def test_ordinal_of_unknown_entity(bob_alice_store):
    index = build_entities(bob_alice_store)
    with pytest.raises(KeyError):
        index.ordinal_of(10**9)


def test_empty_store():
    index = build_entities(build_store([]))
    assert index.n_entities == 0


def test_export_csvs(tmp_path):
    from entityscope.entities import export_members_csv, export_tags_csv

    store = make_store([(0, [("A", 10), ("B", 10)], [("Z", 20)])])
    tags = import_tags(io.StringIO("address,label,category\nA,MtGox,exchange\n"))
    index = attach_tags(build_entities(store), tags, store)

    members = tmp_path / "members.csv"
    assert export_members_csv(index, store, members) == 3
    lines = members.read_text().splitlines()
    assert lines[0] == "entity_id,address"
    assert len(lines) == 4

    tagged = tmp_path / "tags.csv"
    assert export_tags_csv(index, tagged) == 1
    assert "MtGox,exchange" in tagged.read_text()

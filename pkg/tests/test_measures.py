from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entityscope.entities import build_entities, entity_of
from entityscope.errors import InputError, UnknownKeyError
from entityscope.ingest import build_store
from entityscope.measures import (
    SECONDS_PER_DAY,
    build_slices,
    compute_measures,
    entity_transactions,
    measure_value,
    merge_partials,
    parse_series_id,
    validate_series,
)

from .conftest import BOB_ALICE_TX, make_store
from .oracles import assert_measures_match, scan_measures


def build_all(txs):
    store = make_store(txs)
    index = build_entities(store)
    return store, index, build_slices(store, index)


@pytest.fixture(scope="module")
def bob_alice_setup():
    store, index, slices = build_all([BOB_ALICE_TX])
    table = compute_measures(slices, None, 0, 2000)
    bob = index.ordinal_of(entity_of(index, store, "X"))
    alice = index.ordinal_of(entity_of(index, store, "Alice"))
    return store, index, slices, table, bob, alice


class TestBobAliceExample:
    @pytest.fixture()
    def setup(self, bob_alice_setup):
        return bob_alice_setup

    def test_bob_amounts(self, setup):
        _, _, _, table, bob, _ = setup
        m = table.row_of_entity(bob)
        assert m.amount_sent == (2_000_000, 2_000_000.0, 2_000_000)
        assert m.amount_rec == (500_000, 500_000.0, 500_000)

    def test_alice_amounts(self, setup):
        _, _, _, table, _, alice = setup
        m = table.row_of_entity(alice)
        assert m.amount_rec == (1_500_000, 1_500_000.0, 1_500_000)
        assert m.amount_sent is None

    def test_degrees_role_agnostic(self, setup):
        _, _, _, table, bob, alice = setup
        for ordinal in (bob, alice):
            m = table.row_of_entity(ordinal)
            assert m.num_inputs == (2, 2.0, 2)
            assert m.num_outputs == (2, 2.0, 2)

    def test_self_change_counts_both_roles(self, setup):
        _, _, _, table, bob, _ = setup
        m = table.row_of_entity(bob)
        assert m.num_txs_sender == 1
        assert m.num_txs_receiver == 1
        assert m.num_txs_participating == 1

    def test_measure_value_accessor(self, setup):
        _, _, _, table, bob, alice = setup
        bob_m = table.row_of_entity(bob)
        assert measure_value(bob_m, "amount_sent", "largest") == 2_000_000
        alice_m = table.row_of_entity(alice)
        assert measure_value(alice_m, "amount_sent", "average") is None
        assert measure_value(bob_m, "time_active") == \
            (bob_m.time_last - bob_m.time_first) / SECONDS_PER_DAY

    def test_entity_transactions_roles(self, setup):
        store, _, slices, _, bob, alice = setup
        sender_rows = entity_transactions(slices, bob, "sender", 0, 2000)
        assert len(sender_rows) == 1
        assert sender_rows[0][1] == 2_000_000
        recv_rows = entity_transactions(slices, bob, "receiver", 0, 2000)
        assert recv_rows[0][1] == 500_000
        assert entity_transactions(slices, alice, "sender", 0, 2000) == []


def test_coinbase_only_miner():
    store, index, slices = build_all([(100, [], [("M", 5_000_000_000)])])
    table = compute_measures(slices, None, 0, 200)
    m = table.row(0)
    assert m.num_txs_receiver == 1
    assert m.num_txs_sender == 0
    assert m.num_inputs[0] == 0
    assert m.amount_sent is None


def test_two_days_two_partials():
    day = SECONDS_PER_DAY
    store, index, slices = build_all([
        (3 * day + 10, [("A", 5)], [("B", 5)]),
        (7 * day + 10, [("A", 5)], [("B", 5)]),
    ])
    a_ord = index.ordinal_of(entity_of(index, store, "A"))
    assert int((slices.ents == a_ord).sum()) == 2


def test_empty_corpus_empty_slices():
    store = build_store([])
    index = build_entities(store)
    slices = build_slices(store, index)
    assert slices.n_rows == 0
    table = compute_measures(slices, None, 0, 100)
    assert len(table) == 0


def test_unsupported_slice_granularity():
    store = build_store([])
    with pytest.raises(InputError):
        build_slices(store, build_entities(store), slice="hour")


def test_invalid_range():
    store, index, slices = build_all([BOB_ALICE_TX])
    with pytest.raises(InputError):
        compute_measures(slices, None, 10, 10)


def test_unknown_key():
    with pytest.raises(UnknownKeyError):
        validate_series("balance", None)
    with pytest.raises(UnknownKeyError):
        validate_series("amount_rec", None)
    with pytest.raises(UnknownKeyError):
        parse_series_id("amount_rec_median")


def test_whole_range_matches_raw_scan(mixed_built):
    store, index, slices = mixed_built
    t0 = int(store.timestamps[0])
    t1 = int(store.timestamps[-1]) + 1
    table = compute_measures(slices, None, t0, t1)
    assert_measures_match(table, scan_measures(store, index, t0, t1))


def test_random_ranges_match_raw_scan(mixed_built):
    store, index, slices = mixed_built
    lo, hi = int(store.timestamps[0]), int(store.timestamps[-1]) + 1
    rng = random.Random(5)
    for _ in range(25):
        t0 = rng.randint(lo - 100, hi - 2)
        t1 = rng.randint(t0 + 1, hi + 100)
        table = compute_measures(slices, None, t0, t1)
        assert_measures_match(table, scan_measures(store, index, t0, t1))


def test_entity_subset_matches_raw_scan(mixed_built):
    store, index, slices = mixed_built
    lo, hi = int(store.timestamps[0]), int(store.timestamps[-1]) + 1
    rng = random.Random(9)
    ordinals = rng.sample(range(index.n_entities), 25)
    ids = [int(index.entity_ids[o]) for o in ordinals]
    t0 = lo + (hi - lo) // 4 + 321
    t1 = hi - (hi - lo) // 4 - 123
    table = compute_measures(slices, np.array(ordinals), t0, t1)
    assert_measures_match(table, scan_measures(store, index, t0, t1, entity_ids=ids))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 89), st.integers(0, 89), st.integers(0, 89))
def test_monoid_split_merge(mixed_built, a, b, c):
    """Merging two adjacent day-aligned sub-ranges equals the joint range."""
    store, index, slices = mixed_built
    base_day = int(store.timestamps[0]) // SECONDS_PER_DAY
    d0, dm, d1 = sorted((base_day + a, base_day + b, base_day + c))
    left_e, left_m = slices.merge_day_range(None, d0, dm)
    right_e, right_m = slices.merge_day_range(None, dm, d1 + 1)
    all_e, all_m = slices.merge_day_range(None, d0, d1 + 1)
    ents = np.union1d(left_e, right_e)
    assert np.array_equal(ents, all_e)
    for i, e in enumerate(ents):
        li = np.searchsorted(left_e, e)
        ri = np.searchsorted(right_e, e)
        row = None
        if li < len(left_e) and left_e[li] == e:
            row = left_m[li]
        if ri < len(right_e) and right_e[ri] == e:
            row = right_m[ri] if row is None else merge_partials(row, right_m[ri])
        assert np.array_equal(row, all_m[i])


def test_range_monotonicity(mixed_built):
    store, index, slices = mixed_built
    lo, hi = int(store.timestamps[0]), int(store.timestamps[-1]) + 1
    mid = (lo + hi) // 2
    narrow = compute_measures(slices, None, lo + 86400, mid)
    wide = compute_measures(slices, None, lo, hi)
    wide_ids = {int(e): i for i, e in enumerate(wide.entity_ids)}
    for pos in range(len(narrow)):
        m = narrow.row(pos)
        w = wide.row(wide_ids[m.entity_id])
        assert w.num_txs_sender >= m.num_txs_sender
        assert w.num_txs_receiver >= m.num_txs_receiver
        assert w.time_first <= m.time_first
        assert w.time_last >= m.time_last
        assert w.num_inputs[0] <= m.num_inputs[0]
        assert w.num_inputs[2] >= m.num_inputs[2]
        if m.amount_rec is not None:
            assert w.amount_rec[0] <= m.amount_rec[0]
            assert w.amount_rec[2] >= m.amount_rec[2]


def test_table_invariants(mixed_built):
    store, index, slices = mixed_built
    t0 = int(store.timestamps[0])
    table = compute_measures(slices, None, t0, t0 + 40 * SECONDS_PER_DAY)
    for pos in range(len(table)):
        m = table.row(pos)
        assert m.time_first <= m.time_last
        assert m.time_active_days == (m.time_last - m.time_first) / SECONDS_PER_DAY
        assert m.num_txs_sender + m.num_txs_receiver >= 1
        for triple in (m.amount_rec, m.amount_sent, m.num_inputs, m.num_outputs):
            if triple is not None:
                assert triple[0] <= triple[1] <= triple[2]
        assert (m.amount_rec is not None) == (m.num_txs_receiver >= 1)
        assert (m.amount_sent is not None) == (m.num_txs_sender >= 1)

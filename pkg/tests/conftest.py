from __future__ import annotations

import hashlib

import pytest

from entityscope.entities import build_entities
from entityscope.ingest import build_store
from entityscope.measures import build_slices
from entityscope.synth import GeneratorConfig, generate


def make_records(txs):
    """Records from (time, [(addr, value), ...], [(addr, value), ...]) tuples."""
    records = []
    for i, (ts, vin, vout) in enumerate(txs):
        txid = hashlib.sha256(f"fix:{i}".encode()).hexdigest()
        records.append({
            "txid": txid,
            "time": ts,
            "vin": [{"addr": a, "value": v} for a, v in vin],
            "vout": [{"addr": a, "value": v} for a, v in vout],
        })
    return records


def make_store(txs):
    return build_store(make_records(txs))


BOB_ALICE_TX = (1000, [("X", 1_000_000), ("Y", 1_000_000)],
                [("Alice", 1_500_000), ("X", 500_000)])


@pytest.fixture(scope="session")
def bob_alice_store():
    return make_store([BOB_ALICE_TX])


@pytest.fixture(scope="session")
def mixed_corpus():
    """Small planted corpus exercising every profile and tx shape."""
    cfg = GeneratorConfig(
        seed=11, n_entities=400, one_timer_fraction=0.4, n_miners=15,
        n_exchanges=1, duration_days=90,
    )
    return generate(cfg)


@pytest.fixture(scope="session")
def mixed_built(mixed_corpus):
    store = build_store(mixed_corpus.records)
    index = build_entities(store)
    slices = build_slices(store, index)
    return store, index, slices

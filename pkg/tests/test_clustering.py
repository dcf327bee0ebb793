from __future__ import annotations

import numpy as np
import pytest

from entityscope.clustering import ClusterRequest, cluster, kmeans
from entityscope.entities import build_entities
from entityscope.errors import InputError
from entityscope.ingest import build_store
from entityscope.measures import build_slices, compute_measures
from entityscope.synth import GeneratorConfig, PopulationSpec, generate
from entityscope.tree import ClassificationTree


@pytest.fixture(scope="module")
def two_population_setup():
    cfg = GeneratorConfig(
        seed=21, n_entities=260, duration_days=60,
        populations=(
            PopulationSpec("pop_low", 120, receives=(2, 4), amount_sat=(5_000, 20_000)),
            PopulationSpec("pop_high", 120, receives=(40, 60),
                           amount_sat=(5 * 10**9, 2 * 10**10)),
        ),
    )
    corpus = generate(cfg)
    store = build_store(corpus.records)
    index = build_entities(store)
    slices = build_slices(store, index)
    table = compute_measures(slices, None, cfg.start_time, cfg.end_time)
    profile_of = {row["addr"]: row["profile"] for row in corpus.truth}
    pop_ordinals, labels = [], []
    for ordinal in range(index.n_entities):
        addr = store.address_of(int(index.members(ordinal)[0]))
        profile = profile_of[addr]
        if profile.startswith("pop_"):
            pop_ordinals.append(ordinal)
            labels.append(profile)
    return table, np.array(pop_ordinals, dtype=np.int64), labels


REQUEST = ClusterRequest(
    features=("num_txs_receiver", "amount_rec_average"), k=2, seed=7)


def test_recovers_planted_populations(two_population_setup):
    table, ents, truth = two_population_setup
    result = cluster(table, ents, REQUEST)
    assert result.excluded_count == 0
    by_cluster: dict[int, set[str]] = {}
    for ordinal, label in zip(result.ents, result.labels):
        by_cluster.setdefault(int(label), set()).add(truth[list(ents).index(ordinal)])
    # each cluster maps to exactly one planted profile (up to relabeling)
    assert all(len(profiles) == 1 for profiles in by_cluster.values())
    assert {p for s in by_cluster.values() for p in s} == {"pop_low", "pop_high"}


def test_seeded_determinism(two_population_setup):
    table, ents, _ = two_population_setup
    first = cluster(table, ents, REQUEST)
    for _ in range(3):
        again = cluster(table, ents, REQUEST)
        assert np.array_equal(again.labels, first.labels)
        assert again.iterations == first.iterations
        assert [s.to_json() for s in again.summaries] == \
            [s.to_json() for s in first.summaries]


def test_wcss_non_increasing(two_population_setup):
    table, ents, _ = two_population_setup
    result = cluster(table, ents, ClusterRequest(
        features=("num_txs_receiver", "amount_rec_average", "time_active"),
        k=5, seed=3))
    trace = result.wcss_trace
    assert len(trace) >= 1
    assert all(b <= a * (1 + 1e-9) + 1e-12 for a, b in zip(trace, trace[1:]))


def test_k_equals_n_singletons():
    X = np.arange(12, dtype=np.float64).reshape(6, 2)
    labels, centroids, _, trace = kmeans(X, 6, seed=1)
    assert sorted(labels) == list(range(6))
    assert trace[-1] == 0.0


def test_k_too_large(two_population_setup):
    table, ents, _ = two_population_setup
    with pytest.raises(InputError):
        cluster(table, ents, ClusterRequest(features=("num_txs_receiver",),
                                            k=len(ents) + 1, seed=0))


def test_invalid_requests():
    with pytest.raises(InputError):
        ClusterRequest(features=(), k=2)
    with pytest.raises(InputError):
        ClusterRequest(features=("num_txs_receiver",), k=1)
    with pytest.raises(InputError):
        ClusterRequest(features=("num_txs_receiver",), k=2, scaling="zscore")


def test_excluded_entities_surfaced(mixed_built):
    store, index, slices = mixed_built
    table = compute_measures(slices, None, int(store.timestamps[0]),
                             int(store.timestamps[-1]) + 1)
    ents = table.ents.astype(np.int64)
    result = cluster(table, ents, ClusterRequest(
        features=("amount_sent_average",), k=2, seed=1))
    _, defined = table.series("amount_sent", "average")
    expected_excluded = len(ents) - int(defined.sum())
    assert result.excluded_count == expected_excluded
    assert len(result.ents) + result.excluded_count == len(ents)


def test_clusters_ordered_by_descending_size(two_population_setup):
    table, ents, _ = two_population_setup
    result = cluster(table, ents, ClusterRequest(
        features=("num_txs_receiver", "amount_rec_average"), k=4, seed=11))
    sizes = [s.count for s in result.summaries]
    assert sizes == sorted(sizes, reverse=True)
    assert sum(sizes) == len(result.ents)
    assert [s.cluster_id for s in result.summaries] == list(range(4))


def test_glyph_axes_in_unit_interval(two_population_setup):
    table, ents, _ = two_population_setup
    result = cluster(table, ents, REQUEST)
    for summary in result.summaries:
        assert len(summary.axes) == 8
        assert all(0.0 <= a <= 1.0 for a in summary.axes)
        for stats in summary.stats.values():
            if stats is not None:
                lo, mean, hi = stats
                assert lo <= mean <= hi


def test_materialize_cluster_partitions_node(two_population_setup):
    table, ents, _ = two_population_setup
    tree = ClassificationTree(ents)
    result = cluster(table, ents, REQUEST)
    mid, rid = tree.materialize_cluster(0, result, 0, "active cluster")
    node = tree.node(mid)
    assert node.count == result.summaries[0].count
    assert node.cluster["cluster_id"] == 0
    assert tree.node(mid).count + tree.node(rid).count == len(ents)
    tree.verify_partition()
    # delete restores the leaf
    tree.delete_split(mid)
    assert tree.root.is_leaf

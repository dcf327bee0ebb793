"""Seeded k-means grouping of a node's entities over selected measure series.

Features are preprocessed (log10(1+x) for amount and count series, identity
for time series, then per-feature min-max scaling) before Lloyd iterations;
cluster summaries report raw, unnormalized measure values. Identical requests
produce identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InputError
from .measures import (
    GLYPH_AXES,
    MeasureTable,
    normalize_axes,
    parse_series_id,
)

SCALINGS = ("log-minmax", "minmax", "raw")
_LOG_KEYS = ("num_txs", "amount_rec", "amount_sent", "num_inputs", "num_outputs")


@dataclass(frozen=True)
class ClusterRequest:
    features: tuple[str, ...]            # series ids, e.g. "amount_rec_largest"
    k: int
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-6
    scaling: str = "log-minmax"

    def __post_init__(self):
        if not self.features:
            raise InputError("at least one feature series is required")
        for sid in self.features:
            parse_series_id(sid)
        if self.k < 2:
            raise InputError("k must be >= 2")
        if self.scaling not in SCALINGS:
            raise InputError(f"unknown scaling {self.scaling!r}")

    def to_json(self) -> dict:
        return {
            "features": list(self.features),
            "k": self.k,
            "seed": self.seed,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "scaling": self.scaling,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClusterRequest":
        try:
            return cls(
                features=tuple(obj["features"]),
                k=int(obj["k"]),
                seed=int(obj.get("seed", 0)),
                max_iter=int(obj.get("max_iter", 300)),
                tol=float(obj.get("tol", 1e-6)),
                scaling=obj.get("scaling", "log-minmax"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad cluster request: {exc}") from exc


@dataclass
class ClusterSummary:
    cluster_id: int
    count: int
    # Per glyph axis: (min, mean, max) over members' raw values, or None
    # when no member has the measure defined.
    stats: dict[str, tuple[float, float, float] | None]
    axes: list[float]                    # normalized positions, len 8

    def to_json(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "count": self.count,
            "stats": {k: (list(v) if v is not None else None) for k, v in self.stats.items()},
            "axes": self.axes,
        }


@dataclass
class ClusterResult:
    request: ClusterRequest
    ents: np.ndarray                     # included entity ordinals
    labels: np.ndarray                   # cluster id per included entity
    summaries: list[ClusterSummary]
    excluded_count: int
    iterations: int
    wcss_trace: list[float] = field(default_factory=list)

    def members(self, cluster_id: int) -> np.ndarray:
        return self.ents[self.labels == cluster_id]


def _kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(0, n)]
    dist = ((X - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = dist.sum()
        if total > 0:
            idx = rng.choice(n, p=dist / total)
        else:
            # All remaining points coincide with a centroid; deterministic pick.
            idx = int(np.argmin(dist))
        centroids[i] = X[idx]
        dist = np.minimum(dist, ((X - centroids[i]) ** 2).sum(axis=1))
    return centroids


def kmeans(X: np.ndarray, k: int, seed: int, max_iter: int = 300, tol: float = 1e-6,
           should_stop: Callable[[], bool] | None = None):
    """Lloyd's algorithm with k-means++ seeding.

    Returns (labels, centroids, iterations, wcss_trace). The within-cluster
    sum of squares is recorded after every assignment step and asserted
    non-increasing; empty clusters are re-seeded from the point farthest from
    its assigned centroid.
    """
    n = len(X)
    if k > n:
        raise InputError(f"k={k} exceeds usable entities ({n})")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_plusplus(X, k, rng)
    wcss_trace: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    iterations = 0
    for _ in range(max_iter):
        if should_stop is not None and should_stop():
            break
        iterations += 1
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        point_d2 = d2[np.arange(n), labels]
        wcss = float(point_d2.sum())
        if wcss_trace:
            assert wcss <= wcss_trace[-1] * (1 + 1e-9) + 1e-12, "WCSS increased"
        wcss_trace.append(wcss)

        new_centroids = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centroids[j] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(point_d2))
                new_centroids[j] = X[far]
                point_d2[far] = 0.0
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break
    return labels, centroids, iterations, wcss_trace


def _feature_matrix(table: MeasureTable, ents: np.ndarray, request: ClusterRequest):
    """(included ents, feature matrix) after exclusion and preprocessing."""
    pos = table.positions(ents)
    cols, defined = [], np.ones(len(ents), dtype=bool)
    for sid in request.features:
        key, variant = parse_series_id(sid)
        values, dmask = table.series(key, variant)
        cols.append(values[pos])
        defined &= dmask[pos]
    ents_in = ents[defined]
    X = np.column_stack([c[defined] for c in cols]) if len(ents_in) else np.zeros((0, len(cols)))
    if request.scaling != "raw":
        for j, sid in enumerate(request.features):
            key, _ = parse_series_id(sid)
            if request.scaling == "log-minmax" and key in _LOG_KEYS:
                X[:, j] = np.log10(1.0 + X[:, j])
            if len(X):
                lo, hi = X[:, j].min(), X[:, j].max()
                X[:, j] = (X[:, j] - lo) / (hi - lo) if hi > lo else 0.0
    return ents_in, X


def cluster(table: MeasureTable, ents: np.ndarray, request: ClusterRequest,
            should_stop: Callable[[], bool] | None = None) -> ClusterResult:
    """Cluster a node's entities; clusters are ordered by descending size.

    Entities with an undefined selected feature are excluded from clustering
    and surfaced via ``excluded_count``.
    """
    ents_in, X = _feature_matrix(table, ents, request)
    excluded = len(ents) - len(ents_in)
    if request.k > len(ents_in):
        raise InputError(f"k={request.k} exceeds usable entities ({len(ents_in)})")
    labels, _, iterations, wcss_trace = kmeans(
        X, request.k, request.seed, request.max_iter, request.tol, should_stop)

    sizes = np.bincount(labels, minlength=request.k)
    order = np.argsort(-sizes, kind="stable")
    relabel = np.empty(request.k, dtype=np.int64)
    relabel[order] = np.arange(request.k)
    labels = relabel[labels]

    node_scalars = table.glyph_scalars(table.positions(ents))
    node_positions = normalize_axes(node_scalars)
    member_pos_in_node = np.searchsorted(ents, ents_in)

    summaries = []
    for cid in range(request.k):
        members = labels == cid
        raw = node_scalars[member_pos_in_node[members]]
        norm = node_positions[member_pos_in_node[members]]
        stats: dict[str, tuple[float, float, float] | None] = {}
        axes = []
        for j, key in enumerate(GLYPH_AXES):
            col = raw[:, j]
            dmask = ~np.isnan(col)
            if dmask.any():
                stats[key] = (float(col[dmask].min()), float(col[dmask].mean()),
                              float(col[dmask].max()))
            else:
                stats[key] = None
            axes.append(float(norm[:, j].mean()) if len(norm) else 0.0)
        summaries.append(ClusterSummary(cid, int(members.sum()), stats, axes))

    return ClusterResult(request, ents_in, labels, summaries, excluded, iterations,
                         wcss_trace)

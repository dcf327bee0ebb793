"""Dynamic-query layer: measure histograms, transaction volume, range filters.

Predicates are closed intervals [lo, hi] on one measure series; either bound
may be absent (unbounded). Entities whose series value is undefined never
match a predicate — absence is not zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .measures import MeasureTable, SliceStore, SECONDS_PER_DAY, validate_series

DEFAULT_BINS = 50
LOG_AUTO_RATIO = 1e3


@dataclass(frozen=True)
class Predicate:
    """Closed-interval condition on one measure series."""

    key: str
    variant: str | None = None
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        validate_series(self.key, self.variant)
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise InputError(f"predicate lo {self.lo} > hi {self.hi}")

    def to_json(self) -> dict:
        return {"key": self.key, "variant": self.variant, "lo": self.lo, "hi": self.hi}

    @classmethod
    def from_json(cls, obj: dict) -> "Predicate":
        if not isinstance(obj, dict) or "key" not in obj:
            raise InputError("predicate must be an object with a 'key' field")
        lo, hi = obj.get("lo"), obj.get("hi")
        return cls(
            key=obj["key"],
            variant=obj.get("variant"),
            lo=None if lo is None else float(lo),
            hi=None if hi is None else float(hi),
        )


@dataclass
class Histogram:
    key: str
    variant: str | None
    edges: np.ndarray           # ascending, length n_bins + 1
    counts: np.ndarray          # length n_bins
    undefined_count: int
    scale: str                  # "linear" | "log10"

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "variant": self.variant,
            "edges": [float(e) for e in self.edges],
            "counts": [int(c) for c in self.counts],
            "undefined_count": int(self.undefined_count),
            "scale": self.scale,
        }


def _defined_values(table: MeasureTable, ents: np.ndarray, key: str, variant: str | None):
    values, defined = table.series(key, variant)
    pos = table.positions(ents)
    v, d = values[pos], defined[pos]
    return v, d


def histogram(table: MeasureTable, ents: np.ndarray, key: str,
              variant: str | None = None, bins: int = DEFAULT_BINS,
              scale: str = "auto") -> Histogram:
    """Equal-width histogram of one series over an entity set.

    Bins span [min, max] of the defined values, on a linear or log10 axis;
    values equal to max fall in the last bin. ``scale="auto"`` picks log10
    when max/min > 1e3 and all values are positive. All values identical
    degenerates to the single bin [v, v+1).
    """
    if bins < 1:
        raise InputError("bins must be >= 1")
    if scale not in ("auto", "linear", "log10"):
        raise InputError(f"unknown scale {scale!r}")
    v, d = _defined_values(table, ents, key, variant)
    v = v[d]
    undefined = int(len(ents) - len(v))
    if len(v) == 0:
        edges = np.linspace(0.0, 1.0, bins + 1)
        return Histogram(key, variant, edges, np.zeros(bins, dtype=np.int64),
                         undefined, "linear" if scale != "log10" else "log10")
    lo, hi = float(v.min()), float(v.max())
    if scale == "auto":
        scale = "log10" if lo > 0 and hi / lo > LOG_AUTO_RATIO else "linear"
    if scale == "log10" and lo <= 0:
        raise InputError("log10 scale requires all values > 0")
    if lo == hi:
        edges = np.array([lo, lo + 1.0])
        counts = np.array([len(v)], dtype=np.int64)
        return Histogram(key, variant, edges, counts, undefined, scale)
    if scale == "log10":
        edges = np.power(10.0, np.linspace(np.log10(lo), np.log10(hi), bins + 1))
        edges[0], edges[-1] = lo, hi
    else:
        edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    return Histogram(key, variant, edges, counts.astype(np.int64), undefined, scale)


def apply_filter(table: MeasureTable, ents: np.ndarray,
                 predicate: Predicate) -> tuple[np.ndarray, np.ndarray]:
    """Split an entity set into (match, remainder) by a range predicate.

    Match holds entities whose series value is defined and inside the closed
    interval; everything else (including undefined) lands in the remainder.
    The two outputs partition the input and preserve its order.
    """
    v, d = _defined_values(table, ents, predicate.key, predicate.variant)
    mask = d.copy()
    if predicate.lo is not None:
        mask &= v >= predicate.lo
    if predicate.hi is not None:
        mask &= v <= predicate.hi
    return ents[mask], ents[~mask]


def _month_floor(ts: np.ndarray) -> np.ndarray:
    return ts.astype("datetime64[s]").astype("datetime64[M]")


def tx_volume(slices: SliceStore, ents: np.ndarray | None, t0: int, t1: int,
              bucket: str = "month") -> list[tuple[int, int]]:
    """Transactions per time bucket with >= 1 participant in the entity set.

    Each transaction counts once per bucket even when several set members
    participate. Buckets cover the whole requested range; empty buckets are
    reported with count 0.
    """
    t0, t1 = int(t0), int(t1)
    if t0 >= t1:
        raise InputError(f"invalid range: {t0} >= {t1}")
    if bucket not in ("month", "day"):
        raise InputError(f"bucket must be month|day, got {bucket!r}")
    store = slices.store
    lo, hi = store.tx_range(t0, t1)
    if ents is None:
        ts = store.timestamps[lo:hi]
    else:
        chunks = []
        for e in np.unique(np.asarray(ents, dtype=np.int64)):
            txs = slices.participation(int(e))
            a = np.searchsorted(txs, lo, side="left")
            b = np.searchsorted(txs, hi, side="left")
            chunks.append(txs[a:b])
        txs = np.unique(np.concatenate(chunks)) if chunks else np.zeros(0, dtype=np.int64)
        ts = store.timestamps[txs]

    if bucket == "day":
        first = (t0 // SECONDS_PER_DAY) * SECONDS_PER_DAY
        starts = np.arange(first, t1, SECONDS_PER_DAY, dtype=np.int64)
        idx = (ts // SECONDS_PER_DAY) - (first // SECONDS_PER_DAY)
    else:
        first_month = _month_floor(np.array([t0], dtype=np.int64))[0]
        end_month = _month_floor(np.array([t1 - 1], dtype=np.int64))[0]
        months = np.arange(first_month, end_month + 1)
        starts = months.astype("datetime64[s]").astype(np.int64)
        idx = (_month_floor(ts) - first_month).astype(np.int64)

    counts = np.bincount(idx, minlength=len(starts)) if len(ts) else np.zeros(len(starts), dtype=np.int64)
    return [(int(s), int(c)) for s, c in zip(starts, counts)]

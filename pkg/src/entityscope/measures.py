"""Per-entity activity measures over arbitrary time ranges.

Eight measures are tracked per entity: transaction counts by role, first/last
activity timestamps, active-day span, and smallest/average/largest triplets
for received amount, sent amount, input count, and output count.

Role semantics: an entity is a *sender* of a transaction iff at least one
input slot belongs to it (per-tx sent amount = sum of its input slots), and a
*receiver* iff at least one output slot belongs to it (per-tx received amount
= sum of its output slots, so change back to self counts as received).
Input/output counts and first/last timestamps aggregate over every
transaction the entity participates in, in either role.

Recomputation is backed by per-(entity, UTC day) partial aggregates that form
a commutative monoid; arbitrary ranges merge whole-day partials and raw-scan
the partial boundary days.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entities import EntityIndex
from .errors import InputError, UnknownKeyError
from .ingest import TransactionStore

SECONDS_PER_DAY = 86400

# Column layout of a partial-aggregate row.
(
    COL_SENT_N, COL_SENT_MIN, COL_SENT_SUM, COL_SENT_MAX,
    COL_RECV_N, COL_RECV_MIN, COL_RECV_SUM, COL_RECV_MAX,
    COL_PART_N, COL_NIN_MIN, COL_NIN_SUM, COL_NIN_MAX,
    COL_NOUT_MIN, COL_NOUT_SUM, COL_NOUT_MAX, COL_T_MIN, COL_T_MAX,
) = range(17)
N_COLS = 17

_ADD_COLS = (COL_SENT_N, COL_SENT_SUM, COL_RECV_N, COL_RECV_SUM,
             COL_PART_N, COL_NIN_SUM, COL_NOUT_SUM)
_MIN_COLS = (COL_SENT_MIN, COL_RECV_MIN, COL_NIN_MIN, COL_NOUT_MIN, COL_T_MIN)
_MAX_COLS = (COL_SENT_MAX, COL_RECV_MAX, COL_NIN_MAX, COL_NOUT_MAX, COL_T_MAX)

_MIN_IDENT = np.iinfo(np.int64).max
_MAX_IDENT = np.iinfo(np.int64).min

# Selectable measure series. "num_txs" takes a role variant, the four
# triplet keys take a statistic variant, time keys take none.
ROLE_VARIANTS = ("sender", "receiver")
STAT_VARIANTS = ("smallest", "average", "largest")
TIME_KEYS = ("time_first", "time_last", "time_active")
STAT_KEYS = ("amount_rec", "amount_sent", "num_inputs", "num_outputs")
AMOUNT_KEYS = ("amount_rec", "amount_sent")
MEASURE_KEYS = ("num_txs",) + TIME_KEYS + STAT_KEYS

SERIES: tuple[tuple[str, str | None], ...] = (
    tuple(("num_txs", v) for v in ROLE_VARIANTS)
    + tuple((k, None) for k in TIME_KEYS)
    + tuple((k, v) for k in STAT_KEYS for v in STAT_VARIANTS)
)

# Axes of the 8-axis glyph, in Table order. The num_txs axis uses the
# role-agnostic participation count; triplet axes use the average variant.
GLYPH_AXES = ("num_txs", "time_first", "time_last", "time_active",
              "amount_rec", "amount_sent", "num_inputs", "num_outputs")


def validate_series(key: str, variant: str | None) -> None:
    if key == "num_txs":
        if variant not in ROLE_VARIANTS:
            raise UnknownKeyError(f"num_txs requires variant sender|receiver, got {variant!r}")
    elif key in TIME_KEYS:
        if variant is not None:
            raise UnknownKeyError(f"{key} takes no variant, got {variant!r}")
    elif key in STAT_KEYS:
        if variant not in STAT_VARIANTS:
            raise UnknownKeyError(
                f"{key} requires variant smallest|average|largest, got {variant!r}")
    else:
        raise UnknownKeyError(f"unknown measure key {key!r}")


def series_id(key: str, variant: str | None) -> str:
    return key if variant is None else f"{key}_{variant}"


def parse_series_id(sid: str) -> tuple[str, str | None]:
    """Split a flattened series id like ``amount_rec_largest`` into (key, variant)."""
    if sid in TIME_KEYS:
        return sid, None
    for key in ("num_txs",) + STAT_KEYS:
        if sid.startswith(key + "_"):
            variant = sid[len(key) + 1:]
            validate_series(key, variant)
            return key, variant
    raise UnknownKeyError(f"unknown measure series {sid!r}")


ALL_SERIES_IDS = tuple(series_id(k, v) for k, v in SERIES)


@dataclass(frozen=True)
class ActivityMeasures:
    """The Table of activity measures for one entity over one time range.

    ``amount_rec`` / ``amount_sent`` are (smallest, average, largest) triplets
    or None when the entity never acted in that role within the range;
    absence is never encoded as zero.
    """

    entity_id: int
    num_txs_sender: int
    num_txs_receiver: int
    num_txs_participating: int
    time_first: int
    time_last: int
    time_active_days: float
    amount_rec: tuple[int, float, int] | None
    amount_sent: tuple[int, float, int] | None
    num_inputs: tuple[int, float, int]
    num_outputs: tuple[int, float, int]

    def value(self, key: str, variant: str | None = None):
        return measure_value(self, key, variant)


def measure_value(m: ActivityMeasures, key: str, variant: str | None = None):
    """Uniform scalar accessor; returns None when the series is undefined."""
    validate_series(key, variant)
    if key == "num_txs":
        return m.num_txs_sender if variant == "sender" else m.num_txs_receiver
    if key == "time_first":
        return m.time_first
    if key == "time_last":
        return m.time_last
    if key == "time_active":
        return m.time_active_days
    triple = getattr(m, key)
    if triple is None:
        return None
    return triple[STAT_VARIANTS.index(variant)]


def _identity_rows(n: int) -> np.ndarray:
    mat = np.zeros((n, N_COLS), dtype=np.int64)
    for col in _MIN_COLS:
        mat[:, col] = _MIN_IDENT
    for col in _MAX_COLS:
        mat[:, col] = _MAX_IDENT
    return mat


def merge_partials(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Field-wise merge of two partial rows/matrices (commutative, associative)."""
    out = a.copy()
    for col in _ADD_COLS:
        out[..., col] = a[..., col] + b[..., col]
    for col in _MIN_COLS:
        out[..., col] = np.minimum(a[..., col], b[..., col])
    for col in _MAX_COLS:
        out[..., col] = np.maximum(a[..., col], b[..., col])
    return out


def identity_partial() -> np.ndarray:
    return _identity_rows(1)[0]


def _group_starts(sorted_keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(len(sorted_keys), dtype=bool)
    mask[1:] = sorted_keys[1:] != sorted_keys[:-1]
    return np.flatnonzero(mask)


def _extract_pairs(store: TransactionStore, addr_ord: np.ndarray, lo: int, hi: int):
    """Per-(tx, entity) contributions for the tx index slab [lo, hi).

    Returns sender pairs (tx, ent, sent value), receiver pairs
    (tx, ent, received value) and participation pairs (tx, ent). Entities are
    ordinals. Sender pairs are unique per tx because the input heuristic
    guarantees a single sender entity.
    """
    tx_idx = np.arange(lo, hi, dtype=np.int64)
    non_cb = tx_idx[~store.is_coinbase[lo:hi]]
    s_tx = non_cb
    if len(non_cb):
        s_ent = addr_ord[store.in_addr[store.in_start[non_cb]]].astype(np.int64)
    else:
        s_ent = np.zeros(0, dtype=np.int64)
    s_val = store.in_sum[non_cb]

    slot_lo, slot_hi = store.out_start[lo], store.out_start[hi]
    o_tx = np.repeat(tx_idx, store.n_outputs[lo:hi])
    o_ent = addr_ord[store.out_addr[slot_lo:slot_hi]].astype(np.int64)
    o_val = store.out_value[slot_lo:slot_hi]
    if len(o_tx):
        key = (o_tx << 32) | o_ent
        order = np.argsort(key, kind="stable")
        key, o_val = key[order], o_val[order]
        starts = _group_starts(key)
        r_key = key[starts]
        r_val = np.add.reduceat(o_val, starts)
        r_tx, r_ent = r_key >> 32, r_key & 0xFFFFFFFF
    else:
        r_tx = r_ent = r_val = np.zeros(0, dtype=np.int64)

    p_key = np.unique(np.concatenate([(s_tx << 32) | s_ent, (r_tx << 32) | r_ent]))
    p_tx, p_ent = p_key >> 32, p_key & 0xFFFFFFFF
    return (s_tx, s_ent, s_val), (r_tx, r_ent, r_val), (p_tx, p_ent)


def _reduce_stream(keys: np.ndarray, cols: dict[int, tuple[str, np.ndarray]]):
    """Group a stream by pre-combined key; reduce each column by its op.

    ``cols`` maps column index -> (op, values) with op in add|min|max; a
    column index mapped to ("count", None) receives group sizes.
    """
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    starts = _group_starts(keys)
    group_keys = keys[starts]
    out: dict[int, np.ndarray] = {}
    for col, (op, values) in cols.items():
        if op == "count":
            sizes = np.diff(np.append(starts, len(keys)))
            out[col] = sizes.astype(np.int64)
            continue
        values = values[order]
        if op == "add":
            out[col] = np.add.reduceat(values, starts)
        elif op == "min":
            out[col] = np.minimum.reduceat(values, starts)
        else:
            out[col] = np.maximum.reduceat(values, starts)
    return group_keys, out


def _scatter(mat: np.ndarray, row_idx: np.ndarray, cols: dict[int, np.ndarray]) -> None:
    for col, values in cols.items():
        if col in _ADD_COLS:
            mat[row_idx, col] += values
        elif col in _MIN_COLS:
            mat[row_idx, col] = np.minimum(mat[row_idx, col], values)
        else:
            mat[row_idx, col] = np.maximum(mat[row_idx, col], values)


def _partials_by_key(store, addr_ord, lo, hi, key_of_tx):
    """Partial rows grouped by (entity << 32 | key_of_tx[tx]) over a tx slab."""
    (s_tx, s_ent, s_val), (r_tx, r_ent, r_val), (p_tx, p_ent) = _extract_pairs(
        store, addr_ord, lo, hi)
    ts = store.timestamps

    s_keys, s_cols = _reduce_stream(
        (s_ent << 32) | key_of_tx(s_tx),
        {COL_SENT_N: ("count", None), COL_SENT_MIN: ("min", s_val),
         COL_SENT_SUM: ("add", s_val), COL_SENT_MAX: ("max", s_val)},
    )
    r_keys, r_cols = _reduce_stream(
        (r_ent << 32) | key_of_tx(r_tx),
        {COL_RECV_N: ("count", None), COL_RECV_MIN: ("min", r_val),
         COL_RECV_SUM: ("add", r_val), COL_RECV_MAX: ("max", r_val)},
    )
    nin = store.n_inputs[p_tx].astype(np.int64)
    nout = store.n_outputs[p_tx].astype(np.int64)
    p_keys, p_cols = _reduce_stream(
        (p_ent << 32) | key_of_tx(p_tx),
        {COL_PART_N: ("count", None),
         COL_NIN_MIN: ("min", nin), COL_NIN_SUM: ("add", nin), COL_NIN_MAX: ("max", nin),
         COL_NOUT_MIN: ("min", nout), COL_NOUT_SUM: ("add", nout), COL_NOUT_MAX: ("max", nout),
         COL_T_MIN: ("min", ts[p_tx]), COL_T_MAX: ("max", ts[p_tx])},
    )

    row_keys = np.unique(np.concatenate([s_keys, r_keys, p_keys]))
    mat = _identity_rows(len(row_keys))
    for keys, cols in ((s_keys, s_cols), (r_keys, r_cols), (p_keys, p_cols)):
        if len(keys):
            _scatter(mat, np.searchsorted(row_keys, keys), cols)
    return row_keys, mat


class SliceStore:
    """Pre-aggregated per-(entity, UTC day) partials plus participation lists.

    Rows are sorted by (entity ordinal, day); ``day_order`` is a secondary
    permutation sorted by day for whole-corpus day-range slabs. Merging all of
    an entity's rows reproduces its whole-range measures exactly.
    """

    def __init__(self, store: TransactionStore, index: EntityIndex):
        self.store = store
        self.index = index
        if store.n_transactions and int(store.timestamps[-1]) >= SECONDS_PER_DAY << 32:
            raise InputError("timestamps too large for day slicing")
        addr_ord = index.addr_ordinal
        row_keys, mat = _partials_by_key(
            store, addr_ord, 0, store.n_transactions,
            lambda tx: store.timestamps[tx] // SECONDS_PER_DAY,
        )
        self.ents = (row_keys >> 32).astype(np.int32)
        self.days = (row_keys & 0xFFFFFFFF).astype(np.int64)
        self.mat = mat
        self.day_order = np.lexsort((self.ents, self.days)).astype(np.int64)
        self.days_by_day = self.days[self.day_order]

        # Participation CSR: entity ordinal -> sorted tx indices.
        _, _, (p_tx, p_ent) = _extract_pairs(store, addr_ord, 0, store.n_transactions)
        order = np.lexsort((p_tx, p_ent))
        self.part_tx = p_tx[order].astype(np.int64)
        part_ent = p_ent[order]
        counts = np.bincount(part_ent, minlength=index.n_entities) if len(part_ent) \
            else np.zeros(index.n_entities, dtype=np.int64)
        self.part_start = np.concatenate([[0], np.cumsum(counts, dtype=np.int64)])

    @classmethod
    def from_arrays(cls, store: TransactionStore, index: EntityIndex,
                    ents, days, mat, part_tx, part_start) -> "SliceStore":
        """Rehydrate a slice store from its persisted arrays."""
        obj = cls.__new__(cls)
        obj.store = store
        obj.index = index
        obj.ents = ents
        obj.days = days
        obj.mat = mat
        obj.day_order = np.lexsort((obj.ents, obj.days)).astype(np.int64)
        obj.days_by_day = obj.days[obj.day_order]
        obj.part_tx = part_tx
        obj.part_start = part_start
        return obj

    @property
    def n_rows(self) -> int:
        return len(self.ents)

    def participation(self, ordinal: int) -> np.ndarray:
        """Sorted tx indices in which the entity participates (either role)."""
        return self.part_tx[self.part_start[ordinal]:self.part_start[ordinal + 1]]

    def _rows_day_range_all(self, d_lo: int, d_hi: int):
        lo = np.searchsorted(self.days_by_day, d_lo, side="left")
        hi = np.searchsorted(self.days_by_day, d_hi, side="left")
        rows = self.day_order[lo:hi]
        ents = self.ents[rows]
        order = np.argsort(ents, kind="stable")
        return rows[order], ents[order]

    def _rows_day_range_subset(self, entities: np.ndarray, d_lo: int, d_hi: int):
        ent_lo = np.searchsorted(self.ents, entities, side="left")
        ent_hi = np.searchsorted(self.ents, entities, side="right")
        chunks, ent_chunks = [], []
        for e, lo, hi in zip(entities, ent_lo, ent_hi):
            if lo == hi:
                continue
            span_days = self.days[lo:hi]
            a = lo + np.searchsorted(span_days, d_lo, side="left")
            b = lo + np.searchsorted(span_days, d_hi, side="left")
            if a < b:
                chunks.append(np.arange(a, b, dtype=np.int64))
                ent_chunks.append(np.full(b - a, e, dtype=np.int64))
        if not chunks:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return np.concatenate(chunks), np.concatenate(ent_chunks)

    def merge_day_range(self, entities: np.ndarray | None, d_lo: int, d_hi: int):
        """Merge day partials over [d_lo, d_hi) grouped by entity."""
        if entities is None:
            rows, ents = self._rows_day_range_all(d_lo, d_hi)
        else:
            rows, ents = self._rows_day_range_subset(entities, d_lo, d_hi)
        if len(rows) == 0:
            return np.zeros(0, dtype=np.int64), _identity_rows(0)
        starts = _group_starts(ents)
        sub = self.mat[rows]
        out = _identity_rows(len(starts))
        for col in range(N_COLS):
            if col in _ADD_COLS:
                out[:, col] = np.add.reduceat(sub[:, col], starts)
            elif col in _MIN_COLS:
                out[:, col] = np.minimum.reduceat(sub[:, col], starts)
            else:
                out[:, col] = np.maximum.reduceat(sub[:, col], starts)
        return ents[starts], out

    def window_partials(self, entities: np.ndarray | None, t0: int, t1: int):
        """Raw-scan partials for an intra-day window, grouped by entity."""
        lo, hi = self.store.tx_range(t0, t1)
        if lo >= hi:
            return np.zeros(0, dtype=np.int64), _identity_rows(0)
        keys, mat = _partials_by_key(
            self.store, self.index.addr_ordinal, lo, hi, lambda tx: 0)
        ents = keys >> 32
        if entities is not None and len(ents):
            pos = np.searchsorted(entities, ents)
            pos[pos >= len(entities)] = 0
            mask = entities[pos] == ents if len(entities) else np.zeros(len(ents), bool)
            ents, mat = ents[mask], mat[mask]
        return ents, mat


def build_slices(store: TransactionStore, index: EntityIndex, slice: str = "day") -> SliceStore:
    if slice != "day":
        raise InputError(f"unsupported slice granularity {slice!r}")
    return SliceStore(store, index)


def _merge_entity_parts(parts):
    parts = [(e, m) for e, m in parts if len(e)]
    if not parts:
        return np.zeros(0, dtype=np.int64), _identity_rows(0)
    if len(parts) == 1:
        return parts[0]
    union = parts[0][0]
    for ents, _ in parts[1:]:
        union = np.union1d(union, ents)
    mat = _identity_rows(len(union))
    for ents, part_mat in parts:
        _scatter(mat, np.searchsorted(union, ents),
                 {col: part_mat[:, col] for col in range(N_COLS)})
    return union, mat


class MeasureTable:
    """Columnar measure results: one row per entity active in the range.

    Rows are sorted by entity ordinal. Series are materialized on demand as
    float64 arrays with NaN marking undefined values (exact for counts,
    timestamps, and satoshi amounts below 2^53).
    """

    def __init__(self, index: EntityIndex, ents: np.ndarray, mat: np.ndarray,
                 t0: int, t1: int):
        self.index = index
        self.ents = ents.astype(np.int32)
        self.mat = mat
        self.t0, self.t1 = t0, t1
        self._series_cache: dict[tuple[str, str | None], tuple[np.ndarray, np.ndarray]] = {}

    def __len__(self) -> int:
        return len(self.ents)

    @property
    def entity_ids(self) -> np.ndarray:
        return self.index.entity_ids[self.ents]

    def positions(self, ordinals: np.ndarray) -> np.ndarray:
        """Row positions of the given entity ordinals (must all be present)."""
        pos = np.searchsorted(self.ents, ordinals)
        if len(ordinals) and (pos >= len(self.ents)).any():
            raise KeyError("entity not present in measure table")
        if len(ordinals) and not (self.ents[pos] == ordinals).all():
            raise KeyError("entity not present in measure table")
        return pos

    def series(self, key: str, variant: str | None = None):
        """(values float64, defined bool) arrays for one series, row-aligned."""
        validate_series(key, variant)
        cached = self._series_cache.get((key, variant))
        if cached is not None:
            return cached
        mat = self.mat
        defined = np.ones(len(self.ents), dtype=bool)
        if key == "num_txs":
            col = COL_SENT_N if variant == "sender" else COL_RECV_N
            values = mat[:, col].astype(np.float64)
        elif key == "time_first":
            values = mat[:, COL_T_MIN].astype(np.float64)
        elif key == "time_last":
            values = mat[:, COL_T_MAX].astype(np.float64)
        elif key == "time_active":
            values = (mat[:, COL_T_MAX] - mat[:, COL_T_MIN]) / SECONDS_PER_DAY
        else:
            base = {"amount_rec": (COL_RECV_N, COL_RECV_MIN, COL_RECV_SUM, COL_RECV_MAX),
                    "amount_sent": (COL_SENT_N, COL_SENT_MIN, COL_SENT_SUM, COL_SENT_MAX),
                    "num_inputs": (COL_PART_N, COL_NIN_MIN, COL_NIN_SUM, COL_NIN_MAX),
                    "num_outputs": (COL_PART_N, COL_NOUT_MIN, COL_NOUT_SUM, COL_NOUT_MAX)}[key]
            n_col, min_col, sum_col, max_col = base
            counts = mat[:, n_col]
            defined = counts > 0
            with np.errstate(divide="ignore", invalid="ignore"):
                if variant == "smallest":
                    values = mat[:, min_col].astype(np.float64)
                elif variant == "largest":
                    values = mat[:, max_col].astype(np.float64)
                else:
                    values = mat[:, sum_col] / counts
            values = np.where(defined, values, np.nan)
        result = (values, defined)
        self._series_cache[(key, variant)] = result
        return result

    def row(self, position: int) -> ActivityMeasures:
        r = self.mat[position]
        sent = recv = None
        if r[COL_SENT_N] > 0:
            sent = (int(r[COL_SENT_MIN]), r[COL_SENT_SUM] / r[COL_SENT_N], int(r[COL_SENT_MAX]))
        if r[COL_RECV_N] > 0:
            recv = (int(r[COL_RECV_MIN]), r[COL_RECV_SUM] / r[COL_RECV_N], int(r[COL_RECV_MAX]))
        part = int(r[COL_PART_N])
        return ActivityMeasures(
            entity_id=int(self.index.entity_ids[self.ents[position]]),
            num_txs_sender=int(r[COL_SENT_N]),
            num_txs_receiver=int(r[COL_RECV_N]),
            num_txs_participating=part,
            time_first=int(r[COL_T_MIN]),
            time_last=int(r[COL_T_MAX]),
            time_active_days=float((r[COL_T_MAX] - r[COL_T_MIN]) / SECONDS_PER_DAY),
            amount_rec=recv,
            amount_sent=sent,
            num_inputs=(int(r[COL_NIN_MIN]), r[COL_NIN_SUM] / part, int(r[COL_NIN_MAX])),
            num_outputs=(int(r[COL_NOUT_MIN]), r[COL_NOUT_SUM] / part, int(r[COL_NOUT_MAX])),
        )

    def row_of_entity(self, ordinal: int) -> ActivityMeasures:
        return self.row(int(self.positions(np.array([ordinal], dtype=np.int64))[0]))

    def glyph_scalars(self, positions: np.ndarray) -> np.ndarray:
        """(n, 8) per-entity scalars for the glyph axes; NaN where undefined.

        num_txs axis = participation count; triplet axes = average variant.
        """
        mat = self.mat[positions]
        part = mat[:, COL_PART_N].astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            recv = np.where(mat[:, COL_RECV_N] > 0,
                            mat[:, COL_RECV_SUM] / mat[:, COL_RECV_N], np.nan)
            sent = np.where(mat[:, COL_SENT_N] > 0,
                            mat[:, COL_SENT_SUM] / mat[:, COL_SENT_N], np.nan)
        return np.column_stack([
            part,
            mat[:, COL_T_MIN].astype(np.float64),
            mat[:, COL_T_MAX].astype(np.float64),
            (mat[:, COL_T_MAX] - mat[:, COL_T_MIN]) / SECONDS_PER_DAY,
            recv,
            sent,
            mat[:, COL_NIN_SUM] / part,
            mat[:, COL_NOUT_SUM] / part,
        ])


def normalize_axes(scalars: np.ndarray) -> np.ndarray:
    """Min-max normalize glyph scalar columns to [0, 1].

    Normalization bounds come from the defined values of the given set;
    degenerate axes (min == max) map to 0.5 and undefined cells to 0.0.
    """
    out = np.zeros_like(scalars)
    for j in range(scalars.shape[1]):
        col = scalars[:, j]
        defined = ~np.isnan(col)
        if not defined.any():
            continue
        lo, hi = col[defined].min(), col[defined].max()
        if hi > lo:
            out[defined, j] = (col[defined] - lo) / (hi - lo)
        else:
            out[defined, j] = 0.5
    return out


def compute_measures(slices: SliceStore, entities: np.ndarray | None,
                     t0: int, t1: int) -> MeasureTable:
    """Measures for all (or the given) entities over [t0, t1).

    Fully covered UTC days are answered from merged day partials; the partial
    boundary days are raw-scanned. Entities with no in-range transaction are
    absent from the result.
    """
    t0, t1 = int(t0), int(t1)
    if t0 >= t1:
        raise InputError(f"invalid range: {t0} >= {t1}")
    if entities is not None:
        entities = np.unique(np.asarray(entities, dtype=np.int64))
    d_lo = -(-t0 // SECONDS_PER_DAY)
    d_hi = t1 // SECONDS_PER_DAY
    parts = []
    if d_lo >= d_hi:
        parts.append(slices.window_partials(entities, t0, t1))
    else:
        if t0 < d_lo * SECONDS_PER_DAY:
            parts.append(slices.window_partials(entities, t0, d_lo * SECONDS_PER_DAY))
        parts.append(slices.merge_day_range(entities, d_lo, d_hi))
        if d_hi * SECONDS_PER_DAY < t1:
            parts.append(slices.window_partials(entities, d_hi * SECONDS_PER_DAY, t1))
    ents, mat = _merge_entity_parts(parts)
    return MeasureTable(slices.index, ents, mat, t0, t1)


def entity_transactions(slices: SliceStore, ordinal: int, role: str,
                        t0: int, t1: int) -> list[tuple[int, int, str]]:
    """Chronological (timestamp, amount, tx id) for one entity and role.

    Amount is the entity's per-transaction sent or received total under the
    role semantics above.
    """
    if role not in ("sender", "receiver"):
        raise InputError(f"role must be sender|receiver, got {role!r}")
    store, index = slices.store, slices.index
    txs = slices.participation(ordinal)
    lo, hi = store.tx_range(int(t0), int(t1))
    txs = txs[(txs >= lo) & (txs < hi)]
    addr_ord = index.addr_ordinal
    out = []
    for tx in txs:
        tx = int(tx)
        if role == "sender":
            a, b = store.in_start[tx], store.in_start[tx + 1]
            slots_addr, slots_val = store.in_addr[a:b], store.in_value[a:b]
        else:
            a, b = store.out_start[tx], store.out_start[tx + 1]
            slots_addr, slots_val = store.out_addr[a:b], store.out_value[a:b]
        if len(slots_addr) == 0:
            continue
        mask = addr_ord[slots_addr] == ordinal
        if mask.any():
            out.append((int(store.timestamps[tx]), int(slots_val[mask].sum()),
                        store.tx_id_of(tx)))
    return out

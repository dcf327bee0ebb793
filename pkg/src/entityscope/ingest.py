"""Transaction ingestion: JSONL wire format, tag CSV import, and the columnar store.

Wire format (one JSON object per line):
    {"txid": <64-hex>, "time": <unix seconds>,
     "vin":  [{"addr": str, "value": satoshi int}, ...],
     "vout": [{"addr": str, "value": satoshi int}, ...]}

A coinbase transaction is encoded as an empty ``vin``. Amounts are integer
satoshis throughout (1 BTC = 10^8 satoshis).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import DuplicateTxError, InputError, ParseError, ValidationError

SATOSHI_PER_BTC = 10**8

ROLE_INPUT = 0
ROLE_OUTPUT = 1

TAG_CATEGORIES = ("exchange", "wallet", "pool", "payment", "gambling", "other")

_TXID_RE = re.compile(r"^[0-9a-f]{64}$")


def btc_str(satoshi: int) -> str:
    """Render an integer satoshi amount as a BTC decimal string with 8 places."""
    sign = "-" if satoshi < 0 else ""
    satoshi = abs(int(satoshi))
    return f"{sign}{satoshi // SATOSHI_PER_BTC}.{satoshi % SATOSHI_PER_BTC:08d}"


@dataclass(frozen=True)
class Transaction:
    """One ledger transaction in slot form (used for single-record access)."""

    tx_id: str
    timestamp: int
    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int], ...]

    @property
    def is_coinbase(self) -> bool:
        return not self.inputs

    @property
    def fee(self) -> int:
        if self.is_coinbase:
            return 0
        return sum(v for _, v in self.inputs) - sum(v for _, v in self.outputs)

    def to_record(self) -> dict:
        return {
            "txid": self.tx_id,
            "time": self.timestamp,
            "vin": [{"addr": a, "value": v} for a, v in self.inputs],
            "vout": [{"addr": a, "value": v} for a, v in self.outputs],
        }


def _slot_list(raw, line_no: int, field: str) -> list[tuple[str, int]]:
    if not isinstance(raw, list):
        raise ParseError(line_no, f"{field} must be an array")
    slots = []
    for slot in raw:
        if not isinstance(slot, dict) or "addr" not in slot or "value" not in slot:
            raise ParseError(line_no, f"{field} slot must be {{addr, value}}")
        addr, value = slot["addr"], slot["value"]
        if not isinstance(addr, str) or not addr:
            raise ParseError(line_no, f"{field} addr must be a non-empty string")
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError(line_no, f"{field} value must be an integer")
        if value < 0:
            raise ValidationError(line_no, f"negative amount {value} in {field}")
        slots.append((addr, value))
    return slots


def _validate_record(rec: dict, line_no: int) -> tuple[str, int, list, list]:
    if not isinstance(rec, dict):
        raise ParseError(line_no, "record must be a JSON object")
    for key in ("txid", "time", "vin", "vout"):
        if key not in rec:
            raise ParseError(line_no, f"missing field {key!r}")
    tx_id = rec["txid"]
    if not isinstance(tx_id, str) or not _TXID_RE.match(tx_id):
        raise ParseError(line_no, "txid must be a 64-char lowercase hex string")
    ts = rec["time"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise ParseError(line_no, "time must be an integer")
    if ts < 0:
        raise ValidationError(line_no, "time must be non-negative")
    vin = _slot_list(rec["vin"], line_no, "vin")
    vout = _slot_list(rec["vout"], line_no, "vout")
    if not vout:
        raise ValidationError(line_no, "transaction must have at least one output")
    if vin:
        in_sum = sum(v for _, v in vin)
        out_sum = sum(v for _, v in vout)
        if in_sum < out_sum:
            raise ValidationError(
                line_no, f"inputs ({in_sum}) are less than outputs ({out_sum})"
            )
    return tx_id, ts, vin, vout


class TransactionStore:
    """Immutable columnar snapshot of a transaction corpus.

    Transactions are sorted by (timestamp, tx_id); addresses are interned to
    dense integer ids in order of first appearance over the sorted corpus
    (inputs before outputs within a transaction). Input/output slots are held
    in CSR layout, and per-address posting lists record (tx index, role).
    """

    def __init__(self, records: list[tuple[str, int, list, list]]):
        records.sort(key=lambda r: (r[1], r[0]))
        n = len(records)
        self.tx_ids = np.array([r[0] for r in records], dtype="S64")
        self.timestamps = np.array([r[1] for r in records], dtype=np.int64)

        addr_ids: dict[str, int] = {}
        in_addr, in_value, in_counts = [], [], np.zeros(n, dtype=np.int32)
        out_addr, out_value, out_counts = [], [], np.zeros(n, dtype=np.int32)
        for i, (_, _, vin, vout) in enumerate(records):
            in_counts[i] = len(vin)
            out_counts[i] = len(vout)
            for addr, value in vin:
                aid = addr_ids.setdefault(addr, len(addr_ids))
                in_addr.append(aid)
                in_value.append(value)
            for addr, value in vout:
                aid = addr_ids.setdefault(addr, len(addr_ids))
                out_addr.append(aid)
                out_value.append(value)

        self.addr_ids = addr_ids
        self.addresses = np.array(list(addr_ids), dtype="S") if addr_ids else np.array([], dtype="S1")
        self.in_start = np.concatenate([[0], np.cumsum(in_counts, dtype=np.int64)])
        self.out_start = np.concatenate([[0], np.cumsum(out_counts, dtype=np.int64)])
        self.in_addr = np.array(in_addr, dtype=np.int32)
        self.in_value = np.array(in_value, dtype=np.int64)
        self.out_addr = np.array(out_addr, dtype=np.int32)
        self.out_value = np.array(out_value, dtype=np.int64)
        self._derive()

    @classmethod
    def from_arrays(cls, tx_ids, timestamps, in_start, in_addr, in_value,
                    out_start, out_addr, out_value, addresses) -> "TransactionStore":
        """Rehydrate a store from its persisted primary arrays."""
        obj = cls.__new__(cls)
        obj.tx_ids = tx_ids
        obj.timestamps = timestamps
        obj.in_start = in_start
        obj.in_addr = in_addr
        obj.in_value = in_value
        obj.out_start = out_start
        obj.out_addr = out_addr
        obj.out_value = out_value
        obj.addresses = addresses
        obj.addr_ids = {a.decode(): i for i, a in enumerate(addresses)}
        obj._derive()
        return obj

    def _derive(self) -> None:
        self.n_inputs = np.diff(self.in_start).astype(np.int32)
        self.n_outputs = np.diff(self.out_start).astype(np.int32)
        self.is_coinbase = self.n_inputs == 0
        self.in_sum = self._csr_sums(self.in_start, self.in_value)
        self.out_sum = self._csr_sums(self.out_start, self.out_value)
        self._build_postings()
        self._content_hash: str | None = None

    @staticmethod
    def _csr_sums(start: np.ndarray, values: np.ndarray) -> np.ndarray:
        n = len(start) - 1
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        sums = np.zeros(n, dtype=np.int64)
        nonempty = np.flatnonzero(np.diff(start) > 0)
        if len(nonempty):
            sums[nonempty] = np.add.reduceat(values, start[nonempty])
        return sums

    def _build_postings(self) -> None:
        n = self.n_transactions
        in_tx = np.repeat(np.arange(n, dtype=np.int32), self.n_inputs)
        out_tx = np.repeat(np.arange(n, dtype=np.int32), self.n_outputs)
        addr = np.concatenate([self.in_addr, self.out_addr])
        tx = np.concatenate([in_tx, out_tx])
        role = np.concatenate(
            [
                np.full(len(in_tx), ROLE_INPUT, dtype=np.uint8),
                np.full(len(out_tx), ROLE_OUTPUT, dtype=np.uint8),
            ]
        )
        if len(addr):
            order = np.lexsort((role, tx, addr))
            addr, tx, role = addr[order], tx[order], role[order]
            # Drop duplicate (addr, tx, role) triples: an address occupying
            # several slots of one transaction yields a single posting.
            keep = np.ones(len(addr), dtype=bool)
            keep[1:] = (
                (addr[1:] != addr[:-1]) | (tx[1:] != tx[:-1]) | (role[1:] != role[:-1])
            )
            addr, tx, role = addr[keep], tx[keep], role[keep]
        self.post_tx = tx
        self.post_role = role
        self.post_start = np.concatenate(
            [[0], np.cumsum(np.bincount(addr, minlength=self.n_addresses), dtype=np.int64)]
        )

    @property
    def n_transactions(self) -> int:
        return len(self.timestamps)

    @property
    def n_addresses(self) -> int:
        return len(self.addr_ids)

    def address_of(self, addr_id: int) -> str:
        return self.addresses[addr_id].decode()

    def tx_id_of(self, tx_index: int) -> str:
        return self.tx_ids[tx_index].decode()

    def postings(self, addr_id: int) -> tuple[np.ndarray, np.ndarray]:
        """(tx indices, roles) for one address, sorted by tx index."""
        lo, hi = self.post_start[addr_id], self.post_start[addr_id + 1]
        return self.post_tx[lo:hi], self.post_role[lo:hi]

    def transaction(self, tx_index: int) -> Transaction:
        ilo, ihi = self.in_start[tx_index], self.in_start[tx_index + 1]
        olo, ohi = self.out_start[tx_index], self.out_start[tx_index + 1]
        return Transaction(
            tx_id=self.tx_id_of(tx_index),
            timestamp=int(self.timestamps[tx_index]),
            inputs=tuple(
                (self.address_of(a), int(v))
                for a, v in zip(self.in_addr[ilo:ihi], self.in_value[ilo:ihi])
            ),
            outputs=tuple(
                (self.address_of(a), int(v))
                for a, v in zip(self.out_addr[olo:ohi], self.out_value[olo:ohi])
            ),
        )

    def iter_transactions(self) -> Iterator[Transaction]:
        return (self.transaction(i) for i in range(self.n_transactions))

    def tx_range(self, t0: int, t1: int) -> tuple[int, int]:
        """Half-open [lo, hi) slice of tx indices with t0 <= timestamp < t1."""
        lo = int(np.searchsorted(self.timestamps, t0, side="left"))
        hi = int(np.searchsorted(self.timestamps, t1, side="left"))
        return lo, hi

    def to_jsonl(self) -> Iterator[str]:
        """Canonical JSONL serialization (sorted order, compact separators)."""
        for tx in self.iter_transactions():
            yield json.dumps(tx.to_record(), separators=(",", ":"))

    def content_hash(self) -> str:
        """sha256 over the canonical JSONL; doubles as the corpus id."""
        if self._content_hash is None:
            h = hashlib.sha256()
            for line in self.to_jsonl():
                h.update(line.encode())
                h.update(b"\n")
            self._content_hash = h.hexdigest()
        return self._content_hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransactionStore):
            return NotImplemented
        return (
            np.array_equal(self.tx_ids, other.tx_ids)
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.in_start, other.in_start)
            and np.array_equal(self.in_addr, other.in_addr)
            and np.array_equal(self.in_value, other.in_value)
            and np.array_equal(self.out_start, other.out_start)
            and np.array_equal(self.out_addr, other.out_addr)
            and np.array_equal(self.out_value, other.out_value)
            and np.array_equal(self.addresses, other.addresses)
        )


def build_store(records: Iterable[dict]) -> TransactionStore:
    """Validate already-decoded record dicts and build a store.

    Record numbering starts at 1 and is reported in errors just like line
    numbers in :func:`parse_transactions`.
    """
    seen: set[str] = set()
    validated = []
    for line_no, rec in enumerate(records, start=1):
        tx_id, ts, vin, vout = _validate_record(rec, line_no)
        if tx_id in seen:
            raise DuplicateTxError(line_no, tx_id)
        seen.add(tx_id)
        validated.append((tx_id, ts, vin, vout))
    return TransactionStore(validated)


def parse_transactions(source) -> TransactionStore:
    """Parse the JSONL wire format into a TransactionStore.

    ``source`` may be a path, an open text file, or an iterable of lines.
    Blank lines are ignored. Raises ParseError / ValidationError /
    DuplicateTxError with the offending line number.
    """

    def decode(lines):
        for line_no, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            tx_id, ts, vin, vout = _validate_record(rec, line_no)
            if tx_id in seen:
                raise DuplicateTxError(line_no, tx_id)
            seen.add(tx_id)
            yield (tx_id, ts, vin, vout)

    seen: set[str] = set()
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return TransactionStore(list(decode(fh)))
    return TransactionStore(list(decode(source)))


@dataclass(frozen=True)
class Tag:
    label: str
    category: str


class TagTable:
    """Known-address tags keyed by address string.

    ``duplicate_warnings`` counts rows dropped by the first-occurrence-wins
    rule. ``resolve`` re-keys by a store's dense address ids, silently
    skipping addresses not present in the corpus.
    """

    def __init__(self, entries: dict[str, Tag], duplicate_warnings: int = 0):
        self.entries = entries
        self.duplicate_warnings = duplicate_warnings

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, address: str) -> Tag | None:
        return self.entries.get(address)

    def resolve(self, store: TransactionStore) -> dict[int, Tag]:
        out = {}
        for address, tag in self.entries.items():
            aid = store.addr_ids.get(address)
            if aid is not None:
                out[aid] = tag
        return out


def import_tags(source) -> TagTable:
    """Import a tag CSV with header ``address,label,category``.

    Blank category maps to "other"; a category outside the known set is a
    validation error. Duplicate addresses keep the first row and bump the
    warning counter.
    """
    import csv

    def read(fh) -> TagTable:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty tag file (missing header)") from None
        if [h.strip() for h in header[:3]] != ["address", "label", "category"]:
            raise ParseError(1, "tag CSV header must be address,label,category")
        entries: dict[str, Tag] = {}
        warnings = 0
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 3:
                raise ParseError(line_no, "expected 3 columns (address,label,category)")
            address, label, category = row[0].strip(), row[1].strip(), row[2].strip()
            if not address:
                raise ValidationError(line_no, "empty address")
            if not label:
                raise ValidationError(line_no, "empty label")
            if not category:
                category = "other"
            if category not in TAG_CATEGORIES:
                raise ValidationError(line_no, f"unknown category {category!r}")
            if address in entries:
                warnings += 1
                continue
            entries[address] = Tag(label, category)
        return TagTable(entries, warnings)

    if isinstance(source, (str, Path)):
        try:
            fh = open(source, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise InputError(f"cannot read tag file {source}: {exc}") from exc
        with fh:
            return read(fh)
    return read(source)

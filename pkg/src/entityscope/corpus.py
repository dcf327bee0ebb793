"""Corpus bundle: immutable store + entity index + slice store, on disk.

A corpus directory holds versioned numpy archives plus ``manifest.json``.
The manifest carries a format magic and version (incompatible corpora fail
fast), the corpus id (content hash of the canonical transaction JSONL, so
re-ingesting the same input reproduces the same id), record counts, build
timestamps, and a sha256 per referenced file, verified on load.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .entities import EntityIndex, attach_tags, build_entities
from .errors import InputError, NotFoundError
from .ingest import Tag, TagTable, TransactionStore, parse_transactions
from .measures import SliceStore, build_slices

MANIFEST_FORMAT = "entityscope-corpus"
MANIFEST_VERSION = 1

STORE_FILE = "store.npz"
ENTITIES_FILE = "entities.npz"
SLICES_FILE = "slices.npz"
TAGS_FILE = "tags.json"
MANIFEST_FILE = "manifest.json"


@dataclass
class CorpusManifest:
    corpus_id: str
    n_transactions: int
    n_addresses: int
    n_entities: int
    built_at: str
    files: dict[str, str]            # file name -> sha256
    format: str = MANIFEST_FORMAT
    version: int = MANIFEST_VERSION

    def to_json(self) -> dict:
        return {
            "format": self.format,
            "version": self.version,
            "corpus_id": self.corpus_id,
            "n_transactions": self.n_transactions,
            "n_addresses": self.n_addresses,
            "n_entities": self.n_entities,
            "built_at": self.built_at,
            "files": self.files,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusManifest":
        if obj.get("format") != MANIFEST_FORMAT:
            raise InputError(f"not an entityscope corpus (format {obj.get('format')!r})")
        if obj.get("version") != MANIFEST_VERSION:
            raise InputError(f"unsupported corpus version {obj.get('version')!r}")
        try:
            return cls(
                corpus_id=obj["corpus_id"],
                n_transactions=int(obj["n_transactions"]),
                n_addresses=int(obj["n_addresses"]),
                n_entities=int(obj["n_entities"]),
                built_at=obj["built_at"],
                files=dict(obj["files"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed corpus manifest: {exc}") from exc


@dataclass
class Corpus:
    """Everything the analytics layer needs, built once and then read-only."""

    store: TransactionStore
    index: EntityIndex
    slices: SliceStore
    tags: TagTable | None = None
    corpus_id: str = field(default="")

    def __post_init__(self):
        if not self.corpus_id:
            self.corpus_id = self.store.content_hash()

    @classmethod
    def build(cls, store: TransactionStore, tags: TagTable | None = None) -> "Corpus":
        index = build_entities(store)
        if tags is not None:
            index = attach_tags(index, tags, store)
        slices = build_slices(store, index)
        return cls(store, index, slices, tags)

    @classmethod
    def from_jsonl(cls, path, tags: TagTable | None = None) -> "Corpus":
        return cls.build(parse_transactions(path), tags)

    def with_tags(self, tags: TagTable) -> "Corpus":
        index = attach_tags(self.index, tags, self.store)
        slices = SliceStore.from_arrays(
            self.store, index, self.slices.ents, self.slices.days, self.slices.mat,
            self.slices.part_tx, self.slices.part_start)
        return Corpus(self.store, index, slices, tags, self.corpus_id)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_corpus(corpus: Corpus, directory) -> CorpusManifest:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    store, index, slices = corpus.store, corpus.index, corpus.slices

    np.savez(directory / STORE_FILE,
             tx_ids=store.tx_ids, timestamps=store.timestamps,
             in_start=store.in_start, in_addr=store.in_addr, in_value=store.in_value,
             out_start=store.out_start, out_addr=store.out_addr,
             out_value=store.out_value, addresses=store.addresses)
    np.savez(directory / ENTITIES_FILE,
             addr_ordinal=index.addr_ordinal, entity_ids=index.entity_ids,
             member_start=index.member_start, member_addr=index.member_addr)
    np.savez(directory / SLICES_FILE,
             ents=slices.ents, days=slices.days, mat=slices.mat,
             part_tx=slices.part_tx, part_start=slices.part_start)
    files = [STORE_FILE, ENTITIES_FILE, SLICES_FILE]
    if corpus.tags is not None:
        tag_obj = {
            "duplicate_warnings": corpus.tags.duplicate_warnings,
            "entries": {a: [t.label, t.category] for a, t in corpus.tags.entries.items()},
        }
        (directory / TAGS_FILE).write_text(json.dumps(tag_obj, indent=1))
        files.append(TAGS_FILE)

    manifest = CorpusManifest(
        corpus_id=corpus.corpus_id,
        n_transactions=store.n_transactions,
        n_addresses=store.n_addresses,
        n_entities=index.n_entities,
        built_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        files={name: _sha256_file(directory / name) for name in files},
    )
    (directory / MANIFEST_FILE).write_text(json.dumps(manifest.to_json(), indent=1))
    return manifest


def load_manifest(directory) -> CorpusManifest:
    path = Path(directory) / MANIFEST_FILE
    if not path.exists():
        raise NotFoundError(f"no corpus manifest at {path}")
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"corrupt corpus manifest: {exc.msg}") from exc
    return CorpusManifest.from_json(obj)


def load_corpus(directory) -> Corpus:
    directory = Path(directory)
    manifest = load_manifest(directory)
    for name, digest in manifest.files.items():
        path = directory / name
        if not path.exists():
            raise InputError(f"corpus file missing: {name}")
        if _sha256_file(path) != digest:
            raise InputError(f"corpus file hash mismatch: {name}")

    with np.load(directory / STORE_FILE) as z:
        store = TransactionStore.from_arrays(
            z["tx_ids"], z["timestamps"], z["in_start"], z["in_addr"], z["in_value"],
            z["out_start"], z["out_addr"], z["out_value"], z["addresses"])
    with np.load(directory / ENTITIES_FILE) as z:
        index = EntityIndex(z["addr_ordinal"], z["entity_ids"],
                            z["member_start"], z["member_addr"])
    tags = None
    if TAGS_FILE in manifest.files:
        obj = json.loads((directory / TAGS_FILE).read_text())
        tags = TagTable({a: Tag(v[0], v[1]) for a, v in obj["entries"].items()},
                        int(obj.get("duplicate_warnings", 0)))
        index = attach_tags(index, tags, store)
    with np.load(directory / SLICES_FILE) as z:
        slices = SliceStore.from_arrays(store, index, z["ents"], z["days"], z["mat"],
                                        z["part_tx"], z["part_start"])
    return Corpus(store, index, slices, tags, manifest.corpus_id)

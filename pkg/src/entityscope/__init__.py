"""Entity-centered analytics engine for Bitcoin-style transaction ledgers."""

from .clustering import ClusterRequest, ClusterResult, ClusterSummary, cluster, kmeans
from .corpus import Corpus, CorpusManifest, load_corpus, save_corpus
from .entities import EntityIndex, attach_tags, build_entities, entity_of
from .errors import (
    ConflictError,
    DuplicateTxError,
    EntityScopeError,
    InputError,
    NotFoundError,
    ParseError,
    UnknownKeyError,
    ValidationError,
)
from .filters import Histogram, Predicate, apply_filter, histogram, tx_volume
from .ingest import (
    SATOSHI_PER_BTC,
    Tag,
    TagTable,
    Transaction,
    TransactionStore,
    btc_str,
    build_store,
    import_tags,
    parse_transactions,
)
from .measures import (
    ALL_SERIES_IDS,
    ActivityMeasures,
    MeasureTable,
    SliceStore,
    build_slices,
    compute_measures,
    entity_transactions,
    measure_value,
)
from .session import Session, SessionManager
from .synth import GeneratorConfig, PopulationSpec, SyntheticCorpus, generate, write_corpus
from .tree import ClassificationTree, TreeDocument, replay_document

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

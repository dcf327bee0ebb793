"""Deterministic synthetic ledger corpora with planted, known ground truth.

The generator plants entity profiles (one-timers, coinbase miners, exchange-
like high-degree hubs, custom populations) and emits wire-format transaction
records plus a ground-truth sidecar mapping every address to its entity and
profile. Output is byte-identical for a fixed config.

Planted guarantees used by the test oracles:
  - one-timers receive exactly one transaction and never act again;
  - every other payment receiver is planned for >= 2 receiving transactions;
  - only miners ever participate in zero-input (coinbase) transactions;
  - miners never send, so their first/last activity stays inside the window
    planned for their class relative to the event date;
  - a sending entity co-spends all of its addresses in its first send, so the
    ground-truth partition equals the input-heuristic closure.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .errors import InputError
from .ingest import SATOSHI_PER_BTC

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class PopulationSpec:
    """A planted population with controlled receive activity and amounts."""

    name: str
    count: int
    receives: tuple[int, int]
    amount_sat: tuple[int, int]

    @classmethod
    def from_json(cls, obj: dict) -> "PopulationSpec":
        return cls(
            name=str(obj["name"]),
            count=int(obj["count"]),
            receives=(int(obj["receives"][0]), int(obj["receives"][1])),
            amount_sat=(int(obj["amount_sat"][0]), int(obj["amount_sat"][1])),
        )


@dataclass
class GeneratorConfig:
    seed: int = 0
    n_entities: int = 100
    start_time: int = 1293840000          # 2011-01-01T00:00:00Z
    duration_days: int = 120
    one_timer_fraction: float = 0.0
    n_miners: int = 0
    n_exchanges: int = 0
    event_time: int | None = None         # splits miner classes before/after
    miner_before_fraction: float = 0.0    # miners active only before the event
    miner_after_fraction: float = 0.0     # miners active only after the event
    regular_receives: tuple[int, int] = (2, 8)
    regular_amount_sat: tuple[int, int] = (10_000, 2 * SATOSHI_PER_BTC)
    exchange_receives: tuple[int, int] = (150, 250)
    exchange_amount_sat: tuple[int, int] = (100_000, 50 * SATOSHI_PER_BTC)
    max_addresses: int = 3
    exchange_addresses: int = 5
    batch_fraction: float = 0.25          # batched multi-receiver payouts
    change_probability: float = 0.7
    fee_max: int = 50_000
    coinbase_reward: int = 50 * SATOSHI_PER_BTC
    coinbase_reward_after_event: int | None = None
    coinbases_per_miner: tuple[int, int] = (2, 4)
    exchange_label: str = "MtGox"
    exchange_sender_share: float = 0.5    # share of payments sent by exchanges
    populations: tuple[PopulationSpec, ...] = ()

    @property
    def end_time(self) -> int:
        return self.start_time + self.duration_days * SECONDS_PER_DAY

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratorConfig":
        if not isinstance(obj, dict):
            raise InputError("generator config must be a JSON object")
        kwargs = dict(obj)
        try:
            if "populations" in kwargs:
                kwargs["populations"] = tuple(
                    PopulationSpec.from_json(p) for p in kwargs["populations"])
            for key in ("regular_receives", "regular_amount_sat", "exchange_receives",
                        "exchange_amount_sat", "coinbases_per_miner"):
                if key in kwargs:
                    kwargs[key] = (int(kwargs[key][0]), int(kwargs[key][1]))
            return cls(**kwargs)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad generator config: {exc}") from exc


@dataclass
class _Entity:
    index: int
    profile: str
    addresses: list[str]
    has_sent: bool = False

    @property
    def gt_id(self) -> str:
        return f"e{self.index:06d}"


@dataclass
class SyntheticCorpus:
    config: GeneratorConfig
    records: list[dict]
    truth: list[dict]                 # {"addr", "entity_gt", "profile"}
    tags: list[tuple[str, str, str]]  # (address, label, category)
    entities: list[_Entity] = field(repr=False, default_factory=list)

    @property
    def n_transactions(self) -> int:
        return len(self.records)

    def gt_partition(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for row in self.truth:
            out.setdefault(row["entity_gt"], set()).add(row["addr"])
        return out

    def entities_by_profile(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for ent in self.entities:
            out.setdefault(ent.profile, []).append(ent.gt_id)
        return out

    def jsonl_lines(self) -> list[str]:
        return [json.dumps(r, separators=(",", ":")) for r in self.records]

    def truth_lines(self) -> list[str]:
        return [json.dumps(r, separators=(",", ":")) for r in self.truth]


def _validate(cfg: GeneratorConfig) -> dict[str, int]:
    if cfg.n_entities < 1:
        raise InputError("n_entities must be >= 1")
    if not 0.0 <= cfg.one_timer_fraction <= 1.0:
        raise InputError("one_timer_fraction must be in [0, 1]")
    if cfg.duration_days < 1:
        raise InputError("duration_days must be >= 1")
    n_one = round(cfg.one_timer_fraction * cfg.n_entities)
    n_pop = sum(p.count for p in cfg.populations)
    fixed = n_one + cfg.n_miners + cfg.n_exchanges + n_pop
    if fixed > cfg.n_entities:
        raise InputError(
            f"planted profiles need {fixed} entities but n_entities={cfg.n_entities}")
    if cfg.n_miners and (cfg.miner_before_fraction or cfg.miner_after_fraction):
        if cfg.event_time is None:
            raise InputError("miner class fractions require event_time")
        if not cfg.start_time < cfg.event_time < cfg.end_time:
            raise InputError("event_time must fall inside the corpus window")
        n_before = round(cfg.miner_before_fraction * cfg.n_miners)
        n_after = round(cfg.miner_after_fraction * cfg.n_miners)
        if n_before + n_after > cfg.n_miners:
            raise InputError("miner class fractions exceed 1")
    n_regular = cfg.n_entities - fixed
    needs_funder = n_one + n_pop + n_regular + cfg.n_exchanges > 0
    if needs_funder and n_regular + cfg.n_exchanges == 0:
        raise InputError("payment receivers planted but no sender-capable entities")
    return {"one_timer": n_one, "regular": n_regular}


def _txid(seed: int, counter: int) -> str:
    return hashlib.sha256(f"txgen:{seed}:{counter}".encode()).hexdigest()


def _split_amount(rng: random.Random, total: int, slots: int) -> list[int]:
    if slots <= 1 or total < slots:
        return [total]
    values = []
    remaining = total
    for i in range(slots - 1):
        left = slots - i - 1
        values.append(rng.randint(1, remaining - left))
        remaining -= values[-1]
    values.append(remaining)
    return values


def generate(cfg: GeneratorConfig) -> SyntheticCorpus:
    """Build the full synthetic corpus for one config (deterministic)."""
    counts = _validate(cfg)
    rng = random.Random(cfg.seed)
    w0, w1 = cfg.start_time, cfg.end_time

    entities: list[_Entity] = []

    def add_entity(profile: str, n_addr: int) -> _Entity:
        idx = len(entities)
        ent = _Entity(idx, profile, [f"a{idx:06d}n{j}" for j in range(n_addr)])
        entities.append(ent)
        return ent

    one_timers = [add_entity("one_timer", 1) for _ in range(counts["one_timer"])]

    n_before = round(cfg.miner_before_fraction * cfg.n_miners)
    n_after = round(cfg.miner_after_fraction * cfg.n_miners)
    n_span = cfg.n_miners - n_before - n_after
    miners = ([add_entity("miner_before", 1) for _ in range(n_before)]
              + [add_entity("miner_after", 1) for _ in range(n_after)]
              + [add_entity("miner_spanning", 1) for _ in range(n_span)])

    exchanges = [add_entity("exchange", cfg.exchange_addresses)
                 for _ in range(cfg.n_exchanges)]
    pop_entities: list[tuple[PopulationSpec, _Entity]] = []
    for pop in cfg.populations:
        for _ in range(pop.count):
            pop_entities.append((pop, add_entity(pop.name, 1)))
    regulars = [add_entity("regular", rng.randint(1, cfg.max_addresses))
                for _ in range(counts["regular"])]

    # Planned receive events: (time, entity, amount). Every non-one-timer
    # payment receiver is planned for >= 2 receiving transactions.
    receive_events: list[tuple[int, _Entity, int]] = []

    def plan_receives(ent, n, amount_range):
        for _ in range(n):
            receive_events.append((
                rng.randint(w0, w1 - 1), ent, rng.randint(*amount_range)))

    for ent in one_timers:
        plan_receives(ent, 1, cfg.regular_amount_sat)
    for ent in regulars:
        plan_receives(ent, rng.randint(*cfg.regular_receives), cfg.regular_amount_sat)
    for ent in exchanges:
        plan_receives(ent, rng.randint(*cfg.exchange_receives), cfg.exchange_amount_sat)
    for pop, ent in pop_entities:
        plan_receives(ent, rng.randint(*pop.receives), pop.amount_sat)

    # Coinbase events per miner, placed inside the window of its class.
    coinbase_events: list[tuple[int, _Entity]] = []
    for ent in miners:
        k = rng.randint(*cfg.coinbases_per_miner)
        if ent.profile == "miner_before":
            windows = [(w0, cfg.event_time)] * k
        elif ent.profile == "miner_after":
            windows = [(cfg.event_time, w1)] * k
        elif cfg.event_time is not None:
            half = [(w0, cfg.event_time), (cfg.event_time, w1)]
            windows = half + [rng.choice(half) for _ in range(k - 2)]
        else:
            windows = [(w0, w1)] * k
        for a, b in windows:
            coinbase_events.append((rng.randint(a, b - 1), ent))

    funders = regulars + exchanges
    exchange_share = cfg.exchange_sender_share if exchanges and regulars else (
        1.0 if exchanges else 0.0)

    def pick_sender() -> _Entity:
        if exchanges and (not regulars or rng.random() < exchange_share):
            return rng.choice(exchanges)
        return rng.choice(regulars)

    records: list[tuple[int, str, dict]] = []
    counter = 0

    def emit(time: int, vin: list, vout: list):
        nonlocal counter
        tid = _txid(cfg.seed, counter)
        counter += 1
        records.append((time, tid, {
            "txid": tid, "time": time,
            "vin": vin, "vout": vout,
        }))

    for time, miner in coinbase_events:
        reward = cfg.coinbase_reward
        if (cfg.coinbase_reward_after_event is not None
                and cfg.event_time is not None and time >= cfg.event_time):
            reward = cfg.coinbase_reward_after_event
        emit(time, [], [{"addr": miner.addresses[0], "value": reward}])

    # Payments: walk receive events in time order, occasionally batching a
    # few events with distinct receivers into one payout transaction.
    receive_events.sort(key=lambda e: e[0])
    i = 0
    while i < len(receive_events):
        batch = [receive_events[i]]
        i += 1
        if rng.random() < cfg.batch_fraction:
            want = rng.randint(1, 2)
            while want and i < len(receive_events):
                if any(receive_events[i][1] is e for _, e, _ in batch):
                    break
                batch.append(receive_events[i])
                i += 1
                want -= 1
        time = batch[0][0]
        sender = pick_sender()
        while any(r is sender for _, r, _ in batch) and len(funders) > 1:
            sender = pick_sender()
        vout = [{"addr": r.addresses[rng.randrange(len(r.addresses))], "value": amount}
                for _, r, amount in batch]
        out_total = sum(s["value"] for s in vout)
        change = rng.randint(1, max(out_total // 2, 1)) \
            if rng.random() < cfg.change_probability else 0
        if change:
            vout.append({"addr": rng.choice(sender.addresses), "value": change})
        if sender.has_sent:
            n_slots = rng.randint(1, len(sender.addresses))
            in_addrs = rng.sample(sender.addresses, n_slots)
        else:
            in_addrs = list(sender.addresses)  # link all addresses on first send
            sender.has_sent = True
        fee = rng.randint(0, cfg.fee_max)
        # Every input slot must carry >= 1 satoshi; absorb the shortfall as fee.
        in_total = max(out_total + change + fee, len(in_addrs))
        values = _split_amount(rng, in_total, len(in_addrs))
        vin = [{"addr": a, "value": v} for a, v in zip(in_addrs, values)]
        emit(time, vin, vout)

    # Multi-address funders that were never picked as senders consolidate
    # their addresses with a self-sweep so the ground-truth partition matches
    # the input-heuristic closure and every address occurs in the corpus.
    for ent in funders:
        if len(ent.addresses) > 1 and not ent.has_sent:
            total = max(rng.randint(*cfg.regular_amount_sat), len(ent.addresses))
            values = _split_amount(rng, total, len(ent.addresses))
            fee = rng.randint(0, min(cfg.fee_max, total - 1)) if total > 1 else 0
            emit(rng.randint(w0, w1 - 1),
                 [{"addr": a, "value": v} for a, v in zip(ent.addresses, values)],
                 [{"addr": ent.addresses[0], "value": total - fee}])
            ent.has_sent = True

    records.sort(key=lambda r: (r[0], r[1]))
    truth = [{"addr": addr, "entity_gt": ent.gt_id, "profile": ent.profile}
             for ent in entities for addr in ent.addresses]
    tags = []
    for j, ent in enumerate(exchanges):
        label = cfg.exchange_label if len(exchanges) == 1 else f"{cfg.exchange_label}{j}"
        tags.append((ent.addresses[0], label, "exchange"))
    return SyntheticCorpus(cfg, [r[2] for r in records], truth, tags, entities)


def write_corpus(corpus: SyntheticCorpus, jsonl_path, truth_path=None,
                 tags_path=None) -> None:
    """Write wire JSONL, ground-truth sidecar, and tag CSV (all deterministic)."""
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for line in corpus.jsonl_lines():
            fh.write(line + "\n")
    if truth_path is not None:
        with open(truth_path, "w", encoding="utf-8") as fh:
            for line in corpus.truth_lines():
                fh.write(line + "\n")
    if tags_path is not None:
        with open(tags_path, "w", encoding="utf-8") as fh:
            fh.write("address,label,category\n")
            for addr, label, category in corpus.tags:
                fh.write(f"{addr},{label},{category}\n")

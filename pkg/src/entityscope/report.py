"""Batch exports: measure tables as CSV and headline figures as PNG files.

The report path renders the same pictures an analyst would start from in the
UI (transaction volume over time, one histogram per activity measure) next to
the delimited measure export, for headless runs and documentation.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import Corpus
from .filters import histogram, tx_volume
from .measures import (
    ALL_SERIES_IDS,
    AMOUNT_KEYS,
    MeasureTable,
    compute_measures,
    parse_series_id,
)

# One fixed color per activity measure, constant across every view; hue pairs
# mark measures that belong together (first/last, rec/sent, inputs/outputs,
# counts/active-time), colorblind-safe.
MEASURE_COLORS = {
    "num_txs": "#0072b2",
    "time_active": "#56b4e9",
    "time_first": "#007a5e",
    "time_last": "#52b788",
    "amount_rec": "#d55e00",
    "amount_sent": "#e69f00",
    "num_inputs": "#aa4499",
    "num_outputs": "#d48fc7",
}

REPORT_SERIES = (
    "num_txs_sender", "num_txs_receiver", "time_first", "time_last", "time_active",
    "amount_rec_largest", "amount_sent_largest", "num_inputs_average",
    "num_outputs_average",
)


def export_measures_csv(corpus: Corpus, t0: int, t1: int, path) -> int:
    """Write one row per in-range entity with all measure series; returns rows.

    Amount columns are integer satoshis (averages are fractional satoshis);
    undefined values are left empty.
    """
    table = compute_measures(corpus.slices, None, t0, t1)
    header = ["entity_id", "label", "category", *ALL_SERIES_IDS]
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for position in range(len(table)):
            m = table.row(position)
            ordinal = int(table.ents[position])
            tag = corpus.index.tag_of(ordinal)
            row = [m.entity_id, tag.label if tag else "", tag.category if tag else ""]
            for sid in ALL_SERIES_IDS:
                key, variant = parse_series_id(sid)
                value = m.value(key, variant)
                row.append("" if value is None else value)
            writer.writerow(row)
            rows += 1
    return rows


def _plot_volume(corpus: Corpus, t0: int, t1: int, path: Path) -> None:
    bucket = "day" if t1 - t0 <= 90 * 86400 else "month"
    buckets = tx_volume(corpus.slices, None, t0, t1, bucket)
    starts = [s for s, _ in buckets]
    counts = [c for _, c in buckets]
    fig, ax = plt.subplots(figsize=(9, 3))
    width = (starts[1] - starts[0]) * 0.9 if len(starts) > 1 else 86400 * 0.9
    ax.bar(starts, counts, width=width, align="edge", color="#444c55")
    ticks = starts[:: max(1, len(starts) // 8)]
    ax.set_xticks(ticks)
    ax.set_xticklabels(
        [np.datetime_as_string(np.datetime64(int(s), "s"), unit="D") for s in ticks],
        rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(f"transactions / {bucket}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_histogram(table: MeasureTable, sid: str, path: Path) -> None:
    key, variant = parse_series_id(sid)
    ents = table.ents.astype(np.int64)
    hist = histogram(table, ents, key, variant, bins=40, scale="auto")
    edges, counts = hist.edges, hist.counts
    fig, ax = plt.subplots(figsize=(4.5, 2.8))
    color = MEASURE_COLORS[key]
    if hist.scale == "log10":
        ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge", color=color)
        ax.set_xscale("log")
    else:
        ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge", color=color)
    unit = " (sat)" if key in AMOUNT_KEYS else ""
    ax.set_xlabel(sid + unit, fontsize=9)
    ax.set_ylabel("entities", fontsize=9)
    if hist.undefined_count:
        ax.set_title(f"{hist.undefined_count} undefined", fontsize=8, loc="right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(corpus: Corpus, t0: int, t1: int, outdir,
                  series: tuple[str, ...] = REPORT_SERIES) -> dict:
    """Write measures.csv plus volume and per-measure histogram figures.

    Returns a summary dict with the written paths and the exported row count.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "measures.csv"
    rows = export_measures_csv(corpus, t0, t1, csv_path)
    figures = []
    if corpus.store.n_transactions:
        volume_path = outdir / "tx_volume.png"
        _plot_volume(corpus, t0, t1, volume_path)
        figures.append(str(volume_path))
        table = compute_measures(corpus.slices, None, t0, t1)
        for sid in series:
            fig_path = outdir / f"hist_{sid}.png"
            _plot_histogram(table, sid, fig_path)
            figures.append(str(fig_path))
    return {"csv": str(csv_path), "rows": rows, "figures": figures}

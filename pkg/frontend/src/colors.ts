/** One fixed color per activity measure, constant across every view.
 *
 * Four colorblind-safe hue pairs mark measures that belong together:
 * counts/active-time (blues), first/last (greens), received/sent (oranges),
 * inputs/outputs (magentas). Must stay in sync with the backend report
 * palette (entityscope/report.py).
 */
export const MEASURE_COLORS: Record<string, string> = {
  num_txs: "#0072b2",
  time_active: "#56b4e9",
  time_first: "#007a5e",
  time_last: "#52b788",
  amount_rec: "#d55e00",
  amount_sent: "#e69f00",
  num_inputs: "#aa4499",
  num_outputs: "#d48fc7",
};

/** Table order of the 8 measures; also the glyph axis order. */
export const MEASURE_KEYS = [
  "num_txs", "time_first", "time_last", "time_active",
  "amount_rec", "amount_sent", "num_inputs", "num_outputs",
] as const;

export type MeasureKey = (typeof MEASURE_KEYS)[number];

export const STAT_VARIANTS = ["smallest", "average", "largest"] as const;
export const ROLE_VARIANTS = ["sender", "receiver"] as const;

/** Variants selectable per measure key (null = no variant dimension). */
export function variantsOf(key: MeasureKey): readonly string[] | null {
  if (key === "num_txs") return ROLE_VARIANTS;
  if (key === "amount_rec" || key === "amount_sent" ||
      key === "num_inputs" || key === "num_outputs") return STAT_VARIANTS;
  return null;
}

export function colorOf(key: string): string {
  return MEASURE_COLORS[key] ?? "#666666";
}

/** Flattened series id used by sort/cluster/filter endpoints. */
export function seriesId(key: string, variant: string | null): string {
  return variant ? `${key}_${variant}` : key;
}

/** Every selectable series id, for the sort selector and cluster features. */
export const ALL_SERIES_IDS: string[] = MEASURE_KEYS.flatMap((key) => {
  const variants = variantsOf(key);
  return variants ? variants.map((v) => seriesId(key, v)) : [seriesId(key, null)];
});

export const AMOUNT_KEYS = new Set(["amount_rec", "amount_sent"]);

import { AmountJson } from "./api.js";

const SAT_PER_BTC = 100_000_000;

export function fmtBtcFromSat(sat: number): string {
  return (sat / SAT_PER_BTC).toFixed(8).replace(/\.?0+$/, "") + " BTC";
}

export function fmtDate(unixSeconds: number): string {
  return new Date(unixSeconds * 1000).toISOString().slice(0, 10);
}

export function fmtDateTime(unixSeconds: number): string {
  return new Date(unixSeconds * 1000).toISOString().replace("T", " ").slice(0, 16);
}

export function fmtCount(n: number): string {
  if (n >= 1_000_000) return (n / 1_000_000).toFixed(1) + "M";
  if (n >= 10_000) return (n / 1_000).toFixed(1) + "k";
  return String(n);
}

/** Display for one measure series value off an entity card. */
export function fmtMeasure(key: string, value: number | AmountJson | null): string {
  if (value === null || value === undefined) return "–";
  if (typeof value === "object") return fmtBtcFromSat(value.sat);
  if (key.startsWith("time_first") || key.startsWith("time_last")) {
    return fmtDate(value);
  }
  if (key.startsWith("time_active")) return value.toFixed(2) + " d";
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

/** Axis tick label for histogram edges (handles satoshis, times, counts). */
export function fmtEdge(key: string, value: number): string {
  if (key === "amount_rec" || key === "amount_sent") return fmtBtcFromSat(value);
  if (key === "time_first" || key === "time_last") return fmtDate(value);
  if (Math.abs(value) >= 1000) return fmtCount(Math.round(value));
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => ({
    "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
  })[c] as string);
}

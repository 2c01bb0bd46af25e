import type { ConstraintReportJson, PairJson, SavedEntry, TraceSummaryJson } from "./types.js";

export interface SwatchRow {
  name: string;
  salient: string;
  faint: string;
}

/** Palette panel rows: one salient-over-faint swatch pair per class. */
export function paletteRows(pair: PairJson | null, classNames: string[] | null): SwatchRow[] {
  if (pair === null || classNames === null) return [];
  return pair.salient.map((salient, k) => ({
    name: classNames[k] ?? `class ${k}`,
    salient,
    faint: pair.faint[k],
  }));
}

export interface HistoryRow {
  index: number;
  name: string;
  swatches: string[];
}

export function historyRows(saved: SavedEntry[]): HistoryRow[] {
  return saved.map((entry, index) => ({
    index,
    name: entry.name,
    swatches: entry.pair.salient,
  }));
}

export function statusLine(
  trace: TraceSummaryJson | null,
  constraints: ConstraintReportJson | null,
): string {
  if (trace === null) return "";
  const verdict = constraints === null ? "" : constraints.allPass ? ", constraints ok" : ", CONSTRAINTS FAILED";
  return `${trace.iterations} iterations, best energy ${trace.bestEnergy}${verdict}`;
}

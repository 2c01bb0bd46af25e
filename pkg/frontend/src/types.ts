/** Wire types for the palette server's HTTP/JSON API. */

export interface DatasetPoint {
  x: number;
  y: number;
  label: number;
}

export interface DatasetJson {
  points: DatasetPoint[];
  classNames: string[];
}

export interface SessionSummary {
  id: string;
  n: number;
  m: number;
  dataset: DatasetJson;
}

export interface PairJson {
  m: number;
  background: string;
  sigma: number;
  eta: number;
  salient: string[];
  faint: string[];
  uniformLightness: number;
  seed: number;
}

export interface ConstraintCheckJson {
  name: string;
  passed: boolean;
  margin: number;
  detail: string;
}

export interface ConstraintReportJson {
  allPass: boolean;
  checks: ConstraintCheckJson[];
}

export interface TraceSummaryJson {
  iterations: number;
  bestEnergy: number | null;
  finalEnergy: number | null;
}

export interface GenerateResponse {
  pair: PairJson;
  constraints: ConstraintReportJson;
  trace: TraceSummaryJson;
}

export type SelectionMode = "none" | "classes" | "points";

export interface SelectionJson {
  mode: SelectionMode;
  classes?: number[];
  points?: number[];
}

export interface RectJson {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export interface HighlightResponse {
  selection: SelectionJson;
  colors: string[];
  emphasized: boolean[];
}

export interface SavedEntry {
  name: string;
  pair: PairJson;
}

export interface SavedRef {
  index: number;
  name: string;
}

export interface RestoreResponse extends SavedRef {
  pair: PairJson;
}

/** Config overrides accepted by the palette endpoint. */
export interface GenerateConfig {
  seed?: number;
  background?: string;
  sigma?: number;
  markSize?: number;
  weights?: number[];
}

export interface SynthRequest {
  classes: number;
  profile: string;
  seed?: number;
}

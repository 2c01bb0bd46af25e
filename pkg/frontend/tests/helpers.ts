import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { DatasetJson } from "../src/types.js";

export interface FixtureEntry {
  tag: string;
  method: string;
  path: string;
  request: unknown;
  status: number;
  response: unknown;
}

export interface FixtureMeta {
  datasetText: string;
  plot: { width: number; height: number; markDiameter: number };
  brushMidPx: [number, number, number, number];
  brushFinalPx: [number, number, number, number];
  emptyClickPx: [number, number];
  pointClickIndex: number;
  pointClickPx: [number, number];
  overlapPx: [number, number];
  sessionId: string;
  asyncSessionId: string;
}

export interface Fixture {
  meta: FixtureMeta;
  entries: FixtureEntry[];
}

const here = dirname(fileURLToPath(import.meta.url));
const raw = readFileSync(join(here, "fixtures", "session.json"), "utf8");
const fixture: Fixture = JSON.parse(raw);

export function loadFixture(): Fixture {
  // fresh copy per test so consuming entries cannot leak across tests
  return structuredClone(fixture);
}

export function entry(fx: Fixture, tag: string): FixtureEntry {
  const found = fx.entries.find((e) => e.tag === tag);
  if (found === undefined) throw new Error(`no fixture entry tagged '${tag}'`);
  return found;
}

export function responseOf<T>(fx: Fixture, tag: string): T {
  return entry(fx, tag).response as T;
}

export function fixtureDataset(fx: Fixture): DatasetJson {
  return JSON.parse(fx.meta.datasetText) as DatasetJson;
}

import type { SelectionJson, SelectionMode } from "./types.js";

const MODES: SelectionMode[] = ["none", "classes", "points"];

function sorted(ids: ReadonlySet<number>): number[] {
  return Array.from(ids).sort((a, b) => a - b);
}

function checkIds(name: string, ids: Iterable<number>): Set<number> {
  const out = new Set<number>();
  for (const id of ids) {
    if (!Number.isInteger(id) || id < 0) {
      throw new Error(`'${name}' must hold non-negative integers`);
    }
    out.add(id);
  }
  return out;
}

/**
 * The viewer's current pick: nothing, classes, or individual points.
 *
 * A class selection may carry brushed points alongside; the server then
 * resolves by the union of both. Instances are immutable; toggles return
 * a new state, so toggling twice is the identity.
 */
export class SelectionState {
  readonly classes: ReadonlySet<number>;
  readonly points: ReadonlySet<number>;

  constructor(classes: Iterable<number> = [], points: Iterable<number> = []) {
    this.classes = checkIds("classes", classes);
    this.points = checkIds("points", points);
  }

  static none(): SelectionState {
    return new SelectionState();
  }

  get empty(): boolean {
    return this.classes.size === 0 && this.points.size === 0;
  }

  /** Mode under the server schema: classes win, bare points otherwise. */
  get mode(): SelectionMode {
    if (this.classes.size > 0) return "classes";
    if (this.points.size > 0) return "points";
    return "none";
  }

  toggleClass(id: number, m?: number): SelectionState {
    if (!Number.isInteger(id) || id < 0 || (m !== undefined && id >= m)) {
      throw new Error(`class index ${id} out of range`);
    }
    const next = new Set(this.classes);
    if (next.has(id)) next.delete(id);
    else next.add(id);
    return new SelectionState(next, this.points);
  }

  togglePoint(id: number, n?: number): SelectionState {
    if (!Number.isInteger(id) || id < 0 || (n !== undefined && id >= n)) {
      throw new Error(`point index ${id} out of range`);
    }
    const next = new Set(this.points);
    if (next.has(id)) next.delete(id);
    else next.add(id);
    return new SelectionState(this.classes, next);
  }

  equals(other: SelectionState): boolean {
    return (
      this.classes.size === other.classes.size &&
      this.points.size === other.points.size &&
      sorted(this.classes).every((v, i) => v === sorted(other.classes)[i]) &&
      sorted(this.points).every((v, i) => v === sorted(other.points)[i])
    );
  }

  /** Serialize to the server's selection schema (sorted, sparse keys). */
  toJson(): SelectionJson {
    const out: SelectionJson = { mode: this.mode };
    if (this.classes.size > 0) out.classes = sorted(this.classes);
    if (this.points.size > 0) out.points = sorted(this.points);
    return out;
  }

  /** Parse the server's selection schema, rejecting what the server would. */
  static fromJson(payload: SelectionJson): SelectionState {
    if (typeof payload !== "object" || payload === null || !("mode" in payload)) {
      throw new Error("selection JSON must be an object with a 'mode' key");
    }
    const mode = payload.mode;
    if (!MODES.includes(mode)) {
      throw new Error(`unknown selection mode '${String(mode)}'`);
    }
    const classes = checkIds("classes", payload.classes ?? []);
    const points = checkIds("points", payload.points ?? []);
    if (mode === "none" && (classes.size > 0 || points.size > 0)) {
      throw new Error("mode 'none' cannot carry selected entries");
    }
    if (mode === "classes" && classes.size === 0) {
      throw new Error("mode 'classes' requires a non-empty class set");
    }
    if (mode === "points" && (points.size === 0 || classes.size > 0)) {
      throw new Error("mode 'points' requires points only");
    }
    return new SelectionState(classes, points);
  }
}

import { describe, expect, it } from "vitest";

import { SelectionState } from "../src/selection.js";
import type { SelectionJson } from "../src/types.js";

describe("SelectionState", () => {
  it("starts empty in mode none", () => {
    const s = SelectionState.none();
    expect(s.empty).toBe(true);
    expect(s.mode).toBe("none");
    expect(s.toJson()).toEqual({ mode: "none" });
  });

  it("toggling a class twice is the identity", () => {
    const s = SelectionState.none();
    const once = s.toggleClass(2);
    const twice = once.toggleClass(2);
    expect(once.mode).toBe("classes");
    expect(twice.equals(s)).toBe(true);
    // immutability: the originals are untouched
    expect(s.classes.size).toBe(0);
    expect(once.classes.has(2)).toBe(true);
  });

  it("toggling a point twice is the identity", () => {
    const s = SelectionState.none().togglePoint(7);
    expect(s.mode).toBe("points");
    expect(s.togglePoint(7).empty).toBe(true);
  });

  it("classes win the mode even when points are present", () => {
    const s = SelectionState.none().togglePoint(1).toggleClass(0);
    expect(s.mode).toBe("classes");
    expect(s.toJson()).toEqual({ mode: "classes", classes: [0], points: [1] });
  });

  it("dropping the last class falls back to points mode", () => {
    const s = new SelectionState([2], [5, 3]);
    const next = s.toggleClass(2);
    expect(next.mode).toBe("points");
    expect(next.toJson()).toEqual({ mode: "points", points: [3, 5] });
  });

  it("serializes sorted and sparse", () => {
    const s = new SelectionState([2, 0], [9, 4, 1]);
    expect(s.toJson()).toEqual({ mode: "classes", classes: [0, 2], points: [1, 4, 9] });
    expect(Object.keys(SelectionState.none().toJson())).toEqual(["mode"]);
  });

  it("round-trips through JSON", () => {
    for (const s of [
      SelectionState.none(),
      new SelectionState([1], []),
      new SelectionState([], [0, 8]),
      new SelectionState([0, 2], [3]),
    ]) {
      expect(SelectionState.fromJson(s.toJson()).equals(s)).toBe(true);
    }
  });

  it("range-checks toggles when a bound is given", () => {
    expect(() => SelectionState.none().toggleClass(3, 3)).toThrow("out of range");
    expect(() => SelectionState.none().togglePoint(-1)).toThrow("out of range");
    expect(() => SelectionState.none().toggleClass(1.5)).toThrow("out of range");
  });

  it("rejects what the server schema rejects", () => {
    expect(() => SelectionState.fromJson({ mode: "none", classes: [0] })).toThrow(
      "cannot carry selected entries",
    );
    expect(() => SelectionState.fromJson({ mode: "classes" })).toThrow("non-empty class set");
    expect(() => SelectionState.fromJson({ mode: "points", points: [1], classes: [0] })).toThrow(
      "points only",
    );
    expect(() => SelectionState.fromJson({ mode: "points" })).toThrow("points only");
    expect(() => SelectionState.fromJson({ mode: "both" } as unknown as SelectionJson)).toThrow(
      "unknown selection mode",
    );
    expect(() => SelectionState.fromJson({ mode: "classes", classes: [-2] })).toThrow(
      "non-negative integers",
    );
  });

  it("accepts a classes selection carrying brushed points", () => {
    const s = SelectionState.fromJson({ mode: "classes", classes: [1], points: [0, 1, 7] });
    expect(s.classes.has(1)).toBe(true);
    expect([...s.points].sort((a, b) => a - b)).toEqual([0, 1, 7]);
  });
});

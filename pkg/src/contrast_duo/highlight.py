"""Selection state and the rule resolving each point's displayed color.

A selection never re-optimizes the palette pair; it only recombines the
salient and faint palettes per point. The empty selection is the static
mode: every point shows its salient color with no emphasis flags.
"""

from dataclasses import dataclass, field

import numpy as np

from .colorspace import ColorSRGB
from .datasets import Dataset
from .scoring import PalettePair

MODES = ("none", "classes", "points")


@dataclass(frozen=True)
class Selection:
    """What the viewer picked: nothing, classes, or individual points.

    A classes-mode selection may also carry brushed points; resolution
    treats that as the union (the point set is normalized in).
    """

    mode: str = "none"
    class_set: frozenset = field(default_factory=frozenset)
    point_set: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "class_set", frozenset(int(c) for c in self.class_set))
        object.__setattr__(self, "point_set", frozenset(int(p) for p in self.point_set))
        if self.mode not in MODES:
            raise ValueError(f"unknown selection mode {self.mode!r}")
        if any(c < 0 for c in self.class_set) or any(p < 0 for p in self.point_set):
            raise ValueError("selection indices must be non-negative")
        if self.mode == "none" and (self.class_set or self.point_set):
            raise ValueError("mode 'none' cannot carry selected entries")
        if self.mode == "classes" and not self.class_set:
            raise ValueError("mode 'classes' requires a non-empty class set")
        if self.mode == "points":
            if not self.point_set:
                raise ValueError("mode 'points' requires a non-empty point set")
            if self.class_set:
                raise ValueError("point-mode selection cannot carry classes; use mode 'classes'")

    @classmethod
    def none(cls) -> "Selection":
        return cls()

    @classmethod
    def of_classes(cls, ids, points=()) -> "Selection":
        ids = frozenset(ids)
        if not ids:
            return cls.of_points(points)
        return cls("classes", ids, frozenset(points))

    @classmethod
    def of_points(cls, ids) -> "Selection":
        ids = frozenset(ids)
        return cls("points", frozenset(), ids) if ids else cls()

    @property
    def empty(self) -> bool:
        return self.mode == "none"

    def validate_for(self, dataset: Dataset) -> None:
        bad = [c for c in self.class_set if c >= dataset.m]
        if bad:
            raise ValueError(f"class index {min(bad)} out of range for {dataset.m} classes")
        bad = [p for p in self.point_set if p >= dataset.n]
        if bad:
            raise ValueError(f"point index {min(bad)} out of range for {dataset.n} points")

    def normalized_points(self, dataset: Dataset) -> frozenset:
        """The selection as a plain point set (classes expanded by label)."""
        self.validate_for(dataset)
        picked = set(self.point_set)
        if self.class_set:
            mask = np.isin(dataset.labels, list(self.class_set))
            picked.update(int(i) for i in np.flatnonzero(mask))
        return frozenset(picked)

    def to_json_dict(self) -> dict:
        out: dict = {"mode": self.mode}
        if self.class_set:
            out["classes"] = sorted(self.class_set)
        if self.point_set:
            out["points"] = sorted(self.point_set)
        return out

    @classmethod
    def from_json_dict(cls, payload: dict) -> "Selection":
        if not isinstance(payload, dict) or "mode" not in payload:
            raise ValueError("selection JSON must be an object with a 'mode' key")
        mode = payload["mode"]
        if mode not in MODES:
            raise ValueError(f"unknown selection mode {mode!r}")
        classes = payload.get("classes", [])
        points = payload.get("points", [])
        for name, seq in (("classes", classes), ("points", points)):
            if not isinstance(seq, (list, tuple)) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in seq
            ):
                raise ValueError(f"selection '{name}' must be a list of integers")
        return cls(mode, frozenset(classes), frozenset(points))


@dataclass(frozen=True)
class ResolvedColors:
    """Per-point display colors with emphasis flags.

    Emphasized points carry their class's salient color, the rest the faint
    one; in static mode (empty selection) everything is salient, unflagged.
    """

    colors: tuple
    emphasized: tuple

    def __post_init__(self):
        if len(self.colors) != len(self.emphasized):
            raise ValueError("colors and flags must align")

    def hex_list(self) -> list:
        return [c.to_hex() for c in self.colors]

    def to_json_dict(self) -> dict:
        return {"colors": self.hex_list(), "emphasized": list(self.emphasized)}


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in plot coordinates, min <= max per axis."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("rectangle must satisfy min <= max per axis")

    def to_json_dict(self) -> dict:
        return {"xMin": self.x_min, "yMin": self.y_min, "xMax": self.x_max, "yMax": self.y_max}

    @classmethod
    def from_json_dict(cls, payload: dict) -> "Rect":
        try:
            return cls(
                float(payload["xMin"]),
                float(payload["yMin"]),
                float(payload["xMax"]),
                float(payload["yMax"]),
            )
        except (KeyError, TypeError) as err:
            raise ValueError(f"rectangle JSON needs numeric xMin/yMin/xMax/yMax: {err}") from err


def resolve_colors(dataset: Dataset, pair: PalettePair, sel: Selection) -> ResolvedColors:
    """Combine the palette pair into per-point display colors.

    Empty selection: all salient (static mode). Otherwise selected points
    show their class's salient color and everything else the faint one.
    """
    if pair.m != dataset.m:
        raise ValueError(f"palette pair has {pair.m} classes, dataset has {dataset.m}")
    sel.validate_for(dataset)
    labels = dataset.labels
    salient = [c.srgb for c in pair.salient.colors]
    faint = [c.srgb for c in pair.faint.colors]
    if sel.empty:
        return ResolvedColors(
            tuple(salient[l] for l in labels), tuple([False] * dataset.n)
        )
    if sel.mode == "classes" and not sel.point_set:
        chosen = sel.class_set
        flags = [int(l) in chosen for l in labels]
    else:
        picked = sel.normalized_points(dataset)
        flags = [i in picked for i in range(dataset.n)]
    colors = tuple(
        (salient if emph else faint)[int(l)] for l, emph in zip(labels, flags)
    )
    return ResolvedColors(colors, tuple(flags))


def selection_from_brush(dataset: Dataset, rect: Rect) -> Selection:
    """Point-mode selection of every point inside or on the rectangle."""
    pts = dataset.points
    inside = (
        (pts[:, 0] >= rect.x_min)
        & (pts[:, 0] <= rect.x_max)
        & (pts[:, 1] >= rect.y_min)
        & (pts[:, 1] <= rect.y_max)
    )
    return Selection.of_points(int(i) for i in np.flatnonzero(inside))


def toggle_class(sel: Selection, class_id: int, m: int | None = None) -> Selection:
    """Add the class if absent, remove it if present; twice is identity.

    Brushed points riding along in the selection are preserved. When the
    class count m is known, out-of-range ids are rejected.
    """
    class_id = int(class_id)
    if class_id < 0 or (m is not None and class_id >= m):
        raise ValueError(f"class index {class_id} out of range")
    toggled = sel.class_set ^ {class_id}
    return Selection.of_classes(toggled, sel.point_set)

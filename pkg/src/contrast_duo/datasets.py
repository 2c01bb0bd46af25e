"""Datasets: loading, saving, synthesis, and chart-to-marks adapters."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

CANVAS_SIZE = 600.0
MAX_CLASSES = 64

# profile -> (points per class, gaussian sigma)
SYNTH_PROFILES = {
    "small_dense": (50, 20.0),
    "small_sparse": (20, 50.0),
    "large_dense": (100, 50.0),
    "large_sparse": (50, 100.0),
}


class DatasetError(ValueError):
    """Raised for malformed dataset or chart inputs."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """A labeled 2-D point set. Labels are compact ints in [0, m)."""

    points: np.ndarray  # (n, 2) float
    labels: np.ndarray  # (n,) int
    class_names: tuple[str, ...]
    label_remap: tuple[tuple[str, int], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        lbl = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lbl)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DatasetError(f"points must be (n, 2), got {pts.shape}")
        if lbl.shape != (pts.shape[0],):
            raise DatasetError("labels length must match points")
        if pts.shape[0] == 0:
            raise DatasetError("dataset has no points")
        if not np.all(np.isfinite(pts)):
            bad = int(np.argwhere(~np.isfinite(pts))[0][0])
            raise DatasetError(f"non-finite coordinate at point {bad}")
        m = len(self.class_names)
        if m == 0:
            raise DatasetError("dataset has no classes")
        if m > MAX_CLASSES:
            raise DatasetError(f"too many classes ({m} > {MAX_CLASSES})")
        if lbl.min() < 0 or lbl.max() >= m:
            raise DatasetError("label outside [0, number of classes)")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m)


def _compact_labels(raw: list[str]) -> tuple[np.ndarray, tuple[str, ...], tuple[tuple[str, int], ...]]:
    uniq = sorted(set(raw), key=lambda s: (0, int(s)) if s.lstrip("-").isdigit() else (1, s))
    index = {name: i for i, name in enumerate(uniq)}
    labels = np.array([index[r] for r in raw], dtype=np.int64)
    remap = tuple((name, index[name]) for name in uniq)
    return labels, tuple(uniq), remap


def load_dataset(path: str | os.PathLike) -> Dataset:
    """Load a dataset from CSV (x,y,label header) or JSON."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(64)
    looks_json = path.endswith(".json") or head.lstrip().startswith("{")
    if looks_json:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: invalid JSON at line {exc.lineno}") from exc
        return dataset_from_json(payload)
    return _load_csv(path)


def _load_csv(path: str) -> Dataset:
    xs: list[float] = []
    ys: list[float] = []
    raw_labels: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["x", "y", "label"]:
            raise DatasetError(f"{path} line 1: expected header x,y,label, got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DatasetError(f"{path} line {lineno}: expected 3 fields, got {len(row)}")
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except ValueError:
                raise DatasetError(f"{path} line {lineno}: bad coordinate {row[0]!r},{row[1]!r}") from None
            label = row[2].strip()
            if not label:
                raise DatasetError(f"{path} line {lineno}: empty label")
            raw_labels.append(label)
    if not xs:
        raise DatasetError(f"{path}: no data rows")
    labels, names, remap = _compact_labels(raw_labels)
    return Dataset(np.column_stack([xs, ys]), labels, names, remap)


def dataset_from_json(payload: dict) -> Dataset:
    """Build a dataset from the wire-format JSON object."""
    if not isinstance(payload, dict) or "points" not in payload:
        raise DatasetError("dataset JSON must be an object with a 'points' array")
    raw_points = payload["points"]
    if not isinstance(raw_points, list) or not raw_points:
        raise DatasetError("'points' must be a non-empty array")
    xs, ys, raw_labels = [], [], []
    for i, p in enumerate(raw_points):
        if not isinstance(p, dict) or not {"x", "y", "label"} <= set(p):
            raise DatasetError(f"point {i}: expected an object with x, y, label")
        try:
            xs.append(float(p["x"]))
            ys.append(float(p["y"]))
        except (TypeError, ValueError):
            raise DatasetError(f"point {i}: bad coordinate") from None
        raw_labels.append(p["label"])

    if "classNames" in payload:
        names = payload["classNames"]
        if (
            not isinstance(names, list)
            or not names
            or any(not isinstance(s, str) for s in names)
        ):
            raise DatasetError("'classNames' must be a non-empty array of strings")
        labels = []
        for i, lab in enumerate(raw_labels):
            if not isinstance(lab, int) or isinstance(lab, bool) or not (0 <= lab < len(names)):
                raise DatasetError(f"point {i}: label {lab!r} outside [0, {len(names)})")
            labels.append(lab)
        return Dataset(np.column_stack([xs, ys]), np.array(labels, dtype=np.int64), tuple(names))

    labels, names, remap = _compact_labels([str(lab) for lab in raw_labels])
    return Dataset(np.column_stack([xs, ys]), labels, names, remap)


def dataset_to_json(dataset: Dataset) -> dict:
    return {
        "points": [
            {"x": float(x), "y": float(y), "label": int(l)}
            for (x, y), l in zip(dataset.points, dataset.labels)
        ],
        "classNames": list(dataset.class_names),
    }


def save_dataset(dataset: Dataset, path: str | os.PathLike) -> None:
    """Write canonical JSON; save then load is the identity."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataset_to_json(dataset), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def synth_scatterplot(classes: int, profile: str, seed: int = 0) -> Dataset:
    """Isotropic Gaussian clusters on a 600x600 canvas.

    Class centers are drawn uniformly and resampled until at least 2*sigma
    away from every border, so clusters are not truncated by construction.
    Points themselves are not clipped.
    """
    if profile not in SYNTH_PROFILES:
        raise DatasetError(f"unknown profile {profile!r}, expected one of {sorted(SYNTH_PROFILES)}")
    if not (1 <= classes <= MAX_CLASSES):
        raise DatasetError(f"classes must be in [1, {MAX_CLASSES}]")
    per_class, sigma = SYNTH_PROFILES[profile]
    rng = np.random.default_rng(seed)
    margin = 2.0 * sigma
    if 2 * margin >= CANVAS_SIZE:
        raise DatasetError(f"sigma {sigma} too large for the canvas")
    points = []
    labels = []
    for c in range(classes):
        while True:
            center = rng.uniform(0.0, CANVAS_SIZE, 2)
            if margin <= center[0] <= CANVAS_SIZE - margin and margin <= center[1] <= CANVAS_SIZE - margin:
                break
        points.append(center + rng.normal(0.0, sigma, (per_class, 2)))
        labels.extend([c] * per_class)
    return Dataset(
        np.vstack(points),
        np.array(labels, dtype=np.int64),
        tuple(f"class {i}" for i in range(classes)),
    )


def _resample_polyline(vertices: np.ndarray, interval: float) -> np.ndarray:
    """Sample a polyline at uniform arc length, starting at its first vertex."""
    seg = np.diff(vertices, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    total = float(seg_len.sum())
    if total == 0.0:
        return vertices[:1].copy()
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    n_samples = int(math.floor(total / interval + 1e-9)) + 1
    out = np.empty((n_samples, 2))
    for k in range(n_samples):
        s = min(k * interval, total)
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(seg_len) - 1)
        t = 0.0 if seg_len[i] == 0 else (s - cum[i]) / seg_len[i]
        out[k] = vertices[i] + t * seg[i]
    return out


def marks_from_chart(spec: dict, interval: float | None = None) -> Dataset:
    """Convert a line or bar chart spec into a labeled mark set.

    Lines are resampled at uniform arc length (default interval: 1/50 of the
    chart width). Bars contribute their center plus four corner-adjacent
    samples inset 10% from the corners.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DatasetError("chart spec must be an object with a 'kind'")
    kind = spec["kind"]
    if kind not in ("line", "bar"):
        raise DatasetError(f"unknown chart kind {kind!r}")
    series = spec.get("series")
    if not isinstance(series, list) or not series:
        raise DatasetError("chart spec needs a non-empty 'series' array")
    width = float(spec.get("width", CANVAS_SIZE))
    height = float(spec.get("height", CANVAS_SIZE))
    if interval is None:
        interval = width / 50.0

    names = []
    for i, s in enumerate(series):
        if not isinstance(s, dict):
            raise DatasetError(f"series {i}: expected an object")
        names.append(str(s.get("label", f"series {i}")))

    points = []
    labels = []
    if kind == "line":
        all_values = [v for s in series if "values" in s for v in s["values"]]
        lo = min(all_values) if all_values else 0.0
        hi = max(all_values) if all_values else 1.0
        span = hi - lo
        for idx, s in enumerate(series):
            if "points" in s:
                verts = np.asarray(s["points"], dtype=float)
                if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 2:
                    raise DatasetError(f"series {idx}: 'points' must be at least two [x, y] pairs")
            elif "values" in s:
                vals = np.asarray(s["values"], dtype=float)
                if vals.ndim != 1 or vals.shape[0] < 2:
                    raise DatasetError(f"series {idx}: 'values' must hold at least two numbers")
                xs = np.linspace(0.0, width, vals.shape[0])
                ys = np.full(vals.shape, height / 2.0) if span == 0 else (vals - lo) / span * height
                verts = np.column_stack([xs, ys])
            else:
                raise DatasetError(f"series {idx}: needs 'values' or 'points'")
            marks = _resample_polyline(verts, interval)
            points.append(marks)
            labels.extend([idx] * marks.shape[0])
    else:
        total_bars = sum(len(s.get("values", [])) for s in series)
        if total_bars == 0:
            raise DatasetError("bar chart has no values")
        top = max(v for s in series for v in s.get("values", []))
        top = top if top > 0 else 1.0
        bar_w = width / total_bars
        slot = 0
        for idx, s in enumerate(series):
            vals = s.get("values")
            if not isinstance(vals, list) or not vals:
                raise DatasetError(f"series {idx}: bar series needs 'values'")
            for v in vals:
                bar_h = max(float(v), 0.0) / top * height
                x0, x1 = slot * bar_w, (slot + 1) * bar_w
                dx, dy = 0.1 * bar_w, 0.1 * max(bar_h, 1e-9)
                cx, cy = (x0 + x1) / 2.0, bar_h / 2.0
                bar_points = [
                    (cx, cy),
                    (x0 + dx, 0.0 + dy),
                    (x1 - dx, 0.0 + dy),
                    (x0 + dx, bar_h - dy),
                    (x1 - dx, bar_h - dy),
                ]
                points.append(np.asarray(bar_points))
                labels.extend([idx] * len(bar_points))
                slot += 1
    return Dataset(np.vstack(points), np.array(labels, dtype=np.int64), tuple(names))


def choose_reference_view(views: list[Dataset]) -> int:
    """Index of the view whose points separate best (highest mean rho-hat).

    Ties go to the lowest index.
    """
    from . import neighborhood

    if not views:
        raise DatasetError("no views given")
    best_idx = 0
    best_score = -math.inf
    for i, view in enumerate(views):
        graph = neighborhood.build_graph(view)
        f = neighborhood.compute_separability(view, graph)
        score = float(f.rho_hat.mean())
        if score > best_score + 1e-12:
            best_score = score
            best_idx = i
    return best_idx

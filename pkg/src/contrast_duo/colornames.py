"""Color-name distributions over a binned CIELAB grid.

The model maps a Lab color to a probability distribution over color terms;
the distance between two colors is the cosine distance between their term
distributions. Colors falling into bins with no survey data are served by
the nearest non-empty bin.
"""

from __future__ import annotations

import functools
import importlib.resources
import os
from dataclasses import dataclass, field

import numpy as np

from .colorspace import ColorLab

ENV_MODEL_PATH = "CONTRAST_DUO_NAME_MODEL"

# grid geometry: L in [0, 100] by 10, a and b in [-110, 110] by 10
_L_BINS = 10
_AB_BINS = 22
_TOTAL_BINS = _L_BINS * _AB_BINS * _AB_BINS


class NameModelError(ValueError):
    """Raised for missing or malformed name-model files."""


def _bin_indices(L: float, a: float, b: float) -> tuple[int, int, int]:
    li = min(max(int(L // 10.0), 0), _L_BINS - 1)
    ai = min(max(int((a + 110.0) // 10.0), 0), _AB_BINS - 1)
    bi = min(max(int((b + 110.0) // 10.0), 0), _AB_BINS - 1)
    return li, ai, bi


def _flat(li: int, ai: int, bi: int) -> int:
    return (li * _AB_BINS + ai) * _AB_BINS + bi


def _bin_center(li: int, ai: int, bi: int) -> tuple[float, float, float]:
    return 10.0 * li + 5.0, -110.0 + 10.0 * ai + 5.0, -110.0 + 10.0 * bi + 5.0


@dataclass
class NameModel:
    """Loaded name model: normalized term distributions per occupied bin."""

    terms: tuple[str, ...]
    bin_keys: np.ndarray  # (rows, 3) int, sorted lexicographically
    rows: np.ndarray  # (rows, len(terms)) float, each row sums to 1
    unit_rows: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    _bin_to_row: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.unit_rows is None:
            norms = np.linalg.norm(self.rows, axis=1, keepdims=True)
            self.unit_rows = self.rows / norms
        if self._bin_to_row is None:
            self._bin_to_row = _nearest_row_map(self.bin_keys)

    def row_index(self, color: ColorLab) -> int:
        """Row serving the given color (nearest non-empty bin if needed)."""
        li, ai, bi = _bin_indices(color.L, color.a, color.b)
        return int(self._bin_to_row[_flat(li, ai, bi)])

    def row_indices_nd(self, labs: np.ndarray) -> np.ndarray:
        labs = np.asarray(labs, dtype=float)
        li = np.clip((labs[..., 0] // 10.0).astype(int), 0, _L_BINS - 1)
        ai = np.clip(((labs[..., 1] + 110.0) // 10.0).astype(int), 0, _AB_BINS - 1)
        bi = np.clip(((labs[..., 2] + 110.0) // 10.0).astype(int), 0, _AB_BINS - 1)
        return self._bin_to_row[(li * _AB_BINS + ai) * _AB_BINS + bi]

    def difference_by_rows(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        cos = float(np.dot(self.unit_rows[i], self.unit_rows[j]))
        return min(max(1.0 - cos, 0.0), 1.0)


def name_distribution(model: NameModel, color: ColorLab) -> np.ndarray:
    """Normalized term distribution for a color."""
    return model.rows[model.row_index(color)]


def name_difference(model: NameModel, c1: ColorLab, c2: ColorLab) -> float:
    """Cosine distance between the two colors' term distributions, in [0, 1]."""
    return model.difference_by_rows(model.row_index(c1), model.row_index(c2))


def _nearest_row_map(bin_keys: np.ndarray) -> np.ndarray:
    """For every grid bin, the row index of the nearest occupied bin.

    Distance is Euclidean between bin centers in Lab; ties break to the
    occupied bin with the lowest (li, ai, bi), which is the lowest row index
    because rows are kept lexicographically sorted.
    """
    centers = np.empty((bin_keys.shape[0], 3))
    centers[:, 0] = 10.0 * bin_keys[:, 0] + 5.0
    centers[:, 1] = -110.0 + 10.0 * bin_keys[:, 1] + 5.0
    centers[:, 2] = -110.0 + 10.0 * bin_keys[:, 2] + 5.0

    li = np.arange(_L_BINS)
    ai = np.arange(_AB_BINS)
    bi = np.arange(_AB_BINS)
    grid = np.stack(np.meshgrid(li, ai, bi, indexing="ij"), axis=-1).reshape(-1, 3)
    grid_centers = np.empty((grid.shape[0], 3))
    grid_centers[:, 0] = 10.0 * grid[:, 0] + 5.0
    grid_centers[:, 1] = -110.0 + 10.0 * grid[:, 1] + 5.0
    grid_centers[:, 2] = -110.0 + 10.0 * grid[:, 2] + 5.0

    out = np.empty(_TOTAL_BINS, dtype=np.int64)
    chunk = 512
    for start in range(0, grid_centers.shape[0], chunk):
        block = grid_centers[start : start + chunk]
        d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        # argmin returns the first minimum, i.e. the lowest row index on ties
        out[start : start + block.shape[0]] = np.argmin(d2, axis=1)
    return out


def load_name_model(path: str | os.PathLike) -> NameModel:
    """Load and validate a name-model CSV.

    Expected header: li,ai,bi,<term1>,...,<termK>. One row per occupied bin,
    counts as non-negative integers.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise NameModelError(f"name model file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise NameModelError(f"name model file is empty: {path}")
    header = lines[0].split(",")
    if header[:3] != ["li", "ai", "bi"]:
        raise NameModelError(f"malformed header (expected li,ai,bi,terms...): {lines[0]!r}")
    terms = tuple(t.strip() for t in header[3:])
    if not terms or any(not t for t in terms):
        raise NameModelError("name model declares no terms")

    keys = []
    counts = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 3 + len(terms):
            raise NameModelError(f"row {lineno}: expected {3 + len(terms)} fields, got {len(fields)}")
        try:
            li, ai, bi = int(fields[0]), int(fields[1]), int(fields[2])
            row = [int(v) for v in fields[3:]]
        except ValueError as exc:
            raise NameModelError(f"row {lineno}: non-integer field ({exc})") from exc
        if not (0 <= li < _L_BINS and 0 <= ai < _AB_BINS and 0 <= bi < _AB_BINS):
            raise NameModelError(f"row {lineno}: bin ({li},{ai},{bi}) out of range")
        if any(v < 0 for v in row):
            raise NameModelError(f"row {lineno}: negative count")
        total = sum(row)
        if total == 0:
            raise NameModelError(f"row {lineno}: all counts zero, row is not normalizable")
        if (li, ai, bi) in seen:
            raise NameModelError(f"row {lineno}: duplicate bin ({li},{ai},{bi})")
        seen.add((li, ai, bi))
        keys.append((li, ai, bi))
        counts.append(row)

    if not keys:
        raise NameModelError(f"name model has no data rows: {path}")

    order = sorted(range(len(keys)), key=lambda i: keys[i])
    bin_keys = np.array([keys[i] for i in order], dtype=np.int64)
    raw = np.array([counts[i] for i in order], dtype=float)
    rows = raw / raw.sum(axis=1, keepdims=True)
    return NameModel(terms=terms, bin_keys=bin_keys, rows=rows)


def bundled_model_path() -> str:
    """Path of the packaged model, unless overridden by the environment."""
    override = os.environ.get(ENV_MODEL_PATH)
    if override:
        return override
    ref = importlib.resources.files("contrast_duo").joinpath("data/color_names.csv")
    return str(ref)


@functools.lru_cache(maxsize=4)
def _load_cached(path: str) -> NameModel:
    return load_name_model(path)


def default_name_model() -> NameModel:
    """The bundled model (or the env-var override), loaded once per path."""
    return _load_cached(bundled_model_path())

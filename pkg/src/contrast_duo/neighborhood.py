"""Spatial neighborhoods and the class-separation field.

The neighbor graph is a Delaunay triangulation with overlong edges removed
(threshold: alpha_factor times the mean Delaunay edge length). Each point's
local class separation rho = b - a compares mean inverse-distance mass of
differently-labeled vs same-labeled neighbors; exp(rho) min-max normalized
over the dataset gives rho_hat in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.spatial import Delaunay, QhullError

if TYPE_CHECKING:
    from .datasets import Dataset


class GraphError(ValueError):
    """Raised when no neighbor graph can be built."""


@dataclass(frozen=True)
class GraphConfig:
    alpha_factor: float = 1.5
    jitter_scale: float = 1e-6
    jitter_seed: int = 0

    def __post_init__(self):
        if self.alpha_factor <= 0:
            raise ValueError("alpha_factor must be positive")


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """CSR-style symmetric adjacency with edge lengths."""

    indptr: np.ndarray  # (n+1,)
    indices: np.ndarray  # concatenated neighbor lists
    dists: np.ndarray  # matching edge lengths, positive
    collinear_fallback: bool = False
    jittered: bool = False

    @property
    def n(self) -> int:
        return self.indptr.shape[0] - 1

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def neighbor_dists(self, i: int) -> np.ndarray:
        return self.dists[self.indptr[i] : self.indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass(frozen=True, eq=False)
class SeparabilityField:
    """Per-point separation degrees."""

    a: np.ndarray  # same-label inverse-distance mean
    b: np.ndarray  # other-label inverse-distance mean
    rho: np.ndarray  # b - a
    rho_hat: np.ndarray  # min-max normalized exp(rho), in [0, 1]


def _dedupe_points(points: np.ndarray, config: GraphConfig) -> tuple[np.ndarray, bool]:
    """Jitter exactly coincident points apart (seeded, tiny, deterministic)."""
    rounded = np.ascontiguousarray(points)
    _, first = np.unique(rounded, axis=0, return_index=True)
    if first.shape[0] == points.shape[0]:
        return points, False
    span = points.max(axis=0) - points.min(axis=0)
    diag = float(np.hypot(span[0], span[1]))
    scale = config.jitter_scale * (diag if diag > 0 else 1.0)
    rng = np.random.default_rng(config.jitter_seed)
    out = points + rng.normal(0.0, scale, points.shape)
    return out, True


def _edges_to_csr(n: int, edge_set: set[tuple[int, int]], points: np.ndarray):
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edge_set:
        adj[i].append(j)
        adj[j].append(i)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    dists = []
    for i in range(n):
        nbrs = sorted(adj[i])
        indptr[i + 1] = indptr[i] + len(nbrs)
        indices.extend(nbrs)
        d = np.hypot(
            points[nbrs, 0] - points[i, 0], points[nbrs, 1] - points[i, 1]
        ) if nbrs else np.empty(0)
        dists.extend(d.tolist())
    return indptr, np.array(indices, dtype=np.int64), np.array(dists, dtype=float)


def _chain_graph(points: np.ndarray) -> set[tuple[int, int]]:
    """Fallback for degenerate geometry: connect consecutive points along
    the dominant axis."""
    span = points.max(axis=0) - points.min(axis=0)
    axis = 0 if span[0] >= span[1] else 1
    order = np.lexsort((points[:, 1 - axis], points[:, axis]))
    return {
        (min(int(order[k]), int(order[k + 1])), max(int(order[k]), int(order[k + 1])))
        for k in range(len(order) - 1)
    }


def build_graph(dataset: "Dataset", config: GraphConfig = GraphConfig()) -> NeighborGraph:
    """Build the filtered Delaunay neighbor graph."""
    points = np.asarray(dataset.points, dtype=float)
    n = points.shape[0]
    if n < 2:
        raise GraphError("need at least 2 points to build a neighbor graph")

    points, jittered = _dedupe_points(points, config)
    collinear = False

    if n == 2:
        edge_set = {(0, 1)}
        collinear = True
    else:
        try:
            tri = Delaunay(points)
            edge_set = set()
            for simplex in tri.simplices:
                for k in range(3):
                    i, j = int(simplex[k]), int(simplex[(k + 1) % 3])
                    edge_set.add((min(i, j), max(i, j)))
        except QhullError:
            edge_set = _chain_graph(points)
            collinear = True

    if not collinear:
        pairs = np.array(sorted(edge_set), dtype=np.int64)
        lengths = np.hypot(
            points[pairs[:, 0], 0] - points[pairs[:, 1], 0],
            points[pairs[:, 0], 1] - points[pairs[:, 1], 1],
        )
        alpha = config.alpha_factor * float(lengths.mean())
        keep = lengths <= alpha
        kept = {tuple(p) for p in pairs[keep]}

        # points stranded by the filter are re-linked to their nearest
        # Delaunay neighbor so every point keeps at least one neighbor
        degree = np.zeros(n, dtype=np.int64)
        for i, j in kept:
            degree[i] += 1
            degree[j] += 1
        if np.any(degree == 0):
            by_point: dict[int, tuple[float, int]] = {}
            for (i, j), d in zip(pairs, lengths):
                i, j = int(i), int(j)
                if d < by_point.get(i, (np.inf, -1))[0]:
                    by_point[i] = (float(d), j)
                if d < by_point.get(j, (np.inf, -1))[0]:
                    by_point[j] = (float(d), i)
            for i in np.nonzero(degree == 0)[0]:
                _, j = by_point[int(i)]
                kept.add((min(int(i), j), max(int(i), j)))
        edge_set = kept

    indptr, indices, dists = _edges_to_csr(n, edge_set, points)
    if np.any(np.diff(indptr) == 0):
        raise GraphError("internal error: isolated point after re-linking")
    return NeighborGraph(indptr, indices, dists, collinear_fallback=collinear, jittered=jittered)


def compute_separability(dataset: "Dataset", graph: NeighborGraph) -> SeparabilityField:
    """Per-point separation degrees a, b, rho and normalized rho_hat."""
    labels = np.asarray(dataset.labels)
    n = graph.n
    if labels.shape[0] != n:
        raise ValueError("dataset and graph size mismatch")

    src = np.repeat(np.arange(n), graph.degree())
    same = labels[src] == labels[graph.indices]
    inv = 1.0 / graph.dists
    deg = graph.degree().astype(float)

    a = np.zeros(n)
    b = np.zeros(n)
    np.add.at(a, src[same], inv[same])
    np.add.at(b, src[~same], inv[~same])
    a /= deg
    b /= deg
    rho = b - a

    # min-max normalization is invariant under shifting rho, so pull the max
    # down before exponentiating when it would overflow (near-coincident
    # points give huge inverse-distance mass); sane data is untouched
    peak = float(rho.max())
    shift = peak if peak > 700.0 else 0.0
    e = np.exp(rho - shift)
    lo, hi = float(e.min()), float(e.max())
    if hi - lo < 1e-15:
        rho_hat = np.ones(n)
    else:
        rho_hat = (e - lo) / (hi - lo)
    return SeparabilityField(a=a, b=b, rho=rho, rho_hat=rho_hat)

"""Simulated annealing for linked salient/faint palette pairs.

The optimizer walks palette space with mirrored hue/saturation between the
two palettes and a shared uniform lightness anchor for the faint one.
Constraint repair (minimum pairwise color distance, foreground contrast)
runs inside every proposal, so each visited state is valid and the best
visited state is returned directly. A single-palette variant without the
faint half serves as the comparison baseline.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .colornames import NameModel
from .colorspace import (
    DEFAULT_JND,
    ColorHSL,
    ColorSRGB,
    MarkSize,
    hsl_to_srgb,
    jnd_threshold,
    ciede2000_nd,
    srgb_to_hsl,
    srgb_to_lab,
    srgb_to_lab_nd,
)
from .datasets import Dataset
from .neighborhood import NeighborGraph, SeparabilityField
from .scoring import (
    Palette,
    PaletteColor,
    PalettePair,
    Weights,
    check_constraints,
    class_pair_weights,
    class_rho_mass,
)


class AnnealError(RuntimeError):
    """Raised when constraint repair exhausts its budget.

    `constraint` names the binding constraint ("jnd" or "foreground").
    """

    def __init__(self, message: str, constraint: str):
        super().__init__(message)
        self.constraint = constraint


@dataclass(frozen=True)
class HslGrid:
    """Discrete HSL search space: the optimizer snaps to these levels."""

    hues: tuple
    sats: tuple
    lights: tuple

    def __post_init__(self):
        if not self.hues or not self.sats or not self.lights:
            raise ValueError("grid axes must be non-empty")
        for h in self.hues:
            if not (0.0 <= h < 360.0):
                raise ValueError(f"grid hue {h} outside [0, 360)")
        for v in tuple(self.sats) + tuple(self.lights):
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"grid level {v} outside [0, 1]")


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float | None = None  # None -> calibrated on a prepass
    cooling_rate: float = 0.995
    min_temperature: float = 1e-3
    sigma: float = 0.05
    mark_size: MarkSize = MarkSize(10.0)
    weights: Weights = field(default_factory=Weights)
    background: ColorSRGB = ColorSRGB(1.0, 1.0, 1.0)
    seed: int = 0
    max_repair_iterations: int = 3000
    hue_step: float = 18.0
    sat_step: float = 0.08
    light_step: float = 0.05
    foreground_margin: float = 1.0
    # repair overshoot so hex-quantized output still clears the thresholds
    jnd_slack: float = 0.75
    foreground_slack: float = 1.5
    color_grid: HslGrid | None = None

    def __post_init__(self):
        if not (0.0 < self.cooling_rate < 1.0):
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")
        if self.min_temperature <= 0.0:
            raise ValueError("min_temperature must be positive")
        if self.initial_temperature is not None:
            if self.initial_temperature <= 0.0:
                raise ValueError("initial_temperature must be positive")
            if self.min_temperature >= self.initial_temperature:
                raise ValueError("min_temperature must be below initial_temperature")
        if self.max_repair_iterations < 1:
            raise ValueError("max_repair_iterations must be positive")
        for name in ("hue_step", "sat_step", "light_step"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.jnd_slack < 0.0 or self.foreground_slack < 0.0:
            raise ValueError("slacks must be non-negative")
        if self.foreground_margin < 0.0:
            raise ValueError("foreground_margin must be non-negative")

    @property
    def eta(self) -> float:
        return jnd_threshold(self.mark_size, DEFAULT_JND)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    temperature: float
    energy: float
    best_energy: float
    uniform_lightness: float


@dataclass(frozen=True)
class AnnealTrace:
    rows: tuple

    CSV_HEADER = "iteration,temperature,energy,best_energy,uniform_lightness"

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.iteration},{r.temperature!r},{r.energy!r},"
                f"{r.best_energy!r},{r.uniform_lightness!r}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())

    def lightness_change_iterations(self) -> tuple:
        """Iterations whose uniform lightness differs from the previous row."""
        out = []
        for prev, cur in zip(self.rows, self.rows[1:]):
            if cur.uniform_lightness != prev.uniform_lightness:
                out.append(cur.iteration)
        return tuple(out)


# ---------------------------------------------------------------------------
# internal state with cached Lab rows and pairwise distances


def _hsl_rows_to_rgb(h: np.ndarray, s: np.ndarray, l: np.ndarray) -> np.ndarray:
    chroma = (1.0 - np.abs(2.0 * l - 1.0)) * s
    hp = h / 60.0
    x = chroma * (1.0 - np.abs(hp % 2.0 - 1.0))
    zero = np.zeros_like(chroma)
    sector = np.floor(hp).astype(int) % 6
    r1 = np.choose(sector, [chroma, x, zero, zero, x, chroma])
    g1 = np.choose(sector, [x, chroma, chroma, x, zero, zero])
    b1 = np.choose(sector, [zero, zero, x, chroma, chroma, x])
    m = l - chroma / 2.0
    rgb = np.stack([r1 + m, g1 + m, b1 + m], axis=-1)
    return np.clip(rgb, 0.0, 1.0)


def _labs_from_hsl(h: np.ndarray, s: np.ndarray, l: np.ndarray) -> np.ndarray:
    return srgb_to_lab_nd(_hsl_rows_to_rgb(h, s, l))


def _lab_row(h: float, s: float, l: float) -> np.ndarray:
    # scalar path: much cheaper than the vectorized one for a single color
    lab = srgb_to_lab(hsl_to_srgb(ColorHSL(float(h), float(s), float(l))))
    return np.array([lab.L, lab.a, lab.b])


_TRIU_CACHE: dict = {}


def _triu(m: int):
    got = _TRIU_CACHE.get(m)
    if got is None:
        got = np.triu_indices(m, k=1)
        _TRIU_CACHE[m] = got
    return got


class _State:
    """Palette-pair state in HSL with synchronized Lab and distance caches."""

    __slots__ = ("h", "s", "ls", "lf", "anchor", "labs_s", "labs_f", "de_s", "de_f")

    def __init__(self, h, s, ls, lf, anchor):
        self.h = np.asarray(h, dtype=float)
        self.s = np.asarray(s, dtype=float)
        self.ls = np.asarray(ls, dtype=float)
        self.lf = None if lf is None else np.asarray(lf, dtype=float)
        self.anchor = float(anchor)
        self._rebuild()

    def _rebuild(self):
        self.labs_s = _labs_from_hsl(self.h, self.s, self.ls)
        self.de_s = _pairwise_de(self.labs_s)
        if self.lf is None:
            self.labs_f = None
            self.de_f = None
        else:
            self.labs_f = _labs_from_hsl(self.h, self.s, self.lf)
            self.de_f = _pairwise_de(self.labs_f)

    @property
    def m(self) -> int:
        return self.h.size

    def copy(self) -> "_State":
        dup = object.__new__(_State)
        dup.h = self.h.copy()
        dup.s = self.s.copy()
        dup.ls = self.ls.copy()
        dup.lf = None if self.lf is None else self.lf.copy()
        dup.anchor = self.anchor
        dup.labs_s = self.labs_s.copy()
        dup.labs_f = None if self.labs_f is None else self.labs_f.copy()
        dup.de_s = self.de_s.copy()
        dup.de_f = None if self.de_f is None else self.de_f.copy()
        return dup

    def _refresh_row(self, labs, de, k):
        row = ciede2000_nd(labs[k], labs)
        de[k, :] = row
        de[:, k] = row
        de[k, k] = 0.0

    def set_salient(self, k: int, h: float, s: float, l: float):
        self.h[k] = h
        self.s[k] = s
        self.ls[k] = l
        self.labs_s[k] = _lab_row(h, s, l)
        self._refresh_row(self.labs_s, self.de_s, k)
        if self.lf is not None:
            self.labs_f[k] = _lab_row(h, s, self.lf[k])
            self._refresh_row(self.labs_f, self.de_f, k)

    def set_faint_light(self, k: int, l: float):
        self.lf[k] = l
        self.labs_f[k] = _lab_row(self.h[k], self.s[k], l)
        self._refresh_row(self.labs_f, self.de_f, k)

    def commit_salient(self, k: int, h: float, s: float, l: float, lab, row):
        """Install a pre-evaluated salient color with its distance row."""
        self.h[k] = h
        self.s[k] = s
        self.ls[k] = l
        self.labs_s[k] = lab
        row[k] = 0.0
        self.de_s[k, :] = row
        self.de_s[:, k] = row

    def commit_faint_light(self, k: int, l: float, lab, row):
        self.lf[k] = l
        self.labs_f[k] = lab
        row[k] = 0.0
        self.de_f[k, :] = row
        self.de_f[:, k] = row

    def set_all_faint(self, lf: np.ndarray):
        self.lf = np.asarray(lf, dtype=float).copy()
        self.labs_f = _labs_from_hsl(self.h, self.s, self.lf)
        self.de_f = _pairwise_de(self.labs_f)

    def swap(self, i: int, j: int):
        for arr in (self.h, self.s, self.ls, self.lf, self.labs_s, self.labs_f):
            if arr is not None:
                arr[[i, j]] = arr[[j, i]]
        for de in (self.de_s, self.de_f):
            if de is not None:
                de[[i, j], :] = de[[j, i], :]
                de[:, [i, j]] = de[:, [j, i]]


def _pairwise_de(labs: np.ndarray) -> np.ndarray:
    de = ciede2000_nd(labs[:, None, :], labs[None, :, :])
    np.fill_diagonal(de, 0.0)
    return de


class _Evaluator:
    """Objective evaluation on cached state arrays.

    Computes the same terms as the scoring module, with the class-pair
    weight matrix and per-class separability mass precomputed once.
    """

    def __init__(self, dataset, graph, field, model: NameModel, cfg: AnnealConfig):
        self.c = class_pair_weights(dataset, graph)
        self.s_mass = None if field is None else class_rho_mass(dataset, field)
        self.bg_l = srgb_to_lab(cfg.background).L
        self.model = model
        self.w = cfg.weights
        self.m = dataset.m
        self.iu = np.triu_indices(self.m, k=1)

    def _name_rows(self, labs):
        return self.model.row_indices_nd(labs)

    def _nd_mean(self, units, rows):
        m = self.m
        if m < 2:
            return 0.0
        d = 1.0 - units @ units.T
        np.clip(d, 0.0, 1.0, out=d)
        d[rows[:, None] == rows[None, :]] = 0.0
        return float(d[self.iu].sum() * 2.0 / (m * (m - 1)))

    def pair_energy(self, st: _State) -> float:
        e_pd = float(np.sum(self.c * st.de_s) + np.sum(self.c * st.de_f))
        dl_s = np.abs(st.labs_s[:, 0] - self.bg_l)
        dl_f = np.abs(st.labs_f[:, 0] - self.bg_l)
        e_bc = float(self.s_mass @ (dl_s - dl_f))
        rows_s = self._name_rows(st.labs_s)
        rows_f = self._name_rows(st.labs_f)
        us = self.model.unit_rows[rows_s]
        uf = self.model.unit_rows[rows_f]
        e_nd = self._nd_mean(us, rows_s) + self._nd_mean(uf, rows_f)
        cross = 1.0 - np.sum(us * uf, axis=1)
        np.clip(cross, 0.0, 1.0, out=cross)
        cross[rows_s == rows_f] = 0.0
        e_cc = -float(cross.mean())
        return self.w.w0 * e_pd + self.w.w1 * e_bc + self.w.w2 * e_nd + self.w.w3 * e_cc

    def single_energy(self, st: _State) -> float:
        e_pd = float(np.sum(self.c * st.de_s))
        rows = self._name_rows(st.labs_s)
        units = self.model.unit_rows[rows]
        e_nd = self._nd_mean(units, rows)
        e_cd = 0.0 if self.m < 2 else float(st.de_s[self.iu].min())
        return self.w.w0 * e_pd + self.w.w1 * e_nd + self.w.w2 * e_cd

    def energy(self, st: _State, pair_mode: bool) -> float:
        return self.pair_energy(st) if pair_mode else self.single_energy(st)


# ---------------------------------------------------------------------------
# proposal moves


def _lightness_bands(bg_lab_l: float):
    """Faint uniform-lightness search bands, on the background's side."""
    if bg_lab_l > 60.0:
        return ((0.75, 0.97),)
    if bg_lab_l < 40.0:
        return ((0.03, 0.25),)
    return ((0.03, 0.25), (0.75, 0.97))


def _draw_anchor(rng, bands, current: float) -> float:
    if len(bands) == 1:
        lo, hi = bands[0]
    else:
        idx = 0 if current <= bands[0][1] + 1e-12 else 1
        if rng.random() < 0.1:
            idx = 1 - idx
        lo, hi = bands[idx]
    return float(rng.uniform(lo, hi))


def _jitter_headroom(sigma: float, grid) -> float:
    # leave room for the ~1/255 lightness shift hex quantization can add
    if grid is not None:
        return 0.0
    return max(0.0, sigma - 0.004)


def _draw_jitter(rng, anchor: float, headroom: float) -> float:
    if headroom <= 0.0:
        return anchor
    return float(np.clip(anchor + rng.uniform(-headroom, headroom), 0.01, 0.99))


def _grid_index(levels, value: float) -> int:
    return int(np.argmin([abs(v - value) for v in levels]))


def _grid_axis_step(rng, levels, value: float, wrap: bool) -> float:
    if len(levels) == 1:
        return float(levels[0])
    i = _grid_index(levels, value)
    step = 1 if rng.random() < 0.5 else -1
    if wrap:
        return float(levels[(i + step) % len(levels)])
    return float(levels[min(max(i + step, 0), len(levels) - 1)])


def _disturb_class(st: _State, k: int, rng, cfg: AnnealConfig, headroom: float):
    grid = cfg.color_grid
    if grid is None:
        h = (st.h[k] + rng.normal(0.0, cfg.hue_step)) % 360.0
        s = float(np.clip(st.s[k] + rng.normal(0.0, cfg.sat_step), 0.02, 1.0))
        l = float(np.clip(st.ls[k] + rng.normal(0.0, cfg.light_step), 0.05, 0.95))
        st.set_salient(k, h, s, l)
        if st.lf is not None:
            st.set_faint_light(k, _draw_jitter(rng, st.anchor, headroom))
        return
    if rng.random() < 0.5:
        axis = int(rng.integers(3))
        h, s, l = st.h[k], st.s[k], st.ls[k]
        if axis == 0:
            h = _grid_axis_step(rng, grid.hues, h, wrap=True)
        elif axis == 1:
            s = _grid_axis_step(rng, grid.sats, s, wrap=False)
        else:
            l = _grid_axis_step(rng, grid.lights, l, wrap=False)
    else:
        h = float(grid.hues[rng.integers(len(grid.hues))])
        s = float(grid.sats[rng.integers(len(grid.sats))])
        l = float(grid.lights[rng.integers(len(grid.lights))])
    st.set_salient(k, float(h), float(s), float(l))


def _resample_anchor(st: _State, rng, cfg: AnnealConfig, bands):
    grid = cfg.color_grid
    if grid is None:
        st.anchor = _draw_anchor(rng, bands, st.anchor)
    else:
        st.anchor = float(grid.lights[rng.integers(len(grid.lights))])
    st.set_all_faint(np.full(st.m, st.anchor))


def _apply_move(st: _State, rng, cfg: AnnealConfig, headroom: float):
    if st.m >= 2 and rng.random() < 0.5:
        i = int(rng.integers(st.m))
        j = int(rng.integers(st.m - 1))
        if j >= i:
            j += 1
        st.swap(i, j)
    else:
        _disturb_class(st, int(rng.integers(st.m)), rng, cfg, headroom)


# ---------------------------------------------------------------------------
# constraint repair


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self, constraint: str):
        self.left -= 1
        if self.left < 0:
            raise AnnealError(
                f"constraint repair exhausted: could not satisfy the "
                f"{'minimum color-distance' if constraint == 'jnd' else 'foreground contrast'} "
                f"constraint within the repair budget",
                constraint,
            )


def _min_offdiag(de: np.ndarray) -> float:
    if de.shape[0] < 2:
        return math.inf
    return float(de[_triu(de.shape[0])].min())


def _min_without(de: np.ndarray, k: int) -> float:
    """Smallest off-diagonal distance ignoring every pair that touches k."""
    if de.shape[0] < 3:
        return math.inf
    sub = de.copy()
    sub[k, :] = np.inf
    sub[:, k] = np.inf
    return float(sub[_triu(de.shape[0])].min())


def _fg_gap(st: _State, bg_l: float) -> float:
    dl_s = np.abs(st.labs_s[:, 0] - bg_l)
    dl_f = np.abs(st.labs_f[:, 0] - bg_l)
    return float(dl_s.min() - dl_f.max())


def _fg_step(st: _State, bg_l: float, bg_hsl_l: float, rng, cfg: AnnealConfig, bands, tries: int):
    """One corrective action toward the foreground-contrast requirement."""
    grid = cfg.color_grid
    dl_s = np.abs(st.labs_s[:, 0] - bg_l)
    dl_f = np.abs(st.labs_f[:, 0] - bg_l)
    k = int(np.argmin(dl_s))
    if grid is not None:
        lights = grid.lights
        li = _grid_index(lights, st.ls[k])
        direction = 1 if st.labs_s[k, 0] >= bg_l else -1
        ni = li + direction
        if 0 <= ni < len(lights):
            st.set_salient(k, st.h[k], st.s[k], float(lights[ni]))
        else:
            # no headroom left on this side: flip to the far side
            far = len(lights) - 1 if direction < 0 else 0
            st.set_salient(k, st.h[k], st.s[k], float(lights[far]))
        if tries % 4 == 3:
            # pull the anchor one level toward the background lightness
            ai = _grid_index(lights, st.anchor)
            bi = _grid_index(lights, bg_hsl_l)
            if ai != bi:
                ai += 1 if bi > ai else -1
                st.anchor = float(lights[ai])
                st.set_all_faint(np.full(st.m, st.anchor))
        return
    direction = 1.0 if st.labs_s[k, 0] >= bg_l else -1.0
    step = abs(rng.normal(0.0, 2.0 * cfg.light_step)) + 0.01
    new_l = float(np.clip(st.ls[k] + direction * step, 0.05, 0.95))
    if abs(new_l - st.ls[k]) < 1e-9:
        # clamped with no progress: redraw on the opposite side
        new_l = float(rng.uniform(0.55, 0.95) if direction < 0 else rng.uniform(0.05, 0.45))
    st.set_salient(k, st.h[k], st.s[k], new_l)
    headroom = _jitter_headroom(cfg.sigma, grid)
    if tries % 3 == 2 and headroom > 0.0:
        # nudge the highest-contrast faint color toward the background
        j = int(np.argmax(dl_f))
        edge = st.anchor + headroom if bg_hsl_l >= st.anchor else st.anchor - headroom
        st.set_faint_light(j, float(np.clip((st.lf[j] + edge) / 2.0, 0.01, 0.99)))
    if tries % 40 == 39:
        # shift the anchor toward the background lightness inside its band
        band = bands[0] if st.anchor <= bands[0][1] + 1e-12 else bands[-1]
        target = min(max(bg_hsl_l, band[0]), band[1])
        shifted = st.anchor + 0.25 * (target - st.anchor)
        st.anchor = float(min(max(shifted, band[0]), band[1]))
        st.set_all_faint(
            np.clip(st.anchor + rng.uniform(-headroom, headroom, st.m), 0.01, 0.99)
            if headroom > 0.0
            else np.full(st.m, st.anchor)
        )


def _worst_pair(st: _State, pair_mode: bool):
    """Palette ("s"/"f"), indices, and distance of the closest color pair."""
    best = ("s", 0, 0, math.inf)
    for tag, de in (("s", st.de_s), ("f", st.de_f if pair_mode else None)):
        if de is None or de.shape[0] < 2:
            continue
        iu = _triu(de.shape[0])
        flat = int(np.argmin(de[iu]))
        val = float(de[iu][flat])
        if val < best[3]:
            best = (tag, int(iu[0][flat]), int(iu[1][flat]), val)
    return best


def _redraw_all(st: _State, rng, cfg: AnnealConfig, pair_mode: bool, headroom: float):
    grid = cfg.color_grid
    m = st.m
    if grid is None:
        for k in range(m):
            st.set_salient(
                k,
                float(rng.uniform(0.0, 360.0)),
                float(rng.uniform(0.3, 1.0)),
                float(rng.uniform(0.05, 0.95)),
            )
        if pair_mode:
            st.set_all_faint(
                np.clip(st.anchor + rng.uniform(-headroom, headroom, m), 0.01, 0.99)
                if headroom > 0.0
                else np.full(m, st.anchor)
            )
        return
    seen = set()
    for k in range(m):
        for _ in range(200):
            h = float(grid.hues[rng.integers(len(grid.hues))])
            s = float(grid.sats[rng.integers(len(grid.sats))])
            if not pair_mode or (h, s) not in seen:
                break
        seen.add((h, s))
        l = float(grid.lights[rng.integers(len(grid.lights))])
        st.set_salient(k, h, s, l)
    if pair_mode:
        st.set_all_faint(np.full(m, st.anchor))


def _constraint_min(st: _State, pair_mode: bool) -> float:
    lo = _min_offdiag(st.de_s)
    if pair_mode:
        lo = min(lo, _min_offdiag(st.de_f))
    return lo


def _far_band_edge(bands, anchor: float, bg_hsl_l: float) -> float:
    """Band endpoint farthest from the background lightness."""
    band = bands[0] if anchor <= bands[0][1] + 1e-12 else bands[-1]
    return band[0] if abs(band[0] - bg_hsl_l) > abs(band[1] - bg_hsl_l) else band[1]


def _jnd_step(
    st: _State,
    rng,
    cfg: AnnealConfig,
    pair_mode: bool,
    headroom: float,
    tries: int,
    bg_l: float,
    bg_hsl_l: float,
    bands,
    protect_fg: bool = True,
):
    """One maximin-ascent step on the smallest pairwise color distance.

    Perturbations that do not raise the smallest distance are reverted, so
    the repair climbs toward a feasible packing instead of wandering. A
    periodic unconditional redraw escapes flat local optima.
    """
    grid = cfg.color_grid
    if tries > 0 and tries % 250 == 0:
        _redraw_all(st, rng, cfg, pair_mode, headroom)
        return
    tag, i, j, _ = _worst_pair(st, pair_mode)
    if grid is not None:
        k = i if rng.random() < 0.5 else j
        _disturb_class(st, k, rng, cfg, headroom)
        return
    before = _constraint_min(st, pair_mode)
    fg_target = cfg.foreground_margin + cfg.foreground_slack
    # a cramped faint palette often just needs more chroma room: pull the
    # anchor toward the band edge away from the background
    if pair_mode and tag == "f" and tries % 4 == 0:
        edge = _far_band_edge(bands, st.anchor, bg_hsl_l)
        if abs(edge - st.anchor) > 1e-6:
            new_anchor = st.anchor + 0.35 * (edge - st.anchor)
            lf_cand = np.clip(new_anchor + (st.lf - st.anchor), 0.01, 0.99)
            labs_cand = _labs_from_hsl(st.h, st.s, lf_cand)
            de_cand = _pairwise_de(labs_cand)
            if min(_min_offdiag(st.de_s), _min_offdiag(de_cand)) > before:
                st.anchor = float(new_anchor)
                st.lf = lf_cand
                st.labs_f = labs_cand
                st.de_f = de_cand
                return
    k = i if rng.random() < 0.5 else j
    scale = min(1.0 + tries / 100.0, 3.0)
    h = float((st.h[k] + rng.normal(0.0, cfg.hue_step * scale)) % 360.0)
    s = float(np.clip(st.s[k] + rng.normal(0.0, cfg.sat_step * scale), 0.02, 1.0))
    l = float(np.clip(st.ls[k] + rng.normal(0.0, cfg.light_step * scale), 0.05, 0.95))
    # evaluate the candidate against the cached rows before touching state
    lab_s = _lab_row(h, s, l)
    row_s = ciede2000_nd(lab_s, st.labs_s)
    row_s[k] = np.inf
    new_min = min(_min_without(st.de_s, k), float(row_s.min()))
    lab_f = row_f = lf_k = None
    if pair_mode:
        lf_k = _draw_jitter(rng, st.anchor, headroom)
        lab_f = _lab_row(h, s, lf_k)
        row_f = ciede2000_nd(lab_f, st.labs_f)
        row_f[k] = np.inf
        new_min = min(new_min, _min_without(st.de_f, k), float(row_f.min()))
    if new_min <= before:
        return
    if protect_fg and pair_mode:
        dl_s = np.abs(st.labs_s[:, 0] - bg_l)
        dl_s[k] = abs(lab_s[0] - bg_l)
        dl_f = np.abs(st.labs_f[:, 0] - bg_l)
        dl_f[k] = abs(lab_f[0] - bg_l)
        if float(dl_s.min() - dl_f.max()) < fg_target:
            return
    st.commit_salient(k, h, s, l, lab_s, row_s)
    if pair_mode:
        st.commit_faint_light(k, lf_k, lab_f, row_f)


def _repair_state(
    st: _State,
    rng,
    cfg: AnnealConfig,
    pair_mode: bool,
    bg_l: float,
    bg_hsl_l: float,
    bands,
    budget: _Budget,
):
    """Interleave foreground and color-distance fixes until both hold."""
    eta_target = cfg.eta + cfg.jnd_slack
    fg_target = cfg.foreground_margin + cfg.foreground_slack
    headroom = _jitter_headroom(cfg.sigma, cfg.color_grid)
    fg_tries = 0
    jnd_tries = 0
    while True:
        if pair_mode and _fg_gap(st, bg_l) < fg_target:
            budget.spend("foreground")
            _fg_step(st, bg_l, bg_hsl_l, rng, cfg, bands, fg_tries)
            fg_tries += 1
            continue
        min_de = min(
            _min_offdiag(st.de_s),
            _min_offdiag(st.de_f) if pair_mode else math.inf,
        )
        if min_de < eta_target:
            budget.spend("jnd")
            _jnd_step(st, rng, cfg, pair_mode, headroom, jnd_tries, bg_l, bg_hsl_l, bands)
            jnd_tries += 1
            continue
        return


# ---------------------------------------------------------------------------
# public operations


def accept(delta_e: float, temperature: float, rng) -> bool:
    """Metropolis rule: uphill always, downhill with probability exp(dE/T)."""
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    x = delta_e / temperature
    if x >= 0.0:
        p = 1.0
    elif x < -700.0:
        p = 0.0
    else:
        p = math.exp(x)
    return bool(rng.random() < p)


def _gate_fires(prev_delta: float, temperature: float, rng) -> bool:
    # literal reuse of the acceptance expression with the previous delta
    x = prev_delta / temperature
    if x >= 0.0:
        p = 1.0
    elif x < -700.0:
        p = 0.0
    else:
        p = math.exp(x)
    return bool(rng.random() < p)


def _state_from_pair(pair: PalettePair) -> _State:
    h = [c.hsl.h for c in pair.salient.colors]
    s = [c.hsl.s for c in pair.salient.colors]
    ls = [c.hsl.l for c in pair.salient.colors]
    lf = [c.hsl.l for c in pair.faint.colors]
    return _State(h, s, ls, lf, pair.uniform_lightness)


def _pair_from_state(st: _State, cfg: AnnealConfig) -> PalettePair:
    salient = Palette(
        tuple(
            PaletteColor.from_hsl(ColorHSL(float(st.h[k]), float(st.s[k]), float(st.ls[k])))
            for k in range(st.m)
        )
    )
    faint = Palette(
        tuple(
            PaletteColor.from_hsl(ColorHSL(float(st.h[k]), float(st.s[k]), float(st.lf[k])))
            for k in range(st.m)
        )
    )
    return PalettePair(
        salient=salient,
        faint=faint,
        uniform_lightness=st.anchor,
        background=cfg.background,
        sigma=cfg.sigma,
        eta=cfg.eta,
        seed=cfg.seed,
    )


def propose_neighbor(
    pair: PalettePair,
    temperature: float,
    prev_delta_e: float,
    rng,
    cfg: AnnealConfig,
) -> PalettePair:
    """One proposal: optional uniform-lightness resample, then a swap or a
    single-class disturbance, then foreground-contrast repair. The result
    keeps hue/saturation mirroring and the bounded faint lightness but may
    still violate the minimum-distance constraint (repaired separately)."""
    st = _state_from_pair(pair)
    bg_lab_l = srgb_to_lab(cfg.background).L
    bg_hsl_l = srgb_to_hsl(cfg.background).l
    bands = _lightness_bands(bg_lab_l)
    headroom = _jitter_headroom(cfg.sigma, cfg.color_grid)
    if _gate_fires(prev_delta_e, temperature, rng):
        _resample_anchor(st, rng, cfg, bands)
    _apply_move(st, rng, cfg, headroom)
    budget = _Budget(cfg.max_repair_iterations)
    fg_target = cfg.foreground_margin + cfg.foreground_slack
    tries = 0
    while _fg_gap(st, bg_lab_l) < fg_target:
        budget.spend("foreground")
        _fg_step(st, bg_lab_l, bg_hsl_l, rng, cfg, bands, tries)
        tries += 1
    return _pair_from_state(st, cfg)


def repair_jnd(pair: PalettePair, eta: float, rng, max_iterations: int = 3000) -> PalettePair:
    """Perturb colors until both palettes meet the pairwise distance floor.

    Hue/saturation mirroring is re-imposed after every perturbation; the
    foreground-contrast constraint is not protected here.
    """
    st = _state_from_pair(pair)
    cfg = AnnealConfig(sigma=pair.sigma, background=pair.background, seed=pair.seed)
    headroom = _jitter_headroom(pair.sigma, None)
    bg_l = srgb_to_lab(pair.background).L
    bg_hsl_l = srgb_to_hsl(pair.background).l
    bands = _lightness_bands(bg_l)
    tries = 0
    while min(_min_offdiag(st.de_s), _min_offdiag(st.de_f)) < eta:
        if tries >= max_iterations:
            raise AnnealError(
                "could not reach the minimum pairwise color distance "
                f"{eta} within {max_iterations} repair iterations",
                "jnd",
            )
        _jnd_step(st, rng, cfg, True, headroom, tries, bg_l, bg_hsl_l, bands, protect_fg=False)
        tries += 1
    out = _pair_from_state(st, cfg)
    return PalettePair(
        salient=out.salient,
        faint=out.faint,
        uniform_lightness=pair.uniform_lightness,
        background=pair.background,
        sigma=pair.sigma,
        eta=pair.eta,
        seed=pair.seed,
    )


# ---------------------------------------------------------------------------
# initialization, calibration, and the main loop


def _init_state(rng, m: int, cfg: AnnealConfig, pair_mode: bool, bands) -> _State:
    grid = cfg.color_grid
    if grid is None:
        h = rng.uniform(0.0, 360.0, m)
        s = rng.uniform(0.0, 1.0, m)
        ls = rng.uniform(0.25, 0.75, m)
        if pair_mode:
            if len(bands) == 1:
                lo, hi = bands[0]
            else:
                lo, hi = bands[int(rng.integers(2))]
            anchor = float(rng.uniform(lo, hi))
            lf = np.full(m, anchor)
        else:
            anchor, lf = 0.0, None
        return _State(h, s, ls, lf, anchor)
    if pair_mode and m > len(grid.hues) * len(grid.sats):
        raise AnnealError(
            f"grid offers {len(grid.hues) * len(grid.sats)} hue/saturation "
            f"combinations for {m} classes",
            "jnd",
        )
    seen = set()
    h = np.empty(m)
    s = np.empty(m)
    ls = np.empty(m)
    for k in range(m):
        for _ in range(500):
            hk = float(grid.hues[rng.integers(len(grid.hues))])
            sk = float(grid.sats[rng.integers(len(grid.sats))])
            if not pair_mode or (hk, sk) not in seen:
                break
        seen.add((hk, sk))
        h[k], s[k] = hk, sk
        ls[k] = float(grid.lights[rng.integers(len(grid.lights))])
    if pair_mode:
        anchor = float(grid.lights[rng.integers(len(grid.lights))])
        lf = np.full(m, anchor)
    else:
        anchor, lf = 0.0, None
    return _State(h, s, ls, lf, anchor)


def _propose_into(
    st: _State,
    rng,
    cfg: AnnealConfig,
    pair_mode: bool,
    bg_l: float,
    bg_hsl_l: float,
    bands,
    resample: bool,
) -> None:
    headroom = _jitter_headroom(cfg.sigma, cfg.color_grid)
    if pair_mode and resample:
        _resample_anchor(st, rng, cfg, bands)
    _apply_move(st, rng, cfg, headroom)
    budget = _Budget(cfg.max_repair_iterations)
    _repair_state(st, rng, cfg, pair_mode, bg_l, bg_hsl_l, bands, budget)


def _calibrate_temperature(
    st: _State, ev: _Evaluator, cfg: AnnealConfig, pair_mode: bool, bg_l, bg_hsl_l, bands
) -> float:
    """Random walk of 100 proposals; pick T so a typical downhill move is
    accepted with probability ~0.8."""
    rng = np.random.default_rng([cfg.seed & 0xFFFFFFFFFFFFFFFF, 0x7CA11B])
    work = st.copy()
    e = ev.energy(work, pair_mode)
    downs = []
    for _ in range(100):
        cand = work.copy()
        resample = pair_mode and bool(rng.random() < 0.5)
        _propose_into(cand, rng, cfg, pair_mode, bg_l, bg_hsl_l, bands, resample)
        ce = ev.energy(cand, pair_mode)
        if ce < e:
            downs.append(e - ce)
        work, e = cand, ce
    if not downs:
        return 1.0
    t0 = float(np.mean(downs) / math.log(1.0 / 0.8))
    return max(t0, cfg.min_temperature * 10.0)


def _polish_grid(st: _State, ev: _Evaluator, cfg: AnnealConfig, pair_mode: bool, bg_l: float):
    """Deterministic local ascent on the grid: single-axis moves and, in
    pair mode, whole-anchor moves, keeping every constraint satisfied."""
    grid = cfg.color_grid
    eta_target = cfg.eta + cfg.jnd_slack
    fg_target = cfg.foreground_margin + cfg.foreground_slack

    def valid(cand: _State) -> bool:
        if _min_offdiag(cand.de_s) < eta_target:
            return False
        if pair_mode:
            if _min_offdiag(cand.de_f) < eta_target:
                return False
            if _fg_gap(cand, bg_l) < fg_target:
                return False
        return True

    def moves(cur: _State):
        # full per-class reassignment: steepest 1-opt over the whole grid
        for k in range(cur.m):
            cur_hsl = (float(cur.h[k]), float(cur.s[k]), float(cur.ls[k]))
            for h in grid.hues:
                for s in grid.sats:
                    for l in grid.lights:
                        if (float(h), float(s), float(l)) != cur_hsl:
                            yield ("s", k, float(h), float(s), float(l))
        if pair_mode:
            for level in grid.lights:
                if float(level) != st.anchor:
                    yield ("anchor", -1, float(level), 0.0, 0.0)

    best_e = ev.energy(st, pair_mode)
    for _ in range(200):
        best_move = None
        for move in moves(st):
            cand = st.copy()
            kind, k, a, b, c = move
            if kind == "s":
                cand.set_salient(k, a, b, c)
            else:
                cand.anchor = a
                cand.set_all_faint(np.full(cand.m, a))
            if not valid(cand):
                continue
            e = ev.energy(cand, pair_mode)
            if e > best_e + 1e-12:
                best_e = e
                best_move = move
        if best_move is None:
            return
        kind, k, a, b, c = best_move
        if kind == "s":
            st.set_salient(k, a, b, c)
        else:
            st.anchor = a
            st.set_all_faint(np.full(st.m, a))


def _polish_faint_jitter(st: _State, cfg: AnnealConfig, bg_l: float):
    """Deterministic maximin pass over the faint lightness jitters.

    sigma exists to buy back discriminability for the faint palette, but
    the random per-proposal jitter leaves the binding faint pair at the
    repair floor, so after the schedule ends the jitters are packed within
    the allowed band to lift the minimum faint distance. Hue, saturation,
    and the anchor stay fixed; commits preserve the foreground separation,
    and staying inside the band keeps the lightness SD under sigma.
    """
    headroom = _jitter_headroom(cfg.sigma, cfg.color_grid)
    if st.lf is None or st.m < 2 or headroom <= 0.0:
        return
    lo = float(np.clip(st.anchor - headroom, 0.01, 0.99))
    hi = float(np.clip(st.anchor + headroom, 0.01, 0.99))
    if hi - lo < 1e-9:
        return
    levels = np.linspace(lo, hi, 17)
    fg_target = cfg.foreground_margin + cfg.foreground_slack
    min_salient_dl = float(np.min(np.abs(st.labs_s[:, 0] - bg_l)))
    for _ in range(50):
        improved = False
        for k in range(st.m):
            current = _min_offdiag(st.de_f)
            base = _min_without(st.de_f, k)
            best = None
            for lev in levels:
                lev = float(lev)
                if abs(lev - float(st.lf[k])) < 1e-9:
                    continue
                lab = _lab_row(float(st.h[k]), float(st.s[k]), lev)
                row = ciede2000_nd(lab, st.labs_f)
                row[k] = np.inf
                cand = min(base, float(row.min()))
                if cand <= current + 1e-9:
                    continue
                dl_f = np.abs(st.labs_f[:, 0] - bg_l)
                dl_f[k] = abs(float(lab[0]) - bg_l)
                if min_salient_dl - float(dl_f.max()) < fg_target:
                    continue
                current = cand
                best = (lev, lab, row)
            if best is not None:
                st.commit_faint_light(k, best[0], best[1], best[2])
                improved = True
        if not improved:
            return


def _anneal(
    dataset: Dataset,
    graph: NeighborGraph,
    field,
    model: NameModel,
    cfg: AnnealConfig,
    pair_mode: bool,
):
    rng = np.random.default_rng(cfg.seed & 0xFFFFFFFFFFFFFFFF)
    ev = _Evaluator(dataset, graph, field, model, cfg)
    bg_l = srgb_to_lab(cfg.background).L
    bg_hsl_l = srgb_to_hsl(cfg.background).l
    bands = _lightness_bands(bg_l)

    st = _init_state(rng, dataset.m, cfg, pair_mode, bands)
    budget = _Budget(cfg.max_repair_iterations)
    _repair_state(st, rng, cfg, pair_mode, bg_l, bg_hsl_l, bands, budget)

    t0 = cfg.initial_temperature
    if t0 is None:
        t0 = _calibrate_temperature(st, ev, cfg, pair_mode, bg_l, bg_hsl_l, bands)

    energy = ev.energy(st, pair_mode)
    best = st.copy()
    best_energy = energy
    prev_delta = 0.0
    rows = []

    t = t0
    iteration = 0
    while t > cfg.min_temperature:
        cand = st.copy()
        resample = pair_mode and _gate_fires(prev_delta, t, rng)
        _propose_into(cand, rng, cfg, pair_mode, bg_l, bg_hsl_l, bands, resample)
        cand_energy = ev.energy(cand, pair_mode)
        delta = cand_energy - energy
        if accept(delta, t, rng):
            st = cand
            energy = cand_energy
            if energy > best_energy:
                best = st.copy()
                best_energy = energy
        prev_delta = delta
        rows.append(
            TraceRow(
                iteration=iteration,
                temperature=float(t),
                energy=float(energy),
                best_energy=float(best_energy),
                uniform_lightness=float(st.anchor) if pair_mode else 0.0,
            )
        )
        t *= cfg.cooling_rate
        iteration += 1

    if cfg.color_grid is not None:
        _polish_grid(best, ev, cfg, pair_mode, bg_l)
    elif pair_mode:
        _polish_faint_jitter(best, cfg, bg_l)

    return best, AnnealTrace(tuple(rows))


def generate_pair(
    dataset: Dataset,
    graph: NeighborGraph,
    field: SeparabilityField,
    model: NameModel,
    cfg: AnnealConfig,
):
    """Optimize a linked salient/faint palette pair for the dataset.

    Returns (PalettePair, AnnealTrace). Deterministic for a fixed seed; the
    returned pair always satisfies the four hard constraints.
    """
    best, trace = _anneal(dataset, graph, field, model, cfg, pair_mode=True)
    pair = _pair_from_state(best, cfg)
    report = check_constraints(pair, foreground_margin=cfg.foreground_margin)
    if not report.all_pass():
        failed = report.failures()
        raise AnnealError(
            "internal error: optimized pair fails validation: "
            + "; ".join(c.detail for c in failed),
            failed[0].name,
        )
    return pair, trace


def generate_single(
    dataset: Dataset,
    graph: NeighborGraph,
    model: NameModel,
    cfg: AnnealConfig,
):
    """Optimize one palette (no faint companion): the baseline objective of
    point distinctness, name difference, and minimum pairwise distance."""
    best, trace = _anneal(dataset, graph, None, model, cfg, pair_mode=False)
    palette = Palette(
        tuple(
            PaletteColor.from_hsl(ColorHSL(float(best.h[k]), float(best.s[k]), float(best.ls[k])))
            for k in range(best.m)
        )
    )
    return palette, trace

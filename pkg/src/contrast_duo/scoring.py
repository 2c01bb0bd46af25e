"""Palette types, the pair objective, and hard-constraint validation.

The generator maximizes

    E = w0 * (PD(salient) + PD(faint))
      + w1 * (BC(salient) - BC(faint))
      + w2 * (ND(salient) + ND(faint))
      + w3 * CC(salient, faint)

where PD scores local color distinctness between neighboring marks, BC the
rho-hat weighted lightness contrast against the background (salient wants
more, faint wants less), ND mean pairwise name difference inside a palette,
and CC (in [-1, 0]) penalizes salient/faint partners that read as different
color names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .colornames import NameModel
from .colorspace import (
    ColorHSL,
    ColorLab,
    ColorSRGB,
    delta_luminance,
    hsl_to_srgb,
    min_pairwise_ciede2000,
    pairwise_ciede2000,
    srgb_to_hsl,
    srgb_to_lab,
)
from .datasets import Dataset
from .neighborhood import NeighborGraph, SeparabilityField


@dataclass(frozen=True)
class Weights:
    """Objective term weights, each in [0, 1]."""

    w0: float = 1.0  # point distinctness
    w1: float = 1.0  # background contrast split
    w2: float = 1.0  # name difference
    w3: float = 1.0  # cross-palette name consistency

    def __post_init__(self):
        for name in ("w0", "w1", "w2", "w3"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"weight {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class PaletteColor:
    """One palette entry, kept synchronized across HSL, sRGB, and Lab."""

    hsl: ColorHSL
    srgb: ColorSRGB
    lab: ColorLab

    @classmethod
    def from_hsl(cls, hsl: ColorHSL) -> "PaletteColor":
        srgb = hsl_to_srgb(hsl)
        return cls(hsl=hsl, srgb=srgb, lab=srgb_to_lab(srgb))

    @classmethod
    def from_srgb(cls, srgb: ColorSRGB) -> "PaletteColor":
        return cls(hsl=srgb_to_hsl(srgb), srgb=srgb, lab=srgb_to_lab(srgb))


@dataclass(frozen=True)
class Palette:
    colors: tuple[PaletteColor, ...]

    def __post_init__(self):
        if not self.colors:
            raise ValueError("palette must hold at least one color")

    @classmethod
    def from_hsl_list(cls, hsls) -> "Palette":
        return cls(tuple(PaletteColor.from_hsl(h) for h in hsls))

    @property
    def m(self) -> int:
        return len(self.colors)

    def labs(self) -> np.ndarray:
        return np.array([(c.lab.L, c.lab.a, c.lab.b) for c in self.colors])

    def hex_list(self) -> list[str]:
        return [c.srgb.to_hex() for c in self.colors]


@dataclass(frozen=True)
class PalettePair:
    """Linked salient/faint palettes plus the settings they were built for."""

    salient: Palette
    faint: Palette
    uniform_lightness: float
    background: ColorSRGB
    sigma: float
    eta: float
    seed: int = 0

    def __post_init__(self):
        if self.salient.m != self.faint.m:
            raise ValueError("salient and faint palettes differ in size")

    @property
    def m(self) -> int:
        return self.salient.m

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "background": self.background.to_hex(),
            "sigma": self.sigma,
            "eta": self.eta,
            "salient": self.salient.hex_list(),
            "faint": self.faint.hex_list(),
            "uniformLightness": self.uniform_lightness,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PalettePair":
        """Rebuild a pair from wire JSON.

        Hex quantization cannot carry exact hue/saturation equality, so the
        faint palette is reconstructed from the salient hue/saturation and
        the faint entries' own lightness. That restores the linkage
        invariant exactly at a sub-1/255 cost in the faint sRGB values.
        """
        required = {"m", "background", "sigma", "eta", "salient", "faint", "uniformLightness", "seed"}
        missing = required - set(payload)
        if missing:
            raise ValueError(f"palette pair JSON missing keys: {sorted(missing)}")
        salient = [PaletteColor.from_srgb(ColorSRGB.from_hex(h)) for h in payload["salient"]]
        if len(salient) != payload["m"] or len(payload["faint"]) != payload["m"]:
            raise ValueError("palette length disagrees with 'm'")
        faint = []
        for s, hexval in zip(salient, payload["faint"]):
            l_faint = srgb_to_hsl(ColorSRGB.from_hex(hexval)).l
            faint.append(PaletteColor.from_hsl(ColorHSL(s.hsl.h, s.hsl.s, l_faint)))
        return cls(
            salient=Palette(tuple(salient)),
            faint=Palette(tuple(faint)),
            uniform_lightness=float(payload["uniformLightness"]),
            background=ColorSRGB.from_hex(payload["background"]),
            sigma=float(payload["sigma"]),
            eta=float(payload["eta"]),
            seed=int(payload["seed"]),
        )


@dataclass(frozen=True)
class ScoreBreakdown:
    point_distinctness_salient: float
    point_distinctness_faint: float
    background_contrast_salient: float
    background_contrast_faint: float
    name_difference_salient: float
    name_difference_faint: float
    color_consistency: float
    weights: Weights
    total: float

    def to_json_dict(self) -> dict:
        return {
            "pointDistinctness": {
                "salient": self.point_distinctness_salient,
                "faint": self.point_distinctness_faint,
            },
            "backgroundContrast": {
                "salient": self.background_contrast_salient,
                "faint": self.background_contrast_faint,
            },
            "nameDifference": {
                "salient": self.name_difference_salient,
                "faint": self.name_difference_faint,
            },
            "colorConsistency": self.color_consistency,
            "weights": [self.weights.w0, self.weights.w1, self.weights.w2, self.weights.w3],
            "total": self.total,
        }


# ---------------------------------------------------------------------------
# dataset-side aggregates


def class_pair_weights(dataset: Dataset, graph: NeighborGraph) -> np.ndarray:
    """(m, m) matrix C with C[i, j] the inverse-distance neighbor mass from
    class-i points to class-j neighbors, averaged per point and per class.

    The point-distinctness energy is then sum(C * pairwise_dE(palette)).
    """
    labels = dataset.labels
    m = dataset.m
    deg = graph.degree().astype(float)
    src = np.repeat(np.arange(graph.n), graph.degree())
    counts = np.bincount(labels, minlength=m).astype(float)
    contrib = 1.0 / graph.dists / deg[src] / counts[labels[src]]
    c = np.zeros((m, m))
    np.add.at(c, (labels[src], labels[graph.indices]), contrib)
    return c


def class_rho_mass(dataset: Dataset, field: SeparabilityField) -> np.ndarray:
    """(m,) vector of per-class mean rho-hat."""
    m = dataset.m
    counts = np.bincount(dataset.labels, minlength=m).astype(float)
    sums = np.bincount(dataset.labels, weights=field.rho_hat, minlength=m)
    return sums / counts


def _pairwise_name_matrix(model: NameModel, rows: np.ndarray) -> np.ndarray:
    """Cosine-distance matrix between the model rows at the given indices.

    Equal row indices give exactly 0, matching difference_by_rows.
    """
    units = model.unit_rows[rows]
    d = 1.0 - units @ units.T
    np.clip(d, 0.0, 1.0, out=d)
    d[rows[:, None] == rows[None, :]] = 0.0
    return d


# ---------------------------------------------------------------------------
# energy terms


def point_distinctness_energy(dataset: Dataset, graph: NeighborGraph, palette: Palette) -> float:
    """Per-class mean of gamma, summed over classes."""
    if palette.m != dataset.m:
        raise ValueError(f"palette has {palette.m} colors for {dataset.m} classes")
    c = class_pair_weights(dataset, graph)
    return float(np.sum(c * pairwise_ciede2000(palette.labs())))


def background_contrast_energy(
    dataset: Dataset, field: SeparabilityField, palette: Palette, background: ColorSRGB
) -> float:
    """Sum over classes of rho-hat weighted lightness contrast to the background."""
    if palette.m != dataset.m:
        raise ValueError(f"palette has {palette.m} colors for {dataset.m} classes")
    s = class_rho_mass(dataset, field)
    bg = srgb_to_lab(background)
    dl = np.array([delta_luminance(color.lab, bg) for color in palette.colors])
    return float(np.dot(s, dl))


def name_difference_energy(model: NameModel, palette: Palette) -> float:
    """Mean pairwise name distance inside the palette; 0 for a single color."""
    m = palette.m
    if m < 2:
        return 0.0
    rows = model.row_indices_nd(palette.labs())
    d = _pairwise_name_matrix(model, rows)
    iu = np.triu_indices(m, k=1)
    return float(d[iu].sum() * 2.0 / (m * (m - 1)))


def color_consistency_energy(model: NameModel, pair: PalettePair) -> float:
    """Negated mean name distance between salient colors and their faint
    partners; 0 is best (identical names), -1 worst."""
    rows_s = model.row_indices_nd(pair.salient.labs())
    rows_f = model.row_indices_nd(pair.faint.labs())
    total = 0.0
    for i in range(pair.m):
        total += model.difference_by_rows(int(rows_s[i]), int(rows_f[i]))
    return -total / pair.m


def min_pairwise_distance(palette: Palette) -> float:
    """Smallest CIEDE2000 distance inside the palette; +inf below 2 colors."""
    return min_pairwise_ciede2000(palette.labs())


def pair_energy(
    dataset: Dataset,
    graph: NeighborGraph,
    field: SeparabilityField,
    model: NameModel,
    pair: PalettePair,
    background: ColorSRGB | None = None,
    weights: Weights = Weights(),
) -> ScoreBreakdown:
    """Full objective breakdown for a salient/faint pair."""
    bg = background if background is not None else pair.background
    pd_s = point_distinctness_energy(dataset, graph, pair.salient)
    pd_f = point_distinctness_energy(dataset, graph, pair.faint)
    bc_s = background_contrast_energy(dataset, field, pair.salient, bg)
    bc_f = background_contrast_energy(dataset, field, pair.faint, bg)
    nd_s = name_difference_energy(model, pair.salient)
    nd_f = name_difference_energy(model, pair.faint)
    cc = color_consistency_energy(model, pair)
    total = (
        weights.w0 * (pd_s + pd_f)
        + weights.w1 * (bc_s - bc_f)
        + weights.w2 * (nd_s + nd_f)
        + weights.w3 * cc
    )
    return ScoreBreakdown(
        point_distinctness_salient=pd_s,
        point_distinctness_faint=pd_f,
        background_contrast_salient=bc_s,
        background_contrast_faint=bc_f,
        name_difference_salient=nd_s,
        name_difference_faint=nd_f,
        color_consistency=cc,
        weights=weights,
        total=total,
    )


def single_energy(
    dataset: Dataset,
    graph: NeighborGraph,
    model: NameModel,
    palette: Palette,
    weights: Weights = Weights(),
) -> float:
    """Baseline single-palette objective: distinctness, names, and the
    minimum pairwise distance (0 for a single color)."""
    pd = point_distinctness_energy(dataset, graph, palette)
    nd = name_difference_energy(model, palette)
    cd = 0.0 if palette.m < 2 else min_pairwise_distance(palette)
    return weights.w0 * pd + weights.w1 * nd + weights.w2 * cd


# ---------------------------------------------------------------------------
# hard constraints


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    margin: float
    detail: str

    def to_json_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "margin": self.margin, "detail": self.detail}


@dataclass(frozen=True)
class ConstraintReport:
    checks: tuple[ConstraintCheck, ...] = field(default=())

    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed]

    def to_json_dict(self) -> dict:
        return {"allPass": self.all_pass(), "checks": [c.to_json_dict() for c in self.checks]}


def hue_distance(h1: float, h2: float) -> float:
    """Wrapped absolute hue difference in degrees."""
    d = abs(h1 - h2) % 360.0
    return min(d, 360.0 - d)


def check_constraints(
    pair: PalettePair,
    background: ColorSRGB | None = None,
    eta: float | None = None,
    sigma: float | None = None,
    hue_sat_tol: float = 1e-6,
    foreground_margin: float = 1.0,
) -> ConstraintReport:
    """Validate the four hard constraints of a palette pair.

    jnd: within-palette min CIEDE2000 >= eta, both palettes.
    linkage: salient and faint hue/saturation equal within hue_sat_tol.
    faint_sd: population SD of faint HSL lightness <= sigma.
    foreground: every salient lightness contrast to the background strictly
        exceeds every faint one, by at least foreground_margin L-units.
    """
    bg = background if background is not None else pair.background
    eta = eta if eta is not None else pair.eta
    sigma = sigma if sigma is not None else pair.sigma
    bg_lab = srgb_to_lab(bg)
    m = pair.m

    checks = []

    min_s = min_pairwise_distance(pair.salient)
    min_f = min_pairwise_distance(pair.faint)
    worst = min(min_s, min_f)
    side = "salient" if min_s <= min_f else "faint"
    margin = worst - eta if math.isfinite(worst) else math.inf
    checks.append(
        ConstraintCheck(
            name="jnd",
            passed=bool(worst >= eta),
            margin=margin if math.isfinite(margin) else 1e9,
            detail=f"min pairwise dE {worst:.4f} in {side} palette vs eta {eta:.4f}",
        )
    )

    worst_dev = 0.0
    worst_idx = 0
    for i in range(m):
        s_hsl = pair.salient.colors[i].hsl
        f_hsl = pair.faint.colors[i].hsl
        dev = max(hue_distance(s_hsl.h, f_hsl.h), abs(s_hsl.s - f_hsl.s))
        if dev > worst_dev:
            worst_dev = dev
            worst_idx = i
    checks.append(
        ConstraintCheck(
            name="linkage",
            passed=bool(worst_dev <= hue_sat_tol),
            margin=hue_sat_tol - worst_dev,
            detail=f"max hue/sat deviation {worst_dev:.3e} at index {worst_idx}",
        )
    )

    lightness = np.array([c.hsl.l for c in pair.faint.colors])
    sd = float(lightness.std())
    checks.append(
        ConstraintCheck(
            name="faint_sd",
            passed=bool(sd <= sigma),
            margin=sigma - sd,
            detail=f"faint lightness SD {sd:.5f} vs sigma {sigma:.5f}",
        )
    )

    dl_s = [delta_luminance(c.lab, bg_lab) for c in pair.salient.colors]
    dl_f = [delta_luminance(c.lab, bg_lab) for c in pair.faint.colors]
    lo_s = min(dl_s)
    hi_f = max(dl_f)
    diff = lo_s - hi_f
    checks.append(
        ConstraintCheck(
            name="foreground",
            passed=bool(diff > 0 and diff >= foreground_margin),
            margin=diff - foreground_margin,
            detail=(
                f"min salient dL {lo_s:.3f} (index {int(np.argmin(dl_s))}) vs "
                f"max faint dL {hi_f:.3f} (index {int(np.argmax(dl_f))})"
            ),
        )
    )

    return ConstraintReport(tuple(checks))

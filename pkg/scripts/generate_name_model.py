"""Generate the bundled color-name model CSV.

The model has the shape of a survey-derived color naming table: one row per
non-empty 10-unit CIELAB bin, one count column per color term. Counts here
are synthetic, produced by Gaussian kernels around prototype colors, which
keeps the file deterministic and license-free while preserving the
properties the scoring code relies on (smooth falloff, disjoint support for
far-apart terms, a sensible argmax term per region).

Run from the repository root:

    python scripts/generate_name_model.py
"""

from __future__ import annotations

import math
import pathlib

from contrast_duo.colorspace import ColorSRGB, srgb_to_lab

# term -> prototype sRGB hex
TERMS = [
    ("red", "#d62728"),
    ("orange", "#ff7f0e"),
    ("brown", "#8c564b"),
    ("yellow", "#ffff00"),
    ("olive", "#808000"),
    ("green", "#2ca02c"),
    ("lime", "#7fff00"),
    ("teal", "#008080"),
    ("cyan", "#17becf"),
    ("blue", "#1f77b4"),
    ("navy", "#000080"),
    ("indigo", "#4b0082"),
    ("purple", "#9467bd"),
    ("magenta", "#ff00ff"),
    ("pink", "#ffb6c1"),
    ("salmon", "#fa8072"),
    ("maroon", "#800000"),
    ("peach", "#ffdab9"),
    ("tan", "#d2b48c"),
    ("beige", "#f5f5dc"),
    ("white", "#ffffff"),
    ("lightgray", "#d3d3d3"),
    ("gray", "#808080"),
    ("darkgray", "#404040"),
    ("black", "#000000"),
]

AMPLITUDE = 400.0
KERNEL_SD = 25.0
GAMUT_SLACK = 0.02

# matches the loader: L in [0,100] -> 10 bins, a and b in [-110,110] -> 22 bins
L_BINS = 10
AB_BINS = 22


def _linear_rgb(lab: tuple[float, float, float]) -> tuple[float, float, float]:
    L, a, b = lab
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0

    def finv(t: float) -> float:
        t3 = t * t * t
        if t3 > 216.0 / 24389.0:
            return t3
        return (116.0 * t - 16.0) * 27.0 / 24389.0

    x = finv(fx) * 0.95047
    y = finv(fy) * 1.00000
    z = finv(fz) * 1.08883
    return (
        3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
        -0.9692660 * x + 1.8760108 * y + 0.0415560 * z,
        0.0556434 * x - 0.2040259 * y + 1.0572252 * z,
    )


def main() -> None:
    prototypes = []
    for _, hexval in TERMS:
        lab = srgb_to_lab(ColorSRGB.from_hex(hexval))
        prototypes.append((lab.L, lab.a, lab.b))

    lines = ["li,ai,bi," + ",".join(name for name, _ in TERMS)]
    rows = 0
    for li in range(L_BINS):
        for ai in range(AB_BINS):
            for bi in range(AB_BINS):
                center = (10.0 * li + 5.0, -110.0 + 10.0 * ai + 5.0, -110.0 + 10.0 * bi + 5.0)
                lin = _linear_rgb(center)
                if any(u < -GAMUT_SLACK or u > 1.0 + GAMUT_SLACK for u in lin):
                    continue
                counts = []
                for pl, pa, pb in prototypes:
                    d2 = (center[0] - pl) ** 2 + (center[1] - pa) ** 2 + (center[2] - pb) ** 2
                    counts.append(round(AMPLITUDE * math.exp(-d2 / (2.0 * KERNEL_SD**2))))
                if sum(counts) == 0:
                    continue
                lines.append(f"{li},{ai},{bi}," + ",".join(str(c) for c in counts))
                rows += 1

    out = pathlib.Path(__file__).resolve().parent.parent / "src" / "contrast_duo" / "data" / "color_names.csv"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({rows} rows, {len(TERMS)} terms)")


if __name__ == "__main__":
    main()

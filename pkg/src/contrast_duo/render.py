"""Deterministic SVG rendering of labeled scatterplots.

Element order and number formatting are fixed so outputs can be compared
as text (golden files). Emphasized points are drawn after the rest within
a separate group, putting them on top.
"""

from dataclasses import dataclass

from .datasets import Dataset


@dataclass(frozen=True)
class RenderSpec:
    width: float = 600.0
    height: float = 600.0
    mark_diameter: float = 10.0
    background: str = "#ffffff"
    show_legend: bool = True

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("render dimensions must be positive")
        if self.mark_diameter <= 0:
            raise ValueError("mark diameter must be positive")


LEGEND_WIDTH = 120.0
_LEGEND_ROW = 22.0
_LEGEND_SWATCH = 14.0


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def render_svg(
    dataset: Dataset,
    colors,
    spec: RenderSpec = RenderSpec(),
    emphasized=None,
    legend=None,
) -> str:
    """Render one circle per point, colored per entry of `colors` (hex).

    `emphasized` is an optional per-point bool sequence; emphasized points
    are drawn last (on top). `legend` is an optional list of (label, hex)
    drawn as swatches in a right-hand gutter, ordered as given.
    """
    n = dataset.n
    if len(colors) != n:
        raise ValueError(f"need {n} colors, got {len(colors)}")
    if emphasized is None:
        emphasized = [False] * n
    if len(emphasized) != n:
        raise ValueError("emphasized flags must align with points")

    r = spec.mark_diameter / 2.0
    pad = r + 2.0
    xs = dataset.points[:, 0]
    ys = dataset.points[:, 1]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    x_span = x_hi - x_lo or 1.0
    y_span = y_hi - y_lo or 1.0

    def place(x: float, y: float):
        px = pad + (x - x_lo) / x_span * (spec.width - 2.0 * pad)
        # data y grows upward, SVG y grows downward
        py = spec.height - pad - (y - y_lo) / y_span * (spec.height - 2.0 * pad)
        return px, py

    legend_entries = list(legend) if (legend and spec.show_legend) else []
    total_w = spec.width + (LEGEND_WIDTH if legend_entries else 0.0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(total_w)}" '
        f'height="{_fmt(spec.height)}" viewBox="0 0 {_fmt(total_w)} {_fmt(spec.height)}">',
        f'<rect width="{_fmt(total_w)}" height="{_fmt(spec.height)}" fill="{spec.background}"/>',
    ]
    for layer in (False, True):
        circles = []
        for i in range(n):
            if bool(emphasized[i]) != layer:
                continue
            px, py = place(float(xs[i]), float(ys[i]))
            circles.append(
                f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r)}" fill="{colors[i]}"/>'
            )
        if circles:
            tag = "emphasized" if layer else "context"
            out.append(f'<g class="{tag}">')
            out.extend(circles)
            out.append("</g>")
    if legend_entries:
        out.append('<g class="legend">')
        for row, (label, hexval) in enumerate(legend_entries):
            y = 16.0 + row * _LEGEND_ROW
            out.append(
                f'<rect x="{_fmt(spec.width + 12.0)}" y="{_fmt(y)}" '
                f'width="{_fmt(_LEGEND_SWATCH)}" height="{_fmt(_LEGEND_SWATCH)}" fill="{hexval}"/>'
            )
            out.append(
                f'<text x="{_fmt(spec.width + 32.0)}" y="{_fmt(y + 12.0)}" '
                f'font-family="sans-serif" font-size="12">{_escape(str(label))}</text>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")

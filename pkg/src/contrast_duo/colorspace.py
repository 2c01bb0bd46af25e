"""Color spaces and perceptual distances.

sRGB (D65, 2 degree observer) to CIELAB, HSL as the palette parameterization,
CIEDE2000 for perceptual distance, and the mark-size dependent JND threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# D65 reference white
_XN = 0.95047
_YN = 1.00000
_ZN = 1.08883

# sRGB -> XYZ (linear light), IEC 61966-2-1
_RGB2XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
_XYZ2RGB = (
    (3.2404542, -1.5371385, -0.4985314),
    (-0.9692660, 1.8760108, 0.0415560),
    (0.0556434, -0.2040259, 1.0572252),
)


@dataclass(frozen=True)
class ColorSRGB:
    """sRGB color, channels in [0, 1]."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"sRGB channel {name}={v} outside [0, 1]")

    @classmethod
    def from_hex(cls, text: str) -> "ColorSRGB":
        s = text.strip().lstrip("#")
        if len(s) != 6:
            raise ValueError(f"expected #rrggbb, got {text!r}")
        try:
            r, g, b = (int(s[i : i + 2], 16) for i in (0, 2, 4))
        except ValueError as exc:
            raise ValueError(f"expected #rrggbb, got {text!r}") from exc
        return cls(r / 255.0, g / 255.0, b / 255.0)

    def to_hex(self) -> str:
        return "#%02x%02x%02x" % (
            round(self.r * 255.0),
            round(self.g * 255.0),
            round(self.b * 255.0),
        )


@dataclass(frozen=True)
class ColorLab:
    """CIELAB color (D65, 2 degree observer)."""

    L: float
    a: float
    b: float


@dataclass(frozen=True)
class ColorHSL:
    """HSL color: hue in [0, 360), saturation and lightness in [0, 1]."""

    h: float
    s: float
    l: float

    def __post_init__(self):
        if not (0.0 <= self.h < 360.0):
            raise ValueError(f"hue {self.h} outside [0, 360)")
        if not (0.0 <= self.s <= 1.0):
            raise ValueError(f"saturation {self.s} outside [0, 1]")
        if not (0.0 <= self.l <= 1.0):
            raise ValueError(f"lightness {self.l} outside [0, 1]")


@dataclass(frozen=True)
class MarkSize:
    """Mark diameter in pixels."""

    diameter: float

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError(f"mark diameter must be positive, got {self.diameter}")


@dataclass(frozen=True)
class JndParams:
    """Parameters of the size-dependent discriminability threshold."""

    c1: float = 5.0
    c2: float = 25.0
    eta_min: float = 5.0
    eta_max: float = 20.0


DEFAULT_JND = JndParams()


def jnd_threshold(mark: MarkSize, params: JndParams = DEFAULT_JND) -> float:
    """Minimum CIEDE2000 distance eta required between palette entries.

    Smaller marks need larger color differences to stay tellable apart, so
    the threshold grows as the diameter shrinks; clamped to
    [eta_min, eta_max].
    """
    raw = params.c1 + params.c2 / mark.diameter
    return min(max(raw, params.eta_min), params.eta_max)


def _srgb_decode(u: float) -> float:
    # inverse companding, sRGB transfer curve
    if u <= 0.04045:
        return u / 12.92
    return ((u + 0.055) / 1.055) ** 2.4


def _srgb_encode(u: float) -> float:
    if u <= 0.0031308:
        return u * 12.92
    return 1.055 * u ** (1.0 / 2.4) - 0.055


def _lab_f(t: float) -> float:
    # CIE 1976 nonlinearity with the linear toe
    if t > 216.0 / 24389.0:
        return t ** (1.0 / 3.0)
    return (24389.0 / 27.0 * t + 16.0) / 116.0


def _lab_finv(t: float) -> float:
    t3 = t * t * t
    if t3 > 216.0 / 24389.0:
        return t3
    return (116.0 * t - 16.0) * 27.0 / 24389.0


def srgb_to_lab(c: ColorSRGB) -> ColorLab:
    rl = _srgb_decode(c.r)
    gl = _srgb_decode(c.g)
    bl = _srgb_decode(c.b)
    x = _RGB2XYZ[0][0] * rl + _RGB2XYZ[0][1] * gl + _RGB2XYZ[0][2] * bl
    y = _RGB2XYZ[1][0] * rl + _RGB2XYZ[1][1] * gl + _RGB2XYZ[1][2] * bl
    z = _RGB2XYZ[2][0] * rl + _RGB2XYZ[2][1] * gl + _RGB2XYZ[2][2] * bl
    fx = _lab_f(x / _XN)
    fy = _lab_f(y / _YN)
    fz = _lab_f(z / _ZN)
    return ColorLab(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_srgb(c: ColorLab) -> tuple[ColorSRGB, bool]:
    """Convert to sRGB, clamping out-of-gamut results.

    Returns the (possibly clamped) color and True when the exact result was
    already inside the gamut.
    """
    fy = (c.L + 16.0) / 116.0
    fx = fy + c.a / 500.0
    fz = fy - c.b / 200.0
    x = _lab_finv(fx) * _XN
    y = _lab_finv(fy) * _YN
    z = _lab_finv(fz) * _ZN
    rl = _XYZ2RGB[0][0] * x + _XYZ2RGB[0][1] * y + _XYZ2RGB[0][2] * z
    gl = _XYZ2RGB[1][0] * x + _XYZ2RGB[1][1] * y + _XYZ2RGB[1][2] * z
    bl = _XYZ2RGB[2][0] * x + _XYZ2RGB[2][1] * y + _XYZ2RGB[2][2] * z
    in_gamut = True
    channels = []
    for u in (rl, gl, bl):
        if u < -1e-9 or u > 1.0 + 1e-9:
            in_gamut = False
        u = min(max(u, 0.0), 1.0)
        channels.append(_srgb_encode(u))
    out = ColorSRGB(*(min(max(v, 0.0), 1.0) for v in channels))
    return out, in_gamut


def hsl_to_srgb(c: ColorHSL) -> ColorSRGB:
    chroma = (1.0 - abs(2.0 * c.l - 1.0)) * c.s
    hp = c.h / 60.0
    x = chroma * (1.0 - abs(hp % 2.0 - 1.0))
    if hp < 1:
        r1, g1, b1 = chroma, x, 0.0
    elif hp < 2:
        r1, g1, b1 = x, chroma, 0.0
    elif hp < 3:
        r1, g1, b1 = 0.0, chroma, x
    elif hp < 4:
        r1, g1, b1 = 0.0, x, chroma
    elif hp < 5:
        r1, g1, b1 = x, 0.0, chroma
    else:
        r1, g1, b1 = chroma, 0.0, x
    m = c.l - chroma / 2.0
    return ColorSRGB(
        min(max(r1 + m, 0.0), 1.0),
        min(max(g1 + m, 0.0), 1.0),
        min(max(b1 + m, 0.0), 1.0),
    )


def srgb_to_hsl(c: ColorSRGB) -> ColorHSL:
    mx = max(c.r, c.g, c.b)
    mn = min(c.r, c.g, c.b)
    l = (mx + mn) / 2.0
    if mx == mn:
        # achromatic, hue is conventionally 0
        return ColorHSL(0.0, 0.0, l)
    d = mx - mn
    s = d / (1.0 - abs(2.0 * l - 1.0))
    if mx == c.r:
        h = ((c.g - c.b) / d) % 6.0
    elif mx == c.g:
        h = (c.b - c.r) / d + 2.0
    else:
        h = (c.r - c.g) / d + 4.0
    h *= 60.0
    if h >= 360.0:
        h -= 360.0
    return ColorHSL(h, min(s, 1.0), l)


def delta_luminance(c1: ColorLab, c2: ColorLab) -> float:
    """Absolute CIELAB lightness difference."""
    return abs(c1.L - c2.L)


def srgb_to_lab_nd(rgb: np.ndarray) -> np.ndarray:
    """Vectorized sRGB -> Lab over an (..., 3) array."""
    rgb = np.asarray(rgb, dtype=float)
    lin = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    m = np.array(_RGB2XYZ)
    xyz = lin @ m.T
    xyz = xyz / np.array([_XN, _YN, _ZN])
    eps = 216.0 / 24389.0
    f = np.where(xyz > eps, np.cbrt(xyz), (24389.0 / 27.0 * xyz + 16.0) / 116.0)
    out = np.empty_like(f)
    out[..., 0] = 116.0 * f[..., 1] - 16.0
    out[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    out[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return out


def ciede2000_nd(lab1: np.ndarray, lab2: np.ndarray) -> np.ndarray:
    """Vectorized CIEDE2000 over broadcastable (..., 3) Lab arrays."""
    lab1 = np.asarray(lab1, dtype=float)
    lab2 = np.asarray(lab2, dtype=float)
    L1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    L2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    # Step 1: adjusted a* with the neutral-axis rescaling G
    c1 = np.hypot(a1, b1)
    c2 = np.hypot(a2, b2)
    cbar = (c1 + c2) / 2.0
    cbar7 = cbar**7
    g = 0.5 * (1.0 - np.sqrt(cbar7 / (cbar7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.degrees(np.arctan2(b1, a1p)) % 360.0
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360.0
    h1p = np.where((np.abs(a1p) < 1e-300) & (np.abs(b1) < 1e-300), 0.0, h1p)
    h2p = np.where((np.abs(a2p) < 1e-300) & (np.abs(b2) < 1e-300), 0.0, h2p)

    # Step 2: differences
    dlp = L2 - L1
    dcp = c2p - c1p
    hdiff = h2p - h1p
    dhp = np.where(np.abs(hdiff) <= 180.0, hdiff, hdiff - np.sign(hdiff) * 360.0)
    dhp = np.where((c1p * c2p) == 0.0, 0.0, dhp)
    dHp = 2.0 * np.sqrt(c1p * c2p) * np.sin(np.radians(dhp) / 2.0)

    # Step 3: averages
    lbp = (L1 + L2) / 2.0
    cbp = (c1p + c2p) / 2.0
    hsum = h1p + h2p
    habs = np.abs(h1p - h2p)
    hbp = np.where(habs <= 180.0, hsum / 2.0, np.where(hsum < 360.0, (hsum + 360.0) / 2.0, (hsum - 360.0) / 2.0))
    hbp = np.where((c1p * c2p) == 0.0, hsum, hbp)

    t = (
        1.0
        - 0.17 * np.cos(np.radians(hbp - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbp))
        + 0.32 * np.cos(np.radians(3.0 * hbp + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbp - 63.0))
    )
    dtheta = 30.0 * np.exp(-(((hbp - 275.0) / 25.0) ** 2))
    cbp7 = cbp**7
    rc = 2.0 * np.sqrt(cbp7 / (cbp7 + 25.0**7))
    lb50 = (lbp - 50.0) ** 2
    sl = 1.0 + 0.015 * lb50 / np.sqrt(20.0 + lb50)
    sc = 1.0 + 0.045 * cbp
    sh = 1.0 + 0.015 * cbp * t
    rt = -np.sin(np.radians(2.0 * dtheta)) * rc

    return np.sqrt(
        (dlp / sl) ** 2
        + (dcp / sc) ** 2
        + (dHp / sh) ** 2
        + rt * (dcp / sc) * (dHp / sh)
    )


def ciede2000(c1: ColorLab, c2: ColorLab) -> float:
    """CIEDE2000 color difference between two Lab colors."""
    return float(
        ciede2000_nd(
            np.array([c1.L, c1.a, c1.b]), np.array([c2.L, c2.a, c2.b])
        )
    )


def pairwise_ciede2000(labs: np.ndarray) -> np.ndarray:
    """Symmetric (m, m) CIEDE2000 matrix for an (m, 3) Lab array."""
    labs = np.asarray(labs, dtype=float)
    return ciede2000_nd(labs[:, None, :], labs[None, :, :])


def min_pairwise_ciede2000(labs: np.ndarray) -> float:
    """Smallest off-diagonal pairwise distance; +inf for fewer than 2 colors."""
    labs = np.asarray(labs, dtype=float)
    m = labs.shape[0]
    if m < 2:
        return math.inf
    d = pairwise_ciede2000(labs)
    return float(d[np.triu_indices(m, k=1)].min())

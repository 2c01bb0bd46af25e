"""Exhaustive search over a discrete HSL grid.

Brute-force oracle for the optimizer-quality acceptance check: enumerates
every ordered assignment of grid colors to classes (m = 2 or 3), applies the
same hard-constraint filter the validators use, and returns the best
reachable energy. Built from the scoring aggregates, not from any search
code.
"""

import numpy as np

from contrast_duo.colorspace import (
    ColorHSL,
    delta_luminance,
    pairwise_ciede2000,
    srgb_to_lab,
)
from contrast_duo.scoring import (
    Palette,
    PaletteColor,
    class_pair_weights,
    class_rho_mass,
)


def grid_colors(hues, sats, lights):
    """All grid colors, hue-major then saturation then lightness."""
    out = []
    for h in hues:
        for s in sats:
            for l in lights:
                out.append(PaletteColor.from_hsl(ColorHSL(float(h), float(s), float(l))))
    return out


class GridTables:
    """Precomputed pairwise tables over the grid colors."""

    def __init__(self, colors, model, background):
        self.colors = colors
        self.labs = np.array([(c.lab.L, c.lab.a, c.lab.b) for c in colors])
        self.de = pairwise_ciede2000(self.labs)
        rows = model.row_indices_nd(self.labs)
        g = len(colors)
        self.nd = np.empty((g, g))
        for i in range(g):
            for j in range(g):
                self.nd[i, j] = model.difference_by_rows(int(rows[i]), int(rows[j]))
        bg = srgb_to_lab(background)
        self.dl = np.array([delta_luminance(c.lab, bg) for c in colors])


def exhaustive_single_best(dataset, graph, model, weights, eta, hues, sats, lights, background=None):
    """Best single-palette energy over the grid, honoring the JND constraint.

    Returns (best_energy, best_assignment as a tuple of grid indices).
    """
    from contrast_duo.colorspace import ColorSRGB

    colors = grid_colors(hues, sats, lights)
    bg = background if background is not None else ColorSRGB(1, 1, 1)
    tables = GridTables(colors, model, bg)
    c = class_pair_weights(dataset, graph)
    m = dataset.m
    if m not in (2, 3):
        raise ValueError("oracle supports m in (2, 3)")
    de, nd = tables.de, tables.nd
    g = len(colors)
    best = -np.inf
    best_assign = None

    if m == 2:
        k01 = c[0, 1] + c[1, 0]
        e = weights.w0 * k01 * de + weights.w1 * nd + weights.w2 * de
        valid = de >= eta
        e = np.where(valid, e, -np.inf)
        idx = np.unravel_index(np.argmax(e), e.shape)
        return float(e[idx]), (int(idx[0]), int(idx[1]))

    k01 = c[0, 1] + c[1, 0]
    k02 = c[0, 2] + c[2, 0]
    k12 = c[1, 2] + c[2, 1]
    for c1 in range(g):
        d12 = de[c1][:, None]  # (g, 1) -> dE(c1, c2)
        d13 = de[c1][None, :]  # (1, g) -> dE(c1, c3)
        d23 = de  # (g, g)
        e_pd = k01 * d12 + k02 * d13 + k12 * d23
        e_nd = (nd[c1][:, None] + nd[c1][None, :] + nd) / 3.0
        e_cd = np.minimum(np.minimum(d12, d13), d23)
        e = weights.w0 * e_pd + weights.w1 * e_nd + weights.w2 * e_cd
        valid = (d12 >= eta) & (d13 >= eta) & (d23 >= eta)
        e = np.where(valid, e, -np.inf)
        flat = int(np.argmax(e))
        if e.flat[flat] > best:
            best = float(e.flat[flat])
            c2, c3 = np.unravel_index(flat, e.shape)
            best_assign = (c1, int(c2), int(c3))
    return best, best_assign


def exhaustive_pair_best(
    dataset,
    graph,
    field,
    model,
    weights,
    eta,
    background,
    hues,
    sats,
    lights,
    foreground_margin=1.0,
):
    """Best pair energy over the grid.

    Salient colors range over the whole grid; the faint palette mirrors their
    hue/saturation at one shared grid lightness level (all levels tried).
    Validity: JND in both palettes and the all-pairs foreground-contrast
    rule, exactly as check_constraints enforces them.

    Returns (best_energy, best_assignment, best_level_index).
    """
    colors = grid_colors(hues, sats, lights)
    tables = GridTables(colors, model, background)
    c = class_pair_weights(dataset, graph)
    s_mass = class_rho_mass(dataset, field)
    m = dataset.m
    if m not in (2, 3):
        raise ValueError("oracle supports m in (2, 3)")
    de, nd, dl = tables.de, tables.nd, tables.dl
    n_l = len(lights)
    g = len(colors)

    best = -np.inf
    best_assign = None
    best_level = -1

    for u in range(n_l):
        # faint partner of grid color k keeps (h, s), lightness level u
        fidx = (np.arange(g) // n_l) * n_l + u
        de_f = de[np.ix_(fidx, fidx)]
        nd_f = nd[np.ix_(fidx, fidx)]
        dl_f = dl[fidx]
        cross = nd[np.arange(g), fidx]  # name distance to own faint partner

        if m == 2:
            k01 = c[0, 1] + c[1, 0]
            e_pd = k01 * (de + de_f)
            e_bc = (
                s_mass[0] * (dl[:, None] - dl_f[:, None])
                + s_mass[1] * (dl[None, :] - dl_f[None, :])
            )
            e_nd = nd + nd_f
            e_cc = -(cross[:, None] + cross[None, :]) / 2.0
            e = weights.w0 * e_pd + weights.w1 * e_bc + weights.w2 * e_nd + weights.w3 * e_cc
            lo_s = np.minimum(dl[:, None], dl[None, :])
            hi_f = np.maximum(dl_f[:, None], dl_f[None, :])
            diff = lo_s - hi_f
            valid = (de >= eta) & (de_f >= eta) & (diff > 0) & (diff >= foreground_margin)
            e = np.where(valid, e, -np.inf)
            flat = int(np.argmax(e))
            if e.flat[flat] > best:
                best = float(e.flat[flat])
                i, j = np.unravel_index(flat, e.shape)
                best_assign = (int(i), int(j))
                best_level = u
            continue

        k01 = c[0, 1] + c[1, 0]
        k02 = c[0, 2] + c[2, 0]
        k12 = c[1, 2] + c[2, 1]
        for c1 in range(g):
            f1 = int(fidx[c1])
            d12, d13, d23 = de[c1][:, None], de[c1][None, :], de
            fd12, fd13, fd23 = de_f[c1][:, None], de_f[c1][None, :], de_f
            e_pd = k01 * (d12 + fd12) + k02 * (d13 + fd13) + k12 * (d23 + fd23)
            e_bc = (
                s_mass[0] * (dl[c1] - dl_f[c1])
                + s_mass[1] * (dl[:, None] - dl_f[:, None])
                + s_mass[2] * (dl[None, :] - dl_f[None, :])
            )
            e_nd = (nd[c1][:, None] + nd[c1][None, :] + nd) / 3.0
            e_nd_f = (nd_f[c1][:, None] + nd_f[c1][None, :] + nd_f) / 3.0
            e_cc = -(cross[c1] + cross[:, None] + cross[None, :]) / 3.0
            e = (
                weights.w0 * e_pd
                + weights.w1 * e_bc
                + weights.w2 * (e_nd + e_nd_f)
                + weights.w3 * e_cc
            )
            lo_s = np.minimum(dl[c1], np.minimum(dl[:, None], dl[None, :]))
            hi_f = np.maximum(dl_f[c1], np.maximum(dl_f[:, None], dl_f[None, :]))
            diff = lo_s - hi_f
            valid = (
                (d12 >= eta) & (d13 >= eta) & (d23 >= eta)
                & (fd12 >= eta) & (fd13 >= eta) & (fd23 >= eta)
                & (diff > 0) & (diff >= foreground_margin)
            )
            e = np.where(valid, e, -np.inf)
            flat = int(np.argmax(e))
            if e.flat[flat] > best:
                best = float(e.flat[flat])
                c2, c3 = np.unravel_index(flat, e.shape)
                best_assign = (c1, int(c2), int(c3))
                best_level = u
    return best, best_assign, best_level


def palette_from_assignment(colors, assignment):
    return Palette(tuple(colors[i] for i in assignment))

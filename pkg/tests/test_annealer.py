import json
import math
import time

import numpy as np
import pytest

from contrast_duo.annealer import (
    AnnealConfig,
    AnnealError,
    HslGrid,
    accept,
    generate_pair,
    generate_single,
    propose_neighbor,
    repair_jnd,
)
from contrast_duo.colornames import default_name_model
from contrast_duo.colorspace import ColorHSL, ColorSRGB, MarkSize, delta_luminance, srgb_to_lab
from contrast_duo.datasets import Dataset, synth_scatterplot
from contrast_duo.neighborhood import build_graph, compute_separability
from contrast_duo.scoring import (
    Palette,
    PalettePair,
    Weights,
    check_constraints,
    min_pairwise_distance,
    pair_energy,
    single_energy,
)

from oracle_search import exhaustive_pair_best, exhaustive_single_best

WHITE = ColorSRGB(1, 1, 1)
BLACK = ColorSRGB(0, 0, 0)
NAVY = ColorSRGB(0x1A / 255, 0x3A / 255, 0x6B / 255)

MODEL = default_name_model()


def instance(m, profile, seed):
    ds = synth_scatterplot(m, profile, seed=seed)
    g = build_graph(ds)
    f = compute_separability(ds, g)
    return ds, g, f


@pytest.fixture(scope="module")
def six_class():
    return instance(6, "small_dense", 3)


@pytest.fixture(scope="module")
def six_class_pair(six_class):
    ds, g, f = six_class
    return generate_pair(ds, g, f, MODEL, AnnealConfig(seed=0))


def pair_json(pair):
    return json.dumps(pair.to_json_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# generate_pair


@pytest.mark.parametrize(
    "m,profile,bg",
    [
        (6, "small_dense", WHITE),
        (8, "small_sparse", BLACK),
        (10, "large_dense", NAVY),
    ],
)
def test_pair_satisfies_all_constraints(m, profile, bg):
    ds, g, f = instance(m, profile, seed=m)
    pair, trace = generate_pair(ds, g, f, MODEL, AnnealConfig(seed=1, background=bg))
    report = check_constraints(pair)
    assert report.all_pass(), [c.detail for c in report.failures()]
    assert len(trace) > 0


def test_same_seed_bit_identical(six_class):
    ds, g, f = six_class
    cfg = AnnealConfig(seed=7)
    pair_a, trace_a = generate_pair(ds, g, f, MODEL, cfg)
    pair_b, trace_b = generate_pair(ds, g, f, MODEL, cfg)
    assert pair_json(pair_a) == pair_json(pair_b)
    assert len(trace_a) == len(trace_b)
    assert trace_a.rows == trace_b.rows


def test_trace_best_monotone_and_csv_shape(six_class_pair):
    _, trace = six_class_pair
    best = [r.best_energy for r in trace.rows]
    assert all(a <= b + 1e-12 for a, b in zip(best, best[1:]))
    csv = trace.to_csv()
    lines = csv.strip().split("\n")
    assert lines[0] == "iteration,temperature,energy,best_energy,uniform_lightness"
    assert len(lines) == len(trace) + 1
    # float columns round-trip through repr
    it, t, e, be, ul = lines[1].split(",")
    assert int(it) == trace.rows[0].iteration
    assert float(t) == trace.rows[0].temperature
    assert float(ul) == trace.rows[0].uniform_lightness


def test_lightness_resample_decays(six_class_pair):
    # resampling the uniform lightness is frequent early and rare late
    _, trace = six_class_pair
    rows = trace.rows
    q = len(rows) // 4

    def changes(rs):
        return sum(1 for a, b in zip(rs, rs[1:]) if a.uniform_lightness != b.uniform_lightness)

    first, last = changes(rows[:q]), changes(rows[-q:])
    assert first > 0
    assert last <= 0.10 * first


def test_uniform_lightness_follows_background(six_class):
    ds, g, f = six_class
    anchors = {}
    for name, bg in (("white", WHITE), ("black", BLACK), ("navy", NAVY)):
        pair, _ = generate_pair(ds, g, f, MODEL, AnnealConfig(seed=5, background=bg))
        anchors[name] = pair.uniform_lightness
    assert anchors["white"] >= 0.75
    assert anchors["black"] <= 0.25
    assert anchors["navy"] <= 0.25


def test_single_class_pair_shape():
    ds, g, f = instance(1, "small_sparse", 0)
    pair, _ = generate_pair(ds, g, f, MODEL, AnnealConfig(seed=2))
    assert pair.m == 1
    s, fnt = pair.salient.colors[0], pair.faint.colors[0]
    assert s.hsl.h == fnt.hsl.h and s.hsl.s == fnt.hsl.s
    bg_lab = srgb_to_lab(pair.background)
    assert delta_luminance(s.lab, bg_lab) > delta_luminance(fnt.lab, bg_lab)


def test_ten_class_close_to_restart_best():
    ds, g, f = instance(10, "small_dense", 4)
    energies = []
    for seed in range(20):
        pair, _ = generate_pair(ds, g, f, MODEL, AnnealConfig(seed=seed))
        energies.append(pair_energy(ds, g, f, MODEL, pair).total)
    assert energies[0] >= 0.95 * max(energies)


def test_runtime_scales_quadratically_in_m():
    # doubling m at a fixed iteration budget should cost ~4x, generously bounded
    def run(m, profile):
        ds, g, f = instance(m, profile, 2)
        t0 = time.time()
        generate_pair(ds, g, f, MODEL, AnnealConfig(seed=0, initial_temperature=5.0))
        return time.time() - t0

    t5 = run(5, "large_dense")  # 500 points
    t10 = run(10, "small_dense")  # 500 points
    assert t10 / t5 < 8.0


def test_infeasible_grid_names_binding_constraint():
    # every color of this grid is closer than eta, so repair must give up
    grid = HslGrid(hues=(0.0, 10.0), sats=(0.5,), lights=(0.45, 0.55))
    ds, g, f = instance(2, "small_sparse", 1)
    cfg = AnnealConfig(
        seed=0, color_grid=grid, mark_size=MarkSize(1.0), max_repair_iterations=500
    )
    with pytest.raises(AnnealError) as err:
        generate_pair(ds, g, f, MODEL, cfg)
    assert err.value.constraint == "jnd"
    assert "color-distance" in str(err.value)


def test_grid_without_room_for_distinct_hue_sat_pairs():
    grid = HslGrid(hues=(0.0,), sats=(0.5,), lights=(0.2, 0.5, 0.8))
    ds, g, f = instance(3, "small_sparse", 1)
    with pytest.raises(AnnealError) as err:
        generate_pair(ds, g, f, MODEL, AnnealConfig(seed=0, color_grid=grid))
    assert err.value.constraint == "jnd"


# ---------------------------------------------------------------------------
# propose_neighbor


def test_proposals_swap_and_disturb_locality(six_class_pair):
    pair, _ = six_class_pair
    cfg = AnnealConfig(seed=0)
    base_sal = [(c.hsl.h, c.hsl.s, c.hsl.l) for c in pair.salient.colors]
    base_fnt = [(c.hsl.h, c.hsl.s, c.hsl.l) for c in pair.faint.colors]
    base_json = pair_json(pair)
    swaps = disturbs = 0
    for seed in range(60):
        rng = np.random.default_rng(seed)
        # hugely negative previous delta at low temperature: the lightness
        # resample gate cannot fire, leaving the bare swap/disturb move
        cand = propose_neighbor(pair, 0.01, -1e6, rng, cfg)
        assert cand.uniform_lightness == pair.uniform_lightness
        for cs, cf in zip(cand.salient.colors, cand.faint.colors):
            assert cs.hsl.h == cf.hsl.h and cs.hsl.s == cf.hsl.s
            assert abs(cf.hsl.l - cand.uniform_lightness) <= cfg.sigma + 1e-12
        sal = [(c.hsl.h, c.hsl.s, c.hsl.l) for c in cand.salient.colors]
        fnt = [(c.hsl.h, c.hsl.s, c.hsl.l) for c in cand.faint.colors]
        changed = [k for k in range(pair.m) if sal[k] != base_sal[k] or fnt[k] != base_fnt[k]]
        if len(changed) == 2:
            i, j = changed
            if sal[i] == base_sal[j] and sal[j] == base_sal[i]:
                assert fnt[i] == base_fnt[j] and fnt[j] == base_fnt[i]
                swaps += 1
        elif len(changed) == 1:
            k = changed[0]
            assert sal[k][:2] == fnt[k][:2]
            disturbs += 1
    assert swaps >= 5
    assert disturbs >= 5
    assert pair_json(pair) == base_json  # input pair untouched


def test_proposal_can_resample_anchor(six_class_pair):
    pair, _ = six_class_pair
    cfg = AnnealConfig(seed=0)
    moved = 0
    for seed in range(10):
        # positive previous delta makes the gate certain to fire
        cand = propose_neighbor(pair, 1.0, 1.0, np.random.default_rng(seed), cfg)
        if cand.uniform_lightness != pair.uniform_lightness:
            moved += 1
        for cs, cf in zip(cand.salient.colors, cand.faint.colors):
            assert abs(cf.hsl.l - cand.uniform_lightness) <= cfg.sigma + 1e-12
    assert moved >= 8


# ---------------------------------------------------------------------------
# repair_jnd


def test_repair_noop_on_valid_pair(six_class_pair):
    pair, _ = six_class_pair
    out = repair_jnd(pair, pair.eta, np.random.default_rng(0))
    assert pair_json(out) == pair_json(pair)


def test_repair_separates_identical_colors(six_class_pair):
    pair, _ = six_class_pair
    # collapse class 1 onto class 0 in both palettes
    sal = list(pair.salient.colors)
    fnt = list(pair.faint.colors)
    sal[1] = sal[0]
    fnt[1] = fnt[0]
    broken = PalettePair(
        salient=Palette(tuple(sal)),
        faint=Palette(tuple(fnt)),
        uniform_lightness=pair.uniform_lightness,
        background=pair.background,
        sigma=pair.sigma,
        eta=pair.eta,
        seed=pair.seed,
    )
    assert min_pairwise_distance(broken.salient) == 0.0
    fixed = repair_jnd(broken, broken.eta, np.random.default_rng(3))
    assert min_pairwise_distance(fixed.salient) >= broken.eta
    assert min_pairwise_distance(fixed.faint) >= broken.eta
    for cs, cf in zip(fixed.salient.colors, fixed.faint.colors):
        assert cs.hsl.h == cf.hsl.h and cs.hsl.s == cf.hsl.s


# ---------------------------------------------------------------------------
# accept


def test_accept_uphill_always():
    rng = np.random.default_rng(0)
    assert all(accept(1.0, 1.0, rng) for _ in range(1000))


def test_accept_huge_downhill_never():
    rng = np.random.default_rng(0)
    assert not any(accept(-1e9, 1.0, rng) for _ in range(100_000))


def test_accept_half_probability_at_t_ln2():
    t = 2.0
    delta = -t * math.log(2.0)
    rng = np.random.default_rng(12)
    n = 100_000
    hits = sum(accept(delta, t, rng) for _ in range(n))
    assert abs(hits / n - 0.5) < 0.01


def test_accept_rejects_nonpositive_temperature():
    with pytest.raises(ValueError):
        accept(0.5, 0.0, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# generate_single


def test_single_two_classes_meets_jnd():
    ds, g, _ = instance(2, "small_sparse", 6)
    cfg = AnnealConfig(seed=0)
    palette, trace = generate_single(ds, g, MODEL, cfg)
    assert palette.m == 2
    assert min_pairwise_distance(palette) >= cfg.eta
    best = [r.best_energy for r in trace.rows]
    assert all(a <= b + 1e-12 for a, b in zip(best, best[1:]))


def test_single_same_seed_reproducible():
    ds, g, _ = instance(4, "small_dense", 8)
    cfg = AnnealConfig(seed=9)
    pal_a, trace_a = generate_single(ds, g, MODEL, cfg)
    pal_b, trace_b = generate_single(ds, g, MODEL, cfg)
    assert pal_a.hex_list() == pal_b.hex_list()
    assert trace_a.rows == trace_b.rows


# ---------------------------------------------------------------------------
# discrete grid vs the exhaustive oracle (small version; the acceptance
# suite runs the full-size grid)

TINY_HUES = (0.0, 90.0, 180.0, 270.0)
TINY_SATS = (0.45, 0.9)
TINY_LIGHTS = (0.2, 0.5, 0.8)


@pytest.fixture(scope="module")
def tiny_two_class():
    rng = np.random.default_rng(5)
    pts = np.vstack(
        [rng.normal((200, 200), 30, (6, 2)), rng.normal((420, 380), 30, (6, 2))]
    )
    ds = Dataset(pts, np.array([0] * 6 + [1] * 6), ("a", "b"))
    g = build_graph(ds)
    f = compute_separability(ds, g)
    return ds, g, f


def test_grid_pair_reaches_oracle_energy(tiny_two_class):
    ds, g, f = tiny_two_class
    e_star, _, _ = exhaustive_pair_best(
        ds, g, f, MODEL, Weights(), 7.5, WHITE, TINY_HUES, TINY_SATS, TINY_LIGHTS
    )
    grid = HslGrid(TINY_HUES, TINY_SATS, TINY_LIGHTS)
    for seed in range(3):
        cfg = AnnealConfig(seed=seed, color_grid=grid, jnd_slack=0.0, foreground_slack=0.0)
        pair, _ = generate_pair(ds, g, f, MODEL, cfg)
        assert check_constraints(pair).all_pass()
        assert pair_energy(ds, g, f, MODEL, pair).total >= 0.95 * e_star


def test_grid_single_reaches_oracle_energy(tiny_two_class):
    ds, g, f = tiny_two_class
    e_star, _ = exhaustive_single_best(
        ds, g, MODEL, Weights(), 7.5, TINY_HUES, TINY_SATS, TINY_LIGHTS
    )
    grid = HslGrid(TINY_HUES, TINY_SATS, TINY_LIGHTS)
    for seed in range(3):
        cfg = AnnealConfig(seed=seed, color_grid=grid, jnd_slack=0.0, foreground_slack=0.0)
        palette, _ = generate_single(ds, g, MODEL, cfg)
        assert min_pairwise_distance(palette) >= 7.5
        assert single_energy(ds, g, MODEL, palette) >= 0.95 * e_star

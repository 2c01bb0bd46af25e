import numpy as np
import pytest

from contrast_duo.annealer import AnnealConfig, generate_pair
from contrast_duo.colornames import default_name_model
from contrast_duo.datasets import Dataset
from contrast_duo.highlight import (
    Rect,
    Selection,
    resolve_colors,
    selection_from_brush,
    toggle_class,
)
from contrast_duo.neighborhood import build_graph, compute_separability

MODEL = default_name_model()


@pytest.fixture(scope="module")
def dataset():
    rng = np.random.default_rng(17)
    pts = rng.uniform(50.0, 550.0, (30, 2))
    labels = np.repeat(np.arange(6), 5)
    return Dataset(pts, labels, tuple("abcdef"))


@pytest.fixture(scope="module")
def pair(dataset):
    g = build_graph(dataset)
    f = compute_separability(dataset, g)
    p, _ = generate_pair(dataset, g, f, MODEL, AnnealConfig(seed=0))
    return p


# ---------------------------------------------------------------------------
# resolve_colors


def test_empty_selection_shows_salient_unflagged(dataset, pair):
    out = resolve_colors(dataset, pair, Selection.none())
    sal_hex = pair.salient.hex_list()
    for lbl, hexval, emph in zip(dataset.labels, out.hex_list(), out.emphasized):
        assert hexval == sal_hex[lbl]
        assert emph is False


def test_all_classes_equals_empty_colors_with_flags(dataset, pair):
    empty = resolve_colors(dataset, pair, Selection.none())
    full = resolve_colors(dataset, pair, Selection.of_classes(range(6)))
    assert full.hex_list() == empty.hex_list()
    assert all(full.emphasized)


def test_single_class_selection_per_point(dataset, pair):
    out = resolve_colors(dataset, pair, Selection.of_classes({3}))
    sal_hex = pair.salient.hex_list()
    fnt_hex = pair.faint.hex_list()
    for i in range(dataset.n):
        lbl = int(dataset.labels[i])
        if lbl == 3:
            assert out.hex_list()[i] == sal_hex[3]
            assert out.emphasized[i]
        else:
            assert out.hex_list()[i] == fnt_hex[lbl]
            assert not out.emphasized[i]


def test_point_selection_exact_points(dataset, pair):
    picked = {0, 7, 29}
    out = resolve_colors(dataset, pair, Selection.of_points(picked))
    sal_hex = pair.salient.hex_list()
    fnt_hex = pair.faint.hex_list()
    for i in range(dataset.n):
        lbl = int(dataset.labels[i])
        want = sal_hex[lbl] if i in picked else fnt_hex[lbl]
        assert out.hex_list()[i] == want
        assert out.emphasized[i] == (i in picked)


def test_mixed_selection_unions_classes_and_points(dataset, pair):
    lone = next(i for i in range(dataset.n) if dataset.labels[i] != 2)
    sel = Selection.of_classes({2}, points={lone})
    out = resolve_colors(dataset, pair, sel)
    for i in range(dataset.n):
        assert out.emphasized[i] == (int(dataset.labels[i]) == 2 or i == lone)


def test_resolution_is_pure(dataset, pair):
    sel = Selection.of_classes({1, 4})
    assert resolve_colors(dataset, pair, sel) == resolve_colors(dataset, pair, sel)


def test_each_class_shows_at_most_two_colors(dataset, pair):
    seen = {k: set() for k in range(6)}
    selections = [
        Selection.none(),
        Selection.of_classes({0}),
        Selection.of_classes({1, 2}),
        Selection.of_points(range(10)),
        Selection.of_classes(range(6)),
    ]
    for sel in selections:
        out = resolve_colors(dataset, pair, sel)
        for lbl, hexval in zip(dataset.labels, out.hex_list()):
            seen[int(lbl)].add(hexval)
    for k in range(6):
        allowed = {pair.salient.hex_list()[k], pair.faint.hex_list()[k]}
        assert seen[k] == allowed


def test_resolve_rejects_mismatched_palette(dataset, pair):
    small = Dataset(dataset.points[:4], np.array([0, 0, 1, 1]), ("x", "y"))
    with pytest.raises(ValueError, match="classes"):
        resolve_colors(small, pair, Selection.none())


def test_resolve_rejects_out_of_range_entries(dataset, pair):
    with pytest.raises(ValueError, match="class index"):
        resolve_colors(dataset, pair, Selection.of_classes({6}))
    with pytest.raises(ValueError, match="point index"):
        resolve_colors(dataset, pair, Selection.of_points({30}))


# ---------------------------------------------------------------------------
# selection_from_brush


def test_brush_whole_canvas_selects_everything(dataset):
    sel = selection_from_brush(dataset, Rect(0.0, 0.0, 600.0, 600.0))
    assert sel.point_set == frozenset(range(dataset.n))


def test_brush_zero_area_on_exact_coordinates(dataset):
    x, y = dataset.points[5]
    sel = selection_from_brush(dataset, Rect(x, y, x, y))
    assert sel.point_set == frozenset({5})


def test_brush_half_plane_matches_brute_force(dataset):
    rect = Rect(0.0, 0.0, 300.0, 600.0)
    sel = selection_from_brush(dataset, rect)
    want = {
        i
        for i, (x, y) in enumerate(dataset.points)
        if 0.0 <= x <= 300.0 and 0.0 <= y <= 600.0
    }
    assert sel.point_set == frozenset(want)


def test_brush_catching_nothing_is_the_empty_selection(dataset):
    sel = selection_from_brush(dataset, Rect(0.0, 0.0, 1.0, 1.0))
    assert sel.empty


def test_rect_must_be_well_formed():
    with pytest.raises(ValueError):
        Rect(10.0, 0.0, 0.0, 5.0)


# ---------------------------------------------------------------------------
# toggle_class


def test_toggle_is_involutive():
    for start in (
        Selection.none(),
        Selection.of_classes({1, 2}),
        Selection.of_points({4, 5}),
    ):
        assert toggle_class(toggle_class(start, 3), 3) == start


def test_toggle_on_empty_selects_one_class():
    sel = toggle_class(Selection.none(), 2)
    assert sel.mode == "classes"
    assert sel.class_set == frozenset({2})


def test_toggle_accumulates_classes():
    sel = toggle_class(toggle_class(Selection.none(), 9), 4)
    assert sel.class_set == frozenset({9, 4})


def test_toggle_keeps_brushed_points():
    sel = toggle_class(Selection.of_points({1, 2}), 0)
    assert sel.mode == "classes"
    assert sel.point_set == frozenset({1, 2})
    back = toggle_class(sel, 0)
    assert back == Selection.of_points({1, 2})


def test_toggle_rejects_out_of_range():
    with pytest.raises(ValueError):
        toggle_class(Selection.none(), -1)
    with pytest.raises(ValueError):
        toggle_class(Selection.none(), 6, m=6)


# ---------------------------------------------------------------------------
# Selection type and JSON


def test_selection_mode_must_match_contents():
    with pytest.raises(ValueError):
        Selection("none", frozenset({1}), frozenset())
    with pytest.raises(ValueError):
        Selection("classes", frozenset(), frozenset())
    with pytest.raises(ValueError):
        Selection("points", frozenset(), frozenset())
    with pytest.raises(ValueError):
        Selection("points", frozenset({0}), frozenset({1}))
    with pytest.raises(ValueError):
        Selection("classes", frozenset({-1}), frozenset())


def test_factories_canonicalize_empty():
    assert Selection.of_classes(()) == Selection.none()
    assert Selection.of_points(()) == Selection.none()
    assert Selection.of_classes((), points={3}) == Selection.of_points({3})


def test_selection_json_round_trip():
    for sel in (
        Selection.none(),
        Selection.of_classes({3, 5}),
        Selection.of_points({0, 2, 9}),
        Selection.of_classes({1}, points={4}),
    ):
        assert Selection.from_json_dict(sel.to_json_dict()) == sel


def test_selection_json_wire_shape():
    assert Selection.of_classes({5, 3}).to_json_dict() == {"mode": "classes", "classes": [3, 5]}
    assert Selection.of_points({2, 0}).to_json_dict() == {"mode": "points", "points": [0, 2]}
    assert Selection.none().to_json_dict() == {"mode": "none"}


def test_selection_json_rejects_malformed():
    with pytest.raises(ValueError):
        Selection.from_json_dict({"classes": [1]})
    with pytest.raises(ValueError):
        Selection.from_json_dict({"mode": "blend"})
    with pytest.raises(ValueError):
        Selection.from_json_dict({"mode": "classes", "classes": [True]})
    with pytest.raises(ValueError):
        Selection.from_json_dict({"mode": "points", "points": "0,1"})


def test_rect_json_round_trip():
    rect = Rect(1.0, 2.0, 3.0, 4.0)
    assert Rect.from_json_dict(rect.to_json_dict()) == rect
    with pytest.raises(ValueError):
        Rect.from_json_dict({"xMin": 0.0})

import json

import pytest
from click.testing import CliRunner

from contrast_duo.cli import main
from contrast_duo.colorspace import ColorSRGB
from contrast_duo.colornames import default_name_model
from contrast_duo.datasets import load_dataset, save_dataset, synth_scatterplot
from contrast_duo.neighborhood import build_graph, compute_separability
from contrast_duo.scoring import PalettePair, Weights, check_constraints, pair_energy


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, runner):
    """One shared dataset + generated pair to keep the suite fast."""
    root = tmp_path_factory.mktemp("cli")
    ds = synth_scatterplot(4, "small_sparse", seed=7)
    data = root / "d.json"
    save_dataset(ds, data)
    pair_path = root / "pair.json"
    res = runner.invoke(
        main,
        ["generate", "--input", str(data), "--seed", "5", "--out", str(pair_path)],
    )
    assert res.exit_code == 0, res.output
    return root


def test_synth_writes_loadable_dataset(runner, tmp_path):
    out = tmp_path / "s.json"
    res = runner.invoke(
        main, ["synth", "--synth", "small_dense", "--classes", "3", "--seed", "2", "--out", str(out)]
    )
    assert res.exit_code == 0
    ds = load_dataset(out)
    assert ds.m == 3 and ds.n == 150


def test_generate_output_passes_schema_and_constraints(workdir):
    payload = json.loads((workdir / "pair.json").read_text())
    for key in ("m", "background", "sigma", "eta", "salient", "faint", "uniformLightness", "seed"):
        assert key in payload
    pair = PalettePair.from_json_dict(payload)
    assert check_constraints(pair).all_pass()


def test_generate_seeded_outputs_are_bit_identical(runner, workdir, tmp_path):
    again = tmp_path / "pair2.json"
    res = runner.invoke(
        main,
        ["generate", "--input", str(workdir / "d.json"), "--seed", "5", "--out", str(again)],
    )
    assert res.exit_code == 0
    assert again.read_bytes() == (workdir / "pair.json").read_bytes()


def test_generate_svg_pair_is_deterministic(runner, workdir, tmp_path):
    def render(into):
        res = runner.invoke(
            main,
            [
                "generate",
                "--input",
                str(workdir / "d.json"),
                "--seed",
                "5",
                "--out",
                str(into / "p.json"),
                "--svg",
                str(into / "plot.svg"),
            ],
        )
        assert res.exit_code == 0
        return (into / "plot.svg").read_text(), (into / "plot_highlight.svg").read_text()

    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert render(a) == render(b)
    static, highlighted = render(a)
    assert static.count("<circle") >= 80  # points plus no stray marks
    assert 'class="emphasized"' not in static
    assert 'class="emphasized"' in highlighted


def test_trace_csv_matches_generate(runner, workdir, tmp_path):
    t1 = tmp_path / "t1.csv"
    res = runner.invoke(
        main, ["trace", "--input", str(workdir / "d.json"), "--seed", "5", "--out", str(t1)]
    )
    assert res.exit_code == 0
    header, first = t1.read_text().splitlines()[:2]
    assert header == "iteration,temperature,energy,best_energy,uniform_lightness"
    assert first.startswith("0,")


def test_score_matches_library_bit_for_bit(runner, workdir, tmp_path):
    out = tmp_path / "score.json"
    res = runner.invoke(
        main,
        ["score", str(workdir / "pair.json"), "--input", str(workdir / "d.json"), "--out", str(out)],
    )
    assert res.exit_code == 0
    got = json.loads(out.read_text())
    ds = load_dataset(workdir / "d.json")
    pair = PalettePair.from_json_dict(json.loads((workdir / "pair.json").read_text()))
    graph = build_graph(ds)
    field = compute_separability(ds, graph)
    expected = pair_energy(ds, graph, field, default_name_model(), pair)
    assert got["score"] == expected.to_json_dict()
    assert got["constraints"]["allPass"] is True


def test_score_zero_weights_totals_zero(runner, workdir):
    res = runner.invoke(
        main,
        ["score", str(workdir / "pair.json"), "--input", str(workdir / "d.json"), "--weights", "0,0,0,0"],
    )
    assert res.exit_code == 0
    assert json.loads(res.output)["score"]["total"] == 0.0


def test_score_exits_zero_on_constraint_failure(runner, workdir, tmp_path):
    # force a failure by scoring against a background the pair was not built for
    res = runner.invoke(
        main,
        [
            "score",
            str(workdir / "pair.json"),
            "--input",
            str(workdir / "d.json"),
            "--background",
            "#000000",
        ],
    )
    assert res.exit_code == 0
    report = json.loads(res.output)["constraints"]
    assert report["allPass"] is False


def test_highlight_selection_and_brush(runner, workdir, tmp_path):
    sel = tmp_path / "sel.json"
    sel.write_text(json.dumps({"mode": "classes", "classes": [0]}))
    res = runner.invoke(
        main,
        ["highlight", str(workdir / "pair.json"), "--input", str(workdir / "d.json"), "--selection", str(sel)],
    )
    assert res.exit_code == 0
    body = json.loads(res.output)
    # compare against the reloaded pair: from_json_dict re-links faint hue/sat
    # to salient, so its faint hexes are the authority after a round trip
    pair = PalettePair.from_json_dict(json.loads((workdir / "pair.json").read_text()))
    salient, faint = pair.salient.hex_list(), pair.faint.hex_list()
    ds = load_dataset(workdir / "d.json")
    for color, flag, label in zip(body["colors"], body["emphasized"], ds.labels):
        expected = salient[label] if flag else faint[label]
        assert color == expected
    assert sum(body["emphasized"]) == int((ds.labels == 0).sum())

    svg_out = tmp_path / "h.svg"
    res2 = runner.invoke(
        main,
        [
            "highlight",
            str(workdir / "pair.json"),
            "--input",
            str(workdir / "d.json"),
            "--brush",
            "0,0,600,600",
            "--svg",
            str(svg_out),
        ],
    )
    assert res2.exit_code == 0
    assert json.loads(res2.output)["selection"]["mode"] == "points"
    assert svg_out.read_text().count("<circle") >= ds.n


def test_missing_input_exits_one(runner):
    res = runner.invoke(main, ["generate", "--input", "nope.csv", "--out", "x.json"])
    assert res.exit_code == 1


def test_repair_failure_exits_two(runner, workdir, monkeypatch):
    import contrast_duo.cli as cli_mod
    from contrast_duo.annealer import AnnealError

    def exhausted(*args, **kwargs):
        raise AnnealError("constraint repair exhausted", "jnd")

    monkeypatch.setattr(cli_mod, "generate_pair", exhausted)
    res = runner.invoke(main, ["generate", "--input", str(workdir / "d.json"), "--out", "x.json"])
    assert res.exit_code == 2


def test_bad_weights_exit_one(runner, workdir):
    res = runner.invoke(
        main,
        ["generate", "--input", str(workdir / "d.json"), "--weights", "1,2"],
    )
    assert res.exit_code == 1
    res2 = runner.invoke(
        main,
        ["generate", "--input", str(workdir / "d.json"), "--weights", "1,1,1,7"],
    )
    assert res2.exit_code == 1


def test_both_input_and_synth_rejected(runner, workdir):
    res = runner.invoke(
        main,
        ["generate", "--input", str(workdir / "d.json"), "--synth", "small_dense"],
    )
    assert res.exit_code == 1


def test_background_flag_respected(runner, workdir, tmp_path):
    out = tmp_path / "navy.json"
    res = runner.invoke(
        main,
        [
            "generate",
            "--input",
            str(workdir / "d.json"),
            "--seed",
            "3",
            "--background",
            "#1a3a6b",
            "--out",
            str(out),
        ],
    )
    assert res.exit_code == 0
    pair = PalettePair.from_json_dict(json.loads(out.read_text()))
    assert pair.background == ColorSRGB.from_hex("#1a3a6b")
    assert check_constraints(pair).all_pass()


def test_restarts_pick_at_least_single_run_energy(runner, workdir, tmp_path):
    single = tmp_path / "one.json"
    multi = tmp_path / "three.json"
    base = ["--input", str(workdir / "d.json"), "--seed", "11"]
    assert runner.invoke(main, ["generate", *base, "--out", str(single)]).exit_code == 0
    assert (
        runner.invoke(main, ["generate", *base, "--restarts", "3", "--out", str(multi)]).exit_code
        == 0
    )
    multi2 = tmp_path / "three-again.json"
    assert (
        runner.invoke(main, ["generate", *base, "--restarts", "3", "--out", str(multi2)]).exit_code
        == 0
    )
    assert multi.read_bytes() == multi2.read_bytes()

    ds = load_dataset(workdir / "d.json")
    graph = build_graph(ds)
    field = compute_separability(ds, graph)
    model = default_name_model()

    def total(path):
        pair = PalettePair.from_json_dict(json.loads(path.read_text()))
        return pair_energy(ds, graph, field, model, pair, weights=Weights()).total

    assert total(multi) >= total(single) - 1e-9

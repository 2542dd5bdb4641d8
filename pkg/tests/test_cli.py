"""Command-line interface: exit codes and a miniature end-to-end pipeline."""

import os

import numpy as np
import pytest

from urbangrid.cli import main


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["train1"])  # missing required flags
    assert exc.value.code == 1
    err = capsys.readouterr().err
    assert "required" in err


def test_missing_input_exits_2(tmp_path, capsys):
    code = main(["labelgen", "--in", str(tmp_path / "nowhere"),
                 "--out", str(tmp_path / "labels")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_key=1\n")
    code = main(["synth", "--config", str(cfg), "--out", str(tmp_path / "c")])
    assert code == 2
    assert "unknown config key" in capsys.readouterr().err


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """synth -> labelgen -> train1 -> train2 -> infer on a 4x4 city."""
    root = tmp_path_factory.mktemp("pipeline")
    city = root / "city"
    labels = root / "labels"
    ck1 = root / "ck1.mck1"
    ck2 = root / "ck2.mck1"
    prod = root / "prod"
    assert main(["synth", "--seed", "3", "--rows", "4", "--cols", "4",
                 "--out", str(city)]) == 0
    assert main(["labelgen", "--in", str(city), "--out", str(labels)]) == 0
    assert main(["train1", "--raster", str(city / "city.mcr1"),
                 "--labels", str(labels), "--out", str(ck1),
                 "--epochs", "1", "--seed", "3"]) == 0
    assert main(["train2", "--raster", str(city / "city.mcr1"),
                 "--labels", str(labels), "--init", str(ck1),
                 "--out", str(ck2), "--epochs", "1", "--seed", "3"]) == 0
    assert main(["infer", "--checkpoint", str(ck2),
                 "--raster", str(city / "city.mcr1"),
                 "--out", str(prod)]) == 0
    return root


def test_synth_outputs(pipeline):
    city = pipeline / "city"
    assert (city / "city.mcr1").is_file()
    assert (city / "features.geojson").is_file()
    from urbangrid.mapper.raster import read_raster
    r = read_raster(city / "city.mcr1")
    assert r.height == r.width == 800


def test_labelgen_outputs(pipeline):
    labels = pipeline / "labels"
    for name in ("gridspec.csv", "land.csv", "bd.csv", "far.csv", "pop.csv"):
        assert (labels / name).is_file(), name
    from urbangrid.geolabel.grids import read_grid_csv, read_gridspec_csv
    from urbangrid.taxonomy import LabelKind
    spec = read_gridspec_csv(labels / "gridspec.csv")
    assert spec.shape == (4, 4)
    land = read_grid_csv(labels / "land.csv", spec, LabelKind.LAND)
    assert land.mask.all()


def test_infer_outputs_readable(pipeline):
    from urbangrid.mapper.products import read_products
    prod = read_products(pipeline / "prod")
    assert prod.grid.shape == (4, 4)
    assert prod.land.values.min() >= 0
    assert (pipeline / "prod" / "land_color.ppm").is_file()


def test_eval_runs_and_writes_csv(pipeline, tmp_path, capsys):
    out = tmp_path / "metrics.csv"
    code = main(["eval", "--products", str(pipeline / "prod"),
                 "--truth", str(pipeline / "labels"), "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "land_oa" in printed
    lines = out.read_text().splitlines()
    assert lines[0] == "metric,value"
    metrics = dict(line.split(",", 1) for line in lines[1:])
    assert set(metrics) == {"land_oa", "land_kappa", "bd_mae", "bd_r",
                            "far_mae", "far_r", "pop_mae", "pop_r"}
    assert 0.0 <= float(metrics["land_oa"]) <= 1.0
    assert float(metrics["pop_mae"]) >= 0.0


def test_compare_self_is_null(pipeline, tmp_path, capsys):
    out = tmp_path / "cmp"
    code = main(["compare", "--a", str(pipeline / "prod"),
                 "--b", str(pipeline / "prod"), "--out", str(out)])
    assert code == 0
    assert "agreement" in capsys.readouterr().out
    content = (out / "land_agreement.csv").read_text()
    assert content.splitlines()[1] == "1.0"


def test_eval_missing_products_exits_2(pipeline, capsys):
    code = main(["eval", "--products", str(pipeline / "missing"),
                 "--truth", str(pipeline / "labels")])
    assert code == 2


def test_train1_epochs_zero_equals_fresh_network(pipeline, tmp_path):
    """--epochs 0 saves an untouched seed-built network (plus norm stats)."""
    city = pipeline / "city"
    out = tmp_path / "fresh.mck1"
    assert main(["train1", "--raster", str(city / "city.mcr1"),
                 "--labels", str(pipeline / "labels"), "--out", str(out),
                 "--epochs", "0", "--seed", "3"]) == 0
    from urbangrid.net.checkpoint import load_checkpoint
    from urbangrid.net.model import build_network
    loaded = load_checkpoint(out)
    fresh = build_network(seed=3)
    for name in fresh.params:
        assert np.array_equal(loaded.params[name].value,
                              fresh.params[name].value), name
    assert loaded.has_norm_stats()


def test_threads_flag_sets_env():
    import urbangrid.cli as cli
    saved = {v: os.environ.get(v) for v in cli._THREAD_ENV}
    try:
        cli._apply_threads(["synth", "--threads", "1", "--out", "x"])
        for var in cli._THREAD_ENV:
            assert os.environ[var] == "1"
    finally:
        for var, old in saved.items():
            if old is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = old


def test_gradcheck_command(capsys):
    code = main(["gradcheck", "--seed", "0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "conv2d" in out
    assert "stage-1 objective" in out and "stage-2 objective" in out
    assert "all checks below 1e-4" in out

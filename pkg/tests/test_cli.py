import json
from pathlib import Path

import numpy as np

from conftest import write_lines
from epigrowth.cli import main, parse_config_file
from epigrowth.spectral import align_labels
from epigrowth.util import read_csv_rows


def _run(*args):
    return main([str(a) for a in args])


def _synth_forecast(tmp_path, run_id="syn", **overrides):
    args = ["synth", "--synth-kind", "forecast", "--n-per-group", "8", "--groups", "2",
            "--T", "30", "--dynamics", "heterogeneous", "--seed", "5",
            "--outdir", tmp_path / "out", "--run-id", run_id]
    for key, value in overrides.items():
        args += [f"--{key.replace('_', '-')}", value]
    assert _run(*args) == 0
    return tmp_path / "out" / run_id


def _digest_dir(path: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_synth_then_ingest_roundtrip(tmp_path):
    syn = _synth_forecast(tmp_path)
    assert _run("ingest", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--outdir", tmp_path / "out", "--run-id", "ing") == 0
    out = tmp_path / "out" / "ing"
    for name in ("registered.csv", "demographics.csv", "mobility.csv",
                 "diagnostics.jsonl", "meta.json"):
        assert (out / name).exists()
    meta = json.loads((out / "meta.json").read_text())
    assert meta["entities"] == 16


def test_ingest_clean_triple_has_empty_diagnostics(tmp_path):
    syn = _synth_forecast(tmp_path)
    assert _run("ingest", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--outdir", tmp_path / "out", "--run-id", "ing") == 0
    assert (tmp_path / "out" / "ing" / "diagnostics.jsonl").read_text() == ""


def test_ingest_restricts_to_intersection(tmp_path):
    syn = _synth_forecast(tmp_path)
    # drop one entity from the demographics file
    lines = (syn / "demographics.csv").read_text().strip().splitlines()
    trimmed = tmp_path / "demo_trimmed.csv"
    trimmed.write_text("\n".join(lines[:-1]) + "\n")
    assert _run("ingest", "--cases", syn / "cases.csv",
                "--demographics", trimmed,
                "--mobility", syn / "mobility.csv",
                "--outdir", tmp_path / "out", "--run-id", "ing2") == 0
    out = tmp_path / "out" / "ing2"
    meta = json.loads((out / "meta.json").read_text())
    assert meta["entities"] == 15
    dropped = lines[-1].split(",")[0]
    _, rows = read_csv_rows(out / "registered.csv")
    assert dropped not in {r[0] for r in rows}
    diags = [json.loads(line) for line in
             (out / "diagnostics.jsonl").read_text().splitlines()]
    assert any(d["entity_id"] == dropped for d in diags)


def test_missing_file_exits_2(tmp_path):
    assert _run("cluster", "--cases", tmp_path / "nope.csv",
                "--outdir", tmp_path / "out") == 2


def test_bad_config_value_exits_2(tmp_path):
    assert _run("cluster", "--cases", tmp_path / "nope.csv", "--epsilon", "5",
                "--outdir", tmp_path / "out") == 2


def test_cluster_recovers_planted_partition(tmp_path):
    out = tmp_path / "out"
    assert _run("synth", "--synth-kind", "planted", "--n-per-group", "20",
                "--rates", "[0.05,0.2]", "--noise-sd", "0.02", "--T", "30",
                "--x0", "6.0", "--seed", "3", "--outdir", out, "--run-id", "p") == 0
    assert _run("cluster", "--cases", out / "p" / "cases.csv", "--k", "2",
                "--mean-window", "full", "--outdir", out, "--run-id", "c") == 0
    _, truth_rows = read_csv_rows(out / "p" / "truth.csv")
    _, part_rows = read_csv_rows(out / "c" / "partition.csv")
    truth = {e: int(z) for e, z in truth_rows}
    pred = np.array([int(z) for _, z in part_rows])
    labels = np.array([truth[e] for e, _ in part_rows])
    _, rate = align_labels(pred, labels)
    assert rate <= 0.05
    meta = json.loads((out / "c" / "meta.json").read_text())
    assert meta["K"] == 2 and meta["chosen_by"] == "config"
    for name in ("embedding.csv", "eigenvalues.csv", "block_means.csv",
                 "growth_summary.csv"):
        assert (out / "c" / name).exists()


def test_cluster_auto_k_metadata(tmp_path):
    out = tmp_path / "out"
    assert _run("synth", "--synth-kind", "planted", "--n-per-group", "15",
                "--rates", "[0.05,0.2]", "--noise-sd", "0.01", "--T", "30",
                "--x0", "6.0", "--seed", "4", "--outdir", out, "--run-id", "p") == 0
    assert _run("cluster", "--cases", out / "p" / "cases.csv", "--k", "auto",
                "--mean-window", "full", "--outdir", out, "--run-id", "c") == 0
    meta = json.loads((out / "c" / "meta.json").read_text())
    assert meta["chosen_by"] == "eigen-gap"
    assert meta["K"] == 2


def test_cluster_method_tag_in_outputs(tmp_path):
    out = tmp_path / "out"
    assert _run("synth", "--synth-kind", "planted", "--n-per-group", "10",
                "--rates", "[0.05,0.2]", "--noise-sd", "0.02", "--T", "30",
                "--x0", "6.0", "--seed", "6", "--outdir", out, "--run-id", "p") == 0
    assert _run("cluster", "--cases", out / "p" / "cases.csv", "--k", "2",
                "--method", "laplacian-knn", "--knn-k", "7",
                "--outdir", out, "--run-id", "c") == 0
    meta = json.loads((out / "c" / "meta.json").read_text())
    assert meta["method"] == "laplacian-knn"


def test_growth_fits_file(tmp_path):
    syn = _synth_forecast(tmp_path)
    assert _run("growth", "--cases", syn / "cases.csv", "--k", "2",
                "--outdir", tmp_path / "out", "--run-id", "g") == 0
    header, rows = read_csv_rows(tmp_path / "out" / "g" / "growth_fits.csv")
    assert header == ["entity_id", "x0", "r", "rss", "converged"]
    assert len(rows) == 16


def test_features_command(tmp_path):
    syn = _synth_forecast(tmp_path)
    assert _run("features", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--select-ks", "[2,3]", "--q", "2", "--top-m", "2",
                "--outdir", tmp_path / "out", "--run-id", "f") == 0
    out = tmp_path / "out" / "f"
    selection = json.loads((out / "selection.json").read_text())
    assert "group_signal" in selection["selected"]
    header, rows = read_csv_rows(out / "ranking_K2.csv")
    assert header[:2] == ["feature", "p_value"]
    assert len(rows) == 3


def test_train_predict_cycle(tmp_path):
    syn = _synth_forecast(tmp_path)
    out = tmp_path / "out"
    assert _run("train", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv", "--model", "SD-LM", "--k", "2",
                "--features", '["group_signal","noise_0","noise_1"]',
                "--outdir", out, "--run-id", "t") == 0
    assert _run("predict", "--bundle", out / "t" / "bundle.json",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--outdir", out, "--run-id", "pr") == 0
    header, rows = read_csv_rows(out / "pr" / "predictions.csv")
    assert header == ["entity_id", "date", "lead", "prediction"]
    assert len(rows) == 16 * 30
    assert all(np.isfinite(float(r[3])) for r in rows)


def test_evaluate_row_cardinality(tmp_path):
    syn = _synth_forecast(tmp_path)
    assert _run("evaluate", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--models", '["SD-LM"]', "--ks", "[1,2]", "--folds", "4",
                "--features", '["group_signal","noise_0","noise_1"]',
                "--outdir", tmp_path / "out", "--run-id", "ev") == 0
    header, rows = read_csv_rows(tmp_path / "out" / "ev" / "evaluation.csv")
    assert header == ["model", "K", "sample", "mean", "median", "sd"]
    assert len(rows) == 4  # 1 model x 2 K x {in, out}


def test_evaluate_models_all_cardinality(tmp_path):
    syn = _synth_forecast(tmp_path, run_id="syn3", dynamics="linear", groups="1",
                          n_per_group="12", T="25")
    assert _run("evaluate", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--models", '["all"]', "--ks", "[1,2]", "--folds", "2",
                "--epochs", "3",
                "--features", '["group_signal","noise_0","noise_1"]',
                "--outdir", tmp_path / "out", "--run-id", "eva") == 0
    _, rows = read_csv_rows(tmp_path / "out" / "eva" / "evaluation.csv")
    assert len(rows) == 5 * 2 * 2  # models x K values x {in, out}
    for sample in ("in", "out"):
        assert sum(r[2] == sample for r in rows) == 10


def test_evaluate_noiseless_linear_rows(tmp_path):
    syn = _synth_forecast(tmp_path, run_id="syn4", dynamics="linear", groups="1",
                          n_per_group="10")
    assert _run("evaluate", "--cases", syn / "cases.csv",
                "--demographics", syn / "demographics.csv",
                "--mobility", syn / "mobility.csv",
                "--models", '["SD-LM"]', "--ks", "[1]", "--folds", "5",
                "--features", '["group_signal","noise_0","noise_1"]',
                "--outdir", tmp_path / "out", "--run-id", "evl") == 0
    _, rows = read_csv_rows(tmp_path / "out" / "evl" / "evaluation.csv")
    out_row = next(r for r in rows if r[2] == "out")
    assert float(out_row[4]) >= 0.99  # median column


def test_rerun_is_byte_identical(tmp_path):
    syn = _synth_forecast(tmp_path)
    common = ["evaluate", "--cases", syn / "cases.csv",
              "--demographics", syn / "demographics.csv",
              "--mobility", syn / "mobility.csv",
              "--models", '["SD-LSTM"]', "--ks", "[1]", "--folds", "3",
              "--epochs", "10",
              "--features", '["group_signal","noise_0","noise_1"]',
              "--outdir", tmp_path / "out"]
    assert _run(*common, "--run-id", "e1") == 0
    assert _run(*common, "--run-id", "e2") == 0
    a = _digest_dir(tmp_path / "out" / "e1")
    b = _digest_dir(tmp_path / "out" / "e2")
    assert set(a) == set(b)
    for name in a:
        if name != "meta.json":  # meta echoes the differing run_id
            assert a[name] == b[name], name


def test_config_file_and_flag_precedence(tmp_path):
    syn = _synth_forecast(tmp_path)
    config = write_lines(tmp_path / "run.cfg", f"""
# pipeline settings
cases = "{syn / 'cases.csv'}"
k = 2
seed = 7
mean_window = "full"
""")
    parsed = parse_config_file(config)
    assert parsed["k"] == 2 and parsed["mean_window"] == "full"
    out = tmp_path / "out"
    assert _run("cluster", "--config", config, "--outdir", out, "--run-id", "c1") == 0
    meta = json.loads((out / "c1" / "meta.json").read_text())
    assert meta["K"] == 2
    # flag overrides the file
    assert _run("cluster", "--config", config, "--k", "3",
                "--outdir", out, "--run-id", "c2") == 0
    meta2 = json.loads((out / "c2" / "meta.json").read_text())
    assert meta2["K"] == 3


def test_unknown_config_key_rejected(tmp_path):
    config = write_lines(tmp_path / "bad.cfg", "bogus_key = 1")
    assert _run("cluster", "--config", config, "--outdir", tmp_path / "out") == 2


def test_sweep_and_importance_and_baseline(tmp_path):
    out = tmp_path / "out"
    syn = _synth_forecast(tmp_path, run_id="syn2", dynamics="linear", groups="1",
                          n_per_group="10")
    common = ["--cases", syn / "cases.csv", "--demographics", syn / "demographics.csv",
              "--mobility", syn / "mobility.csv", "--model", "SD-LM", "--k", "1",
              "--folds", "3", "--features", '["group_signal","noise_0","noise_1"]',
              "--outdir", out]
    assert _run("sweep-lead", *common, "--leads", "[3,4,5]", "--run-id", "sw") == 0
    header, rows = read_csv_rows(out / "sw" / "lead_sweep.csv")
    medians = {int(r[0]): float(r[1]) for r in rows}
    assert max(medians, key=medians.get) == 4
    assert _run("feature-importance", *common, "--run-id", "fi") == 0
    header, rows = read_csv_rows(out / "fi" / "feature_importance.csv")
    assert rows[0][0] == "full"
    assert len(rows) == 4
    assert _run("baseline-random", *common, "--trials", "3", "--run-id", "br") == 0
    header, rows = read_csv_rows(out / "br" / "baseline.csv")
    assert len(rows) == 4  # 3 trials + median
    assert rows[-1][0] == "median"

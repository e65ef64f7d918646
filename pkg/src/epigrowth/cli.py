"""Pipeline CLI: every subcommand is a pure function of (config, input
files, seed) and re-runs are byte-identical.

Configuration is a flat key = value file (strings quoted, lists in JSON
syntax); command-line flags override file values. Outputs land under
<outdir>/<run-id>/ where the default run id hashes the resolved config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import timedelta
from pathlib import Path

import numpy as np

from . import forecast, growth, ingest, sbm, similarity, spectral
from .errors import (ConfigError, ConflictError, EmptyPanelError, EpigrowthError,
                     FormatError, JoinError)
from .featstats import bonferroni, consensus_select
from .util import DiagnosticLog, write_csv

COMMANDS = ("synth", "ingest", "cluster", "growth", "features", "train", "predict",
            "evaluate", "sweep-lead", "feature-importance", "baseline-random")

DEFAULTS: dict = {
    # inputs
    "cases": "", "cases_format": "wide", "demographics": "", "mobility": "",
    "bundle": "",
    # outputs
    "outdir": "out", "run_id": "",
    # registration
    "threshold": 12, "min_length": 14,
    # similarity / clustering
    "mean_window": "pair", "method": "correlation", "k": "auto", "k_max": 10,
    "epsilon": 0.007, "knn_k": 7,
    "kmeans_restarts": 10, "kmeans_max_iter": 300,
    # feature selection
    "select_ks": [2, 3, 4, 5], "top_m": 8, "q": 7, "features": [],
    # forecasting
    "model": "SD-LSTM", "models": ["all"], "ks": [1, 2, 3, 4, 5],
    "lead": 4, "leads": [1, 2, 3, 4, 5, 6, 7],
    "folds": 5, "trials": 5, "epochs": 300, "lr": 0.01, "hidden": 10,
    "dropout": 0.5,
    # execution (jobs 0 = one worker per logical core)
    "seed": 0, "jobs": 0,
    # synth
    "synth_kind": "forecast", "n_per_group": 30, "groups": 1, "T": 40,
    "rates": [0.05, 0.2], "noise_sd": 0.02, "x0": 12.0,
    "dynamics": "linear", "n_noise_features": 2,
    "sbm_n": 300, "sbm_k": 2, "sbm_within": 0.9, "sbm_between": 0.1,
}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        stripped = text.strip()
        if len(stripped) >= 2 and stripped[0] == stripped[-1] and stripped[0] in "'\"":
            return stripped[1:-1]
        return stripped


def parse_config_file(path: str | Path) -> dict:
    """Flat `key = value` file; values use JSON syntax where it matters."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _parse_value(value.strip())
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(parse_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            cfg[key] = _parse_value(flag) if isinstance(flag, str) else flag
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["threshold"] < 1:
        raise ConfigError("threshold must be >= 1")
    if cfg["min_length"] < 2:
        raise ConfigError("min_length must be >= 2")
    if not 0.0 < float(cfg["epsilon"]) < 2.0:
        raise ConfigError("epsilon must lie in (0, 2)")
    if cfg["folds"] < 2:
        raise ConfigError("folds must be >= 2")
    if cfg["method"] not in ("correlation", "laplacian-epsilon", "laplacian-knn"):
        raise ConfigError(f"unknown clustering method {cfg['method']!r}")
    if cfg["mean_window"] not in ("pair", "full"):
        raise ConfigError("mean_window must be 'pair' or 'full'")
    if cfg["k"] != "auto":
        try:
            cfg["k"] = int(cfg["k"])
        except (TypeError, ValueError):
            raise ConfigError("k must be an integer or 'auto'") from None
    if cfg["model"] != "all" and cfg["model"] not in forecast.METHODS:
        raise ConfigError(f"unknown model {cfg['model']!r}")
    for m in cfg["models"]:
        if m != "all" and m not in forecast.METHODS:
            raise ConfigError(f"unknown model {m!r}")


def _require_files(cfg: dict, *keys: str) -> None:
    for key in keys:
        path = cfg[key]
        if not path:
            raise ConfigError(f"config key {key!r} is required for this command")
        if not Path(path).exists():
            raise ConfigError(f"{key} file not found: {path}")


def run_dir(cfg: dict, command: str) -> Path:
    run_id = cfg["run_id"]
    if not run_id:
        digest = hashlib.sha256(
            json.dumps({"command": command, **cfg}, sort_keys=True).encode()).hexdigest()
        run_id = digest[:12]
    out = Path(cfg["outdir"]) / run_id
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_meta(out: Path, command: str, cfg: dict, extra: dict | None = None) -> None:
    doc = {"command": command, "config": cfg}
    if extra:
        doc.update(extra)
    with open(out / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _jobs(cfg: dict) -> int:
    return int(cfg["jobs"]) if int(cfg["jobs"]) > 0 else (os.cpu_count() or 1)


def _train_cfg(cfg: dict) -> forecast.TrainConfig:
    return forecast.TrainConfig(hidden=int(cfg["hidden"]), lr=float(cfg["lr"]),
                                epochs=int(cfg["epochs"]), seed=int(cfg["seed"]),
                                dropout=float(cfg["dropout"]))


def _select_cfg(cfg: dict) -> forecast.evaluate.SelectionConfig:
    return forecast.evaluate.SelectionConfig(tuple(cfg["select_ks"]),
                                             int(cfg["top_m"]), int(cfg["q"]))


def _features_or_none(cfg: dict) -> list[str] | None:
    return list(cfg["features"]) if cfg["features"] else None


def _load_registered(cfg: dict, diag: DiagnosticLog) -> ingest.RegisteredPanel:
    _require_files(cfg, "cases")
    raw = ingest.parse_cases(cfg["cases"], cfg["cases_format"], diag)
    return ingest.register(raw, int(cfg["threshold"]), int(cfg["min_length"]), diag)


def _load_joined(cfg: dict, diag: DiagnosticLog):
    _require_files(cfg, "cases", "demographics", "mobility")
    panel = _load_registered(cfg, diag)
    demo = ingest.parse_demographics(cfg["demographics"], diag)
    mob = ingest.parse_mobility(cfg["mobility"], diag)
    return ingest.join_sources(panel, demo, mob, diag)


def _cluster_pipeline(cfg: dict, panel: ingest.RegisteredPanel, diag: DiagnosticLog) -> dict:
    """Correlate, pick K (config or eigen-gap on the correlation spectrum),
    and cluster by the configured method."""
    corr = similarity.correlation(panel, cfg["mean_window"], diag)
    values, vectors = spectral.eigen_sym(corr.values)
    mags = np.sort(np.abs(values))[::-1]
    if cfg["k"] == "auto":
        k_max = min(int(cfg["k_max"]), corr.n - 1)
        k = spectral.select_k_eigengap(mags, k_max)
        chosen_by = "eigen-gap"
    else:
        k = int(cfg["k"])
        chosen_by = "config"
    km = spectral.KMeansConfig(seed=int(cfg["seed"]), restarts=int(cfg["kmeans_restarts"]),
                               max_iter=int(cfg["kmeans_max_iter"]))
    if cfg["method"] == "correlation":
        emb = spectral.embedding_from_spectrum(values, vectors, k, "largest")
        raw = spectral.embedding_from_spectrum(values, vectors, k, "largest", normalize=False)
        part = spectral.cluster_embedding(emb, corr.entities, k, "correlation", km, diag)
    else:
        if cfg["method"] == "laplacian-epsilon":
            graph = similarity.epsilon_graph(corr, float(cfg["epsilon"]))
        else:
            graph = similarity.knn_graph(corr, int(cfg["knn_k"]))
        lap = spectral.laplacian_matrix(graph, diag)
        lap_values, lap_vectors = spectral.eigen_sym(lap)
        emb = spectral.embedding_from_spectrum(lap_values, lap_vectors, k, "smallest")
        raw = spectral.embedding_from_spectrum(lap_values, lap_vectors, k, "smallest",
                                               normalize=False)
        part = spectral.cluster_embedding(emb, corr.entities, k,
                                          f"laplacian-{graph.kind}", km, diag)
    return {"corr": corr, "spectrum": mags, "eig": (values, vectors), "K": k,
            "chosen_by": chosen_by, "embedding": emb, "embedding_raw": raw,
            "partition": part}


def _growth_summary_rows(panel, part):
    fits = growth.fit_panel(panel)
    summaries, fastest, slowest = growth.summarize_clusters(fits, part)
    rows = [[s.community, s.count, s.mean_rate, s.se] for s in summaries]
    return fits, summaries, fastest, slowest, rows


# --- commands ---------------------------------------------------------------

def cmd_synth(cfg: dict) -> Path:
    out = run_dir(cfg, "synth")
    kind = cfg["synth_kind"]
    seed = int(cfg["seed"])
    if kind == "planted":
        panel, truth = sbm.planted_growth_panel(
            int(cfg["n_per_group"]), list(cfg["rates"]), float(cfg["noise_sd"]),
            int(cfg["T"]), seed, x0=float(cfg["x0"]),
            threshold=int(cfg["threshold"]), min_length=int(cfg["min_length"]))
        ingest.write_registered_as_cases(panel, out / "cases.csv")
        write_csv(out / "truth.csv", ["entity_id", "community"],
                  [[e, int(z)] for e, z in zip(panel.entities, truth)])
    elif kind == "forecast":
        panel, demo, mob, truth = sbm.planted_forecast_data(
            int(cfg["n_per_group"]), int(cfg["groups"]), int(cfg["T"]),
            int(cfg["lead"]), seed, cfg["dynamics"],
            n_noise_features=int(cfg["n_noise_features"]))
        ingest.write_registered_as_cases(panel, out / "cases.csv")
        ingest.write_demographics(demo, out / "demographics.csv")
        ingest.write_mobility(mob, out / "mobility.csv")
        write_csv(out / "truth.csv", ["entity_id", "community"],
                  [[e, int(z)] for e, z in zip(panel.entities, truth)])
    elif kind == "sbm":
        n, k = int(cfg["sbm_n"]), int(cfg["sbm_k"])
        per = n // k
        labels = np.repeat(np.arange(1, k + 1), per)
        if labels.size != n:
            raise ConfigError("sbm_n must be divisible by sbm_k")
        b = np.full((k, k), float(cfg["sbm_between"]))
        np.fill_diagonal(b, float(cfg["sbm_within"]))
        model = sbm.BlockModel(n, k, b, labels)
        graph = sbm.sample_adjacency(model, seed)
        similarity.write_edge_list(graph, out / "edges.csv")
        write_csv(out / "truth.csv", ["entity_id", "community"],
                  [[e, int(z)] for e, z in zip(graph.entities, labels)])
    else:
        raise ConfigError(f"unknown synth_kind {kind!r}")
    _write_meta(out, "synth", cfg)
    return out


def cmd_ingest(cfg: dict) -> Path:
    out = run_dir(cfg, "ingest")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    ingest.write_registered(panel, out / "registered.csv")
    ingest.write_demographics(demo, out / "demographics.csv")
    ingest.write_mobility(mob, out / "mobility.csv")
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "ingest", cfg, {"entities": len(panel.entities)})
    return out


def cmd_cluster(cfg: dict) -> Path:
    out = run_dir(cfg, "cluster")
    diag = DiagnosticLog()
    panel = _load_registered(cfg, diag)
    pipe = _cluster_pipeline(cfg, panel, diag)
    part, emb, raw = pipe["partition"], pipe["embedding"], pipe["embedding_raw"]
    write_csv(out / "partition.csv", ["entity_id", "community"],
              [[e, int(z)] for e, z in zip(part.entities, part.labels)])
    k = pipe["K"]
    header = (["entity_id", "community"] + [f"u{j+1}" for j in range(k)]
              + [f"raw{j+1}" for j in range(k)])
    write_csv(out / "embedding.csv", header,
              [[e, int(part.labels[i])] + list(emb.vectors[i]) + list(raw.vectors[i])
               for i, e in enumerate(part.entities)])
    write_csv(out / "eigenvalues.csv", ["rank", "abs_eigenvalue"],
              [[i + 1, v] for i, v in enumerate(pipe["spectrum"])])
    block = spectral.partition_block_summary(pipe["corr"], part, diag)
    write_csv(out / "block_means.csv", ["community"] + [str(j + 1) for j in range(k)],
              [[a + 1] + [None if np.isnan(v) else v for v in block[a]] for a in range(k)])
    _, _, fastest, slowest, rows = _growth_summary_rows(panel, part)
    write_csv(out / "growth_summary.csv", ["group", "count", "growth_rate", "se"], rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "cluster", cfg,
                {"K": k, "chosen_by": pipe["chosen_by"], "method": part.method,
                 "fastest": fastest, "slowest": slowest})
    return out


def cmd_growth(cfg: dict) -> Path:
    out = run_dir(cfg, "growth")
    diag = DiagnosticLog()
    panel = _load_registered(cfg, diag)
    pipe = _cluster_pipeline(cfg, panel, diag)
    fits, _, fastest, slowest, rows = _growth_summary_rows(panel, pipe["partition"])
    write_csv(out / "growth_fits.csv", ["entity_id", "x0", "r", "rss", "converged"],
              [[f.entity, f.x0, f.r, f.rss, f.converged] for f in fits])
    write_csv(out / "growth_summary.csv", ["group", "count", "growth_rate", "se"], rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "growth", cfg, {"K": pipe["K"], "fastest": fastest, "slowest": slowest})
    return out


def cmd_features(cfg: dict) -> Path:
    out = run_dir(cfg, "features")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    corr = similarity.correlation(panel, cfg["mean_window"], diag)
    fits = growth.fit_panel(panel)
    km = spectral.KMeansConfig(seed=int(cfg["seed"]), restarts=int(cfg["kmeans_restarts"]),
                               max_iter=int(cfg["kmeans_max_iter"]))
    selection = consensus_select(demo, corr, fits, tuple(cfg["select_ks"]),
                                 int(cfg["top_m"]), int(cfg["q"]), km, diag)
    m = len(demo.feature_names)
    for k_val, ranking in selection.per_k_rankings.items():
        write_csv(out / f"ranking_K{k_val}.csv",
                  ["feature", "p_value", "p_bonferroni", "t_stat", "df",
                   "mean_fast", "mean_slow"],
                  [[r.feature, r.p_value, bonferroni(r.p_value, m), r.t_stat, r.df,
                    r.mean_fast, r.mean_slow] for r in ranking])
    with open(out / "selection.json", "w", encoding="utf-8") as fh:
        json.dump({"selected": selection.selected, "rule": selection.rule,
                   "per_k": {str(k_val): [[r.feature, r.p_value] for r in ranking]
                             for k_val, ranking in selection.per_k_rankings.items()}},
                  fh, sort_keys=True, indent=1)
        fh.write("\n")
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "features", cfg, {"selected": selection.selected})
    return out


def cmd_train(cfg: dict) -> Path:
    out = run_dir(cfg, "train")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    pipe = _cluster_pipeline(cfg, panel, diag)
    features = _features_or_none(cfg)
    if features is None:
        fits = growth.fit_panel(panel)
        km = spectral.KMeansConfig(seed=int(cfg["seed"]))
        features = consensus_select(demo, pipe["corr"], fits, tuple(cfg["select_ks"]),
                                    int(cfg["top_m"]), int(cfg["q"]), km, diag,
                                    spectrum=pipe["eig"]).selected
    bundle = forecast.train_bundle(cfg["model"], panel, mob,
                                   demo.select_features(features), pipe["partition"],
                                   int(cfg["lead"]), _train_cfg(cfg), diag)
    forecast.write_bundle(bundle, out / "bundle.json")
    write_csv(out / "partition.csv", ["entity_id", "community"],
              [[e, int(z)] for e, z in zip(bundle.entities, bundle.labels)])
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "train", cfg, {"K": pipe["K"], "features": features,
                                    "t_tilde": bundle.t_tilde})
    return out


def cmd_predict(cfg: dict) -> Path:
    out = run_dir(cfg, "predict")
    diag = DiagnosticLog()
    _require_files(cfg, "bundle", "demographics", "mobility")
    bundle = forecast.read_bundle(cfg["bundle"])
    demo = ingest.parse_demographics(cfg["demographics"], diag)
    mob = ingest.parse_mobility(cfg["mobility"], diag)
    demo = demo.select_features(bundle.feature_names)
    demo_idx = demo.index()
    rows = []
    for i, entity in enumerate(mob.entities):
        if entity not in demo_idx:
            diag.add("predict", entity, "no demographic vector; skipped")
            continue
        scores = mob.scores[i]
        if bundle.drop_metric is not None:
            scores = np.delete(scores, bundle.drop_metric, axis=1)
        preds = forecast.predict(bundle, demo.values[demo_idx[entity]], scores)
        for t, yhat in enumerate(preds):
            day = mob.start[i] + timedelta(days=t)
            rows.append([entity, day.isoformat(), bundle.lead, yhat])
    write_csv(out / "predictions.csv", ["entity_id", "date", "lead", "prediction"], rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "predict", cfg, {"entities": len(rows)})
    return out


def _models(cfg: dict) -> list[str]:
    models = list(cfg["models"])
    if "all" in models:
        return list(forecast.METHODS)
    return models


def cmd_evaluate(cfg: dict) -> Path:
    out = run_dir(cfg, "evaluate")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    rows, record_rows = [], []
    for model in _models(cfg):
        for k in cfg["ks"]:
            cv = forecast.cross_validate(
                model, int(k), panel, demo, mob, int(cfg["lead"]),
                folds=int(cfg["folds"]), seed=int(cfg["seed"]), cfg=_train_cfg(cfg),
                features=_features_or_none(cfg), select=_select_cfg(cfg),
                jobs=_jobs(cfg), diag=diag)
            rows.append([model, k, "in", cv.in_mean, cv.in_median, cv.in_sd])
            rows.append([model, k, "out", cv.out_mean, cv.out_median, cv.out_sd])
            for r in cv.records:
                record_rows.append([model, k, r.fold, r.sample, r.entity, r.lead, r.r2])
    write_csv(out / "evaluation.csv", ["model", "K", "sample", "mean", "median", "sd"], rows)
    write_csv(out / "records.csv",
              ["model", "K", "fold", "sample", "entity_id", "lead", "r2"], record_rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "evaluate", cfg)
    return out


def cmd_sweep_lead(cfg: dict) -> Path:
    out = run_dir(cfg, "sweep-lead")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    results = forecast.lead_sweep(
        cfg["model"], _single_k(cfg), panel, demo, mob, [int(v) for v in cfg["leads"]],
        folds=int(cfg["folds"]), seed=int(cfg["seed"]), cfg=_train_cfg(cfg),
        features=_features_or_none(cfg), select=_select_cfg(cfg), jobs=_jobs(cfg),
        diag=diag)
    write_csv(out / "lead_sweep.csv", ["lead", "out_median", "out_mean", "error"],
              [[r.lead, r.out_median, r.out_mean, r.error] for r in results])
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "sweep-lead", cfg)
    return out


def cmd_feature_importance(cfg: dict) -> Path:
    out = run_dir(cfg, "feature-importance")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    result = forecast.feature_importance(
        cfg["model"], _single_k(cfg), panel, demo, mob, int(cfg["lead"]),
        folds=int(cfg["folds"]), seed=int(cfg["seed"]), cfg=_train_cfg(cfg),
        features=_features_or_none(cfg), select=_select_cfg(cfg), jobs=_jobs(cfg),
        diag=diag)
    rows = [["full", result["full"], 0.0]]
    for name, entry in result["dropped"].items():
        rows.append([name, entry["median"], entry["decline"]])
    write_csv(out / "feature_importance.csv", ["left_out", "out_median", "decline"], rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "feature-importance", cfg)
    return out


def cmd_baseline_random(cfg: dict) -> Path:
    out = run_dir(cfg, "baseline-random")
    diag = DiagnosticLog()
    panel, demo, mob = _load_joined(cfg, diag)
    result = forecast.random_assignment_baseline(
        cfg["model"], _single_k(cfg), panel, demo, mob, int(cfg["lead"]),
        trials=int(cfg["trials"]), folds=int(cfg["folds"]), seed=int(cfg["seed"]),
        cfg=_train_cfg(cfg), features=_features_or_none(cfg), select=_select_cfg(cfg),
        jobs=_jobs(cfg), diag=diag)
    rows = [[t["trial"], t["in_mean"], t["in_median"], t["in_sd"],
             t["out_mean"], t["out_median"], t["out_sd"]] for t in result.trials]
    med = result.median
    rows.append(["median", med["in_mean"], med["in_median"], med["in_sd"],
                 med["out_mean"], med["out_median"], med["out_sd"]])
    write_csv(out / "baseline.csv",
              ["trial", "in_mean", "in_median", "in_sd", "out_mean", "out_median", "out_sd"],
              rows)
    diag.write_jsonl(out / "diagnostics.jsonl")
    _write_meta(out, "baseline-random", cfg)
    return out


def _single_k(cfg: dict) -> int:
    if cfg["k"] == "auto":
        raise ConfigError("this command needs an explicit k")
    return int(cfg["k"])


_HANDLERS = {
    "synth": cmd_synth, "ingest": cmd_ingest, "cluster": cmd_cluster,
    "growth": cmd_growth, "features": cmd_features, "train": cmd_train,
    "predict": cmd_predict, "evaluate": cmd_evaluate, "sweep-lead": cmd_sweep_lead,
    "feature-importance": cmd_feature_importance, "baseline-random": cmd_baseline_random,
}

_INPUT_ERRORS = (ConfigError, FormatError, ConflictError, JoinError, EmptyPanelError,
                 FileNotFoundError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epigrowth",
                                     description="Growth-curve clustering and forecasting pipeline")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default="", help="flat key = value config file")
    for key in DEFAULTS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None,
                            help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = _HANDLERS[args.command](cfg)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EpigrowthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

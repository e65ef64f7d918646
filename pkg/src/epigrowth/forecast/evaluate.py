"""Five-fold evaluation harness.

Each fold recomputes everything from its training entities alone: the
correlation matrix, the partition, the selected demographic features, the
scalers, and the model weights. Test entities only ever enter at
prediction time, assigned to a community by demographic nearest neighbor
(or uniformly at random for the baseline).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ContractError, EpigrowthError
from ..featstats import consensus_select
from ..growth import fit_panel
from ..ingest import DemographicTable, MobilityPanel, RegisteredPanel
from ..similarity import correlation
from ..spectral import (KMeansConfig, Partition, cluster_embedding, eigen_sym,
                        embedding_from_spectrum)
from ..util import DiagnosticLog, rng_stream
from .bundle import ForecastBundle, TrainConfig, derive_seed, predict, r_squared, train_bundle
from .data import build_supervised


@dataclass
class SelectionConfig:
    k_values: tuple[int, ...] = (2, 3, 4, 5)
    top_m: int = 8
    q: int = 7


@dataclass
class EvalRecord:
    entity: str
    r2: float | None
    lead: int
    method: str
    fold: int
    sample: str  # "in" | "out"


@dataclass
class SampleStats:
    n: int
    mean: float
    median: float
    sd: float


@dataclass
class FoldSummary:
    fold: int
    in_stats: SampleStats
    out_stats: SampleStats


@dataclass
class FoldOutput:
    fold: int
    records: list[EvalRecord]
    bundle: ForecastBundle
    corr_values: np.ndarray
    partition_labels: np.ndarray
    selected_features: list[str]
    test_entities: list[str]
    diagnostics: list = None


@dataclass
class CvResult:
    method: str
    K: int
    lead: int
    records: list[EvalRecord]
    per_fold: list[FoldSummary]
    in_mean: float
    in_median: float
    in_sd: float
    out_mean: float
    out_median: float
    out_sd: float


@dataclass
class BaselineResult:
    method: str
    K: int
    lead: int
    trials: list[dict]  # per-trial {"trial", "in_*", "out_*"}
    median: dict  # elementwise median over trials


@dataclass
class LeadResult:
    lead: int
    out_median: float | None
    out_mean: float | None
    error: str | None


def _stats(values: list[float]) -> SampleStats:
    if not values:
        return SampleStats(0, float("nan"), float("nan"), float("nan"))
    arr = np.array(values)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return SampleStats(arr.size, float(arr.mean()), float(np.median(arr)), sd)


def _fold_splits(n: int, folds: int, seed: int) -> list[np.ndarray]:
    if folds < 2 or n < folds:
        raise ContractError("need at least 2 folds and one entity per fold")
    perm = rng_stream(seed, 0xCF).permutation(n)
    return np.array_split(perm, folds)


def _restrict_all(panel, demo, mob, keys):
    return panel.restrict(keys), demo.restrict(keys), mob.restrict(keys)


def run_fold(fold: int, train_keys: list[str], test_keys: list[str],
             panel: RegisteredPanel, demo: DemographicTable, mob: MobilityPanel,
             method: str, K: int, lead: int, cfg: TrainConfig,
             features: list[str] | None, select: SelectionConfig, seed: int,
             diag: DiagnosticLog | None = None) -> FoldOutput:
    """Train on one fold's training entities and score both samples.

    Everything learned (correlation matrix, partition, feature selection,
    scalers, weights) is a function of the training entities only.
    """
    diag = diag if diag is not None else DiagnosticLog()
    train_panel, train_demo, train_mob = _restrict_all(panel, demo, mob, train_keys)
    corr = correlation(train_panel, diag=diag)
    km_cfg = KMeansConfig(seed=derive_seed(seed, 0xAA, fold))
    # one eigendecomposition serves both the partition and the per-K
    # clusterings inside the feature selection
    spectrum = eigen_sym(corr.values) if (K > 1 or features is None) else None
    if K == 1:
        partition = Partition(list(train_keys), np.ones(len(train_keys), dtype=int),
                              1, "correlation", np.zeros((1, 1)))
    else:
        if corr.n <= K:
            raise ContractError("need more entities than communities")
        emb = embedding_from_spectrum(*spectrum, K, "largest")
        partition = cluster_embedding(emb, corr.entities, K, "correlation", km_cfg, diag)
    if features is None:
        fits = fit_panel(train_panel)
        selection = consensus_select(train_demo, corr, fits, select.k_values,
                                     select.top_m, select.q, km_cfg, diag,
                                     spectrum=spectrum)
        selected = selection.selected
    else:
        selected = list(features)
    demo_sel = train_demo.select_features(selected)
    fold_cfg = replace(cfg, seed=derive_seed(seed, 0xBE, fold))
    bundle = train_bundle(method, train_panel, train_mob, demo_sel, partition,
                          lead, fold_cfg, diag)

    records: list[EvalRecord] = []
    train_series = build_supervised(train_panel, train_mob, lead,
                                    drop_metric=cfg.drop_metric, diag=diag)
    demo_rows = {e: demo_sel.values[i] for i, e in enumerate(demo_sel.entities)}
    trained = set(bundle.train_entities)
    label_of = dict(zip(bundle.entities, (int(z) for z in bundle.labels)))
    for s in train_series:
        if s.entity not in trained:
            continue
        if bundle.method == "SD-SP" and s.entity not in bundle.per_entity_linear:
            continue
        yhat = _predict_in_sample(bundle, s, demo_rows[s.entity], label_of[s.entity])
        records.append(EvalRecord(s.entity, r_squared(s.targets, yhat, diag, s.entity),
                                  lead, method, fold, "in"))

    test_panel, test_demo, test_mob = _restrict_all(panel, demo, mob, test_keys)
    test_sel = test_demo.select_features(selected)
    test_rows = {e: test_sel.values[i] for i, e in enumerate(test_sel.entities)}
    test_series = build_supervised(test_panel, test_mob, lead,
                                   drop_metric=cfg.drop_metric, diag=diag)
    for s in test_series:
        yhat = predict(bundle, test_rows[s.entity], s.inputs)
        records.append(EvalRecord(s.entity, r_squared(s.targets, yhat, diag, s.entity),
                                  lead, method, fold, "out"))
    return FoldOutput(fold, records, bundle, corr.values, partition.labels.copy(),
                      list(selected), list(test_keys), list(diag.records))


def _predict_in_sample(bundle: ForecastBundle, series, demo_row, community: int
                       ) -> np.ndarray:
    """Training entities are scored with their own community (their own
    linear coefficients for SD-SP), which is what the nearest-neighbor rule
    returns for an entity at distance zero from itself."""
    xs = bundle.mob_scaler.transform(series.inputs)
    if bundle.method == "SD-SP":
        lin = bundle.per_entity_linear[series.entity]
        return lin.predict(xs) + bundle.per_community[community].predict(xs)
    if bundle.method == "DSD-LSTM":
        d = bundle.demo_scaler.transform(np.asarray(demo_row, dtype=float))
        xs = np.hstack([xs, np.tile(d, (xs.shape[0], 1))])
    return bundle.per_community[community].predict(xs)


def _run_fold_job(args):
    try:
        return run_fold(*args)
    except EpigrowthError as exc:
        return exc


def _fold_outputs(method, K, panel, demo, mob, lead, folds, seed, cfg,
                  features, select, jobs, diag) -> list[FoldOutput]:
    """Run every fold, skipping (with a diagnostic) folds that fail; raises
    only when no fold succeeds. Fold diagnostics merge back in fold order so
    serial and parallel runs emit identical logs."""
    keys = list(panel.entities)
    splits = _fold_splits(len(keys), folds, seed)
    tasks = []
    for fold, test_idx in enumerate(splits):
        test_set = {keys[i] for i in test_idx}
        train_keys = [e for e in keys if e not in test_set]
        test_keys = [e for e in keys if e in test_set]
        tasks.append((fold, train_keys, test_keys, panel, demo, mob, method, K,
                      lead, cfg, features, select, seed))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_fold_job, tasks))
    else:
        results = [_run_fold_job(t) for t in tasks]
    outputs: list[FoldOutput] = []
    errors: list[str] = []
    for fold, result in enumerate(results):
        if isinstance(result, FoldOutput):
            outputs.append(result)
            if diag is not None:
                diag.records.extend(result.diagnostics)
        else:
            errors.append(f"fold {fold}: {result}")
            if diag is not None:
                diag.add("cross-validate", f"fold-{fold}", f"fold skipped: {result}")
    if not outputs:
        raise ContractError("every fold failed: " + "; ".join(errors))
    return outputs


def cross_validate(method: str, K: int, panel: RegisteredPanel,
                   demo: DemographicTable, mob: MobilityPanel, lead: int,
                   folds: int = 5, seed: int = 0, cfg: TrainConfig | None = None,
                   features: list[str] | None = None,
                   select: SelectionConfig | None = None, jobs: int = 1,
                   diag: DiagnosticLog | None = None) -> CvResult:
    """K-fold protocol: per fold, re-correlate and re-cluster the training
    entities, train the bundle, and score per-entity R^2 in and out of
    sample; fold stats (mean/median/sd over entities) are averaged across
    folds.
    """
    cfg = cfg or TrainConfig()
    select = select or SelectionConfig()
    outputs = _fold_outputs(method, K, panel, demo, mob, lead, folds, seed, cfg,
                            features, select, jobs, diag)
    records = [r for out in outputs for r in out.records]
    per_fold = []
    for out in outputs:
        per_fold.append(FoldSummary(
            out.fold,
            _stats([r.r2 for r in out.records if r.sample == "in" and r.r2 is not None]),
            _stats([r.r2 for r in out.records if r.sample == "out" and r.r2 is not None])))
    return CvResult(
        method, K, lead, records, per_fold,
        in_mean=float(np.mean([f.in_stats.mean for f in per_fold])),
        in_median=float(np.mean([f.in_stats.median for f in per_fold])),
        in_sd=float(np.mean([f.in_stats.sd for f in per_fold])),
        out_mean=float(np.mean([f.out_stats.mean for f in per_fold])),
        out_median=float(np.mean([f.out_stats.median for f in per_fold])),
        out_sd=float(np.mean([f.out_stats.sd for f in per_fold])))


def random_assignment_baseline(method: str, K: int, panel: RegisteredPanel,
                               demo: DemographicTable, mob: MobilityPanel,
                               lead: int, trials: int = 5, folds: int = 5,
                               seed: int = 0, cfg: TrainConfig | None = None,
                               features: list[str] | None = None,
                               select: SelectionConfig | None = None,
                               jobs: int = 1,
                               diag: DiagnosticLog | None = None) -> BaselineResult:
    """Identical protocol to cross_validate except each test entity is
    assigned to a community uniformly at random per trial (training, and
    hence the in-sample numbers, do not change across trials)."""
    cfg = cfg or TrainConfig()
    select = select or SelectionConfig()
    diag = diag if diag is not None else DiagnosticLog()
    outputs = _fold_outputs(method, K, panel, demo, mob, lead, folds, seed, cfg,
                            features, select, jobs, diag)
    trial_rows: list[dict] = []
    for trial in range(trials):
        rng = rng_stream(seed, 0xBB, trial)
        in_vals: list[float] = []
        out_fold_stats: list[SampleStats] = []
        in_fold_stats: list[SampleStats] = []
        for out in outputs:
            in_r2 = [r.r2 for r in out.records if r.sample == "in" and r.r2 is not None]
            in_fold_stats.append(_stats(in_r2))
            fold_vals = []
            test_panel, test_demo, test_mob = _restrict_all(panel, demo, mob,
                                                            out.test_entities)
            test_sel = test_demo.select_features(out.selected_features)
            rows = {e: test_sel.values[i] for i, e in enumerate(test_sel.entities)}
            series = build_supervised(test_panel, test_mob, lead,
                                      drop_metric=cfg.drop_metric, diag=diag)
            for s in series:
                k_rand = int(rng.integers(1, K + 1))
                yhat = predict(out.bundle, rows[s.entity], s.inputs,
                               force_community=k_rand)
                r2 = r_squared(s.targets, yhat, diag, s.entity)
                if r2 is not None:
                    fold_vals.append(r2)
            out_fold_stats.append(_stats(fold_vals))
        trial_rows.append({
            "trial": trial + 1,
            "in_mean": float(np.mean([s.mean for s in in_fold_stats])),
            "in_median": float(np.mean([s.median for s in in_fold_stats])),
            "in_sd": float(np.mean([s.sd for s in in_fold_stats])),
            "out_mean": float(np.mean([s.mean for s in out_fold_stats])),
            "out_median": float(np.mean([s.median for s in out_fold_stats])),
            "out_sd": float(np.mean([s.sd for s in out_fold_stats])),
        })
    median = {key: float(np.median([t[key] for t in trial_rows]))
              for key in trial_rows[0] if key != "trial"}
    return BaselineResult(method, K, lead, trial_rows, median)


def lead_sweep(method: str, K: int, panel: RegisteredPanel,
               demo: DemographicTable, mob: MobilityPanel,
               leads=range(1, 8), folds: int = 5, seed: int = 0,
               cfg: TrainConfig | None = None, features: list[str] | None = None,
               select: SelectionConfig | None = None, jobs: int = 1,
               diag: DiagnosticLog | None = None) -> list[LeadResult]:
    """cross_validate per lead; a failing lead is recorded and the sweep
    continues."""
    diag = diag if diag is not None else DiagnosticLog()
    results = []
    for lead in leads:
        try:
            cv = cross_validate(method, K, panel, demo, mob, lead, folds, seed,
                                cfg, features, select, jobs, diag)
        except EpigrowthError as exc:
            diag.add("lead-sweep", f"lead-{lead}", str(exc))
            results.append(LeadResult(lead, None, None, str(exc)))
            continue
        results.append(LeadResult(lead, cv.out_median, cv.out_mean, None))
    return results


def feature_importance(method: str, K: int, panel: RegisteredPanel,
                       demo: DemographicTable, mob: MobilityPanel, lead: int,
                       folds: int = 5, seed: int = 0,
                       cfg: TrainConfig | None = None,
                       features: list[str] | None = None,
                       select: SelectionConfig | None = None, jobs: int = 1,
                       diag: DiagnosticLog | None = None) -> dict:
    """Leave-one-mobility-feature-out: median out-of-sample R^2 with each
    metric dropped, versus the full three-metric run."""
    cfg = cfg or TrainConfig()
    if cfg.drop_metric is not None:
        raise ContractError("feature_importance controls drop_metric itself")
    full = cross_validate(method, K, panel, demo, mob, lead, folds, seed, cfg,
                          features, select, jobs, diag)
    out = {"full": full.out_median, "dropped": {}}
    for j, name in enumerate(mob.metric_names):
        cv = cross_validate(method, K, panel, demo, mob, lead, folds, seed,
                            replace(cfg, drop_metric=j), features, select, jobs, diag)
        out["dropped"][name] = {"median": cv.out_median,
                                "decline": full.out_median - cv.out_median}
    return out

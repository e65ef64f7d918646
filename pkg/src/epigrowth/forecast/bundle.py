"""Per-community forecasting bundles: training, nearest-neighbor community
assignment, prediction, and a portable JSON weight format.

Five families share one interface. Mobility-only recurrent (SD-LSTM),
semi-parametric per-entity linear plus community residual LSTM (SD-SP),
pooled community linear (SD-LM), demographic-augmented recurrent
(DSD-LSTM), and a per-step dense network (SD-MLP). Inputs are z-scored
with training statistics; the scalers travel with the bundle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ContractError
from ..ingest import DemographicTable, MobilityPanel, RegisteredPanel
from ..spectral import Partition
from ..util import DiagnosticLog
from .data import Scaler, SupervisedSeries, build_supervised, fit_scaler
from .linear import MIN_LINEAR_ROWS, CountyLinearModel, fit_county_linear, fit_pooled_linear
from .lstm import LstmModel, lstm_train
from .mlp import MlpModel, mlp_train

METHODS = ("SD-LSTM", "SD-SP", "SD-LM", "DSD-LSTM", "SD-MLP")


@dataclass
class TrainConfig:
    hidden: int = 10
    lr: float = 0.01
    epochs: int = 300
    seed: int = 0
    dropout: float = 0.5
    early_stop_window: int = 20
    early_stop_tol: float = 1e-7
    drop_metric: int | None = None  # leave-one-mobility-feature-out runs


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic child seed for a (seed, *key) job."""
    return int(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key)).generate_state(1)[0])


@dataclass
class ForecastBundle:
    method: str
    K: int
    lead: int
    t_tilde: int | None
    mobility_metrics: list[str]
    drop_metric: int | None
    feature_names: list[str]
    entities: list[str]  # partitioned training entities (neighbor pool)
    labels: np.ndarray  # (n,) community per entity, 1..K
    demo_values: np.ndarray  # (n, q) raw selected demographics
    mob_scaler: Scaler
    demo_scaler: Scaler
    per_community: dict[int, object]
    per_entity_linear: dict[str, CountyLinearModel] | None
    train_entities: list[str] = field(default_factory=list)

    def scaled_demo(self) -> np.ndarray:
        return self.demo_scaler.transform(self.demo_values)


def _nearest(target_scaled: np.ndarray, pool_scaled: np.ndarray,
             keys: list[str]) -> int:
    """Index of the squared-Euclidean nearest row; exact ties go to the
    lexicographically smallest key."""
    d2 = ((pool_scaled - target_scaled) ** 2).sum(axis=1)
    best = d2.min()
    candidates = [i for i in np.flatnonzero(d2 == best)]
    return min(candidates, key=lambda i: keys[i])


def assign_community(new_demo, demo: DemographicTable, partition: Partition,
                     scaler: Scaler | None = None) -> int:
    """Community of the training entity nearest in (scaled) demographics."""
    if scaler is None:
        scaler = fit_scaler(demo.values)
    order = {e: i for i, e in enumerate(demo.entities)}
    missing = [e for e in partition.entities if e not in order]
    if missing:
        raise ContractError(f"demographics missing for {missing[:5]}")
    pool = scaler.transform(demo.values[[order[e] for e in partition.entities]])
    j = _nearest(scaler.transform(np.asarray(new_demo, dtype=float)), pool,
                 list(partition.entities))
    return int(partition.labels[j])


def train_bundle(method: str, panel: RegisteredPanel, mob: MobilityPanel,
                 demo_selected: DemographicTable, partition: Partition,
                 lead: int, cfg: TrainConfig | None = None,
                 diag: DiagnosticLog | None = None) -> ForecastBundle:
    """Fit one model per community on the partitioned training entities.

    Recurrent families are batched over the fold's common series length
    (the minimum usable length); linear and per-step families use each
    entity's full usable window.
    """
    cfg = cfg or TrainConfig()
    diag = diag if diag is not None else DiagnosticLog()
    if method not in METHODS:
        raise ContractError(f"unknown method {method!r}")
    order = demo_selected.index()
    missing = [e for e in partition.entities if e not in order]
    if missing:
        raise ContractError(f"demographics missing for partitioned entities: {missing[:5]}")
    demo_values = demo_selected.values[[order[e] for e in partition.entities]]
    demo_scaler = fit_scaler(demo_values)

    series = build_supervised(panel, mob, lead, drop_metric=cfg.drop_metric, diag=diag)
    series = [s for s in series if s.entity in set(partition.entities)]
    if not series:
        raise ContractError("no usable training series")
    mob_scaler = fit_scaler(np.vstack([s.inputs for s in series]))
    scaled = [SupervisedSeries(s.entity, mob_scaler.transform(s.inputs),
                               s.targets, s.lead, s.first_day) for s in series]

    label_of = dict(zip(partition.entities, (int(z) for z in partition.labels)))
    by_comm: dict[int, list[SupervisedSeries]] = {k: [] for k in range(1, partition.K + 1)}
    for s in scaled:
        by_comm[label_of[s.entity]].append(s)
    empty = [k for k, group in by_comm.items() if not group]
    if empty:
        raise ContractError(f"communities without training series: {empty}")

    metrics = list(mob.metric_names)
    if cfg.drop_metric is not None:
        metrics = [m for j, m in enumerate(metrics) if j != cfg.drop_metric]

    t_tilde: int | None = None
    per_entity_linear: dict[str, CountyLinearModel] | None = None
    per_community: dict[int, object] = {}

    if method == "SD-LM":
        for k, group in by_comm.items():
            per_community[k] = fit_pooled_linear(group, lead, f"community-{k}", diag)
    elif method == "SD-MLP":
        for k, group in by_comm.items():
            x = np.vstack([s.inputs for s in group])
            y = np.concatenate([s.targets for s in group])
            per_community[k] = mlp_train(
                x, y, hidden=(cfg.hidden, cfg.hidden), lr=cfg.lr, epochs=cfg.epochs,
                seed=derive_seed(cfg.seed, 4, k), dropout=cfg.dropout, trained_lead=lead,
                early_stop_window=cfg.early_stop_window, early_stop_tol=cfg.early_stop_tol)
    elif method in ("SD-LSTM", "DSD-LSTM"):
        scaled_demo = demo_scaler.transform(demo_values)
        demo_row = {e: scaled_demo[i] for i, e in enumerate(partition.entities)}
        t_tilde = min(s.inputs.shape[0] for s in scaled)
        for k, group in by_comm.items():
            batch = []
            for s in group:
                rows = s.inputs[:t_tilde]
                if method == "DSD-LSTM":
                    rows = np.hstack([rows, np.tile(demo_row[s.entity], (t_tilde, 1))])
                batch.append(SupervisedSeries(s.entity, rows, s.targets[:t_tilde],
                                              lead, s.first_day))
            per_community[k] = lstm_train(
                batch, hidden=cfg.hidden, lr=cfg.lr, epochs=cfg.epochs,
                seed=derive_seed(cfg.seed, 1 if method == "SD-LSTM" else 3, k),
                trained_lead=lead, early_stop_window=cfg.early_stop_window,
                early_stop_tol=cfg.early_stop_tol)
    else:  # SD-SP
        per_entity_linear = {}
        residual_series: dict[int, list[SupervisedSeries]] = {k: [] for k in by_comm}
        for k, group in by_comm.items():
            for s in group:
                if s.inputs.shape[0] < MIN_LINEAR_ROWS:
                    diag.add("sd-sp", s.entity,
                             f"fewer than {MIN_LINEAR_ROWS} usable rows; excluded")
                    continue
                lin = fit_county_linear(s, diag)
                per_entity_linear[s.entity] = lin
                resid = s.targets - lin.predict(s.inputs)
                residual_series[k].append(SupervisedSeries(s.entity, s.inputs, resid,
                                                           lead, s.first_day))
        usable = [s for group in residual_series.values() for s in group]
        if not usable:
            raise ContractError("no entity has enough rows for the semi-parametric fit")
        empty = [k for k, group in residual_series.items() if not group]
        if empty:
            raise ContractError(f"communities without semi-parametric series: {empty}")
        t_tilde = min(s.inputs.shape[0] for s in usable)
        for k, group in residual_series.items():
            batch = [SupervisedSeries(s.entity, s.inputs[:t_tilde], s.targets[:t_tilde],
                                      lead, s.first_day) for s in group]
            per_community[k] = lstm_train(
                batch, hidden=cfg.hidden, lr=cfg.lr, epochs=cfg.epochs,
                seed=derive_seed(cfg.seed, 2, k), trained_lead=lead,
                early_stop_window=cfg.early_stop_window, early_stop_tol=cfg.early_stop_tol)

    return ForecastBundle(
        method=method, K=partition.K, lead=lead, t_tilde=t_tilde,
        mobility_metrics=metrics, drop_metric=cfg.drop_metric,
        feature_names=list(demo_selected.feature_names),
        entities=list(partition.entities), labels=np.asarray(partition.labels, dtype=int),
        demo_values=demo_values, mob_scaler=mob_scaler, demo_scaler=demo_scaler,
        per_community=per_community, per_entity_linear=per_entity_linear,
        train_entities=[s.entity for s in scaled])


def predict(bundle: ForecastBundle, new_demo, mob_rows: np.ndarray,
            force_community: int | None = None) -> np.ndarray:
    """Lead-day growth predictions for one entity's mobility rows.

    The community comes from the demographic nearest neighbor unless
    forced; SD-SP additionally borrows the neighbor's own linear
    coefficients (the neighbor pool is then restricted to entities that
    have them).
    """
    rows = np.asarray(mob_rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != len(bundle.mobility_metrics):
        raise ContractError(
            f"mobility rows must be (T, {len(bundle.mobility_metrics)})")
    if rows.shape[0] == 0:
        raise ContractError("mobility series is empty")
    new_demo = np.asarray(new_demo, dtype=float)
    if new_demo.shape != (len(bundle.feature_names),):
        raise ContractError(f"demographic vector must have length {len(bundle.feature_names)}")
    xs = bundle.mob_scaler.transform(rows)
    target = bundle.demo_scaler.transform(new_demo)
    pool = bundle.scaled_demo()

    if bundle.method == "SD-SP":
        assert bundle.per_entity_linear is not None
        keys = [e for e in bundle.entities if e in bundle.per_entity_linear]
        pos = [i for i, e in enumerate(bundle.entities) if e in bundle.per_entity_linear]
        j = _nearest(target, pool[pos], keys)
        neighbor = keys[j]
        community = force_community if force_community is not None \
            else int(bundle.labels[pos[j]])
        lin = bundle.per_entity_linear[neighbor]
        g = bundle.per_community[community]
        return lin.predict(xs) + g.predict(xs)

    if force_community is not None:
        community = force_community
    else:
        j = _nearest(target, pool, list(bundle.entities))
        community = int(bundle.labels[j])
    model = bundle.per_community[community]
    if bundle.method == "DSD-LSTM":
        xs = np.hstack([xs, np.tile(target, (xs.shape[0], 1))])
    return model.predict(xs)


def r_squared(actual, predicted, diag: DiagnosticLog | None = None,
              entity: str = "") -> float | None:
    """1 - SSE/SST against the series' own mean; None (with a diagnostic)
    when the actuals are constant."""
    diag = diag if diag is not None else DiagnosticLog()
    y = np.asarray(actual, dtype=float)
    yhat = np.asarray(predicted, dtype=float)
    if y.shape != yhat.shape or y.size < 2:
        raise ContractError("need equal-length series of at least 2 points")
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0.0:
        diag.add("r-squared", entity, "constant actuals; R^2 undefined")
        return None
    sse = float(((y - yhat) ** 2).sum())
    return 1.0 - sse / sst


# --- JSON persistence -------------------------------------------------------

def _encode_array(a: np.ndarray) -> dict:
    return {"shape": list(a.shape), "data": [float(v) for v in np.asarray(a, dtype=float).ravel()]}


def _decode_array(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=float).reshape(d["shape"])


def _encode_model(model) -> dict:
    if isinstance(model, LstmModel):
        return {"kind": "lstm", "hidden": model.hidden, "input_width": model.input_width,
                "trained_lead": model.trained_lead,
                "params": {k: _encode_array(v) for k, v in model.params.items()}}
    if isinstance(model, MlpModel):
        return {"kind": "mlp", "hidden": list(model.hidden), "input_width": model.input_width,
                "dropout": model.dropout, "trained_lead": model.trained_lead,
                "params": {k: _encode_array(v) for k, v in model.params.items()}}
    if isinstance(model, CountyLinearModel):
        return {"kind": "linear", "entity": model.entity, "alpha": model.alpha,
                "beta": [float(b) for b in model.beta], "lead": model.lead}
    raise ContractError(f"cannot serialize model {type(model).__name__}")


def _decode_model(d: dict):
    if d["kind"] == "lstm":
        return LstmModel(d["hidden"], d["input_width"],
                         {k: _decode_array(v) for k, v in d["params"].items()},
                         d["trained_lead"])
    if d["kind"] == "mlp":
        return MlpModel(tuple(d["hidden"]), d["input_width"],
                        {k: _decode_array(v) for k, v in d["params"].items()},
                        d["dropout"], d["trained_lead"])
    if d["kind"] == "linear":
        return CountyLinearModel(d["entity"], d["alpha"], np.array(d["beta"]), d["lead"])
    raise ContractError(f"unknown model kind {d['kind']!r}")


def write_bundle(bundle: ForecastBundle, path: str | Path) -> None:
    doc = {
        "method": bundle.method, "K": bundle.K, "lead": bundle.lead,
        "t_tilde": bundle.t_tilde, "mobility_metrics": bundle.mobility_metrics,
        "drop_metric": bundle.drop_metric, "feature_names": bundle.feature_names,
        "entities": bundle.entities, "labels": [int(z) for z in bundle.labels],
        "demo_values": _encode_array(bundle.demo_values),
        "mob_scaler": {"mean": _encode_array(bundle.mob_scaler.mean),
                       "sd": _encode_array(bundle.mob_scaler.sd)},
        "demo_scaler": {"mean": _encode_array(bundle.demo_scaler.mean),
                        "sd": _encode_array(bundle.demo_scaler.sd)},
        "per_community": {str(k): _encode_model(m) for k, m in bundle.per_community.items()},
        "per_entity_linear": (
            None if bundle.per_entity_linear is None
            else {e: _encode_model(m) for e, m in bundle.per_entity_linear.items()}),
        "train_entities": bundle.train_entities,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_bundle(path: str | Path) -> ForecastBundle:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return ForecastBundle(
        method=doc["method"], K=doc["K"], lead=doc["lead"], t_tilde=doc["t_tilde"],
        mobility_metrics=list(doc["mobility_metrics"]), drop_metric=doc["drop_metric"],
        feature_names=list(doc["feature_names"]), entities=list(doc["entities"]),
        labels=np.array(doc["labels"], dtype=int),
        demo_values=_decode_array(doc["demo_values"]),
        mob_scaler=Scaler(_decode_array(doc["mob_scaler"]["mean"]),
                          _decode_array(doc["mob_scaler"]["sd"])),
        demo_scaler=Scaler(_decode_array(doc["demo_scaler"]["mean"]),
                           _decode_array(doc["demo_scaler"]["sd"])),
        per_community={int(k): _decode_model(m) for k, m in doc["per_community"].items()},
        per_entity_linear=(
            None if doc["per_entity_linear"] is None
            else {e: _decode_model(m) for e, m in doc["per_entity_linear"].items()}),
        train_entities=list(doc["train_entities"]))

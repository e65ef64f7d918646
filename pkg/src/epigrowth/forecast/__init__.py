"""Lead-day log-growth forecasting: supervised panel construction, the five
model families, bundle persistence, and the cross-validation harness."""

from .data import Scaler, SupervisedSeries, build_supervised, fit_scaler
from .linear import CountyLinearModel, fit_county_linear, fit_pooled_linear
from .lstm import LstmModel, lstm_forward, lstm_train
from .mlp import MlpModel, mlp_train
from .bundle import (METHODS, ForecastBundle, TrainConfig, assign_community,
                     predict, r_squared, read_bundle, train_bundle, write_bundle)
from .evaluate import (BaselineResult, CvResult, EvalRecord, cross_validate,
                       feature_importance, lead_sweep, random_assignment_baseline)

__all__ = [
    "Scaler", "SupervisedSeries", "build_supervised", "fit_scaler",
    "CountyLinearModel", "fit_county_linear", "fit_pooled_linear",
    "LstmModel", "lstm_forward", "lstm_train",
    "MlpModel", "mlp_train",
    "METHODS", "ForecastBundle", "TrainConfig", "assign_community",
    "predict", "r_squared", "read_bundle", "train_bundle", "write_bundle",
    "BaselineResult", "CvResult", "EvalRecord", "cross_validate",
    "feature_importance", "lead_sweep", "random_assignment_baseline",
]

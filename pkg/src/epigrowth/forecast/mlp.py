"""Two-hidden-layer perceptron on independent per-step rows, with ReLU
activations and train-time dropout on both hidden layers."""

from __future__ import annotations

import numpy as np

from ..errors import ContractError, TrainingDivergedError
from ..util import rng_stream
from .optim import Adam


class MlpModel:
    """Dense 10-10 network with a scalar linear head.

    params: W1 (h1, p), b1, W2 (h2, h1), b2, w_out (h2,), b_out (1,).
    Dropout is inverted (kept activations rescaled at train time) and
    disabled at inference.
    """

    def __init__(self, hidden: tuple[int, int], input_width: int,
                 params: dict[str, np.ndarray], dropout: float = 0.5,
                 trained_lead: int = 0):
        self.hidden = tuple(hidden)
        self.input_width = input_width
        self.params = params
        self.dropout = dropout
        self.trained_lead = trained_lead
        self.loss_trace: list[float] = []

    @classmethod
    def init_random(cls, hidden: tuple[int, int], input_width: int, seed: int,
                    dropout: float = 0.5, trained_lead: int = 0) -> "MlpModel":
        rng = rng_stream(seed, 0x3E)
        h1, h2 = hidden
        params = {
            "W1": rng.uniform(-1, 1, (h1, input_width)) / np.sqrt(input_width),
            "b1": np.zeros(h1),
            "W2": rng.uniform(-1, 1, (h2, h1)) / np.sqrt(h1),
            "b2": np.zeros(h2),
            "w_out": rng.uniform(-1, 1, h2) / np.sqrt(h2),
            "b_out": np.zeros(1),
        }
        return cls(hidden, input_width, params, dropout, trained_lead)

    def _forward(self, x: np.ndarray, masks):
        """masks: pair of multiplier arrays (0 or 1/keep), or None."""
        pr = self.params
        r1 = np.maximum(x @ pr["W1"].T + pr["b1"], 0.0)
        a1 = r1 * masks[0] if masks is not None else r1
        r2 = np.maximum(a1 @ pr["W2"].T + pr["b2"], 0.0)
        a2 = r2 * masks[1] if masks is not None else r2
        out = a2 @ pr["w_out"] + pr["b_out"][0]
        return r1, a1, r2, a2, out

    def predict(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if rows.shape[1] != self.input_width:
            raise ContractError(f"input width {rows.shape[1]} != model width {self.input_width}")
        return self._forward(rows, None)[4]

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray, masks
                       ) -> tuple[float, dict[str, np.ndarray]]:
        pr = self.params
        r1, a1, r2, a2, out = self._forward(x, masks)
        err = out - y
        loss = float((err * err).mean())
        d_out = 2.0 * err / err.size

        da2 = np.outer(d_out, pr["w_out"])
        if masks is not None:
            da2 = da2 * masks[1]
        dpre2 = da2 * (r2 > 0)
        da1 = dpre2 @ pr["W2"]
        if masks is not None:
            da1 = da1 * masks[0]
        dpre1 = da1 * (r1 > 0)
        grads = {
            "w_out": a2.T @ d_out,
            "b_out": np.array([d_out.sum()]),
            "W2": dpre2.T @ a1,
            "b2": dpre2.sum(axis=0),
            "W1": dpre1.T @ x,
            "b1": dpre1.sum(axis=0),
        }
        return loss, grads


def mlp_train(x: np.ndarray, y: np.ndarray, hidden: tuple[int, int] = (10, 10),
              lr: float = 0.01, epochs: int = 300, seed: int = 0,
              dropout: float = 0.5, trained_lead: int = 0,
              early_stop_window: int = 20, early_stop_tol: float = 1e-7
              ) -> MlpModel:
    """Full-batch Adam on flattened per-step rows with seeded dropout."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise ContractError("need matching non-empty rows and targets")
    model = MlpModel.init_random(hidden, x.shape[1], seed, dropout, trained_lead)
    opt = Adam(model.params, lr=lr)
    mask_rng = rng_stream(seed, 0x3F)
    keep = 1.0 - dropout
    best = np.inf
    stale = 0
    for epoch in range(epochs):
        if dropout > 0.0:
            masks = (
                (mask_rng.random((x.shape[0], hidden[0])) < keep) / keep,
                (mask_rng.random((x.shape[0], hidden[1])) < keep) / keep,
            )
        else:
            masks = None
        loss, grads = model.loss_and_grads(x, y, masks)
        if not np.isfinite(loss):
            raise TrainingDivergedError(epoch)
        model.loss_trace.append(loss)
        if loss < best - early_stop_tol:
            best = loss
            stale = 0
        else:
            stale += 1
            if stale >= early_stop_window:
                break
        opt.step(model.params, grads)
    return model

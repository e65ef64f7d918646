"""Single-layer LSTM with a scalar linear head, trained by full-batch
backpropagation through time with Adam.

Gate layout follows the standard cell: f_t, i_t, o_t are sigmoid gates and
the candidate cell state is tanh, each acting on the concatenated
[h_{t-1}, x_t]; the cell updates as C_t = f_t*C_{t-1} + i_t*Ctilde_t and
the output is h_t = o_t * tanh(C_t).
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError, TrainingDivergedError
from ..util import rng_stream
from .data import SupervisedSeries
from .optim import Adam

_GATES = ("f", "i", "C", "o")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LstmModel:
    """Parameter container plus forward/backward passes.

    params holds W_f/W_i/W_C/W_o of shape (hidden, hidden + input_width),
    b_f/b_i/b_C/b_o of shape (hidden,), and the head w_out (hidden,),
    b_out (1,).
    """

    def __init__(self, hidden: int, input_width: int,
                 params: dict[str, np.ndarray], trained_lead: int = 0):
        self.hidden = hidden
        self.input_width = input_width
        self.params = params
        self.trained_lead = trained_lead
        self.loss_trace: list[float] = []

    @classmethod
    def init_random(cls, hidden: int, input_width: int, seed: int,
                    trained_lead: int = 0) -> "LstmModel":
        """Gate weights uniform in +-1/sqrt(fan_in); biases start at zero."""
        rng = rng_stream(seed, 0x15)
        fan = hidden + input_width
        bound = 1.0 / np.sqrt(fan)
        params: dict[str, np.ndarray] = {}
        for g in _GATES:
            params[f"W_{g}"] = rng.uniform(-bound, bound, (hidden, fan))
        for g in _GATES:
            params[f"b_{g}"] = np.zeros(hidden)
        params["w_out"] = rng.uniform(-1.0 / np.sqrt(hidden), 1.0 / np.sqrt(hidden), hidden)
        params["b_out"] = np.zeros(1)
        return cls(hidden, input_width, params, trained_lead)

    def forward_batch(self, x: np.ndarray, return_cache: bool = False):
        """Run the recurrence over a (N, T, p) batch.

        Returns (h_states (N, T, hidden), preds (N, T)) and, when asked, the
        per-step cache needed by the backward pass.
        """
        n, t_len, p = x.shape
        if p != self.input_width:
            raise ContractError(f"input width {p} != model width {self.input_width}")
        pr = self.params
        h = np.zeros((n, self.hidden))
        c = np.zeros((n, self.hidden))
        h_states = np.empty((n, t_len, self.hidden))
        preds = np.empty((n, t_len))
        cache = []
        for t in range(t_len):
            z = np.hstack([h, x[:, t, :]])
            f = _sigmoid(z @ pr["W_f"].T + pr["b_f"])
            i = _sigmoid(z @ pr["W_i"].T + pr["b_i"])
            g = np.tanh(z @ pr["W_C"].T + pr["b_C"])
            o = _sigmoid(z @ pr["W_o"].T + pr["b_o"])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            preds[:, t] = h_new @ pr["w_out"] + pr["b_out"][0]
            h_states[:, t, :] = h_new
            if return_cache:
                cache.append((z, f, i, g, o, c, tanh_c))
            h, c = h_new, c_new
        if return_cache:
            return h_states, preds, cache
        return h_states, preds

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray
                       ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean squared error over every (series, step) pair and its exact
        gradient by backpropagation through time."""
        n, t_len, _ = x.shape
        pr = self.params
        h_states, preds, cache = self.forward_batch(x, return_cache=True)
        err = preds - y
        loss = float((err * err).mean())
        grads = {k: np.zeros_like(v) for k, v in pr.items()}
        if not np.isfinite(loss):
            return loss, grads  # caller treats this as divergence
        d_pred = 2.0 * err / err.size
        dh_next = np.zeros((n, self.hidden))
        dc_next = np.zeros((n, self.hidden))
        for t in range(t_len - 1, -1, -1):
            z, f, i, g, o, c_prev, tanh_c = cache[t]
            h_t = h_states[:, t, :]
            dp = d_pred[:, t][:, None]
            grads["w_out"] += (h_t * dp).sum(axis=0)
            grads["b_out"] += dp.sum()
            dh = dh_next + pr["w_out"][None, :] * dp
            do = dh * tanh_c
            dc = dc_next + dh * o * (1.0 - tanh_c * tanh_c)
            df = dc * c_prev
            di = dc * g
            dg = dc * i
            da = {
                "f": df * f * (1.0 - f),
                "i": di * i * (1.0 - i),
                "C": dg * (1.0 - g * g),
                "o": do * o * (1.0 - o),
            }
            dz = np.zeros_like(z)
            for gate, d_act in da.items():
                grads[f"W_{gate}"] += d_act.T @ z
                grads[f"b_{gate}"] += d_act.sum(axis=0)
                dz += d_act @ pr[f"W_{gate}"]
            dh_next = dz[:, : self.hidden]
            dc_next = dc * f
        return loss, grads

    def predict(self, rows: np.ndarray) -> np.ndarray:
        """Step-by-step predictions over one series of any length (T, p)."""
        _, preds = self.forward_batch(rows[None, :, :])
        return preds[0]


def lstm_forward(model: LstmModel, inputs: np.ndarray
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Hidden states and head predictions for one (T, p) series, starting
    from zero hidden and cell states."""
    h_states, preds = model.forward_batch(np.asarray(inputs, dtype=float)[None, :, :])
    return h_states[0], preds[0]


def lstm_train(data: list[SupervisedSeries], hidden: int = 10, lr: float = 0.01,
               epochs: int = 300, seed: int = 0, trained_lead: int = 0,
               early_stop_window: int = 20, early_stop_tol: float = 1e-7
               ) -> LstmModel:
    """Full-batch BPTT with Adam on series of one common length.

    Training stops early once the best loss has not improved by more than
    `early_stop_tol` for `early_stop_window` consecutive epochs; a
    non-finite loss raises TrainingDivergedError naming the epoch.
    """
    if not data:
        raise ContractError("no training series")
    t_len = data[0].inputs.shape[0]
    if any(s.inputs.shape[0] != t_len for s in data):
        raise ContractError("all series must share one common length")
    x = np.stack([s.inputs for s in data])
    y = np.stack([s.targets for s in data])
    model = LstmModel.init_random(hidden, x.shape[2], seed, trained_lead)
    opt = Adam(model.params, lr=lr)
    best = np.inf
    stale = 0
    for epoch in range(epochs):
        loss, grads = model.loss_and_grads(x, y)
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

"""Feedforward tanh network mapping scaled parameters to standardized
reduced coefficients, trained full-batch with Adam and verified against
central finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .rng import Xoshiro256pp


@dataclass(frozen=True)
class MlpLayout:
    input_dim: int = 2
    hidden_layers: int = 10
    hidden_width: int = 40
    output_dim: int = 30

    def __post_init__(self):
        if self.input_dim < 1 or self.output_dim < 1 or self.hidden_width < 1:
            raise ConfigurationError("layer widths must be at least 1")
        if self.hidden_layers < 0:
            raise ConfigurationError("hidden layer count must be non-negative")

    @property
    def dims(self) -> list[int]:
        return [self.input_dim] + [self.hidden_width] * self.hidden_layers + [self.output_dim]


@dataclass
class Mlp:
    layout: MlpLayout
    weights: list  # per layer, shape (out, in)
    biases: list  # per layer, shape (out,)
    rng_seed: int

    @property
    def n_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "Mlp":
        return Mlp(
            layout=self.layout,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            rng_seed=self.rng_seed,
        )


def init_mlp(layout: MlpLayout, seed: int) -> Mlp:
    """Glorot-uniform weights, zero biases.

    Weights are drawn row-major per layer from the documented xoshiro256++
    stream, so the same seed reproduces the network bit for bit.
    """
    rng = Xoshiro256pp(seed)
    weights = []
    biases = []
    dims = layout.dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        w = np.empty((fan_out, fan_in))
        flat = w.reshape(-1)
        for i in range(flat.size):
            flat[i] = rng.uniform(-bound, bound)
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return Mlp(layout=layout, weights=weights, biases=biases, rng_seed=int(seed))


def _forward_trace(mlp: Mlp, x: np.ndarray) -> list[np.ndarray]:
    """Activations per layer for a (B, in) batch; last entry is the output."""
    acts = [x]
    h = x
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = h @ w.T + b
        h = z if i == last else np.tanh(z)
        acts.append(h)
    return acts


def forward(mlp: Mlp, x: np.ndarray, debug: bool = False) -> np.ndarray:
    """Evaluate the network on a single parameter vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (mlp.layout.input_dim,):
        raise ValueError(
            f"input length {x.shape} does not match layout input_dim {mlp.layout.input_dim}"
        )
    h = x
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = w @ h + b
        if i == last:
            h = z
        else:
            h = np.tanh(z)
            if debug:
                assert np.all(np.abs(h) < 1.0), "tanh activation saturated"
    return h


def forward_batch(mlp: Mlp, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != mlp.layout.input_dim:
        raise ValueError("batch must be (B, input_dim)")
    return _forward_trace(mlp, x)[-1]


def mse_loss(mlp: Mlp, x: np.ndarray, targets: np.ndarray) -> float:
    y = forward_batch(mlp, x)
    e = y - targets
    return float((e * e).sum() / e.size)


def loss_and_gradients(mlp: Mlp, x: np.ndarray, targets: np.ndarray):
    """MSE over (batch x outputs) and its gradients via reverse-mode chain
    rule.  Returns (loss, weight gradients, bias gradients)."""
    x = np.asarray(x, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("batch must be non-empty and 2D")
    if targets.shape != (x.shape[0], mlp.layout.output_dim):
        raise ValueError("target shape does not match batch and output_dim")

    acts = _forward_trace(mlp, x)
    y = acts[-1]
    e = y - targets
    loss = float((e * e).sum() / e.size)

    n_layers = len(mlp.weights)
    grad_w = [None] * n_layers
    grad_b = [None] * n_layers
    delta = 2.0 * e / e.size
    for i in range(n_layers - 1, -1, -1):
        grad_w[i] = delta.T @ acts[i]
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ mlp.weights[i]) * (1.0 - acts[i] * acts[i])
    return loss, grad_w, grad_b


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 20000
    patience: int = 2000
    batch_size: int | None = None  # None = full batch
    seed: int = 7

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning rate must be positive")
        if self.patience < 1:
            raise ConfigurationError("patience must be at least 1")
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be at least 1")


@dataclass
class AdamState:
    m_w: list
    v_w: list
    m_b: list
    v_b: list
    t: int = 0


def adam_init(mlp: Mlp) -> AdamState:
    return AdamState(
        m_w=[np.zeros_like(w) for w in mlp.weights],
        v_w=[np.zeros_like(w) for w in mlp.weights],
        m_b=[np.zeros_like(b) for b in mlp.biases],
        v_b=[np.zeros_like(b) for b in mlp.biases],
    )


def adam_step(state: AdamState, mlp: Mlp, grads, config: TrainConfig):
    """Standard Adam update with bias correction, applied in place."""
    grad_w, grad_b = grads
    state.t += 1
    c1 = 1.0 - config.beta1**state.t
    c2 = 1.0 - config.beta2**state.t
    for i in range(len(mlp.weights)):
        for p, g, m, v in (
            (mlp.weights[i], grad_w[i], state.m_w[i], state.v_w[i]),
            (mlp.biases[i], grad_b[i], state.m_b[i], state.v_b[i]),
        ):
            m *= config.beta1
            m += (1.0 - config.beta1) * g
            v *= config.beta2
            v += (1.0 - config.beta2) * (g * g)
            p -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.eps)
    return mlp, state


@dataclass
class TrainReport:
    train_mse: list = field(default_factory=list)
    val_mse: list = field(default_factory=list)
    best_epoch: int = 0
    best_val_mse: float = math.inf

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_mse,val_mse\n")
            for e, (tr, va) in enumerate(zip(self.train_mse, self.val_mse)):
                fh.write(f"{e},{tr!r},{va!r}\n")


def train(
    mlp: Mlp,
    train_data: tuple[np.ndarray, np.ndarray],
    val_data: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
) -> tuple[Mlp, TrainReport]:
    """Adam with early stopping on validation MSE; returns the parameters of
    the best validation epoch.  Deterministic: full-batch by default, and
    mini-batches (if configured) are fixed sequential slices."""
    x_tr, t_tr = (np.asarray(a, dtype=float) for a in train_data)
    x_va, t_va = (np.asarray(a, dtype=float) for a in val_data)
    state = adam_init(mlp)
    report = TrainReport()
    best = mlp.copy()
    since_best = 0
    bs = config.batch_size or x_tr.shape[0]
    for epoch in range(config.max_epochs):
        losses = []
        for start in range(0, x_tr.shape[0], bs):
            loss, gw, gb = loss_and_gradients(mlp, x_tr[start : start + bs], t_tr[start : start + bs])
            adam_step(state, mlp, (gw, gb), config)
            losses.append(loss)
        train_loss = float(np.mean(losses))
        val_loss = mse_loss(mlp, x_va, t_va)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise DivergenceError(f"non-finite loss at epoch {epoch}", epoch=epoch)
        report.train_mse.append(train_loss)
        report.val_mse.append(val_loss)
        if val_loss < report.best_val_mse:
            report.best_val_mse = val_loss
            report.best_epoch = epoch
            best = mlp.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best > config.patience:
                break
    return best, report


def grad_check(mlp: Mlp, x: np.ndarray, target: np.ndarray, step: float = 1e-6) -> float:
    """Max relative discrepancy between backprop and central finite
    differences over every parameter.

    Each component compares against the larger of the two values, floored
    at the infinity norm of the backprop gradient: central differences have
    an absolute roundoff floor around eps/step, so components far below the
    gradient scale would otherwise measure FD noise rather than backprop
    correctness.  When both sides are numerically zero (<= 1e-10) the
    discrepancy is defined as zero.
    """
    x2 = np.asarray(x, dtype=float).reshape(1, -1)
    t2 = np.asarray(target, dtype=float).reshape(1, -1)
    _, grad_w, grad_b = loss_and_gradients(mlp, x2, t2)
    g_inf = 0.0
    for grads in (grad_w, grad_b):
        for g in grads:
            if g.size:
                g_inf = max(g_inf, float(np.abs(g).max()))
    worst = 0.0
    for params, grads in ((mlp.weights, grad_w), (mlp.biases, grad_b)):
        for arr, g in zip(params, grads):
            flat = arr.reshape(-1)
            gflat = g.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                plus = mse_loss(mlp, x2, t2)
                flat[i] = orig - step
                minus = mse_loss(mlp, x2, t2)
                flat[i] = orig
                fd = (plus - minus) / (2.0 * step)
                bp = gflat[i]
                if abs(fd) <= 1e-10 and abs(bp) <= 1e-10:
                    continue
                disc = abs(fd - bp) / max(abs(fd), abs(bp), g_inf)
                if disc > worst:
                    worst = disc
    return worst

"""Small fully-connected ReLU classifier trained by SGD on k-mixup batches.

Everything is plain numpy: forward pass, softmax cross-entropy against soft
labels, exact backpropagation (to parameters and to inputs), momentum SGD
with step-decay, evaluation and FGSM.
"""
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError, ShapeError
from .mixup import MixupConfig, vicinal_epoch

__all__ = [
    "MlpModel",
    "TrainConfig",
    "EpochRecord",
    "init_mlp",
    "forward",
    "softmax",
    "loss_and_grads",
    "input_gradient",
    "train",
    "evaluate",
    "predict",
    "fgsm_attack",
    "adversarial_accuracy",
    "save_model",
    "load_model",
    "write_metrics_csv",
]

LOG_FLOOR = 1e-12


@dataclass
class MlpModel:
    """``weights[l]`` has shape (fan_in, fan_out); hidden layers use ReLU."""

    weights: list
    biases: list

    def __post_init__(self):
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in self.biases]
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("need one bias vector per weight matrix")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ShapeError(f"layer {l}: weight {w.shape} / bias {b.shape} mismatch")
            if l and w.shape[0] != self.weights[l - 1].shape[1]:
                raise ShapeError(f"layer {l} input {w.shape[0]} != previous output "
                                 f"{self.weights[l - 1].shape[1]}")

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self):
        return MlpModel([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_mlp(layer_sizes, rng):
    """Glorot-uniform weights, zero biases."""
    if len(layer_sizes) < 2 or min(layer_sizes) < 1:
        raise ParameterError(f"bad layer sizes {layer_sizes}")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases)


def _as_batch(model, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != model.weights[0].shape[0]:
        raise ShapeError(f"expected {model.weights[0].shape[0]} features, got {x.shape[1]}")
    return x, single


def _forward_cache(model, x):
    acts = [x]
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ w + b
        if l < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    return acts


def forward(model, features):
    """Logits for one feature vector (returns a vector) or a batch (n, d)."""
    x, single = _as_batch(model, features)
    out = _forward_cache(model, x)[-1]
    return out[0] if single else out


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _backward(model, acts, labels):
    """Loss and d(loss)/d(activation) chain; returns (loss, grads, d_input)."""
    logits = acts[-1]
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite logits in forward pass")
    n = logits.shape[0]
    p = softmax(logits)
    loss = float(-np.sum(labels * np.log(np.maximum(p, LOG_FLOOR))) / n)
    delta = (p - labels) / n
    grads = [None] * len(model.weights)
    for l in range(len(model.weights) - 1, -1, -1):
        grads[l] = (acts[l].T @ delta, delta.sum(axis=0))
        delta = delta @ model.weights[l].T
        if l > 0:
            delta = delta * (acts[l] > 0)
    return loss, grads, delta


def loss_and_grads(model, features, labels):
    """Mean soft-label cross-entropy and its exact gradient.

    ``grads[l]`` is a ``(dW, db)`` pair shaped like layer ``l``.
    """
    x, _ = _as_batch(model, features)
    y = np.atleast_2d(np.asarray(labels, dtype=np.float64))
    if y.shape != (x.shape[0], model.weights[-1].shape[1]):
        raise ShapeError(f"labels shape {y.shape} does not match batch of {x.shape[0]} "
                         f"and {model.weights[-1].shape[1]} classes")
    loss, grads, _ = _backward(model, _forward_cache(model, x), y)
    return loss, grads


def input_gradient(model, features, labels):
    """Per-sample gradient of each sample's own cross-entropy w.r.t. its input."""
    x, single = _as_batch(model, features)
    y = np.atleast_2d(np.asarray(labels, dtype=np.float64))
    _, _, d_in = _backward(model, _forward_cache(model, x), y)
    # undo the 1/n batch averaging so each row is its own loss gradient
    g = d_in * x.shape[0]
    return g[0] if single else g


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    milestones: tuple = (100, 150)
    momentum: float = 0.9
    weight_decay: float = 1e-4
    epochs: int = 200
    mixup: MixupConfig = field(default_factory=MixupConfig)
    steps_per_epoch: int | None = None
    batch_size: int = 32
    hidden: tuple = (130, 120)
    seed: int = 0

    def __post_init__(self):
        self.milestones = tuple(int(m) for m in self.milestones)
        self.hidden = tuple(int(h) for h in self.hidden)
        if self.learning_rate <= 0 or self.momentum < 0 or self.weight_decay < 0:
            raise ParameterError("learning_rate must be > 0; momentum and weight_decay >= 0")
        if self.epochs < 1:
            raise ParameterError("epochs must be >= 1")
        if any(b <= a for a, b in zip(self.milestones, self.milestones[1:])):
            raise ParameterError(f"milestones must increase: {self.milestones}")
        if self.steps_per_epoch is not None and self.steps_per_epoch < 1:
            raise ParameterError("steps_per_epoch must be >= 1")
        if self.batch_size < 1:
            raise ParameterError("batch_size must be >= 1")

    @property
    def pairs_per_step(self):
        """Matched k-batch pairs stacked into one gradient step."""
        return max(1, self.batch_size // self.mixup.k)

    def lr_at(self, epoch):
        drops = sum(1 for m in self.milestones if epoch >= m)
        return self.learning_rate * 0.1 ** drops


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    test_acc: float


def train(train_ds, test_ds, cfg, model=None):
    """SGD with momentum on vicinal k-batches; returns (model, epoch records).

    Each step stacks ``cfg.pairs_per_step`` independently matched pairs (each
    with its own lambda) into one minibatch of about ``batch_size`` points;
    k >= batch_size gives exactly one pair per step. An epoch is one shuffled
    pass (see :func:`vicinal_epoch`), trimmed to ``steps_per_epoch`` if set.
    Weight decay is added to weight gradients only (biases are not decayed).
    """
    rng = np.random.default_rng(cfg.seed)
    if model is None:
        model = init_mlp([train_ds.d, *cfg.hidden, train_ds.c], rng)
    if model.layer_sizes[0] != train_ds.d or model.layer_sizes[-1] != train_ds.c:
        raise ShapeError(f"model {model.layer_sizes} does not fit data d={train_ds.d}, c={train_ds.c}")
    vel_w = [np.zeros_like(w) for w in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    history = []
    for epoch in range(cfg.epochs):
        lr = cfg.lr_at(epoch)
        losses = []
        for step, group in enumerate(_grouped(vicinal_epoch(train_ds, cfg.mixup, rng),
                                              cfg.pairs_per_step, cfg.steps_per_epoch)):
            feats = np.concatenate([vb.features for vb in group])
            labels = np.concatenate([vb.labels for vb in group])
            try:
                with np.errstate(over="raise", invalid="raise"):
                    loss, grads = loss_and_grads(model, feats, labels)
            except (NumericError, FloatingPointError) as exc:
                raise NumericError(f"training diverged at epoch {epoch}, step {step} "
                                   f"(lr={lr}): {exc}") from None
            if not math.isfinite(loss):
                raise NumericError(f"loss diverged at epoch {epoch}, step {step}: {loss} (lr={lr})")
            for l, (gw, gb) in enumerate(grads):
                vel_w[l] = cfg.momentum * vel_w[l] + gw + cfg.weight_decay * model.weights[l]
                vel_b[l] = cfg.momentum * vel_b[l] + gb
                model.weights[l] -= lr * vel_w[l]
                model.biases[l] -= lr * vel_b[l]
            losses.append(loss)
        test_acc = evaluate(model, test_ds) if test_ds is not None and len(test_ds) else float("nan")
        history.append(EpochRecord(epoch, float(np.mean(losses)), test_acc))
    return model, history


def _grouped(batches, size, limit):
    group = []
    emitted = 0
    for vb in batches:
        if limit is not None and emitted >= limit:
            return
        group.append(vb)
        if len(group) == size:
            yield group
            emitted += 1
            group = []
    if group and emitted == 0:
        # dataset smaller than one full step: train on what there is
        yield group


def predict(model, features):
    return np.argmax(forward(model, np.atleast_2d(features)), axis=1)


def evaluate(model, ds):
    """Fraction of points whose argmax logit equals the argmax label."""
    if len(ds) == 0:
        raise ParameterError("cannot evaluate on an empty dataset")
    return float(np.mean(predict(model, ds.features) == ds.classes))


def fgsm_attack(model, features, labels, epsilon):
    """x + epsilon * sign(grad_x loss), one step, no clipping."""
    if epsilon < 0:
        raise ParameterError("epsilon must be >= 0")
    x = np.asarray(features, dtype=np.float64)
    if epsilon == 0:
        return x.copy()
    return x + epsilon * np.sign(input_gradient(model, x, labels))


def adversarial_accuracy(model, ds, epsilon):
    x_adv = fgsm_attack(model, ds.features, ds.labels, epsilon)
    return float(np.mean(predict(model, x_adv) == ds.classes))


def save_model(model, path):
    doc = {
        "layer_sizes": model.layer_sizes,
        "activation": "relu",
        "weights": [{"shape": list(w.shape), "data": w.ravel().tolist()} for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        weights = [np.array(w["data"], dtype=np.float64).reshape(w["shape"]) for w in doc["weights"]]
        model = MlpModel(weights, doc["biases"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"{path}: malformed checkpoint ({exc})") from None
    if model.layer_sizes != list(doc["layer_sizes"]):
        raise ShapeError(f"{path}: layer_sizes disagree with weight shapes")
    return model


def write_metrics_csv(history, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "test_acc"])
        for r in history:
            w.writerow([r.epoch, repr(r.train_loss), repr(r.test_acc)])

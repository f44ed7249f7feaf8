"""From-scratch fully-connected network engine.

One engine serves three presets that differ in depth and training protocol:

* ``MLP`` — one 16-unit hidden layer, min/max input scaling.
* ``FEEDFORWARD`` — one 32-unit hidden layer, min/max input scaling.
* ``DEEP`` — 64/32/16 hidden layers, z-score scaling and L2 weight decay.

Hidden units are sigmoids; the output layer is a softmax trained with
cross-entropy (a sigmoid output with squared error is available as an
alternative). Training is plain online stochastic gradient descent: one
iteration presents one sample, samples are drawn in seeded shuffled passes,
and everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, TrainingDivergenceError

NORMALIZATIONS = ("NONE", "MINMAX", "ZSCORE")
PRESETS = {
    "MLP": dict(hidden_layers=(16,), normalization="MINMAX", l2_lambda=0.0),
    "FEEDFORWARD": dict(hidden_layers=(32,), normalization="MINMAX", l2_lambda=0.0),
    "DEEP": dict(hidden_layers=(64, 32, 16), normalization="ZSCORE", l2_lambda=1e-4),
}
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class NetworkConfig:
    preset: str = "MLP"
    hidden_layers: tuple = (16,)
    activation: str = "sigmoid"
    output_activation: str = "softmax"
    learning_rate: float = 0.01
    l2_lambda: float = 0.0
    iteration_budget: int = 1_000_000
    seed: int = 42
    normalization: str = "MINMAX"

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}, expected one of {sorted(PRESETS)}")
        if not self.hidden_layers or any(h < 1 for h in self.hidden_layers):
            raise ValueError(f"hidden_layers must be positive counts, got {self.hidden_layers}")
        if self.activation != "sigmoid":
            raise ValueError(f"unsupported hidden activation {self.activation!r}")
        if self.output_activation not in ("softmax", "sigmoid"):
            raise ValueError(f"unsupported output activation {self.output_activation!r}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.l2_lambda < 0:
            raise ValueError(f"l2_lambda must be non-negative, got {self.l2_lambda}")
        if self.iteration_budget < 0:
            raise ValueError(f"iteration_budget must be non-negative, got {self.iteration_budget}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"unknown normalization {self.normalization!r}, expected one of {NORMALIZATIONS}"
            )

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "NetworkConfig":
        """The named preset's protocol, with any field overridable."""
        key = name.upper()
        if key not in PRESETS:
            raise ValueError(f"unknown preset {name!r}, expected one of {sorted(PRESETS)}")
        fields = dict(PRESETS[key], preset=key)
        fields.update(overrides)
        return cls(**fields)


@dataclass(frozen=True)
class Normalizer:
    """Per-feature input scaling fitted on training rows only.

    MINMAX maps the training minimum/maximum to 0/1; ZSCORE subtracts the
    mean and divides by the population standard deviation; NONE is the
    identity. A constant training column always maps to 0, and values outside
    the training range are never clamped.
    """

    kind: str = "NONE"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in NORMALIZATIONS:
            raise ValueError(f"unknown normalizer kind {self.kind!r}")

    @property
    def feature_count(self) -> int | None:
        for arr in self.params.values():
            return len(arr)
        return None


def fit_normalizer(kind: str, rows) -> Normalizer:
    """Learn per-feature scaling parameters from a (rows, features) matrix."""
    if kind not in NORMALIZATIONS:
        raise ValueError(f"unknown normalizer kind {kind!r}")
    if kind == "NONE":
        return Normalizer("NONE", {})
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"need a non-empty (rows, features) matrix, got shape {x.shape}")
    if kind == "MINMAX":
        return Normalizer("MINMAX", {"min": x.min(axis=0), "max": x.max(axis=0)})
    return Normalizer("ZSCORE", {"mean": x.mean(axis=0), "std": x.std(axis=0)})


def apply_normalizer(norm: Normalizer, features):
    """Transform a feature vector or matrix; shape is preserved."""
    x = np.asarray(features, dtype=np.float64)
    if norm.kind == "NONE":
        return x.copy()
    expected = norm.feature_count
    if x.shape[-1] != expected:
        raise ValueError(f"feature count {x.shape[-1]} != normalizer's {expected}")
    if norm.kind == "MINMAX":
        low = norm.params["min"]
        span = norm.params["max"] - low
        safe = np.where(span == 0.0, 1.0, span)
        out = (x - low) / safe
    else:
        std = norm.params["std"]
        safe = np.where(std == 0.0, 1.0, std)
        out = (x - norm.params["mean"]) / safe
        span = std
    return np.where(span == 0.0, 0.0, out)


@dataclass
class NetworkModel:
    config: NetworkConfig
    weights: list  # per layer, shape (fan_in, fan_out)
    biases: list  # per layer, shape (fan_out,)
    labels: list
    normalizer: Normalizer = field(default_factory=Normalizer)
    iterations_trained: int = 0

    @property
    def layer_sizes(self) -> list:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def clone(self) -> "NetworkModel":
        return NetworkModel(
            config=self.config,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            labels=list(self.labels),
            normalizer=self.normalizer,
            iterations_trained=self.iterations_trained,
        )


def init_network(config: NetworkConfig, input_size: int, labels) -> NetworkModel:
    """Fresh model: weights ~ U(-r, r) with r = sqrt(6/(fan_in+fan_out)),
    biases zero, drawn from a generator derived from the config seed."""
    labels = list(labels)
    if input_size < 1 or len(labels) < 2:
        raise ValueError(f"need input_size >= 1 and >= 2 labels, got {input_size}, {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be unique")
    rng = np.random.default_rng([config.seed, 0])
    sizes = [input_size, *config.hidden_layers, len(labels)]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        r = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-r, r, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return NetworkModel(config=config, weights=weights, biases=biases, labels=labels)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # branch on sign so neither exp() can overflow
    out = np.empty_like(z)
    pos = z >= 0
    neg = ~pos
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[neg])
    out[neg] = ez / (1.0 + ez)
    return out


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def forward(model: NetworkModel, features) -> tuple:
    """Activations per layer (input first, output scores last) and the scores.

    Accepts one already-normalized feature vector, or a matrix of them.
    """
    a = np.asarray(features, dtype=np.float64)
    if a.shape[-1] != model.weights[0].shape[0]:
        raise ValueError(
            f"feature count {a.shape[-1]} != network input size {model.weights[0].shape[0]}"
        )
    activations = [a]
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = _sigmoid(a @ w + b)
        activations.append(a)
    z = a @ model.weights[-1] + model.biases[-1]
    if model.config.output_activation == "softmax":
        scores = np.exp(_log_softmax(z))
    else:
        scores = _sigmoid(z)
    activations.append(scores)
    return activations, scores


def sample_loss(model: NetworkModel, features, label_index: int, l2_lambda=None) -> float:
    """Training loss on one sample under current parameters (no update).

    Softmax output: cross-entropy; sigmoid output: half squared error against
    the one-hot target. Plus (l2_lambda/2) * sum of squared weights (biases
    excluded).
    """
    if l2_lambda is None:
        l2_lambda = model.config.l2_lambda
    a = np.asarray(features, dtype=np.float64)
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = _sigmoid(a @ w + b)
    z = a @ model.weights[-1] + model.biases[-1]
    if model.config.output_activation == "softmax":
        data_loss = -float(_log_softmax(z)[label_index])
    else:
        target = np.zeros(z.size)
        target[label_index] = 1.0
        data_loss = 0.5 * float(np.sum((_sigmoid(z) - target) ** 2))
    if l2_lambda:
        data_loss += 0.5 * l2_lambda * sum(float(np.sum(w * w)) for w in model.weights)
    return data_loss


def loss_and_gradients(model: NetworkModel, features, label_index: int,
                       l2_lambda=None) -> tuple:
    """Loss plus per-layer weight and bias gradients, without updating.

    Returns (loss, weight_grads, bias_grads) with arrays shaped like the
    model's parameters.
    """
    if l2_lambda is None:
        l2_lambda = model.config.l2_lambda
    activations, scores = forward(model, features)
    label_index = int(label_index)

    if model.config.output_activation == "softmax":
        data_loss = -math.log(max(float(scores[label_index]), 5e-324))
        delta = scores.copy()
        delta[label_index] -= 1.0
    else:
        target = np.zeros(scores.size)
        target[label_index] = 1.0
        diff = scores - target
        data_loss = 0.5 * float(diff @ diff)
        delta = diff * scores * (1.0 - scores)

    loss = data_loss
    if l2_lambda:
        loss += 0.5 * l2_lambda * sum(float(np.sum(w * w)) for w in model.weights)

    count = len(model.weights)
    weight_grads = [None] * count
    bias_grads = [None] * count
    for layer in range(count - 1, -1, -1):
        a_prev = activations[layer]
        bias_grads[layer] = delta
        grad_w = np.outer(a_prev, delta)
        if l2_lambda:
            grad_w += l2_lambda * model.weights[layer]
        weight_grads[layer] = grad_w
        if layer > 0:
            delta = (model.weights[layer] @ delta) * a_prev * (1.0 - a_prev)
    return loss, weight_grads, bias_grads


def backprop_step(model: NetworkModel, features, label_index: int,
                  learning_rate=None, l2_lambda=None) -> float:
    """One stochastic gradient step in place; returns the pre-update loss."""
    if learning_rate is None:
        learning_rate = model.config.learning_rate
    loss, weight_grads, bias_grads = loss_and_gradients(model, features, label_index, l2_lambda)
    if not math.isfinite(loss):
        raise TrainingDivergenceError(f"non-finite loss {loss!r} during training step")
    for w, b, gw, gb in zip(model.weights, model.biases, weight_grads, bias_grads):
        w -= learning_rate * gw
        b -= learning_rate * gb
    return loss


def train(model: NetworkModel, features, labels, iteration_budget=None) -> list:
    """Online SGD for ``iteration_budget`` sample presentations, in place.

    ``features`` must already be normalized with the model's normalizer.
    Samples are visited in shuffled passes drawn from a generator keyed by the
    config seed, so identical inputs give identical trained parameters. The
    returned history holds the mean loss of each hundredth of the budget.
    """
    if iteration_budget is None:
        iteration_budget = model.config.iteration_budget
    x = np.ascontiguousarray(features, dtype=np.float64)
    y = _label_indices(model, labels)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"need a non-empty (rows, features) matrix, got shape {x.shape}")
    if x.shape[0] != y.size:
        raise ValueError(f"{x.shape[0]} rows but {y.size} labels")
    if iteration_budget == 0:
        return []

    order_rng = np.random.default_rng([model.config.seed, 1])
    stride = max(1, iteration_budget // 100)
    history = []
    chunk_total, chunk_count = 0.0, 0
    done = 0
    while done < iteration_budget:
        perm = order_rng.permutation(x.shape[0])
        for i in perm:
            loss = backprop_step(model, x[i], y[i])
            chunk_total += loss
            chunk_count += 1
            done += 1
            if chunk_count == stride:
                history.append(chunk_total / chunk_count)
                chunk_total, chunk_count = 0.0, 0
            if done == iteration_budget:
                break
    if chunk_count:
        history.append(chunk_total / chunk_count)
    for w in model.weights:
        if not np.all(np.isfinite(w)):
            raise TrainingDivergenceError("non-finite weights after training")
    model.iterations_trained += iteration_budget
    return history


@dataclass
class EvalReport:
    """Accuracy, confusion counts (rows = true, columns = predicted), and
    per-label precision/recall."""

    labels: list
    accuracy: float
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "total": self.total,
        }


def evaluate(model: NetworkModel, features, labels) -> EvalReport:
    """Score every row (already normalized) and tally argmax predictions."""
    x = np.asarray(features, dtype=np.float64)
    y = _label_indices(model, labels)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"need a non-empty (rows, features) matrix, got shape {x.shape}")
    if x.shape[0] != y.size:
        raise ValueError(f"{x.shape[0]} rows but {y.size} labels")
    _, scores = forward(model, x)
    predicted = scores.argmax(axis=1)
    count = len(model.labels)
    confusion = np.zeros((count, count), dtype=np.int64)
    np.add.at(confusion, (y, predicted), 1)
    diag = np.diag(confusion).astype(np.float64)
    col = confusion.sum(axis=0)
    row = confusion.sum(axis=1)
    precision = np.divide(diag, col, out=np.zeros(count), where=col > 0)
    recall = np.divide(diag, row, out=np.zeros(count), where=row > 0)
    return EvalReport(
        labels=list(model.labels),
        accuracy=float(diag.sum() / y.size),
        confusion=confusion,
        precision=precision,
        recall=recall,
    )


def classify(model: NetworkModel, raw_features) -> tuple:
    """(label, scores) for one raw feature vector; normalization applied here."""
    scores = forward(model, apply_normalizer(model.normalizer, raw_features))[1]
    return model.labels[int(scores.argmax())], scores


def fit_model(config: NetworkConfig, features, labels, label_names=None,
              iteration_budget=None) -> tuple:
    """Fit the normalizer, initialize, and train in one call.

    ``features`` are raw rows; the normalizer named by the config is fitted
    on them and attached to the returned model. ``label_names`` fixes the
    label order (defaults to sorted unique labels). Returns (model, history).
    """
    x = np.asarray(features, dtype=np.float64)
    labels = list(labels)
    if label_names is None:
        label_names = sorted(set(labels))
    norm = fit_normalizer(config.normalization, x)
    model = init_network(config, x.shape[1], label_names)
    model.normalizer = norm
    history = train(model, apply_normalizer(norm, x), labels, iteration_budget)
    return model, history


def _label_indices(model: NetworkModel, labels) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"labels must be one-dimensional, got shape {arr.shape}")
    if arr.dtype.kind in "iu":
        idx = arr.astype(np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= len(model.labels)):
            raise ValueError(f"label index out of range for {len(model.labels)} labels")
        return idx
    lookup = {name: i for i, name in enumerate(model.labels)}
    unknown = sorted(set(arr.tolist()) - set(lookup))
    if unknown:
        raise ValueError(f"labels {unknown} not in model dictionary {model.labels}")
    return np.asarray([lookup[name] for name in arr.tolist()], dtype=np.intp)


def model_to_dict(model: NetworkModel) -> dict:
    cfg = model.config
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "preset": cfg.preset,
        "layer_sizes": model.layer_sizes,
        "activation": cfg.activation,
        "output_activation": cfg.output_activation,
        "learning_rate": cfg.learning_rate,
        "l2_lambda": cfg.l2_lambda,
        "iteration_budget": cfg.iteration_budget,
        "normalization": cfg.normalization,
        "seed": cfg.seed,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "normalizer": {
            "kind": model.normalizer.kind,
            "params": {k: np.asarray(v).tolist() for k, v in model.normalizer.params.items()},
        },
        "labels": list(model.labels),
        "iterations_trained": model.iterations_trained,
    }


def model_from_dict(doc: dict) -> NetworkModel:
    try:
        version = doc["format_version"]
        if version != MODEL_FORMAT_VERSION:
            raise FormatError(f"unsupported model format_version {version!r}")
        sizes = [int(s) for s in doc["layer_sizes"]]
        config = NetworkConfig(
            preset=doc["preset"],
            hidden_layers=tuple(sizes[1:-1]),
            activation=doc["activation"],
            output_activation=doc["output_activation"],
            learning_rate=doc["learning_rate"],
            l2_lambda=doc["l2_lambda"],
            iteration_budget=doc["iteration_budget"],
            seed=doc["seed"],
            normalization=doc["normalization"],
        )
        weights = [np.asarray(w, dtype=np.float64) for w in doc["weights"]]
        biases = [np.asarray(b, dtype=np.float64) for b in doc["biases"]]
        norm_doc = doc["normalizer"]
        normalizer = Normalizer(
            norm_doc["kind"],
            {k: np.asarray(v, dtype=np.float64) for k, v in norm_doc["params"].items()},
        )
        labels = [str(s) for s in doc["labels"]]
        iterations = int(doc["iterations_trained"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed model document: {exc}") from exc
    expected = [(sizes[i], sizes[i + 1]) for i in range(len(sizes) - 1)]
    actual = [w.shape for w in weights]
    if actual != expected or [b.shape for b in biases] != [(s,) for s in sizes[1:]]:
        raise FormatError(f"parameter shapes {actual} do not chain through sizes {sizes}")
    if sizes[-1] != len(labels):
        raise FormatError(f"{len(labels)} labels but output size {sizes[-1]}")
    for arr in (*weights, *biases):
        if not np.all(np.isfinite(arr)):
            raise FormatError("model parameters contain non-finite values")
    return NetworkModel(
        config=config,
        weights=weights,
        biases=biases,
        labels=labels,
        normalizer=normalizer,
        iterations_trained=iterations,
    )


def model_to_json(model: NetworkModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def save_model(model: NetworkModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))
        fh.write("\n")


def load_model(path) -> NetworkModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    return model_from_dict(doc)

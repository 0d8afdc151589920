"""Multilayer perceptron on a flat parameter vector.

All layers use the logistic sigmoid. Weights and biases live in a single
1-D array so that population-based optimizers can treat a network as a
point in R^n: per layer, the incoming weights of each destination neuron
in order, then that layer's biases.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError

__all__ = [
    "MlpTopology",
    "CandidateSolution",
    "Dataset",
    "decode",
    "encode",
    "forward",
    "predict",
    "classification_error",
    "mse_loss",
    "mse_loss_and_gradient",
]


@dataclass(frozen=True)
class MlpTopology:
    """Layer widths from input to output, e.g. (13, 10, 1)."""

    layer_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 3:
            raise ParameterError(
                "topology needs input, at least one hidden, and output layer"
            )
        if any(s < 1 for s in sizes):
            raise ParameterError(f"layer sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    @property
    def param_count(self) -> int:
        sizes = self.layer_sizes
        return sum(
            sizes[l] * sizes[l + 1] + sizes[l + 1] for l in range(len(sizes) - 1)
        )


@dataclass(frozen=True)
class CandidateSolution:
    """A flat parameter vector with its cached objective value."""

    params: np.ndarray
    fitness: float | None = None

    def __post_init__(self):
        params = np.array(self.params, dtype=float)
        if params.ndim != 1:
            raise ShapeError("candidate parameters must be a flat vector")
        params.flags.writeable = False
        object.__setattr__(self, "params", params)

    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass(frozen=True)
class Dataset:
    """Feature rows with binary labels."""

    rows: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        labels = np.asarray(self.labels)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ShapeError("rows must be a nonempty 2-D array")
        if labels.shape != (rows.shape[0],):
            raise ShapeError(
                f"labels shape {labels.shape} does not match {rows.shape[0]} rows"
            )
        if not np.all(np.isfinite(rows)):
            raise ParameterError("rows contain non-finite values")
        if not np.all(np.isin(labels, (0, 1))):
            raise ParameterError("labels must be 0 or 1")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels.astype(int))

    def __len__(self):
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.rows[idx], self.labels[idx])


def _sigmoid(z):
    # Split by sign to avoid overflow in exp for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def decode(params, topology: MlpTopology):
    """Split a flat vector into per-layer (weights, biases) pairs.

    Weight matrices have one row per destination neuron, so row j of
    layer l holds the incoming weights of neuron j.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (topology.param_count,):
        raise ShapeError(
            f"expected {topology.param_count} parameters for layers "
            f"{topology.layer_sizes}, got {params.shape}"
        )
    layers = []
    offset = 0
    sizes = topology.layer_sizes
    for n_src, n_dst in zip(sizes[:-1], sizes[1:]):
        w = params[offset: offset + n_src * n_dst].reshape(n_dst, n_src)
        offset += n_src * n_dst
        b = params[offset: offset + n_dst]
        offset += n_dst
        layers.append((w, b))
    return layers


def encode(layers, topology: MlpTopology) -> np.ndarray:
    """Flatten per-layer (weights, biases) pairs back into one vector."""
    sizes = topology.layer_sizes
    if len(layers) != len(sizes) - 1:
        raise ShapeError(f"expected {len(sizes) - 1} layers, got {len(layers)}")
    parts = []
    for (w, b), n_src, n_dst in zip(layers, sizes[:-1], sizes[1:]):
        w = np.asarray(w, dtype=float)
        b = np.asarray(b, dtype=float)
        if w.shape != (n_dst, n_src) or b.shape != (n_dst,):
            raise ShapeError(
                f"layer shapes {w.shape}/{b.shape} do not match ({n_dst}, {n_src})"
            )
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def _forward_activations(params, topology: MlpTopology, inputs):
    """Activations of every layer for a batch, input batch first."""
    activations = [inputs]
    a = inputs
    for w, b in decode(params, topology):
        a = _sigmoid(a @ w.T + b)
        activations.append(a)
    return activations


def forward(params, topology: MlpTopology, inputs) -> np.ndarray:
    """Output activations for one input vector or a batch of them."""
    inputs = np.asarray(inputs, dtype=float)
    single = inputs.ndim == 1
    batch = inputs[None, :] if single else inputs
    if batch.ndim != 2 or batch.shape[1] != topology.n_in:
        raise ShapeError(
            f"input dimension {inputs.shape} does not match n_in={topology.n_in}"
        )
    out = _forward_activations(params, topology, batch)[-1]
    return out[0] if single else out


def predict(params, topology: MlpTopology, inputs) -> np.ndarray:
    """Binary labels from the single output neuron; 0.5 classifies as 1."""
    out = forward(params, topology, np.atleast_2d(np.asarray(inputs, dtype=float)))
    return (out[:, 0] >= 0.5).astype(int)


def classification_error(params, topology: MlpTopology, data: Dataset) -> float:
    """Percentage of misclassified samples."""
    if len(data) == 0:
        raise ParameterError("classification error needs a nonempty dataset")
    wrong = np.count_nonzero(predict(params, topology, data.rows) != data.labels)
    return 100.0 * wrong / len(data)


def mse_loss(params, topology: MlpTopology, data: Dataset) -> float:
    out = forward(params, topology, data.rows)
    targets = data.labels[:, None].astype(float)
    return float(np.mean((out - targets) ** 2))


def mse_loss_and_gradient(params, topology: MlpTopology, data: Dataset):
    """Mean squared error against the labels and its gradient.

    The gradient is accumulated layer by layer in reverse, using the
    sigmoid derivative a(1-a), and is returned flat in the same layout
    as the parameters.

    Returns:
        (loss, gradient) with gradient.shape == (param_count,).
    """
    if len(data) == 0:
        raise ParameterError("loss needs a nonempty dataset")
    params = np.asarray(params, dtype=float)
    layers = decode(params, topology)
    activations = _forward_activations(params, topology, data.rows)
    out = activations[-1]
    targets = data.labels[:, None].astype(float)

    n_terms = out.size
    loss = float(np.sum((out - targets) ** 2) / n_terms)

    # delta holds dLoss/dz for the current layer, batch rows first.
    delta = 2.0 * (out - targets) / n_terms * out * (1.0 - out)
    grads = [None] * len(layers)
    for l in range(len(layers) - 1, -1, -1):
        a_prev = activations[l]
        grad_w = delta.T @ a_prev
        grad_b = np.sum(delta, axis=0)
        grads[l] = (grad_w, grad_b)
        if l > 0:
            w, _ = layers[l]
            delta = (delta @ w) * a_prev * (1.0 - a_prev)
    return loss, encode(grads, topology)

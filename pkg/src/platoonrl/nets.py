"""Dense feed-forward networks with hand-rolled reverse-mode gradients.

All actors and critics are plain ReLU MLPs over float64 numpy arrays.  The
backward pass returns gradients for every parameter *and* for the input
vector: critics need the input gradient so policy updates can chain through
the action slice of their input.  Actors optionally squash their last output
unit with tanh (the bounded power head); every other head is linear.
"""

from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)


class DenseNet:
    """MLP parameter container plus cached-forward/backward machinery.

    A net together with its optimizer is a single-writer unit: do not share
    the forward cache between threads.  Frozen copies (``copy()``) can serve
    concurrent read-only ``predict`` calls.
    """

    def __init__(
        self,
        layer_sizes: tuple[int, ...],
        bounded_tail: bool = False,
        bounded_units: tuple[int, ...] = (),
        rng: np.random.Generator | None = None,
        dtype=np.float64,
    ):
        if len(layer_sizes) < 2:
            raise ValueError("need at least an input and an output size")
        if any(n < 1 for n in layer_sizes):
            raise ValueError("layer sizes must be positive")
        self.layer_sizes = tuple(int(n) for n in layer_sizes)
        out_dim = self.layer_sizes[-1]
        units = set(int(u) for u in bounded_units)
        if bounded_tail:
            units.add(out_dim - 1)
        if any(not 0 <= u < out_dim for u in units):
            raise ValueError("bounded unit index outside the output layer")
        self.bounded_units = tuple(sorted(units))
        self.dtype = dtype
        rng = rng if rng is not None else np.random.default_rng()
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            bound = 1.0 / np.sqrt(n_in)  # uniform fan-in scaling
            self.weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)).astype(dtype))
            self.biases.append(rng.uniform(-bound, bound, size=n_out).astype(dtype))
        self._cache = None

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def num_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "DenseNet":
        clone = DenseNet.__new__(DenseNet)
        clone.layer_sizes = self.layer_sizes
        clone.bounded_units = self.bounded_units
        clone.dtype = self.dtype
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        clone._cache = None
        return clone

    # -- forward / backward ---------------------------------------------------

    def _run(self, x: np.ndarray):
        activations = [x]
        pre_acts = []
        h = x
        last = self.num_layers - 1
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            pre_acts.append(z)
            if li < last:
                h = np.maximum(z, 0.0)
            else:
                h = z.copy()
                for u in self.bounded_units:
                    h[:, u] = np.tanh(z[:, u])
            activations.append(h)
        return activations, pre_acts

    def forward(self, x, cache: bool = True) -> np.ndarray:
        """Evaluate the net; 1-D input gives 1-D output, 2-D is a batch.

        With ``cache=True`` the intermediate activations are retained for a
        following ``backward`` call.
        """
        arr = np.asarray(x, dtype=self.dtype)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input width {arr.shape[1]} != {self.layer_sizes[0]}")
        activations, pre_acts = self._run(arr)
        if cache:
            self._cache = (activations, pre_acts)
        out = activations[-1]
        return out[0] if single else out

    def predict(self, x) -> np.ndarray:
        """Forward pass without touching the gradient cache."""
        return self.forward(x, cache=False)

    def backward(self, upstream) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Exact reverse-mode gradients for the cached forward batch.

        ``upstream`` is dL/d(output) with the output's shape.  Returns
        ([(dW, db) per layer], dL/d(input)); parameter gradients are summed
        over the batch, the input gradient is per row.
        """
        if self._cache is None:
            raise RuntimeError("backward called without a cached forward pass")
        activations, pre_acts = self._cache
        g = np.asarray(upstream, dtype=self.dtype)
        single = g.ndim == 1
        if single:
            g = g[None, :]
        if g.shape != activations[-1].shape:
            raise ValueError(f"upstream shape {g.shape} != output shape {activations[-1].shape}")

        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * self.num_layers
        delta = g.copy()
        for u in self.bounded_units:
            delta[:, u] = delta[:, u] * (1.0 - np.tanh(pre_acts[-1][:, u]) ** 2)
        for li in range(self.num_layers - 1, -1, -1):
            grads[li] = (activations[li].T @ delta, delta.sum(axis=0))
            delta = delta @ self.weights[li].T
            if li > 0:
                delta = delta * (pre_acts[li - 1] > 0.0)
        return grads, (delta[0] if single else delta)


def zero_like_grads(net: DenseNet) -> list[tuple[np.ndarray, np.ndarray]]:
    return [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(net.weights, net.biases)]


class Adam:
    """Adaptive-moment optimizer bound to one DenseNet."""

    def __init__(
        self,
        net: DenseNet,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(net.weights, net.biases)]
        self._v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(net.weights, net.biases)]

    def step(self, grads) -> bool:
        """Apply one update; returns False (and leaves everything untouched)
        when any gradient entry is non-finite."""
        for gw, gb in grads:
            if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
                log.warning("Adam: skipping update, non-finite gradient encountered")
                return False
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for li, (gw, gb) in enumerate(grads):
            mw, mb = self._m[li]
            vw, vb = self._v[li]
            mw *= self.beta1
            mw += (1.0 - self.beta1) * gw
            mb *= self.beta1
            mb += (1.0 - self.beta1) * gb
            vw *= self.beta2
            vw += (1.0 - self.beta2) * gw**2
            vb *= self.beta2
            vb += (1.0 - self.beta2) * gb**2
            self.net.weights[li] -= self.lr * (mw / bc1) / (np.sqrt(vw / bc2) + self.eps)
            self.net.biases[li] -= self.lr * (mb / bc1) / (np.sqrt(vb / bc2) + self.eps)
        return True


def soft_update(target: DenseNet, main: DenseNet, tau: float):
    """Blend target parameters toward the main net: t <- tau*m + (1-tau)*t."""
    if target.layer_sizes != main.layer_sizes:
        raise ValueError("soft_update: mismatched layer sizes")
    for tw, mw in zip(target.weights, main.weights):
        tw[...] = tau * mw + (1.0 - tau) * tw
    for tb, mb in zip(target.biases, main.biases):
        tb[...] = tau * mb + (1.0 - tau) * tb


def save_net(path, net: DenseNet):
    """Checkpoint as an .npz holding layer sizes, bounded units and parameters."""
    payload = {
        "layer_sizes": np.asarray(net.layer_sizes, dtype=np.int64),
        "bounded_units": np.asarray(net.bounded_units, dtype=np.int64),
    }
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        payload[f"w{i}"] = w
        payload[f"b{i}"] = b
    np.savez(path, **payload)


def load_net(path) -> DenseNet:
    """Round-trip-exact restore of a checkpoint written by save_net."""
    with np.load(path) as data:
        sizes = tuple(int(n) for n in data["layer_sizes"])
        net = DenseNet(sizes, bounded_units=tuple(int(u) for u in data["bounded_units"]))
        for i in range(net.num_layers):
            net.weights[i] = data[f"w{i}"].copy()
            net.biases[i] = data[f"b{i}"].copy()
    return net

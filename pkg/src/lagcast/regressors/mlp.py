"""Feed-forward network trained by plain full-batch backpropagation."""

from __future__ import annotations

import logging

import numpy as np

from ..exceptions import InvalidConfig, MlpDiverged
from .base import LabelledRegressor

logger = logging.getLogger(__name__)

# default hidden widths per response role
DEFAULT_HIDDEN = {"deaths": (8, 8, 8, 8), "recovered": (4, 4), "confirmed": (4, 4)}


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def layer_shapes(n_in: int, hidden) -> list[tuple[int, int]]:
    """Weight matrix shapes; row 0 of each matrix is the bias."""
    sizes = [n_in, *hidden, 1]
    return [(a + 1, b) for a, b in zip(sizes[:-1], sizes[1:])]


def unflatten(theta, shapes):
    out, pos = [], 0
    for r, c in shapes:
        out.append(theta[pos : pos + r * c].reshape(r, c))
        pos += r * c
    return out


def forward(weights, Z):
    """Activations of every layer, input first; the output layer is linear."""
    acts = [Z]
    h = Z
    for li, W in enumerate(weights):
        z = W[0] + h @ W[1:]
        h = z if li == len(weights) - 1 else _sigmoid(z)
        acts.append(h)
    return acts


def loss_and_gradient(theta, shapes, Z, t):
    """Half sum of squared errors and its gradient with respect to ``theta``.

    Parameters
    ----------
    theta : ndarray
        All weights flattened layer by layer (row-major, bias row first).
    shapes : list of (rows, cols)
    Z : ndarray of shape (n, p)
        Scaled inputs.
    t : ndarray of shape (n,)
        Scaled targets.
    """
    weights = unflatten(theta, shapes)
    # a diverging run overflows here; the caller checks the loss for finiteness
    with np.errstate(over="ignore", invalid="ignore"):
        acts = forward(weights, Z)
        err = acts[-1][:, 0] - t
        loss = 0.5 * float(err @ err)
        grads = [None] * len(weights)
        delta = err[:, None]
        for li in range(len(weights) - 1, -1, -1):
            h = acts[li]
            grads[li] = np.vstack([delta.sum(0, keepdims=True), h.T @ delta])
            if li:
                delta = (delta @ weights[li][1:].T) * h * (1.0 - h)
    return loss, np.concatenate([g.ravel() for g in grads])


class MLPRegressor(LabelledRegressor):
    """Logistic hidden layers, linear output, gradient descent on half SSE.

    Inputs and target are min-max scaled to [0, 1] with training statistics.
    Training stops once every gradient component is below
    ``stop_gradient_threshold`` in absolute value, or after ``max_iter``
    steps.

    Parameters
    ----------
    hidden_layers : tuple of int, default (4, 4)
    learning_rate : float, default 0.01
    stop_gradient_threshold : float, default 0.01
    max_iter : int, default 10_000
    init_range : float, default 0.5
        Initial weights are uniform on ``[-init_range, init_range]``.
    seed : int

    Attributes
    ----------
    n_iter_ : int
    converged_ : bool
    loss_history_ : ndarray
        Training loss before each update.
    """

    kind = "mlp"
    _state_attrs = ("x_min_", "x_range_", "y_min_", "y_range_", "n_iter_", "converged_")

    def __init__(
        self,
        hidden_layers=(4, 4),
        learning_rate=0.01,
        stop_gradient_threshold=0.01,
        max_iter=10_000,
        init_range=0.5,
        seed=0,
    ):
        self.hidden_layers = hidden_layers
        self.learning_rate = learning_rate
        self.stop_gradient_threshold = stop_gradient_threshold
        self.max_iter = max_iter
        self.init_range = init_range
        self.seed = seed

    def _check_params(self):
        if len(self.hidden_layers) == 0 or any(int(w) < 1 for w in self.hidden_layers):
            raise InvalidConfig("hidden layer widths must be at least 1")
        if not self.learning_rate > 0 or not self.stop_gradient_threshold > 0:
            raise InvalidConfig("learning_rate and stop_gradient_threshold must be positive")
        if self.max_iter < 0:
            raise InvalidConfig("max_iter must be non-negative")

    def init_params(self, n_in: int) -> np.ndarray:
        shapes = layer_shapes(n_in, self.hidden_layers)
        rng = np.random.default_rng(int(self.seed))
        return np.concatenate(
            [rng.uniform(-self.init_range, self.init_range, r * c) for r, c in shapes]
        )

    def fit(self, X, y=None):
        X, y = self._validate_fit(X, y)
        self._check_params()
        self.x_min_ = X.min(0)
        rng_x = X.max(0) - self.x_min_
        self.x_range_ = np.where(rng_x > 0, rng_x, 1.0)
        self.y_min_ = float(y.min())
        span = float(y.max()) - self.y_min_
        self.y_range_ = span if span > 0 else 1.0
        Z = (X - self.x_min_) / self.x_range_
        t = (y - self.y_min_) / self.y_range_

        self.shapes_ = layer_shapes(X.shape[1], self.hidden_layers)
        theta = self.init_params(X.shape[1])
        history = []
        converged = False
        it = 0
        while True:
            loss, grad = loss_and_gradient(theta, self.shapes_, Z, t)
            if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
                raise MlpDiverged(f"non-finite training loss at iteration {it}")
            history.append(loss)
            if np.max(np.abs(grad)) < self.stop_gradient_threshold:
                converged = True
                break
            if it >= self.max_iter:
                break
            theta = theta - self.learning_rate * grad
            it += 1
        if not converged:
            logger.info("MLP reached %d iterations without meeting the gradient threshold", it)
        self.theta_ = theta
        self.n_iter_ = it
        self.converged_ = converged
        self.loss_history_ = np.asarray(history)
        return self

    @property
    def weights_(self):
        return unflatten(self.theta_, self.shapes_)

    def predict(self, X):
        X = self._validate_predict(X)
        Z = (X - self.x_min_) / self.x_range_
        out = forward(self.weights_, Z)[-1][:, 0]
        return out * self.y_range_ + self.y_min_

    def get_state(self):
        state = super().get_state()
        state["weights"] = [W.tolist() for W in self.weights_]
        return state

    def set_state(self, state, feature_labels):
        super().set_state(state, feature_labels)
        weights = [np.asarray(W, dtype=float) for W in state["weights"]]
        self.shapes_ = [W.shape for W in weights]
        self.theta_ = np.concatenate([W.ravel() for W in weights])
        self.x_min_ = np.asarray(self.x_min_, dtype=float)
        self.x_range_ = np.asarray(self.x_range_, dtype=float)
        self.n_iter_ = int(self.n_iter_)
        self.converged_ = bool(self.converged_)
        return self

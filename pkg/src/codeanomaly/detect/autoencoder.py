"""Single-hidden-layer autoencoder in numpy.

input (d) -> ReLU hidden (ceil(rate * d)) -> linear output (d), trained on
mean squared error with minibatch gradient descent. Sparse inputs are
densified one minibatch at a time.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

log = logging.getLogger(__name__)


class NonFiniteLoss(FloatingPointError):
    def __init__(self, message: str, epoch: int, batch: int, history: list):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.history = history


class DimensionMismatch(ValueError):
    pass


def hidden_width(n_features: int, rate: float) -> int:
    return max(1, math.ceil(round(rate * n_features, 9)))


def _rows(X, lo: int, hi: int) -> np.ndarray:
    block = X[lo:hi]
    return block.toarray() if sp.issparse(block) else np.asarray(block, dtype=np.float64)


class Autoencoder(TransformerMixin, BaseEstimator):
    """Reconstruction-error autoencoder.

    ``optimizer`` is ``"sgd"`` (plain minibatch gradient descent) or
    ``"adam"``. ``loss_history_`` holds the full-corpus loss after every
    epoch; ``score(X)`` is the Euclidean distance between each input row
    and its reconstruction.
    """

    def __init__(self, compression_rate: float = 0.5, epochs: int = 5, batch_size: int = 1024,
                 learning_rate: float = 0.01, optimizer: str = "sgd", seed: int = 0,
                 shuffle: bool = True):
        self.compression_rate = compression_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.seed = seed
        self.shuffle = shuffle

    def _init_params(self, d: int, rng: np.random.Generator) -> None:
        h = hidden_width(d, self.compression_rate)
        a1 = math.sqrt(6.0 / (d + h))
        self.W1_ = rng.uniform(-a1, a1, size=(d, h))
        self.b1_ = np.zeros(h)
        self.W2_ = rng.uniform(-a1, a1, size=(h, d))
        self.b2_ = np.zeros(d)

    @property
    def params_(self) -> list[np.ndarray]:
        return [self.W1_, self.b1_, self.W2_, self.b2_]

    def _forward(self, X: np.ndarray):
        Z = X @ self.W1_ + self.b1_
        H = np.maximum(Z, 0.0)
        return Z, H, H @ self.W2_ + self.b2_

    def loss_and_grads(self, X: np.ndarray):
        """MSE over all entries of the batch and its gradients w.r.t. (W1, b1, W2, b2)."""
        Z, H, Y = self._forward(X)
        R = Y - X
        m = R.size
        loss = float(np.sum(R * R) / m)
        dY = 2.0 * R / m
        gW2 = H.T @ dY
        gb2 = dY.sum(axis=0)
        dZ = (dY @ self.W2_.T) * (Z > 0)
        gW1 = X.T @ dZ
        gb1 = dZ.sum(axis=0)
        return loss, [gW1, gb1, gW2, gb2]

    def _check(self, X):
        if not sp.issparse(X):
            X = check_array(X, dtype=np.float64)
        else:
            X = sp.csr_matrix(X, dtype=np.float64)
        if hasattr(self, "n_features_in_") and X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def corpus_loss(self, X) -> float:
        X = self._check(X)
        total = 0.0
        for lo in range(0, X.shape[0], self.batch_size):
            B = _rows(X, lo, lo + self.batch_size)
            R = self._forward(B)[2] - B
            total += float(np.sum(R * R))
        return total / (X.shape[0] * X.shape[1])

    def fit(self, X, y=None):
        X = sp.csr_matrix(X, dtype=np.float64) if sp.issparse(X) else check_array(X, dtype=np.float64)
        n, d = X.shape
        if n == 0:
            raise ValueError("cannot train on an empty corpus")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        self.n_features_in_ = d
        rng = np.random.default_rng(self.seed)
        self._init_params(d, rng)
        self.hidden_width_ = self.W1_.shape[1]
        moments = [(np.zeros_like(p), np.zeros_like(p)) for p in self.params_]
        step = 0
        self.loss_history_ = []
        self.batch_losses_ = []
        for epoch in range(self.epochs):
            order = rng.permutation(n) if self.shuffle else np.arange(n)
            for bi, lo in enumerate(range(0, n, self.batch_size)):
                rows = np.sort(order[lo:lo + self.batch_size])
                B = X[rows].toarray() if sp.issparse(X) else X[rows]
                # divergence is reported below as NonFiniteLoss
                with np.errstate(over="ignore", invalid="ignore"):
                    loss, grads = self.loss_and_grads(B)
                if not math.isfinite(loss) or not all(np.isfinite(g).all() for g in grads):
                    raise NonFiniteLoss(f"non-finite loss at epoch {epoch}, batch {bi}: {loss}",
                                        epoch, bi, list(self.loss_history_))
                self.batch_losses_.append(loss)
                step += 1
                self._apply(grads, moments, step)
            with np.errstate(over="ignore", invalid="ignore"):
                epoch_loss = self.corpus_loss(X)
            if not math.isfinite(epoch_loss):
                raise NonFiniteLoss(f"non-finite corpus loss after epoch {epoch}", epoch, -1,
                                    list(self.loss_history_))
            self.loss_history_.append(epoch_loss)
            log.debug("epoch %d loss %.6g", epoch, epoch_loss)
        return self

    def _apply(self, grads, moments, step: int) -> None:
        lr = self.learning_rate
        if self.optimizer == "sgd":
            for p, g in zip(self.params_, grads):
                p -= lr * g
            return
        b1, b2, eps = 0.9, 0.999, 1e-8
        for p, g, (m, v) in zip(self.params_, grads, moments):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            mhat = m / (1 - b1 ** step)
            vhat = v / (1 - b2 ** step)
            p -= lr * mhat / (np.sqrt(vhat) + eps)

    def transform(self, X) -> np.ndarray:
        """Hidden-layer embedding."""
        check_is_fitted(self, "W1_")
        X = self._check(X)
        out = []
        for lo in range(0, X.shape[0], self.batch_size):
            out.append(self._forward(_rows(X, lo, lo + self.batch_size))[1])
        return np.vstack(out) if out else np.zeros((0, self.hidden_width_))

    def reconstruct(self, X) -> np.ndarray:
        check_is_fitted(self, "W1_")
        X = self._check(X)
        return np.vstack([self._forward(_rows(X, lo, lo + self.batch_size))[2]
                          for lo in range(0, X.shape[0], self.batch_size)])

    def score(self, X, y=None) -> np.ndarray:
        """Euclidean reconstruction error per row (overrides the estimator score convention)."""
        check_is_fitted(self, "W1_")
        X = self._check(X)
        out = np.empty(X.shape[0])
        for lo in range(0, X.shape[0], self.batch_size):
            B = _rows(X, lo, lo + self.batch_size)
            out[lo:lo + B.shape[0]] = np.linalg.norm(self._forward(B)[2] - B, axis=1)
        return out

    def describe(self) -> dict:
        """Architecture and training record kept with the scores."""
        check_is_fitted(self, "W1_")
        return {"input_width": self.n_features_in_, "hidden_width": self.hidden_width_,
                "hidden_activation": "relu", "output_activation": "linear", "loss": "mse",
                "init": "xavier-uniform", **self.get_params(), "loss_history": self.loss_history_}


def autoencoder_train(vectors, compression_rate: float = 0.5, epochs: int = 5, batch_size: int = 1024,
                      learning_rate: float = 0.01, optimizer: str = "sgd", seed: int = 0) -> Autoencoder:
    return Autoencoder(compression_rate, epochs, batch_size, learning_rate, optimizer, seed).fit(vectors)


def autoencoder_score(model: Autoencoder, vector) -> float:
    v = vector.toarray() if sp.issparse(vector) else np.asarray(vector, dtype=np.float64)
    v = v.reshape(1, -1)
    if v.shape[1] != model.n_features_in_:
        raise DimensionMismatch(f"expected {model.n_features_in_} features, got {v.shape[1]}")
    return float(model.score(v)[0])

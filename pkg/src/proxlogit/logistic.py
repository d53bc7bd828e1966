"""Numerically stable logistic loss, gradient, and Lipschitz constant.

All functions are pure given immutable inputs and safe for concurrent use.
"""

from __future__ import annotations

import warnings
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .data import Dataset

__all__ = [
    "lipschitz_constant",
    "loss_gradient",
    "loss_value",
    "probabilities",
    "sigmoid",
    "softplus",
]

_P_CLIP = 1e-15


def sigmoid(z):
    """Elementwise 1 / (1 + exp(-z)) without overflow."""
    return 0.5 * (np.tanh(0.5 * np.asarray(z, dtype=np.float64)) + 1.0)


def softplus(z):
    """Elementwise ln(1 + exp(z)), stable for large |z|."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _margins(beta, data: Dataset) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.n_features,):
        raise ValueError(
            f"coefficient vector has shape {beta.shape}, expected ({data.n_features},)")
    return beta @ data.features


def probabilities(beta, data: Dataset) -> np.ndarray:
    """Per-sample success probabilities, clipped away from 0 and 1.

    The clip keeps downstream log-based diagnostics finite; the loss itself
    never evaluates log(p) directly.
    """
    return np.clip(sigmoid(_margins(beta, data)), _P_CLIP, 1.0 - _P_CLIP)


def loss_value(beta, data: Dataset) -> float:
    """Negative log-likelihood sum_i [softplus(x_i' beta) - y_i x_i' beta]; always >= 0."""
    z = _margins(beta, data)
    return float(np.sum(softplus(z) - data.labels * z))


def loss_gradient(beta, data: Dataset) -> np.ndarray:
    """Gradient X (p - y) of the negative log-likelihood."""
    z = _margins(beta, data)
    return data.features @ (sigmoid(z) - data.labels)


def _power_iteration(X: np.ndarray, tol: float, max_iters: int):
    """Largest eigenvalue of X X' via products X (X' v); never forms X X'.

    Returns the final Rayleigh quotient and the full quotient history (which
    is nondecreasing on this positive semidefinite operator).  A zero operator
    yields 0.0 after one random restart.
    """
    d = X.shape[0]
    v = np.ones(d) / np.sqrt(d)
    history: list[float] = []
    restarted = False
    rayleigh = 0.0
    for _ in range(max_iters):
        w = X @ (v @ X)
        rayleigh = float(v @ w)
        if rayleigh <= 0.0:
            if not restarted:
                restarted = True
                rng = np.random.default_rng(0)
                v = rng.standard_normal(d)
                v /= np.linalg.norm(v)
                continue
            history.append(0.0)
            return 0.0, history
        history.append(rayleigh)
        if len(history) >= 2 and abs(history[-1] - history[-2]) < tol * abs(history[-1]):
            break
        v = w / np.linalg.norm(w)
    return rayleigh, history


def lipschitz_constant(data: Dataset, tol: float = 1e-8, max_iters: int = 1000) -> float:
    """Gradient Lipschitz constant, a quarter of the top eigenvalue of X X'.

    Estimated by power iteration until successive Rayleigh quotients agree to
    ``tol`` relative.  A zero feature matrix returns 0.0 with a warning (no
    step size can be derived from it).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    top, _ = _power_iteration(data.features, tol, max_iters)
    if top == 0.0:
        warnings.warn("feature matrix has no positive spectrum; returning 0", stacklevel=2)
    return 0.25 * top

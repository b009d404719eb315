"""Iterative inner solvers: deterministic full-batch GD and Adam.

A solver is a fixed number of applications of a continuous step map
``w_t = step(w_{t-1}, lam)``; the whole solve is therefore a deterministic,
continuous function of the hyperparameters, which is what makes
finite-difference probing of the outer objective meaningful.  Mini-batch
variants are deliberately absent: sampling noise in the inner solve would
leak into the zeroth-order differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NonFiniteIterate

__all__ = ["InnerSolver", "gd_solve", "adam_solve", "solve", "trajectory"]

_VARIANTS = ("gd", "adam")


@dataclass(frozen=True)
class InnerSolver:
    """Configuration of an iterative inner algorithm.

    ``steps`` applications of the variant's update rule starting from ``w0``
    (the zero vector when ``w0`` is None), with fixed learning rate ``lr``.
    Adam uses bias-corrected first/second moments with the usual constants.
    """

    steps: int
    lr: float
    variant: str = "gd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    w0: np.ndarray | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise InvalidConfig(f"steps must be >= 0, got {self.steps}")
        if self.lr <= 0:
            raise InvalidConfig(f"lr must be > 0, got {self.lr}")
        if self.variant not in _VARIANTS:
            raise InvalidConfig(f"variant must be one of {_VARIANTS}, got {self.variant!r}")


def _require_w0(alg: InnerSolver) -> np.ndarray:
    if alg.w0 is None:
        raise InvalidConfig("solver has no w0; set one or solve through an objective")
    return np.asarray(alg.w0, dtype=float)


def _check_iterate(w: np.ndarray, t: int) -> None:
    if not np.all(np.isfinite(w)):
        raise NonFiniteIterate(f"iterate became non-finite at inner step {t}", t=t)


def gd_solve(loss_grad, alg: InnerSolver, lam: np.ndarray) -> np.ndarray:
    """Run ``steps`` full-batch gradient-descent steps; returns the final iterate.

    ``loss_grad(w, lam)`` must return the gradient of the inner loss at ``w``.
    Exactly ``steps`` gradient evaluations are performed.
    """
    w = _require_w0(alg).copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, alg.steps + 1):
            w = w - alg.lr * loss_grad(w, lam)
            _check_iterate(w, t)
    return w


def adam_solve(loss_grad, alg: InnerSolver, lam: np.ndarray) -> np.ndarray:
    """Run ``steps`` Adam steps (bias-corrected moments, zero-initialized)."""
    w = _require_w0(alg).copy()
    m = np.zeros_like(w)
    v = np.zeros_like(w)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, alg.steps + 1):
            g = loss_grad(w, lam)
            m = alg.beta1 * m + (1.0 - alg.beta1) * g
            v = alg.beta2 * v + (1.0 - alg.beta2) * g * g
            m_hat = m / (1.0 - alg.beta1**t)
            v_hat = v / (1.0 - alg.beta2**t)
            w = w - alg.lr * m_hat / (np.sqrt(v_hat) + alg.eps)
            _check_iterate(w, t)
    return w


def solve(loss_grad, alg: InnerSolver, lam: np.ndarray) -> np.ndarray:
    if alg.variant == "adam":
        return adam_solve(loss_grad, alg, lam)
    return gd_solve(loss_grad, alg, lam)


def trajectory(loss_grad, alg: InnerSolver, lam: np.ndarray) -> list:
    """All iterates ``[w_0, w_1, ..., w_T]``.

    The last element is bitwise-equal to the corresponding solve's output;
    the arithmetic is identical step for step, only the storage differs.
    """
    w = _require_w0(alg).copy()
    out = [w.copy()]
    if alg.variant == "adam":
        m = np.zeros_like(w)
        v = np.zeros_like(w)
        for t in range(1, alg.steps + 1):
            g = loss_grad(w, lam)
            m = alg.beta1 * m + (1.0 - alg.beta1) * g
            v = alg.beta2 * v + (1.0 - alg.beta2) * g * g
            m_hat = m / (1.0 - alg.beta1**t)
            v_hat = v / (1.0 - alg.beta2**t)
            w = w - alg.lr * m_hat / (np.sqrt(v_hat) + alg.eps)
            _check_iterate(w, t)
            out.append(w.copy())
    else:
        for t in range(1, alg.steps + 1):
            w = w - alg.lr * loss_grad(w, lam)
            _check_iterate(w, t)
            out.append(w.copy())
    return out

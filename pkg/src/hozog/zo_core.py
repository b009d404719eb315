"""The outer loop: averaged zeroth-order hyper-gradients and plain descent.

One meta-iteration draws q random directions u_1..u_q, evaluates the
black-box objective once at lam and once at each lam + mu*u_i, and combines
the differences into the estimate

    g_hat = (p / (mu * q)) * sum_i (f(lam + mu*u_i) - f(lam)) * u_i

followed by the update lam <- lam - gamma * g_hat.  The base value f(lam)
is computed once per meta-iteration and shared across all q difference
terms.  With directions drawn uniformly on the unit sphere the p/(mu*q)
scale makes the estimate unbiased for linear objectives; raw Gaussian
directions are available behind the config enum for fidelity experiments,
but the sphere is the default because only the sphere matches that scale.

The q+1 evaluations inside one meta-iteration may run concurrently. All
directions are drawn up-front from a single seeded stream and the
difference terms are summed in direction-index order after every
evaluation has returned, so the trajectory is a deterministic function of
(spec, lambda0, config) regardless of worker count.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NonFiniteObjective
from .oracle import Evaluation, ObjectiveSpec, evaluate, evaluate_batch

__all__ = [
    "ZoConfig",
    "GradientEstimate",
    "IterationEvent",
    "sample_directions",
    "estimate_hyper_gradient",
    "hozog_step",
    "run_hozog",
]

DIRECTION_SCHEMES = ("sphere", "gaussian")


@dataclass(frozen=True)
class ZoConfig:
    """Estimator and loop constants.

    q: directions per meta-iteration (q+1 oracle calls each).
    mu: smoothing radius; smaller is less biased but more noise-sensitive.
    gamma: outer learning rate.
    iterations: meta-iteration budget T (the only stopping rule).
    direction_scheme: 'sphere' (default) or 'gaussian'.
    reseed_inner_each_iter: refresh the spec's inner seed every
        meta-iteration instead of keeping it frozen (off by default so the
        objective stays a fixed deterministic function).
    """

    q: int
    mu: float
    gamma: float
    iterations: int
    seed: int = 0
    direction_scheme: str = "sphere"
    reseed_inner_each_iter: bool = False

    def __post_init__(self):
        if self.q < 1:
            raise InvalidConfig(f"q must be >= 1, got {self.q}")
        if self.mu <= 0:
            raise InvalidConfig(f"mu must be > 0, got {self.mu}")
        if self.gamma <= 0:
            raise InvalidConfig(f"gamma must be > 0, got {self.gamma}")
        if self.iterations < 0:
            raise InvalidConfig(f"iterations must be >= 0, got {self.iterations}")
        if self.direction_scheme not in DIRECTION_SCHEMES:
            raise InvalidConfig(
                f"direction_scheme must be one of {DIRECTION_SCHEMES}, "
                f"got {self.direction_scheme!r}"
            )


@dataclass(frozen=True)
class GradientEstimate:
    """An averaged zeroth-order hyper-gradient and its oracle-call cost."""

    vector: np.ndarray
    eval_count: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


@dataclass(frozen=True)
class IterationEvent:
    """What a trace recorder sees once per meta-iteration.

    ``evaluation`` is the base oracle evaluation at this iterate, reusable
    by the recorder at no extra oracle cost; it is None on the final event
    (the returned lambda_T, which the loop itself never evaluates).
    ``optimizer_calls`` is the cumulative optimizer-driven oracle count.
    """

    meta_iter: int
    hyperparams: np.ndarray
    evaluation: Evaluation | None
    gradient: GradientEstimate | None
    optimizer_calls: int
    final: bool = False


def sample_directions(p: int, q: int, scheme: str, rng: np.random.Generator) -> np.ndarray:
    """Draw q direction vectors of length p as a (q, p) array.

    'sphere' normalizes Gaussian draws to unit Euclidean norm; 'gaussian'
    returns the raw standard-normal draws.  Drawing is a pure function of
    the generator state, so replaying a seed reproduces the set exactly.
    """
    if p < 1 or q < 1:
        raise InvalidConfig(f"need p >= 1 and q >= 1, got p={p}, q={q}")
    u = rng.standard_normal((q, p))
    if scheme == "gaussian":
        return u
    if scheme != "sphere":
        raise InvalidConfig(f"unknown direction scheme {scheme!r}")
    norms = np.linalg.norm(u, axis=1)
    while np.any(norms == 0.0):  # measure-zero, but never divide by zero
        redo = norms == 0.0
        u[redo] = rng.standard_normal((int(redo.sum()), p))
        norms = np.linalg.norm(u, axis=1)
    return u / norms[:, None]


def _combine(p: int, mu: float, directions: np.ndarray, f_base: float, f_perturbed) -> np.ndarray:
    # Fixed-order accumulation: the result must not depend on which
    # perturbed evaluation finished first.
    q = directions.shape[0]
    g = np.zeros(p)
    for i in range(q):
        g += (f_perturbed[i] - f_base) * directions[i]
    g *= p / (mu * q)
    return g


def estimate_hyper_gradient(
    lam: np.ndarray,
    oracle,
    cfg: ZoConfig,
    directions: np.ndarray,
    batch_oracle=None,
) -> GradientEstimate:
    """Averaged zeroth-order hyper-gradient at lam from a pre-drawn direction set.

    ``oracle`` is a plain callable f(lam) -> float.  ``batch_oracle``, when
    given, maps a list of points to their values and may evaluate them in
    any order or concurrently; the combination step re-imposes direction
    order.  Exactly q+1 oracle values are consumed: f(lam) once, reused
    across all difference terms.
    """
    lam = np.asarray(lam, dtype=float)
    p = lam.shape[0]
    directions = np.asarray(directions, dtype=float)
    if directions.ndim != 2 or directions.shape != (cfg.q, p):
        raise InvalidConfig(
            f"direction set has shape {directions.shape}, expected ({cfg.q}, {p})"
        )
    f_base = float(oracle(lam))
    _require_finite(f_base, lam)
    points = [lam + cfg.mu * directions[i] for i in range(cfg.q)]
    if batch_oracle is not None:
        values = [float(v) for v in batch_oracle(points)]
    else:
        values = [float(oracle(x)) for x in points]
    for x, v in zip(points, values):
        _require_finite(v, x)
    vector = _combine(p, cfg.mu, directions, f_base, values)
    return GradientEstimate(vector=vector, eval_count=cfg.q + 1)


def _require_finite(value: float, lam: np.ndarray) -> None:
    if not np.isfinite(value):
        raise NonFiniteObjective(
            f"oracle returned {value} at lam={np.array2string(lam, threshold=8)}",
            hyperparams=lam,
        )


def hozog_step(lam: np.ndarray, grad, gamma: float) -> np.ndarray:
    """One plain descent update, lam - gamma*grad; the input is not modified."""
    vector = grad.vector if isinstance(grad, GradientEstimate) else np.asarray(grad, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if vector.shape != lam.shape:
        raise InvalidConfig(
            f"gradient shape {vector.shape} does not match lambda shape {lam.shape}"
        )
    return lam - gamma * vector


def run_hozog(
    spec: ObjectiveSpec,
    lambda0,
    cfg: ZoConfig,
    recorder=None,
    max_workers: int = 1,
) -> np.ndarray:
    """Run T meta-iterations of zeroth-order hyper-gradient descent.

    Returns lambda_T.  The recorder, when given, is called with one
    :class:`IterationEvent` per meta-iteration (covering the pre-update
    iterate and its base evaluation) plus a final event for lambda_T.
    Optimizer-driven oracle calls total exactly T*(q+1); anything else is
    the recorder's own business.  A non-finite objective aborts the run
    with the meta-iteration index attached: a silently clipped estimate
    would corrupt the descent direction.
    """
    lam = np.asarray(lambda0, dtype=float).copy()
    if lam.ndim == 0:
        lam = lam.reshape(1)
    p = spec.p
    if lam.shape != (p,):
        raise InvalidConfig(f"lambda0 has shape {lam.shape}, expected ({p},)")
    rng = np.random.default_rng(cfg.seed)
    calls = 0
    run_spec = spec
    for t in range(cfg.iterations):
        if cfg.reseed_inner_each_iter:
            run_spec = dataclasses.replace(spec, inner_seed=spec.inner_seed + t)
        directions = sample_directions(p, cfg.q, cfg.direction_scheme, rng)
        points = [lam + cfg.mu * directions[i] for i in range(cfg.q)]
        try:
            base = evaluate(run_spec, lam)
            perturbed = evaluate_batch(run_spec, points, max_workers=max_workers)
        except NonFiniteObjective as err:
            err.meta_iter = t
            raise
        calls += cfg.q + 1
        vector = _combine(p, cfg.mu, directions, base.f_value, [e.f_value for e in perturbed])
        grad = GradientEstimate(vector=vector, eval_count=cfg.q + 1)
        if recorder is not None:
            recorder(
                IterationEvent(
                    meta_iter=t,
                    hyperparams=lam.copy(),
                    evaluation=base,
                    gradient=grad,
                    optimizer_calls=calls,
                )
            )
        lam = hozog_step(lam, grad, cfg.gamma)
        if spec.bounds is not None:
            lam = np.clip(lam, spec.bounds[:, 0], spec.bounds[:, 1])
    if recorder is not None:
        recorder(
            IterationEvent(
                meta_iter=cfg.iterations,
                hyperparams=lam.copy(),
                evaluation=None,
                gradient=None,
                optimizer_calls=calls,
                final=True,
            )
        )
    return lam

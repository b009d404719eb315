"""Random search over a hyperparameter box, the in-repo comparison method."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NonFiniteObjective
from .oracle import ObjectiveSpec, evaluate
from .zo_core import IterationEvent

__all__ = ["RandomSearchConfig", "random_search"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RandomSearchConfig:
    """Evaluation budget, sampling box (one [lo, hi] per coordinate), seed."""

    budget: int
    box: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise InvalidConfig(f"budget must be >= 1, got {self.budget}")
        box = np.atleast_2d(np.asarray(self.box, dtype=float))
        if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 0] >= box[:, 1]):
            raise InvalidConfig("box must be (p, 2) with lo < hi per coordinate")
        object.__setattr__(self, "box", box)


def _evaluate_or_error(spec, lam):
    try:
        return evaluate(spec, lam)
    except NonFiniteObjective as err:
        return err


def random_search(
    spec: ObjectiveSpec,
    cfg: RandomSearchConfig,
    recorder=None,
    max_workers: int = 1,
    batch_size: int = 16,
) -> np.ndarray:
    """Uniform i.i.d. sampling over the box, tracking the incumbent.

    Consumes exactly ``budget`` oracle evaluations and returns the sampled
    point with the smallest objective.  All samples are pre-drawn from the
    seeded stream; evaluation fans out in batches when the spec allows it,
    and incumbent updates are applied in sample-index order, so the result
    is deterministic for any worker count.  A sample whose evaluation
    diverges is logged and skipped rather than killing the search, but it
    still counts against the budget.
    """
    if cfg.box.shape[0] != spec.p:
        raise InvalidConfig(
            f"box has {cfg.box.shape[0]} coordinates, problem has p={spec.p}"
        )
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.box[:, 0], cfg.box[:, 1]
    samples = lo + (hi - lo) * rng.random((cfg.budget, spec.p))
    best_lam = None
    best_f = np.inf
    calls = 0
    for start in range(0, cfg.budget, batch_size):
        chunk = samples[start : start + batch_size]
        if max_workers > 1 and spec.parallel_safe and len(chunk) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                outcomes = list(pool.map(lambda lam: _evaluate_or_error(spec, lam), chunk))
        else:
            outcomes = [_evaluate_or_error(spec, lam) for lam in chunk]
        for offset, outcome in enumerate(outcomes):
            index = start + offset
            calls += 1
            if isinstance(outcome, NonFiniteObjective):
                logger.warning(
                    "random search: non-finite objective at sample %d, skipping", index
                )
                continue
            if outcome.f_value < best_f:
                best_f = outcome.f_value
                best_lam = samples[index].copy()
            if recorder is not None:
                recorder(
                    IterationEvent(
                        meta_iter=index,
                        hyperparams=samples[index].copy(),
                        evaluation=outcome,
                        gradient=None,
                        optimizer_calls=calls,
                    )
                )
    if best_lam is None:
        raise NonFiniteObjective("every random-search sample diverged")
    return best_lam

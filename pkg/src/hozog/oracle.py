"""The black-box outer objective f(lam) = E(A(lam), lam).

An :class:`ObjectiveSpec` pairs a problem (inner loss, outer loss, data)
with an inner-solver configuration.  Evaluating it runs the inner solver to
get the trained model w(lam) and then scores that model with the outer
objective.  Everything the evaluation touches is immutable, and any inner
randomness is frozen by a seed inside the spec, so f is a deterministic
function of lam alone: repeated or concurrent calls return identical
results, which the finite-difference estimator depends on.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFiniteIterate, NonFiniteObjective
from .inner_solvers import InnerSolver, solve

__all__ = ["ObjectiveSpec", "Evaluation", "evaluate", "evaluate_batch", "function_objective"]


@dataclass(frozen=True)
class ObjectiveSpec:
    """A bilevel problem instance ready for black-box evaluation.

    ``problem`` supplies the losses and data (see the problems package for
    the expected surface); ``inner`` is the iterative solver configuration,
    or None to use the problem's closed-form inner solution.  ``bounds`` is
    an optional (p, 2) box on lam; when declared, the outer loop clamps
    iterates to it after each step.  ``inner_seed`` freezes whatever
    randomness the problem's initialization rule uses.
    """

    problem: object
    inner: InnerSolver | None = None
    bounds: np.ndarray | None = None
    parallel_safe: bool = True
    inner_seed: int = 0

    def __post_init__(self):
        if self.bounds is not None:
            box = np.atleast_2d(np.asarray(self.bounds, dtype=float))
            if box.shape != (self.p, 2):
                raise DimensionMismatch(
                    f"bounds shape {box.shape} does not match (p, 2) = ({self.p}, 2)"
                )
            if np.any(box[:, 0] >= box[:, 1]):
                raise DimensionMismatch("each bound must satisfy lo < hi")
            object.__setattr__(self, "bounds", box)

    @property
    def p(self) -> int:
        return self.problem.p

    def value(self, lam: np.ndarray) -> float:
        """Plain-callable view of the objective, f(lam)."""
        return evaluate(self, lam).f_value


@dataclass(frozen=True)
class Evaluation:
    """One oracle call: the objective value and the model that produced it."""

    hyperparams: np.ndarray
    f_value: float
    model: np.ndarray
    inner_steps_used: int


def _check_lambda(spec: ObjectiveSpec, lam) -> np.ndarray:
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape != (spec.p,):
        raise DimensionMismatch(
            f"hyperparameter vector has shape {arr.shape}, expected ({spec.p},)"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteObjective("hyperparameter vector is not finite", hyperparams=arr)
    return arr


def evaluate(spec: ObjectiveSpec, lam) -> Evaluation:
    """Run the inner solver at lam and score the result with the outer loss."""
    lam = _check_lambda(spec, lam)
    problem = spec.problem
    if spec.inner is None:
        w = problem.exact_solution(lam)
        steps_used = 0
    else:
        alg = spec.inner
        if alg.w0 is None:
            alg = dataclasses.replace(alg, w0=problem.default_w0(spec.inner_seed))
        try:
            w = solve(problem.inner_loss_grad, alg, lam)
        except NonFiniteIterate as err:
            raise NonFiniteObjective(
                f"inner solve diverged ({err}) at lam={np.array2string(lam, threshold=8)}",
                hyperparams=lam,
            ) from err
        steps_used = alg.steps
    f = float(problem.outer_value(w, lam))
    if not np.isfinite(f):
        raise NonFiniteObjective(
            f"objective is not finite at lam={np.array2string(lam, threshold=8)}",
            hyperparams=lam,
        )
    return Evaluation(hyperparams=lam, f_value=f, model=w, inner_steps_used=steps_used)


def evaluate_batch(spec: ObjectiveSpec, lams, max_workers: int = 1) -> list:
    """Evaluate several points, in input order.

    Concurrency is used only when the spec declares itself parallel-safe and
    ``max_workers`` exceeds one; the output is identical to sequential
    evaluation either way.  The first failing point (by input index) is the
    one reported.
    """
    lams = list(lams)
    if max_workers > 1 and spec.parallel_safe and len(lams) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(evaluate, spec, lam) for lam in lams]
        results = []
        for fut in futures:
            results.append(fut.result())
        return results
    return [evaluate(spec, lam) for lam in lams]


class _FunctionProblem:
    """Adapter exposing a plain callable f(lam) through the problem surface."""

    def __init__(self, fn, p: int, bounds=None, name: str = "function"):
        self.fn = fn
        self.p = p
        self.d = 0
        self.bounds = bounds
        self.name = name

    def exact_solution(self, lam):
        return np.empty(0)

    def inner_loss_grad(self, w, lam):
        return np.empty(0)

    def default_w0(self, seed=0):
        return np.empty(0)

    def outer_value(self, w, lam):
        return float(self.fn(lam))

    def test_metric(self, w):
        return None


def function_objective(fn, p: int, bounds=None, parallel_safe: bool = True) -> ObjectiveSpec:
    """Wrap an analytic callable as an ObjectiveSpec (no inner solve).

    Used for closed-form oracles in tests and for driving the outer loop
    with scripted objectives.
    """
    problem = _FunctionProblem(fn, p, bounds=bounds)
    box = None if bounds is None else np.atleast_2d(np.asarray(bounds, dtype=float))
    return ObjectiveSpec(problem=problem, inner=None, bounds=box, parallel_safe=parallel_safe)

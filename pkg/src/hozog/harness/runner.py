"""Experiment orchestration: build the objective, run a method, persist traces."""

from __future__ import annotations

import dataclasses
import json
import platform
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..baselines import RandomSearchConfig, random_search
from ..data_io import binarize, load_libsvm, split_2_1_1
from ..errors import ConfigError, HozogError
from ..inner_solvers import InnerSolver
from ..oracle import ObjectiveSpec
from ..problems import (
    LogRegProblem,
    hyperclean_objective,
    logreg_objective,
    make_hyperclean,
    make_synthetic,
)
from ..zo_core import ZoConfig, run_hozog
from .config import ExperimentConfig
from .metrics import TraceWriter

__all__ = ["build_objective", "run_experiment", "sweep", "SWEEP_AXES"]

SWEEP_AXES = ("q", "mu", "gamma")


def _build_inner(cfg: ExperimentConfig, d: int | None = None) -> InnerSolver | None:
    section = cfg.inner
    if section is None:
        return None
    w0 = None
    if section["w0_rule"] == "normal":
        if d is None:
            raise ConfigError("inner.w0_rule", "'normal' needs a known model dimension")
        rng = np.random.default_rng([int(cfg.problem.get("corruption_seed", 0)), 0x77300])
        w0 = rng.standard_normal(d) * float(section.get("w0_scale", 1.0))
    return InnerSolver(
        steps=section["steps"],
        lr=section["lr"],
        variant=section["variant"],
        beta1=section.get("beta1", 0.9),
        beta2=section.get("beta2", 0.999),
        eps=section.get("eps", 1e-8),
        w0=w0,
    )


def build_objective(cfg: ExperimentConfig) -> ObjectiveSpec:
    """Construct the ObjectiveSpec an experiment config describes."""
    kind = cfg.problem["kind"]
    if kind == "synthetic":
        inner = _build_inner(cfg, d=1) if cfg.problem["mode"] == "iterative" else None
        if cfg.problem["mode"] == "iterative" and inner is None:
            raise ConfigError("inner", "iterative synthetic mode needs an inner section")
        spec = make_synthetic(cfg.problem["c"], cfg.problem["w_star"], inner=inner)
    elif kind == "logreg":
        ds = load_libsvm(cfg.problem["data"], n_features=cfg.problem.get("n_features"))
        labels = {label for label, _ in ds.rows}
        if "binarize_seed" in cfg.problem:
            ds = binarize(ds, cfg.problem["binarize_seed"])
        elif not labels <= {-1.0, 1.0}:
            raise ConfigError(
                "problem.binarize_seed",
                "labels are not {-1, +1}; set binarize_seed to map them",
            )
        train, val, test = split_2_1_1(ds, cfg.problem["split_seed"])
        prob = LogRegProblem.from_datasets(train, val, test)
        spec = logreg_objective(prob, _build_inner(cfg, d=prob.d))
    else:
        ds = load_libsvm(cfg.problem["data"])
        prob = make_hyperclean(
            ds,
            n_train=cfg.problem["n_train"],
            n_val=cfg.problem["n_val"],
            n_test=cfg.problem["n_test"],
            n_groups=cfg.problem["n_groups"],
            corruption_seed=cfg.problem["corruption_seed"],
        )
        spec = hyperclean_objective(prob, _build_inner(cfg, d=prob.d))
    if not cfg.parallel_safe:
        spec = dataclasses.replace(spec, parallel_safe=False)
    return spec


def _resolve_lambda0(cfg: ExperimentConfig, p: int) -> np.ndarray:
    lam0 = cfg.lambda0
    if lam0 == "zeros":
        return np.zeros(p)
    if isinstance(lam0, (int, float)):
        return np.full(p, float(lam0))
    arr = np.asarray(lam0, dtype=float)
    if arr.shape != (p,):
        raise ConfigError("lambda0", f"has {arr.size} entries, problem has p={p}")
    return arr


def _zo_config(cfg: ExperimentConfig) -> ZoConfig:
    section = cfg.hozog
    return ZoConfig(
        q=section.get("q", 1),
        mu=section.get("mu", 0.01),
        gamma=section.get("gamma", 0.05),
        iterations=section.get("iterations", 0),
        seed=section.get("seed", 0),
        direction_scheme=section.get("direction_scheme", "sphere"),
    )


def _rs_config(cfg: ExperimentConfig, spec: ObjectiveSpec) -> RandomSearchConfig:
    section = cfg.random_search
    box = section.get("box")
    if box is None:
        if spec.bounds is not None:
            box = spec.bounds
        else:
            # the tasks without declared bounds still need a sampling box
            box = np.tile([-5.0, 5.0], (spec.p, 1))
    return RandomSearchConfig(budget=section["budget"], box=box, seed=section.get("seed", 0))


def _metric_settings(cfg: ExperimentConfig):
    if cfg.hozog is not None:
        return (
            cfg.hozog.get("q", 1),
            cfg.hozog.get("mu", 0.01),
            cfg.hozog.get("direction_scheme", "sphere"),
        )
    return 1, 0.01, "sphere"


def _collect_seeds(cfg: ExperimentConfig) -> dict:
    seeds = {}
    if cfg.hozog is not None:
        seeds["hozog"] = cfg.hozog.get("seed", 0)
    if cfg.random_search is not None:
        seeds["random_search"] = cfg.random_search.get("seed", 0)
    for key in ("split_seed", "binarize_seed", "corruption_seed"):
        if key in cfg.problem:
            seeds[key] = cfg.problem[key]
    return seeds


def _write_manifest(path: Path, cfg: ExperimentConfig, result: dict) -> None:
    manifest = {
        "config": cfg.raw,
        "seeds": _collect_seeds(cfg),
        "result": result,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "hozog": __version__,
        },
        "max_workers": cfg.max_workers,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one experiment; writes the trace CSV and a manifest next to it.

    Returns a summary dict (final hyperparameters, record count, call
    counts).  Raises ConfigError for bad configs and NonFiniteObjective for
    diverging runs; the CLI maps those to exit codes 2 and 3.
    """
    spec = build_objective(cfg)
    lam0 = _resolve_lambda0(cfg, spec.p)
    grad_q, grad_mu, scheme = _metric_settings(cfg)
    if cfg.method == "hozog":
        zo = _zo_config(cfg)
        metrics_seed = zo.seed
    else:
        rs = _rs_config(cfg, spec)
        metrics_seed = rs.seed
    with TraceWriter(
        cfg.output,
        method=cfg.method,
        spec=spec,
        grad_q=grad_q,
        grad_mu=grad_mu,
        metrics_seed=metrics_seed,
        cadence=cfg.metric_every,
        direction_scheme=scheme,
    ) as writer:
        if cfg.method == "hozog":
            final = run_hozog(spec, lam0, zo, recorder=writer, max_workers=cfg.max_workers)
        else:
            final = random_search(spec, rs, recorder=writer, max_workers=cfg.max_workers)
        summary = {
            "final_lambda": [float(v) for v in final],
            "records": len(writer.records),
            "oracle_calls_optimizer": writer.optimizer_calls,
            "oracle_calls_metrics": writer.metric_calls,
            "trace": str(cfg.output),
        }
    manifest_path = Path(cfg.output).with_suffix(".manifest.json")
    _write_manifest(manifest_path, cfg, summary)
    summary["manifest"] = str(manifest_path)
    return summary


def _output_for_value(output: str, axis: str, value) -> str:
    path = Path(output)
    tag = f"{value:g}" if isinstance(value, float) else str(value)
    return str(path.with_name(f"{path.stem}_{axis}{tag}{path.suffix}"))


def sweep(cfg: ExperimentConfig, axis: str, values) -> list:
    """Run one experiment per value of a single estimator parameter.

    All runs share every other setting, including seeds.  A failing run is
    reported in the returned status list but does not stop the others.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", f"must be one of {SWEEP_AXES}, got {axis!r}")
    if cfg.method != "hozog" or cfg.hozog is None:
        raise ConfigError("method", "sweep only applies to hozog runs")
    if not values:
        raise ConfigError("values", "need at least one value")
    statuses = []
    for value in values:
        if axis == "q":
            if not isinstance(value, int) or value < 1:
                raise ConfigError("values", f"q must be a positive integer, got {value!r}")
        elif not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("values", f"{axis} must be > 0, got {value!r}")
        hozog = {**cfg.hozog, axis: value}
        run_cfg = dataclasses.replace(
            cfg,
            hozog=hozog,
            output=_output_for_value(cfg.output, axis, value),
            raw={**cfg.raw, "hozog": hozog},
        )
        try:
            summary = run_experiment(run_cfg)
            statuses.append({"value": value, "ok": True, "trace": summary["trace"]})
        except HozogError as err:
            statuses.append({"value": value, "ok": False, "error": str(err)})
    return statuses

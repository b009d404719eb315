"""Experiment config files: JSON with nested sections, strictly validated.

Unknown keys anywhere in the tree are errors (a typo silently ignored is a
wrong experiment), every referenced path must exist at load time, and
numeric ranges are checked by constructing the corresponding runtime
config objects up front.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError, InvalidConfig

__all__ = ["ExperimentConfig", "load_config", "MAX_WORKERS_ENV"]

MAX_WORKERS_ENV = "HOZOG_MAX_WORKERS"

_TOP_KEYS = {
    "method",
    "problem",
    "inner",
    "hozog",
    "random_search",
    "lambda0",
    "output",
    "metric_every",
    "max_workers",
    "parallel_safe",
}
_PROBLEM_KEYS = {
    "synthetic": {"kind", "c", "w_star", "mode"},
    "logreg": {"kind", "data", "split_seed", "binarize_seed", "n_features"},
    "hyperclean": {
        "kind",
        "data",
        "n_train",
        "n_val",
        "n_test",
        "n_groups",
        "corruption_seed",
    },
}
_INNER_KEYS = {"variant", "steps", "lr", "beta1", "beta2", "eps", "w0_rule", "w0_scale"}
_HOZOG_KEYS = {"q", "mu", "gamma", "iterations", "seed", "direction_scheme"}
_RS_KEYS = {"budget", "box", "seed"}

_INNER_DEFAULTS = {
    "synthetic": {"variant": "gd", "steps": 500, "lr": 0.1},
    "logreg": {"variant": "gd", "steps": 200, "lr": 0.1},
    "hyperclean": {"variant": "gd", "steps": 4000, "lr": 0.05},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description (see README for the file schema)."""

    method: str
    problem: dict
    inner: dict | None
    hozog: dict | None
    random_search: dict | None
    lambda0: object
    output: str
    metric_every: int
    max_workers: int
    parallel_safe: bool
    raw: dict = field(repr=False, default_factory=dict)


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}" if where else key, "unknown key")


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"{where}.{key}", "missing required key")
    return section[key]


def _check_int(section: dict, key: str, where: str, minimum=None):
    value = section.get(key)
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}", f"must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _check_number(section: dict, key: str, where: str, positive=False):
    value = section.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}", f"must be a number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(f"{where}.{key}", f"must be > 0, got {value}")
    return float(value)


def _validate_problem(problem: dict) -> dict:
    if not isinstance(problem, dict):
        raise ConfigError("problem", "must be a section")
    kind = _require(problem, "kind", "problem")
    if kind not in _PROBLEM_KEYS:
        raise ConfigError("problem.kind", f"unknown problem kind {kind!r}")
    _reject_unknown(problem, _PROBLEM_KEYS[kind], "problem")
    if kind == "synthetic":
        c = _check_number(problem, "c", "problem")
        w_star = _check_number(problem, "w_star", "problem")
        if c is None or w_star is None:
            raise ConfigError("problem", "synthetic needs both c and w_star")
        mode = problem.get("mode", "exact")
        if mode not in ("exact", "iterative"):
            raise ConfigError("problem.mode", f"must be 'exact' or 'iterative', got {mode!r}")
        problem = {**problem, "mode": mode}
    else:
        data = _require(problem, "data", "problem")
        if not isinstance(data, str) or not os.path.exists(data):
            raise ConfigError("problem.data", f"path does not exist: {data!r}")
        if kind == "logreg":
            _check_int(problem, "split_seed", "problem", minimum=0)
            _check_int(problem, "binarize_seed", "problem", minimum=0)
            _check_int(problem, "n_features", "problem", minimum=1)
            problem = {**{"split_seed": 0}, **problem}
        else:
            for key in ("n_train", "n_val", "n_test", "n_groups"):
                if _check_int(problem, key, "problem", minimum=1) is None:
                    raise ConfigError(f"problem.{key}", "missing required key")
            problem = {**{"corruption_seed": 0}, **problem}
            _check_int(problem, "corruption_seed", "problem", minimum=0)
    return problem


def _validate_inner(inner, kind: str) -> dict | None:
    if inner is None:
        if kind == "synthetic":
            return None
        inner = {}
    if not isinstance(inner, dict):
        raise ConfigError("inner", "must be a section")
    _reject_unknown(inner, _INNER_KEYS, "inner")
    merged = {**_INNER_DEFAULTS[kind], **inner}
    if merged.get("variant") not in ("gd", "adam"):
        raise ConfigError("inner.variant", f"must be 'gd' or 'adam', got {merged.get('variant')!r}")
    _check_int(merged, "steps", "inner", minimum=0)
    _check_number(merged, "lr", "inner", positive=True)
    for key in ("beta1", "beta2", "eps"):
        _check_number(merged, key, "inner", positive=False)
    rule = merged.get("w0_rule", "zeros")
    if rule not in ("zeros", "normal"):
        raise ConfigError("inner.w0_rule", f"must be 'zeros' or 'normal', got {rule!r}")
    merged["w0_rule"] = rule
    merged.setdefault("w0_scale", 1.0)
    return merged


def _validate_hozog(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("hozog", "must be a section")
    _reject_unknown(section, _HOZOG_KEYS, "hozog")
    from ..zo_core import ZoConfig

    try:
        ZoConfig(
            q=section.get("q", 1),
            mu=section.get("mu", 0.01),
            gamma=section.get("gamma", 0.05),
            iterations=section.get("iterations", 0),
            seed=section.get("seed", 0),
            direction_scheme=section.get("direction_scheme", "sphere"),
        )
    except (InvalidConfig, TypeError) as err:
        raise ConfigError("hozog", str(err)) from None
    if _check_int(section, "seed", "hozog", minimum=0) is None:
        section = {**section, "seed": 0}
    return section


def _validate_rs(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("random_search", "must be a section")
    _reject_unknown(section, _RS_KEYS, "random_search")
    if _check_int(section, "budget", "random_search", minimum=1) is None:
        raise ConfigError("random_search.budget", "missing required key")
    if _check_int(section, "seed", "random_search", minimum=0) is None:
        section = {**section, "seed": 0}
    box = section.get("box")
    if box is not None:
        if not isinstance(box, list) or not all(
            isinstance(pair, list) and len(pair) == 2 for pair in box
        ):
            raise ConfigError("random_search.box", "must be a list of [lo, hi] pairs")
        for pair in box:
            if pair[0] >= pair[1]:
                raise ConfigError("random_search.box", f"needs lo < hi, got {pair}")
    return section


def load_config(path) -> ExperimentConfig:
    """Load and validate an experiment config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ConfigError("config", f"not valid JSON: {err}") from None
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    _reject_unknown(raw, _TOP_KEYS, "")
    method = _require(raw, "method", "")
    if method not in ("hozog", "random_search"):
        raise ConfigError("method", f"must be 'hozog' or 'random_search', got {method!r}")
    problem = _validate_problem(_require(raw, "problem", ""))
    inner = _validate_inner(raw.get("inner"), problem["kind"])
    hozog = None
    random_search = None
    if method == "hozog":
        hozog = _validate_hozog(_require(raw, "hozog", ""))
    elif "hozog" in raw:
        hozog = _validate_hozog(raw["hozog"])
    if method == "random_search":
        random_search = _validate_rs(_require(raw, "random_search", ""))
    elif "random_search" in raw:
        random_search = _validate_rs(raw["random_search"])

    lambda0 = raw.get("lambda0", "zeros")
    if not (
        lambda0 == "zeros"
        or isinstance(lambda0, (int, float))
        or (isinstance(lambda0, list) and all(isinstance(v, (int, float)) for v in lambda0))
    ):
        raise ConfigError("lambda0", "must be 'zeros', a number, or a list of numbers")

    output = raw.get("output", "trace.csv")
    if not isinstance(output, str) or not output:
        raise ConfigError("output", "must be a non-empty path string")
    parent = Path(output).parent
    if str(parent) not in ("", ".") and not parent.exists():
        raise ConfigError("output", f"directory does not exist: {parent}")

    metric_every = raw.get("metric_every", 1)
    if not isinstance(metric_every, int) or isinstance(metric_every, bool) or metric_every < 1:
        raise ConfigError("metric_every", f"must be an integer >= 1, got {metric_every!r}")

    max_workers = raw.get("max_workers", 1)
    if not isinstance(max_workers, int) or isinstance(max_workers, bool) or max_workers < 1:
        raise ConfigError("max_workers", f"must be an integer >= 1, got {max_workers!r}")
    env_override = os.environ.get(MAX_WORKERS_ENV)
    if env_override is not None:
        try:
            max_workers = int(env_override)
        except ValueError:
            raise ConfigError(
                "max_workers", f"environment override {MAX_WORKERS_ENV}={env_override!r} is not an integer"
            ) from None
        if max_workers < 1:
            raise ConfigError("max_workers", f"environment override must be >= 1, got {max_workers}")

    parallel_safe = raw.get("parallel_safe", True)
    if not isinstance(parallel_safe, bool):
        raise ConfigError("parallel_safe", f"must be a boolean, got {parallel_safe!r}")

    return ExperimentConfig(
        method=method,
        problem=problem,
        inner=inner,
        hozog=hozog,
        random_search=random_search,
        lambda0=lambda0,
        output=output,
        metric_every=metric_every,
        max_workers=max_workers,
        parallel_safe=parallel_safe,
        raw=raw,
    )

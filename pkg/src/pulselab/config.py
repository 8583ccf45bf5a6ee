"""Strict JSON run configuration: every field defaulted, unknown keys rejected.

The effective (default-filled) config is echoed into each run's manifest and
must re-parse to itself, so artifacts are bit-reproducible from their own
metadata.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from .dynamics import StepConfig
from .grid import SpectralGrid
from .model import ModelParams
from .experiments import PerturbationSpec

__all__ = ["ConfigError", "RunConfig", "parse_config", "effective_defaults"]


class ConfigError(ValueError):
    """Configuration value or key violates the schema."""


def _positive(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _non_negative(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0


def _number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _power_of_two(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 16 and (v & (v - 1)) == 0


def _pos_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v > 0


def _string_in(*options):
    return (lambda v: isinstance(v, str) and v in options,
            "one of " + ", ".join(repr(o) for o in options))


def _fraction_pair(v) -> bool:
    return (isinstance(v, (list, tuple)) and len(v) == 2
            and all(_number(u) for u in v) and 0.0 <= v[0] < v[1] <= 1.0)


def _number_list(v) -> bool:
    return isinstance(v, list) and len(v) > 0 and all(_positive(u) for u in v)


def _time_list(v) -> bool:
    return isinstance(v, list) and all(_non_negative(u) for u in v)


# leaf schema: key -> (default, predicate, constraint description)
_SCHEMA: dict[str, dict[str, tuple[Any, Callable[[Any], bool], str]]] = {
    "model": {
        "alpha": (1.0, _positive, "alpha > 0"),
        "beta": (1.0, _positive, "beta > 0"),
        "gamma": (1.0, _non_negative, "gamma >= 0"),
        "eta": (5.0, _non_negative, "eta >= 0"),
        "epsilon": (1e-3, _positive, "epsilon > 0"),
    },
    "grid": {
        "half_width": (40.0, _positive, "half_width > 0"),
        "n_points": (4096, _power_of_two, "n_points a power of two >= 16"),
    },
    "step": {
        "dt": (1e-3, _positive, "dt > 0"),
        "picard_tol": (1e-10, _positive, "picard_tol > 0"),
        "picard_max_iters": (30, _pos_int, "picard_max_iters >= 1"),
        "gradient_method": ("exact", *_string_in("exact", "barycentric")),
        "interp_order": (6, _pos_int, "interp_order >= 1"),
    },
    "experiment": {
        "type": ("stationary", *_string_in("stationary", "pulse", "cold", "shifted")),
        "T": (10.0, _positive, "T > 0"),
        "output_stride": (10, _pos_int, "output_stride >= 1"),
        "initial_shift": (0.0, _number, "a number"),
        "fit_window": ([0.5, 0.9], _fraction_pair, "two fractions 0 <= a < b <= 1"),
        "snapshot_times": ([], _time_list, "a list of times >= 0"),
        "perturbation": {
            "shape": ("none", *_string_in("none", "gaussian_bump", "gradient_bump",
                                          "odd_kick", "shift", "noise")),
            "amplitude": (0.0, _non_negative, "amplitude >= 0"),
            "width": (1.0, _positive, "width > 0"),
            "offset": (0.0, _number, "a number"),
        },
    },
    "sweep": {
        "eta_min": (2.0, _positive, "eta_min > 0"),
        "eta_max": (7.0, _positive, "eta_max > 0"),
        "n_etas": (11, _pos_int, "n_etas >= 1"),
        "T": (40.0, _positive, "T > 0"),
        "dt": (2e-3, _positive, "dt > 0"),
        "kick_amplitude": (1e-3, _non_negative, "kick_amplitude >= 0"),
        "kick_width": (2.0, _positive, "kick_width > 0"),
        "slope_window": ([0.7, 1.0], _fraction_pair, "two fractions 0 <= a < b <= 1"),
    },
    "threshold": {
        "epsilons": ([1.0, 0.1, 0.01, 0.001], _number_list, "a non-empty list of widths > 0"),
    },
    "checks": {
        "boundary_floor": (1e-10, _positive, "boundary_floor > 0"),
    },
    "seed": (0, lambda v: isinstance(v, int) and not isinstance(v, bool), "an integer"),
}


def _walk(schema: dict, data: dict, path: str) -> dict:
    out: dict[str, Any] = {}
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown key {path}{key!r}")
    for key, spec in schema.items():
        here = f"{path}{key}"
        if isinstance(spec, dict):
            sub = data.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigError(f"{here} must be an object")
            out[key] = _walk(spec, sub, here + ".")
        else:
            default, pred, constraint = spec
            value = data.get(key, default)
            if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if not pred(value):
                raise ConfigError(f"{here}: constraint violated ({constraint}), got {value!r}")
            out[key] = value
    return out


def effective_defaults() -> dict:
    """The fully-defaulted effective configuration."""
    return _walk(_SCHEMA, {}, "")


@dataclass(frozen=True)
class RunConfig:
    """Validated, default-filled run configuration."""

    data: dict

    # typed views ----------------------------------------------------------
    def model_params(self) -> ModelParams:
        m = self.data["model"]
        return ModelParams(alpha=m["alpha"], beta=m["beta"], gamma=m["gamma"],
                           eta=m["eta"], epsilon=m["epsilon"])

    def grid(self) -> SpectralGrid:
        g = self.data["grid"]
        return SpectralGrid(half_width=g["half_width"], n_points=g["n_points"])

    def step_config(self) -> StepConfig:
        s = self.data["step"]
        return StepConfig(dt=s["dt"], picard_tol=s["picard_tol"],
                          picard_max_iters=s["picard_max_iters"],
                          gradient_method=s["gradient_method"],
                          interp_order=s["interp_order"])

    def perturbation(self) -> PerturbationSpec:
        p = self.data["experiment"]["perturbation"]
        return PerturbationSpec(shape=p["shape"], amplitude=p["amplitude"],
                                width=p["width"], offset=p["offset"],
                                seed=self.data["seed"])

    @property
    def experiment(self) -> dict:
        return self.data["experiment"]

    @property
    def sweep(self) -> dict:
        return self.data["sweep"]

    @property
    def checks(self) -> dict:
        return self.data["checks"]

    @property
    def seed(self) -> int:
        return self.data["seed"]


def parse_config(path: Optional[str | Path] = None,
                 overrides: Optional[dict] = None) -> RunConfig:
    """Load, validate, and default-fill a JSON config file.

    ``overrides`` (same nesting) are applied on top of the file before
    validation; with no path, the defaults are used.
    """
    raw: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            raw = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {p}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("top-level config must be a JSON object")
    if overrides:
        raw = _deep_merge(raw, overrides)
    cleaned = _walk(_SCHEMA, raw, "")
    # cross-field constraints
    if not cleaned["sweep"]["eta_min"] < cleaned["sweep"]["eta_max"]:
        raise ConfigError("sweep.eta_min < sweep.eta_max required")
    if not math.isfinite(cleaned["experiment"]["T"]):
        raise ConfigError("experiment.T must be finite")
    return RunConfig(data=cleaned)


def _deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out

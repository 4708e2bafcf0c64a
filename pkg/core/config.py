"""
Game and run configuration.

Plain-text key=value file, '#' comments, surrounding quotes stripped.
Priority: command-line overrides > PRIVAD_* env vars > config file > preset > defaults.
"""

import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .model import (
    DEFAULT_VALIDATION_GRID,
    GameModel,
    GameParams,
    TypeModel,
    ValueDistribution,
    q_from_epsilon,
)
from .presets import DEFAULT_PRESET, get_preset

ENV_PREFIX = "PRIVAD_"

DEFAULT_Q_MIN = 0.5
DEFAULT_Q_MAX = 1.0
DEFAULT_STEPS = 513
DEFAULT_OUT_DIR = "out"
DEFAULT_ORACLE_N = 1_000_000
DEFAULT_ORACLE_SEED = 12345
DEFAULT_WORKERS = 1

MODEL_KEYS = (
    "distribution", "lambda", "power_k",
    "type_model", "step_threshold", "affine_a", "affine_b",
    "delta", "s1A", "s2A", "s1B", "s2B",
)
RUN_KEYS = (
    "q_min", "q_max", "steps", "epsilons", "out_dir",
    "oracle_n", "oracle_seed", "validation_grid", "workers",
)
KNOWN_KEYS = ("preset",) + MODEL_KEYS + RUN_KEYS
# parameter key -> the only kind it applies to
DIST_PARAM_KEYS = {"lambda": "trunc_exp", "power_k": "power"}
TYPE_PARAM_KEYS = {"step_threshold": "step", "affine_a": "affine", "affine_b": "affine"}


@dataclass(frozen=True)
class RunConfig:
    model: GameModel
    q_min: float = DEFAULT_Q_MIN
    q_max: float = DEFAULT_Q_MAX
    steps: int = DEFAULT_STEPS
    epsilons: Optional[Tuple[float, ...]] = None
    out_dir: str = DEFAULT_OUT_DIR
    oracle_n: int = DEFAULT_ORACLE_N
    oracle_seed: int = DEFAULT_ORACLE_SEED
    validation_grid: int = DEFAULT_VALIDATION_GRID
    workers: int = DEFAULT_WORKERS
    source: str = "<defaults>"

    def q_grid(self) -> List[float]:
        """Sweep points in ascending q; an epsilon list replaces the q range."""
        if self.epsilons is not None:
            return sorted({q_from_epsilon(e) for e in self.epsilons})
        return [float(q) for q in np.linspace(self.q_min, self.q_max, self.steps)]

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        kept = {k: v for k, v in overrides.items() if v is not None}
        if not kept:
            return self
        updated = replace(self, **kept)
        _check_run(updated)
        return updated


def read_pairs(path: Path) -> List[Tuple[int, str, str]]:
    """(line number, key, value) for each key=value line of a config file."""
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected key = value, got '{line}'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.split(" #", 1)[0].strip().strip('"').strip("'")
            if not key:
                raise ConfigError(f"{path}:{number}: empty key")
            pairs.append((number, key, value))
    return pairs


def _env_pairs(environ: Mapping[str, str]) -> Dict[str, str]:
    """PRIVAD_<KEY> overrides, matched case-insensitively against known keys."""
    by_upper = {k.upper(): k for k in KNOWN_KEYS}
    found = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = by_upper.get(name[len(ENV_PREFIX):])
        if key is not None and value.strip():
            found[key] = value.strip()
    return found


def _float(key: str, value: str, where: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{where}: '{key}' must be a number, got '{value}'") from None


def _int(key: str, value: str, where: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{where}: '{key}' must be an integer, got '{value}'") from None


def _epsilons(value: str, where: str) -> Tuple[float, ...]:
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise ConfigError(f"{where}: 'epsilons' is empty")
    out = []
    for item in items:
        eps = math.inf if item.lower() in ("inf", "infinity") else _float("epsilons", item, where)
        if eps < 0:
            raise ConfigError(f"{where}: epsilon must be >= 0, got {item}")
        out.append(eps)
    return tuple(out)


def _check_fit(values: Mapping[str, str], kind: str, owners: Mapping[str, str], family: str, where: str):
    """Reject parameter keys that belong to a different kind than the resolved one."""
    for key, owner in owners.items():
        if key in values and kind != owner:
            raise ConfigError(f"{where}: '{key}' needs {family} = {owner}, but {family} is '{kind}'")


def build_model(values: Mapping[str, str], base: GameModel, where: str = "<config>") -> GameModel:
    """Apply model keys on top of a base model."""
    base_params = base.params
    dist = base.dist
    kind = values.get("distribution")
    try:
        if kind is not None or "lambda" in values or "power_k" in values:
            kind = kind or base.dist.kind
            _check_fit(values, kind, DIST_PARAM_KEYS, "distribution", where)
            if kind == "uniform":
                dist = ValueDistribution.uniform()
            elif kind == "trunc_exp":
                lam = values.get("lambda", base.dist.param_dict.get("lambda", 1.0))
                dist = ValueDistribution.trunc_exp(_float("lambda", str(lam), where))
            elif kind == "power":
                k = values.get("power_k", base.dist.param_dict.get("power_k", 2.0))
                dist = ValueDistribution.power(_float("power_k", str(k), where))
            else:
                raise ConfigError(f"{where}: unknown distribution '{kind}' (uniform | trunc_exp | power)")

        g = base.g
        g_kind = values.get("type_model")
        g_keys = ("step_threshold", "affine_a", "affine_b")
        if g_kind is not None or any(k in values for k in g_keys):
            g_kind = g_kind or base.g.kind
            _check_fit(values, g_kind, TYPE_PARAM_KEYS, "type_model", where)
            current = dict(base.g.params)
            if g_kind == "identity":
                g = TypeModel.identity()
            elif g_kind == "step":
                t = values.get("step_threshold", current.get("step_threshold", 0.5))
                g = TypeModel.step(_float("step_threshold", str(t), where))
            elif g_kind == "affine":
                a = values.get("affine_a", current.get("affine_a", 0.0))
                b = values.get("affine_b", current.get("affine_b", 1.0))
                g = TypeModel.affine(_float("affine_a", str(a), where), _float("affine_b", str(b), where))
            else:
                raise ConfigError(f"{where}: unknown type_model '{g_kind}' (identity | step | affine)")
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e

    numbers = {}
    for key in ("delta", "s1A", "s2A", "s1B", "s2B"):
        numbers[key] = _float(key, values[key], where) if key in values else getattr(base_params, key)
    params = GameParams(**numbers)
    changed = dist is not base.dist or g is not base.g or params != base_params
    return GameModel(dist, g, params, base.name if not changed else f"{base.name}+custom")


def _check_run(config: RunConfig):
    where = config.source
    if not 0.5 <= config.q_min <= 1.0 or not 0.5 <= config.q_max <= 1.0:
        raise ConfigError(f"{where}: q range must lie in [1/2, 1], got [{config.q_min}, {config.q_max}]")
    if config.q_min > config.q_max:
        raise ConfigError(f"{where}: q_min {config.q_min} exceeds q_max {config.q_max}")
    if config.steps < 2:
        raise ConfigError(f"{where}: steps must be >= 2, got {config.steps}")
    if config.oracle_n < 1:
        raise ConfigError(f"{where}: oracle_n must be >= 1, got {config.oracle_n}")
    if config.validation_grid < 3:
        raise ConfigError(f"{where}: validation_grid must be >= 3, got {config.validation_grid}")
    if config.workers < 1:
        raise ConfigError(f"{where}: workers must be >= 1, got {config.workers}")


def resolve(values: Mapping[str, str], where: str) -> RunConfig:
    """Build a RunConfig from already-merged key=value strings."""
    unknown = sorted(set(values) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s): {', '.join(unknown)}")
    try:
        base = get_preset(values.get("preset", DEFAULT_PRESET))
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e
    model = build_model(values, base, where)

    run: Dict[str, Any] = {}
    for key in ("q_min", "q_max"):
        if key in values:
            run[key] = _float(key, values[key], where)
    for key in ("steps", "oracle_n", "oracle_seed", "validation_grid", "workers"):
        if key in values:
            run[key] = _int(key, values[key], where)
    if "epsilons" in values:
        run["epsilons"] = _epsilons(values["epsilons"], where)
    if "out_dir" in values:
        run["out_dir"] = values["out_dir"]

    config = RunConfig(model=model, source=where, **run)
    _check_run(config)
    return config


def load_config(path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Load a run config.

    path=None gives the default preset. Keys from the file are read in order,
    later lines win; PRIVAD_* variables from environ (default os.environ)
    are applied after the file.
    """
    values: Dict[str, str] = {}
    where = "<defaults>"
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")
        where = str(config_path)
        for number, key, value in read_pairs(config_path):
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{where}:{number}: unknown key '{key}'")
            values[key] = value
    values.update(_env_pairs(os.environ if environ is None else environ))
    return resolve(values, where)

"""
Built-in game models and closed-form references.

Presets:
  uniform_eta50    uniform values, g(v)=v, delta=1, payoffs 1/0/0/1 (eta=1/2)
  uniform_eta55    same market, payoffs s1A=.5 s2B=.6 s1B=s2A=.05 (eta=.55)
  uniform_eta45    same market, payoffs s1A=.6 s2B=.5 s1B=s2A=.05 (eta=.45)
  step_coexist_a   uniform values, step g at .1, delta=.8, eta=1/2
  step_coexist_b   uniform values, step g at .05, delta=.9, eta=.984
  trunc_exp_b      truncated exponential lambda=1, g(v)=v, delta=.5, eta=.7
"""

from typing import Callable, Dict, List

from .model import GameModel, GameParams, TypeModel, ValueDistribution

DEFAULT_PRESET = "uniform_eta50"


def _uniform_identity(name: str, params: GameParams) -> GameModel:
    return GameModel(ValueDistribution.uniform(), TypeModel.identity(), params, name)


_BUILDERS: Dict[str, Callable[[], GameModel]] = {
    "uniform_eta50": lambda: _uniform_identity("uniform_eta50", GameParams(1.0, 1.0, 0.0, 0.0, 1.0)),
    "uniform_eta55": lambda: _uniform_identity("uniform_eta55", GameParams(1.0, 0.5, 0.05, 0.05, 0.6)),
    "uniform_eta45": lambda: _uniform_identity("uniform_eta45", GameParams(1.0, 0.6, 0.05, 0.05, 0.5)),
    "step_coexist_a": lambda: GameModel(
        ValueDistribution.uniform(), TypeModel.step(0.1), GameParams(0.8, 1.0, 0.0, 0.0, 1.0), "step_coexist_a"
    ),
    "step_coexist_b": lambda: GameModel(
        ValueDistribution.uniform(), TypeModel.step(0.05), GameParams.with_eta(0.9, 0.984), "step_coexist_b"
    ),
    "trunc_exp_b": lambda: GameModel(
        ValueDistribution.trunc_exp(1.0), TypeModel.identity(), GameParams.with_eta(0.5, 0.7), "trunc_exp_b"
    ),
}


def preset_names() -> List[str]:
    return sorted(_BUILDERS)


def get_preset(name: str) -> GameModel:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"Unknown preset '{name}'; choose one of: {', '.join(preset_names())}") from None
    return builder()


# ---------------------------------------------------------------------------
# Closed forms for the uniform-value markets
# ---------------------------------------------------------------------------

def identity_r1_at_monopoly(q: float) -> float:
    """g(v)=v, uniform values, cutoff 1/2."""
    return (1.0 + 2.0 * q) / 4.0


def identity_r0_at_monopoly(q: float) -> float:
    return (3.0 - 2.0 * q) / 4.0


def identity_r1_on_path(q: float) -> float:
    """g(v)=v, uniform values, delta=1, cutoff 1-q."""
    return (-2.0 * q ** 3 + 5.0 * q ** 2 - 3.0 * q + 1.0) / (4.0 * (q ** 2 - q + 0.5))


def identity_r0_on_path(q: float) -> float:
    return (3.0 - 2.0 * q) / 4.0


def identity_advertiser_utility(q: float) -> float:
    """Payoffs 1/0/0/1 along the delta=1 discriminatory path."""
    return (-4.0 * q ** 3 + 6.0 * q ** 2 - 2.0 * q + 1.0) / 2.0


def identity_cs_on_path(q: float) -> float:
    """Consumer surplus along the delta=1 discriminatory path."""
    return 1.0 - q + q ** 2 / 2.0


def uniform_price_on_path(q: float, delta: float) -> float:
    """p1(q) = 1/2 + (2q - 1) delta / 2 for uniform values."""
    return 0.5 + (2.0 * q - 1.0) * delta / 2.0


def uniform_cutoff_on_path(q: float, delta: float) -> float:
    return 0.5 + (1.0 - 2.0 * q) * delta / 2.0


def step_r0_on_path(q: float, delta: float) -> float:
    """Step g at (1-delta)/2, uniform values, discriminatory path."""
    return 1.0 - q * (1.0 - delta) / (1.0 - (1.0 - 2.0 * q) ** 2 * delta)


def step_r1_on_path(q: float, delta: float) -> float:
    return 1.0 - (1.0 - q) * (1.0 - delta) / (1.0 + (1.0 - 2.0 * q) ** 2 * delta)


def step_r0_at_monopoly(q: float, delta: float) -> float:
    return delta * q + (1.0 - q)


def step_r1_at_monopoly(q: float, delta: float) -> float:
    return (1.0 - q) * delta + q


def step_uniform_a_threshold(eta: float, delta: float) -> float:
    """Uniform-A holds for q <= (1 - eta)/(1 - delta) in the step market (delta < 1)."""
    return (1.0 - eta) / (1.0 - delta)


def step_uniform_b_threshold(eta: float, delta: float) -> float:
    """Uniform-B holds for q < (eta - delta)/(1 - delta) in the step market (delta < 1)."""
    return (eta - delta) / (1.0 - delta)

"""Named parameter sets for every figure, plus JSON configuration parsing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .chains import InvalidParameterError, ModelParams
from .estimator import recommend_params


class ConfigError(InvalidParameterError):
    pass


@dataclass(frozen=True)
class Preset:
    name: str
    params: ModelParams
    snapshot_generations: frozenset = field(default_factory=frozenset)
    description: str = ""


def _p(**kw) -> ModelParams:
    return ModelParams(**kw)


# shared regime: N = n = 100, beta = 1, p_m = 0.01, eps = 1e-6, p_l = 1, T = 2
_LEARN = dict(generations=2000, replicates=1000)
_LOAD = dict(fitness_variant="load", load_coefficient=1.0)

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset("fig1_learning", _p(**_LEARN),
               description="evolution combined with learning, basic fitness"),
        Preset("fig1_pure", _p(generations=500, replicates=1000, learning_enabled=False),
               description="pure evolution, basic fitness"),
        Preset("fig2", _p(generations=1, replicates=10000), frozenset({1}),
               description="distributions within the first generation"),
        Preset("fig3", _p(generations=2000, replicates=10000),
               description="start vs end of generation genotype means"),
        Preset("fig4", _p(**_LEARN), frozenset({2000}),
               description="distributions at G = 2000 (hiding effect)"),
        Preset("fig5_weak_learning", _p(learning_prob=0.5, **_LEARN),
               description="weakened learning, p_l = 0.5"),
        Preset("fig6_turnoff", _p(learning_off_generation=1000, **_LEARN),
               description="learning switched off at G = 1000"),
        Preset("fig7_load", _p(generations=200, replicates=1000, **_LOAD),
               description="learning load fitness, alpha = 1"),
        Preset("fig8", _p(generations=1, replicates=10000, **_LOAD), frozenset({1}),
               description="first-generation distributions with learning load"),
        Preset("fig9", _p(generations=200, replicates=1000, **_LOAD), frozenset({200}),
               description="distributions at G = 200 with learning load"),
        Preset("fig10_hinton", _p(fitness_variant="hinton", **_LEARN),
               description="Hinton-Nowlan style fitness without floor"),
        Preset("fig11_hinton_load",
               _p(fitness_variant="hinton_load", load_coefficient=1.0,
                  generations=200, replicates=10000),
               frozenset({1}),
               description="Hinton-Nowlan style fitness with learning load"),
        Preset("appendix_deterministic",
               _p(generations=1000, replicates=1000, learning_enabled=False,
                  selection_mode="deterministic"),
               description="pure evolution with top-half deterministic selection"),
        Preset("fig1_noisy", _p(fitness_variant="noisy", **_LEARN),
               description="fig1_learning with random-environment fitness"),
        Preset("fig7_noisy_load",
               _p(generations=200, replicates=1000, fitness_variant="noisy_load",
                  load_coefficient=1.0),
               description="fig7_load with random-environment fitness"),
    ]
}

FAST_REPLICATES = 200


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}"
        ) from None


ALIASES = {
    "N": "chain_length",
    "n": "population_size",
    "beta": "selection_intensity",
    "alpha": "load_coefficient",
    "eps": "noise_floor",
    "epsilon": "noise_floor",
    "p_m": "mutation_prob",
    "p_l": "learning_prob",
    "T": "lifetime",
    "G": "generations",
    "R": "replicates",
    "seed": "base_seed",
}


def normalize_keys(raw: Mapping) -> dict:
    """Map aliases onto field names; reject unknown or doubly-given keys."""
    known = set(ModelParams.field_names())
    out: dict = {}
    for key, value in raw.items():
        name = ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        if name in out:
            raise ConfigError(f"configuration key {name!r} given more than once")
        out[name] = value
    return out


def resolve_params(values: Mapping, base: Optional[ModelParams] = None) -> ModelParams:
    """Build params from ``values``.

    Without a ``base``, fields not given fall back to the recommended
    (n, p_m, beta) for the chain length and to the dataclass defaults.
    """
    values = normalize_keys(values)
    if base is not None:
        merged = {**base.to_dict(), **values}
    else:
        merged = dict(values)
        N = merged.get("chain_length", ModelParams.chain_length)
        if isinstance(N, int) and not isinstance(N, bool) and N >= 1:
            n, p_m, beta = recommend_params(N)
            merged.setdefault("population_size", n)
            merged.setdefault("mutation_prob", p_m)
            merged.setdefault("selection_intensity", beta)
    try:
        return ModelParams(**merged)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path: str | Path | None = None,
                 overrides: Optional[Mapping] = None,
                 base: Optional[ModelParams] = None) -> ModelParams:
    """Read a flat JSON parameter file and apply ``overrides`` on top.

    A results sidecar (``<preset>_meta.json``) is accepted too: its
    ``params`` object is used.
    """
    values: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        if isinstance(data.get("params"), dict):
            data = data["params"]
        values.update(normalize_keys(data))
    if overrides:
        values.update(normalize_keys(overrides))
    return resolve_params(values, base)


def parse_assignment(text: str) -> tuple[str, object]:
    """``key=value`` from the command line; the value is read as JSON if possible."""
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value

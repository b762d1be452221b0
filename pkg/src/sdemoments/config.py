"""JSON model files.

Explicit form::

    {"dimension": 1,
     "drift": [[{"coeff": -1.0, "exponents": [1]}]],
     "diffusion": [[[{"coeff": 0.25, "exponents": [0]}]]],
     "origin": [1.0]}

Preset form::

    {"preset": "vdp", "params": {"epsilon": 1.0, "x_ini_1": 0.5}}

A preset takes its origin from its ``x_ini`` parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .generator import SdeModel
from .models import preset, preset_params_dict
from .polynomial import Polynomial


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    model: SdeModel
    origin: tuple[float, ...]
    preset: str | None = None
    params: Any = None


def _poly_from_json(data, dimension: int, where: str) -> Polynomial:
    if not isinstance(data, list):
        raise ConfigError(f"{where}: a polynomial is a list of {{coeff, exponents}} terms")
    terms: dict[tuple[int, ...], float] = {}
    for term in data:
        try:
            coeff = float(term["coeff"])
            exps = tuple(int(e) for e in term["exponents"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: malformed term {term!r}") from exc
        if len(exps) != dimension or min(exps) < 0:
            raise ConfigError(f"{where}: exponents {list(exps)} must be {dimension} non-negative integers")
        terms[exps] = terms.get(exps, 0.0) + coeff
    return Polynomial(dimension, terms)


def _poly_to_json(p: Polynomial) -> list[dict]:
    return [{"coeff": float(c), "exponents": list(k)} for k, c in p.terms.items()]


def config_from_dict(data: dict) -> ModelConfig:
    if not isinstance(data, dict):
        raise ConfigError("model config must be a JSON object")
    explicit = {"dimension", "drift", "diffusion", "origin"} & data.keys()
    if "preset" in data:
        if explicit:
            raise ConfigError(f"give either a preset or explicit polynomials, not both (found {sorted(explicit)})")
        try:
            model, origin, params = preset(data["preset"], **data.get("params", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return ModelConfig(model, tuple(origin), data["preset"], params)

    missing = {"dimension", "drift", "diffusion", "origin"} - data.keys()
    if missing:
        raise ConfigError(f"missing keys: {sorted(missing)}")
    D = data["dimension"]
    if not isinstance(D, int) or D < 1:
        raise ConfigError("dimension must be a positive integer")
    drift, diffusion, origin = data["drift"], data["diffusion"], data["origin"]
    if len(drift) != D or len(diffusion) != D or any(len(row) != D for row in diffusion):
        raise ConfigError(f"drift needs {D} entries and diffusion {D}x{D}")
    if len(origin) != D:
        raise ConfigError(f"origin needs {D} entries")
    try:
        model = SdeModel(
            drift=[_poly_from_json(p, D, f"drift[{i}]") for i, p in enumerate(drift)],
            diffusion=[
                [_poly_from_json(p, D, f"diffusion[{i}][{j}]") for j, p in enumerate(row)]
                for i, row in enumerate(diffusion)
            ],
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ModelConfig(model, tuple(float(x) for x in origin))


def config_to_dict(cfg: ModelConfig, explicit: bool = True) -> dict:
    """Serializable form; ``explicit=False`` keeps a preset reference when there is one."""
    if not explicit and cfg.preset is not None:
        return {"preset": cfg.preset, "params": preset_params_dict(cfg.params)}
    m = cfg.model
    return {
        "dimension": m.dimension,
        "drift": [_poly_to_json(p) for p in m.drift],
        "diffusion": [[_poly_to_json(p) for p in row] for row in m.diffusion],
        "origin": [float(x) for x in cfg.origin],
    }


def load_config(path: str | Path) -> ModelConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def save_config(cfg: ModelConfig, path: str | Path, explicit: bool = True) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg, explicit), indent=2) + "\n")

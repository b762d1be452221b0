"""Preset models: Ornstein-Uhlenbeck and the noisy van der Pol oscillator."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .generator import SdeModel
from .polynomial import Polynomial


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class OUParams:
    """``dX = -gamma X dt + sigma dW`` started at ``x_ini``."""

    gamma: float = 1.0
    sigma: float = 0.5
    x_ini: float = 1.0

    def __post_init__(self):
        _require_positive(gamma=self.gamma, sigma=self.sigma)

    @property
    def origin(self) -> tuple[float]:
        return (self.x_ini,)


@dataclass(frozen=True)
class VanDerPolParams:
    """``dX1 = X2 dt + nu11 dW1``, ``dX2 = (eps X2 (1 - X1^2) - X1) dt + nu22 dW2``."""

    epsilon: float = 1.0
    nu11: float = 0.5
    nu22: float = 0.5
    x_ini_1: float = 0.5
    x_ini_2: float = 1.0

    def __post_init__(self):
        _require_positive(epsilon=self.epsilon, nu11=self.nu11, nu22=self.nu22)

    @property
    def origin(self) -> tuple[float, float]:
        return (self.x_ini_1, self.x_ini_2)


def build_ou(params: OUParams = OUParams()) -> SdeModel:
    x = Polynomial.variable(1, 0)
    return SdeModel(
        drift=(-params.gamma * x,),
        diffusion=((Polynomial.constant(1, params.sigma**2),),),
    )


def build_van_der_pol(params: VanDerPolParams = VanDerPolParams()) -> SdeModel:
    eps = params.epsilon
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    zero = Polynomial.zero(2)
    return SdeModel(
        drift=(x2, eps * x2 * (1 - x1 * x1) - x1),
        diffusion=(
            (Polynomial.constant(2, params.nu11**2), zero),
            (zero, Polynomial.constant(2, params.nu22**2)),
        ),
    )


PRESETS = {
    "ou": (OUParams, build_ou),
    "vdp": (VanDerPolParams, build_van_der_pol),
}


def preset(name: str, **params) -> tuple[SdeModel, tuple[float, ...], object]:
    """``(model, origin, params)`` for a named preset; unspecified params take
    the benchmark defaults."""
    try:
        params_cls, build = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    p = params_cls(**params)
    return build(p), p.origin, p


def preset_params_dict(params) -> dict:
    return asdict(params)

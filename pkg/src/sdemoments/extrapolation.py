"""Two-point extrapolation of finite-M estimates to M -> infinity."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EstimatePair:
    """Estimates ``m1`` at ``M1`` steps and ``m2`` at ``M2`` steps."""

    m1: float
    m2: float
    M1: int
    M2: int

    def __post_init__(self):
        if self.M1 == self.M2:
            raise ValueError("extrapolation needs two different step counts")
        if self.M1 < 1 or self.M2 < 1:
            raise ValueError("step counts must be positive")


def extrapolate(pair: EstimatePair, order: int) -> float:
    """Remove an error term proportional to ``1/M**order``.

    Assumes ``m(M) = m + C / M**order`` and solves for ``m`` from the two
    estimates.  Applied as is even if the estimates straddle the limit.
    """
    if order < 1:
        raise ValueError("order must be positive")
    a, b = pair.M1**order, pair.M2**order
    return pair.m2 - a * (pair.m1 - pair.m2) / (b - a)


def extrapolate1(pair: EstimatePair) -> float:
    return extrapolate(pair, 1)


def extrapolate2(pair: EstimatePair) -> float:
    return extrapolate(pair, 2)

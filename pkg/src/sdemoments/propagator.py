"""Sparse propagation of expansion coefficients over the lattice.

The coefficient vector of ``phi(x, t) = sum_n P(n, t) (x - x_ini)^n`` starts as
the unit vector at ``alpha``; after ``M`` steps of an approximation of
``exp(T L / M)`` the entry at ``n = 0`` is ``E[(X(T) - x_ini)^alpha]``.

Four steppers are provided:

========== =============================================== =========
method     one step                                        h
========== =============================================== =========
explicit1  1 + hL                                          T/M
explicit2  1 + hL + (hL)^2/2                               T/M
implicit1  local 1st-order approximation of (1 - hL)^-1    T/M
implicit2  local 2nd-order approximation of (1 - hL)^-1,   T/(2M)
           applied after 1 + hL
========== =============================================== =========
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .generator import Generator
from .polynomial import MultiIndex, as_multi_index

#: ``|1 - h L_nn|`` below this is treated as a singular step.
SINGULAR_TOL = 1e-8
#: Any weight above this aborts a run.
DIVERGENCE_LIMIT = 1e100
#: Walk enumeration is exponential in M.
MAX_ENUMERATION_STEPS = 8


class NumericalError(ArithmeticError):
    """Base class for failures of the time stepping."""


class SingularDiagonalError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


# -- weight maps --------------------------------------------------------------


def _encode(keys: np.ndarray) -> np.ndarray:
    D = keys.shape[1]
    bits = 62 // D
    if keys.size and keys.max() >= (1 << bits):
        raise OverflowError(f"lattice coordinate exceeds 2**{bits}")
    codes = np.zeros(len(keys), dtype=np.int64)
    for d in range(D):
        codes = (codes << bits) | keys[:, d]
    return codes


class WeightMap:
    """Finite map from lattice points to real weights.

    Stored as a ``(K, D)`` integer array of points sorted in lexicographic
    order and a matching array of nonzero values.
    """

    __slots__ = ("keys", "values")

    def __init__(self, keys: np.ndarray, values: np.ndarray):
        self.keys = keys
        self.values = values

    @classmethod
    def merge(
        cls,
        parts: Iterable[tuple[np.ndarray, np.ndarray]],
        dimension: int,
    ) -> WeightMap:
        """Sum contributions ``(points, values)``, dropping exact zeros."""
        parts = list(parts)
        keys = np.concatenate([k for k, _ in parts] or [np.zeros((0, dimension), np.int64)])
        vals = np.concatenate([v for _, v in parts] or [np.zeros(0)])
        keys = keys.reshape(-1, dimension).astype(np.int64, copy=False)
        if len(keys) == 0:
            return cls(keys, vals.astype(float))
        uniq, first, inv = np.unique(_encode(keys), return_index=True, return_inverse=True)
        sums = np.bincount(inv.ravel(), weights=vals, minlength=len(uniq))
        keep = sums != 0
        return cls(keys[first][keep], sums[keep])

    @classmethod
    def from_dict(cls, mapping: Mapping[Sequence[int], float], dimension: int | None = None) -> WeightMap:
        if dimension is None:
            if not mapping:
                raise ValueError("dimension is required for an empty map")
            dimension = len(next(iter(mapping)))
        keys = np.array(
            [as_multi_index(k, dimension) for k in mapping], dtype=np.int64
        ).reshape(-1, dimension)
        vals = np.array([float(v) for v in mapping.values()])
        return cls.merge([(keys, vals)], dimension)

    @classmethod
    def unit(cls, alpha: Sequence[int]) -> WeightMap:
        alpha = as_multi_index(alpha)
        return cls(np.array([alpha], dtype=np.int64), np.array([1.0]))

    @property
    def dimension(self) -> int:
        return self.keys.shape[1]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: Sequence[int]) -> float:
        n = np.asarray(tuple(n), dtype=np.int64)
        hit = np.flatnonzero((self.keys == n).all(axis=1))
        return float(self.values[hit[0]]) if len(hit) else 0.0

    def to_dict(self) -> dict[MultiIndex, float]:
        return {tuple(int(x) for x in k): float(v) for k, v in zip(self.keys, self.values)}

    def __add__(self, other: WeightMap) -> WeightMap:
        return WeightMap.merge(
            [(self.keys, self.values), (other.keys, other.values)], self.dimension
        )

    def __sub__(self, other: WeightMap) -> WeightMap:
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> WeightMap:
        return WeightMap.merge([(self.keys, self.values * scalar)], self.dimension)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.abs(self.values).max()) if len(self) else 0.0

    def __repr__(self) -> str:
        return f"WeightMap({self.to_dict()!r})"


# -- schemes and plans --------------------------------------------------------


class Method(str, Enum):
    EXPLICIT1 = "explicit1"
    EXPLICIT2 = "explicit2"
    IMPLICIT1 = "implicit1"
    IMPLICIT2 = "implicit2"

    @property
    def order(self) -> int:
        return 2 if self in (Method.EXPLICIT2, Method.IMPLICIT2) else 1

    @property
    def moves_per_step(self) -> int:
        """Maximum number of lattice moves chained within one step."""
        return {"explicit1": 1, "explicit2": 2, "implicit1": 1, "implicit2": 3}[self.value]


@dataclass(frozen=True)
class StepScheme:
    method: Method
    keep_two_hop_denominator: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.keep_two_hop_denominator and self.method is not Method.IMPLICIT2:
            raise ValueError("keep_two_hop_denominator only applies to implicit2")


@dataclass(frozen=True)
class RunPlan:
    T: float
    M: int
    alpha: tuple[int, ...]
    scheme: StepScheme

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"horizon T must be positive, got {self.T}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"step count M must be a positive integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "alpha", as_multi_index(self.alpha))
        if not isinstance(self.scheme, StepScheme):
            object.__setattr__(self, "scheme", StepScheme(self.scheme))

    @property
    def step_size(self) -> float:
        if self.scheme.method is Method.IMPLICIT2:
            return self.T / (2 * self.M)
        return self.T / self.M


# -- kernels ------------------------------------------------------------------


def _inside(points: np.ndarray, cutoff: int | None) -> np.ndarray:
    ok = (points >= 0).all(axis=1)
    if cutoff is not None:
        ok &= (points < cutoff).all(axis=1)
    return ok


def _moves(g: Generator, keys: np.ndarray, cutoff: int | None):
    """Yield ``(shift, mask, targets, gamma)`` for every nonzero move out of ``keys``."""
    for shift, gamma in g.moves_many(keys):
        targets = keys + shift
        ok = (gamma != 0) & _inside(targets, cutoff)
        yield shift, ok, targets[ok], gamma[ok]


def _denominator(g: Generator, keys: np.ndarray, h: float) -> np.ndarray:
    d = 1.0 - h * g.diag_many(keys)
    _check_denominator(d, keys, h)
    return d


def _check_denominator(d: np.ndarray, keys: np.ndarray, h: float) -> None:
    bad = np.abs(d) < SINGULAR_TOL
    if bad.any():
        n = tuple(int(x) for x in keys[np.argmax(bad)])
        raise SingularDiagonalError(
            f"1 - h*L_nn vanishes at n={n} for h={h:g}; use a smaller step"
        )


def apply_generator(g: Generator, w: WeightMap, cutoff: int | None = None) -> WeightMap:
    """``L w`` with ``out[n'] = sum_n L[n', n] w[n]``."""
    keys, vals = w.keys, w.values
    parts = [(keys, g.diag_many(keys) * vals)]
    for _, ok, targets, gamma in _moves(g, keys, cutoff):
        parts.append((targets, gamma * vals[ok]))
    return WeightMap.merge(parts, w.dimension)


def step_explicit1(g: Generator, w: WeightMap, h: float, cutoff: int | None = None) -> WeightMap:
    lw = apply_generator(g, w, cutoff)
    return WeightMap.merge([(w.keys, w.values), (lw.keys, h * lw.values)], w.dimension)


def step_explicit2(g: Generator, w: WeightMap, h: float, cutoff: int | None = None) -> WeightMap:
    lw = apply_generator(g, w, cutoff)
    llw = apply_generator(g, lw, cutoff)
    return WeightMap.merge(
        [(w.keys, w.values), (lw.keys, h * lw.values), (llw.keys, 0.5 * h * h * llw.values)],
        w.dimension,
    )


def step_implicit1(g: Generator, w: WeightMap, h: float, cutoff: int | None = None) -> WeightMap:
    """Local first-order resolvent: ``1/d_n`` on the diagonal and
    ``h L[n', n] / (d_n' d_n)`` off it, with ``d_n = 1 - h L_nn``."""
    keys, vals = w.keys, w.values
    d = _denominator(g, keys, h)
    parts = [(keys, vals / d)]
    for _, ok, targets, gamma in _moves(g, keys, cutoff):
        d_to = _denominator(g, targets, h)
        parts.append((targets, h * gamma * vals[ok] / (d_to * d[ok])))
    return WeightMap.merge(parts, w.dimension)


def resolvent2_apply(
    g: Generator,
    w: WeightMap,
    h: float,
    keep_two_hop_denominator: bool = False,
    cutoff: int | None = None,
) -> WeightMap:
    """Apply the local second-order approximation of ``(1 - hL)^-1``.

    Diagonal: ``1 / (1 - h L_nn - h^2 sum_{m != n} L[n, m] L[m, n])``.
    Off-diagonal: ``h L[n', n] / (d_n' d_n) + h^2 sum_{m != n, n'} L[n', m] L[m, n]``.
    With ``keep_two_hop_denominator`` the two-move term is additionally
    divided by ``d_n' d_m d_n``.  Points outside ``cutoff`` are treated as
    absent, which makes the result the same approximation built from the
    truncated matrix.
    """
    keys, vals = w.keys, w.values
    D = w.dimension
    d = _denominator(g, keys, h)

    # out-and-back pairs n -> n+v -> n
    back = {ev.shift: k for k, ev in enumerate(g.events)}
    loop = np.zeros(len(keys))
    for shift, gamma in g.moves_many(keys):
        k_back = back.get(tuple(-shift))
        if k_back is None:
            continue
        mid = keys + shift
        ok = (gamma != 0) & _inside(mid, cutoff)
        loop[ok] += gamma[ok] * g._gamma_many(k_back, mid[ok])
    eff = d - h * h * loop
    _check_denominator(eff, keys, h)

    parts = [(keys, vals / eff)]
    for shift1, ok1, mid, gamma1 in _moves(g, keys, cutoff):
        if not ok1.any():
            continue
        src_vals = vals[ok1]
        d_src = d[ok1]
        d_mid = _denominator(g, mid, h)
        parts.append((mid, h * gamma1 * src_vals / (d_mid * d_src)))
        for shift2, ok2, targets, gamma2 in _moves(g, mid, cutoff):
            # a move straight back to n belongs to the diagonal
            if not (shift1 + shift2).any() or not ok2.any():
                continue
            contrib = h * h * gamma1[ok2] * gamma2 * src_vals[ok2]
            if keep_two_hop_denominator:
                contrib /= _denominator(g, targets, h) * d_mid[ok2] * d_src[ok2]
            parts.append((targets, contrib))
    return WeightMap.merge(parts, D)


def step_implicit2(
    g: Generator,
    w: WeightMap,
    h_half: float,
    keep_two_hop_denominator: bool = False,
    cutoff: int | None = None,
) -> WeightMap:
    """Half step of ``1 + hL`` followed by the approximate resolvent."""
    forward = step_explicit1(g, w, h_half, cutoff)
    return resolvent2_apply(g, forward, h_half, keep_two_hop_denominator, cutoff)


def step(g: Generator, w: WeightMap, scheme: StepScheme, h: float, cutoff: int | None = None) -> WeightMap:
    method = scheme.method
    if method is Method.EXPLICIT1:
        return step_explicit1(g, w, h, cutoff)
    if method is Method.EXPLICIT2:
        return step_explicit2(g, w, h, cutoff)
    if method is Method.IMPLICIT1:
        return step_implicit1(g, w, h, cutoff)
    return step_implicit2(g, w, h, scheme.keep_two_hop_denominator, cutoff)


# -- drivers ------------------------------------------------------------------


def propagate(
    g: Generator,
    plan: RunPlan,
    prune_below: float = 0.0,
    reachability_pruning: bool = True,
) -> WeightMap:
    """Weight map after ``plan.M`` steps starting from the unit map at alpha.

    ``reachability_pruning`` drops points that cannot reach ``n = 0`` in the
    remaining steps; this leaves the weight at ``n = 0`` unchanged.
    ``prune_below`` > 0 additionally drops small weights, which is an
    approximation.
    """
    if len(plan.alpha) != g.dimension:
        raise ValueError(f"alpha {plan.alpha} does not match dimension {g.dimension}")
    h = plan.step_size
    reach = plan.scheme.method.moves_per_step * max(g.max_descent(), 0)
    w = WeightMap.unit(plan.alpha)
    for k in range(plan.M):
        w = step(g, w, plan.scheme, h)
        keep = np.ones(len(w), dtype=bool)
        if reachability_pruning:
            keep &= w.keys.sum(axis=1) <= reach * (plan.M - k - 1)
        if prune_below > 0:
            keep &= np.abs(w.values) >= prune_below
        if not keep.all():
            w = WeightMap(w.keys[keep], w.values[keep])
        if not np.all(np.isfinite(w.values)) or w.max_abs() > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"weights exceeded {DIVERGENCE_LIMIT:g} after step {k + 1} of {plan.M} "
                f"({plan.scheme.method.value}); the scheme is unstable at this M"
            )
    return w


def run(g: Generator, plan: RunPlan, prune_below: float = 0.0) -> float:
    """Estimate of ``E[(X(T) - x_ini)^alpha]``: the weight left at ``n = 0``."""
    return propagate(g, plan, prune_below)[(0,) * g.dimension]


def enumerate_walks(g: Generator, plan: RunPlan) -> float:
    """Sum over every explicit-1st-order walk from alpha to 0, one by one.

    Each step either stays put (factor 1) or takes event ``r`` (factor
    ``h * gamma_r(n)``).  Exponential in ``M``; meant as a cross-check of
    :func:`run`.
    """
    if plan.scheme.method is not Method.EXPLICIT1:
        raise ValueError("walk enumeration is defined for explicit1 only")
    if plan.M > MAX_ENUMERATION_STEPS:
        raise ValueError(f"M={plan.M} is too large to enumerate (max {MAX_ENUMERATION_STEPS})")
    h = plan.step_size
    zero = (0,) * g.dimension
    choices = [None, *g.events]
    total = 0.0
    for walk in itertools.product(choices, repeat=plan.M):
        n = plan.alpha
        weight = 1.0
        for ev in walk:
            if ev is None:
                continue
            weight *= h * ev.gamma.evaluate(n)
            if weight == 0:
                break
            n = tuple(a + b for a, b in zip(n, ev.shift))
        if weight != 0 and n == zero:
            total += weight
    return total


def recover_raw_moment(
    shifted: Mapping[Sequence[int], float],
    alpha: Sequence[int],
    origin: Sequence[float],
) -> float:
    """``E[X^alpha]`` from the shifted moments ``E[(X - origin)^beta]``, ``beta <= alpha``."""
    alpha = as_multi_index(alpha)
    table = {tuple(k): v for k, v in shifted.items()}
    total = 0.0
    for beta in itertools.product(*(range(a + 1) for a in alpha)):
        if beta not in table:
            raise KeyError(f"missing shifted moment for beta={beta}")
        coeff = 1.0
        for a, b, o in zip(alpha, beta, origin):
            coeff *= math.comb(a, b) * o ** (a - b)
        total += coeff * table[beta]
    return total


def raw_moment(g: Generator, plan: RunPlan) -> float:
    """``E[X(T)^alpha]`` by running every lower shifted moment."""
    shifted = {}
    for beta in itertools.product(*(range(a + 1) for a in plan.alpha)):
        shifted[beta] = run(g, RunPlan(plan.T, plan.M, beta, plan.scheme))
    return recover_raw_moment(shifted, plan.alpha, g.origin)

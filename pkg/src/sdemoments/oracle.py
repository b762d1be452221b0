"""Reference values that do not go through the lattice propagator.

* :func:`ou_closed_form` -- exact shifted moments of the OU process.
* :func:`ode_oracle` -- RK4 on the coefficient ODEs ``dP/dt = L P`` truncated
  to the box ``0 <= n_d < cutoff``; transitions leaving the box are dropped.
* :func:`mc_oracle` -- Euler-Maruyama Monte Carlo.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .generator import Generator, SdeModel
from .polynomial import Polynomial, as_multi_index


def ou_closed_form(gamma: float, sigma: float, x_ini: float, T: float, order: int) -> float:
    """``E[(X_T - x_ini)^order]`` for ``dX = -gamma X dt + sigma dW``, ``X_0 = x_ini``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")
    decay = math.exp(-gamma * T)
    if order == 1:
        return x_ini * decay - x_ini
    if order == 2:
        return (
            sigma**2 / (2 * gamma) * (1 - decay**2)
            + x_ini**2 * decay**2
            - 2 * x_ini**2 * decay
            + x_ini**2
        )
    raise ValueError(f"closed form available for orders 1 and 2, not {order}")


@dataclass(frozen=True)
class OdeOracleConfig:
    T: float
    cutoff: int = 15
    dt: float = 1e-6

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be positive")
        if not 0 < self.dt <= self.T:
            raise ValueError("dt must lie in (0, T]")


def box_states(dimension: int, cutoff: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(cutoff), repeat=dimension))


def box_matrix(g: Generator, cutoff: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Dense ``[L]_{n'n}`` restricted to the box, with its state ordering."""
    states = box_states(g.dimension, cutoff)
    index = {s: i for i, s in enumerate(states)}
    A = np.zeros((len(states), len(states)))
    for j, n in enumerate(states):
        A[j, j] = g.diag_element(n)
        for target, value in g.offdiag_targets(n):
            i = index.get(target)
            if i is not None:
                A[i, j] += value
    return states, A


def ode_oracle(g: Generator, alpha: Sequence[int], cfg: OdeOracleConfig) -> float:
    """``P_alpha(0, T)`` from classical RK4 on the truncated coefficient ODEs.

    The step is the largest ``T / N <= cfg.dt``.  For a linear system one RK4
    step is multiplication by ``I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24``,
    so the N steps are taken as a matrix power.
    """
    alpha = as_multi_index(alpha, g.dimension)
    if max(alpha) >= cfg.cutoff:
        raise ValueError(f"alpha {alpha} lies outside the cutoff box {cfg.cutoff}")
    states, A = box_matrix(g, cfg.cutoff)
    n_steps = max(1, math.ceil(cfg.T / cfg.dt - 1e-9))
    hA = (cfg.T / n_steps) * A
    step = np.eye(len(states))
    term = np.eye(len(states))
    for k in range(1, 5):
        term = term @ hA / k
        step = step + term
    P = np.linalg.matrix_power(step, n_steps)
    return float(P[states.index((0,) * g.dimension), states.index(alpha)])


@dataclass(frozen=True)
class McOracleConfig:
    paths: int = 10**6
    dt: float = 1e-3
    seed: int = 0
    chunk: int = 1 << 14

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("paths must be at least 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


def _constant_noise_factor(model: SdeModel) -> np.ndarray:
    """``B`` with ``B B^T`` equal to the (constant) diffusion matrix."""
    D = model.dimension
    S = np.zeros((D, D))
    for i in range(D):
        for j in range(D):
            p = model.diffusion[i][j]
            if p.degree > 0:
                raise ValueError("Monte Carlo oracle supports constant diffusion only")
            S[i, j] = float(p.evaluate((0.0,) * D))
    vals, vecs = np.linalg.eigh(S)
    if vals.min() < -1e-12 * max(1.0, abs(vals).max()):
        raise ValueError("diffusion matrix is not positive semidefinite")
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


class _DriftEvaluator:
    """Drift evaluation on a ``(D, paths)`` state array, sharing coordinate powers."""

    def __init__(self, drift: Sequence[Polynomial]):
        self.terms = [
            [(tuple(int(m) for m in exps), float(c)) for exps, c in p.terms.items()]
            for p in drift
        ]
        self.max_power = [
            max((exps[d] for terms in self.terms for exps, _ in terms), default=0)
            for d in range(len(drift))
        ]

    def __call__(self, X: np.ndarray, out: np.ndarray) -> np.ndarray:
        powers = []
        for d, top in enumerate(self.max_power):
            col = [None, X[d]]
            for _ in range(2, top + 1):
                col.append(col[-1] * X[d])
            powers.append(col)
        for acc, terms in zip(out, self.terms):
            acc.fill(0.0)
            for exps, c in terms:
                factors = [powers[d][m] for d, m in enumerate(exps) if m]
                if not factors:
                    acc += c
                elif len(factors) == 1 and c == 1.0:
                    acc += factors[0]
                else:
                    term = c * factors[0]
                    for f in factors[1:]:
                        term *= f
                    acc += term
        return out


def mc_oracle_many(
    model: SdeModel,
    x_ini: Sequence[float],
    alphas: Sequence[Sequence[int]],
    T: float,
    cfg: McOracleConfig,
) -> list[tuple[float, float]]:
    """Sample mean and standard error of ``prod_d (X_d(T) - x_ini_d)^alpha_d``
    for each ``alpha``, all from the same simulated paths.

    Paths are simulated in fixed-size chunks; chunk ``k`` draws from a Philox
    stream seeded by ``(cfg.seed, k)``, so results depend only on the seed,
    path count and chunk size.
    """
    D = model.dimension
    alphas = [np.array(as_multi_index(a, D)) for a in alphas]
    x0 = np.asarray(x_ini, dtype=float)
    if x0.shape != (D,):
        raise ValueError(f"x_ini must have length {D}")
    B = _constant_noise_factor(model)
    diagonal = np.array_equal(B, np.diag(np.diag(B)))
    noisy = bool(np.any(B))
    drift = _DriftEvaluator(model.drift)
    n_steps = max(1, math.ceil(T / cfg.dt - 1e-9))
    h = T / n_steps
    sqrt_h = math.sqrt(h)

    samples = np.empty((len(alphas), cfg.paths))
    for k, start in enumerate(range(0, cfg.paths, cfg.chunk)):
        size = min(cfg.chunk, cfg.paths - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, k])))
        # one row per coordinate keeps every update contiguous
        X = np.repeat(x0[:, None], size, axis=1)
        a = np.empty_like(X)
        Z = np.empty_like(X)
        scale = sqrt_h * np.diag(B)[:, None]
        for _ in range(n_steps):
            drift(X, a)
            a *= h
            X += a
            if noisy:
                rng.standard_normal(out=Z)
                if diagonal:
                    Z *= scale
                    X += Z
                else:
                    X += sqrt_h * (B @ Z)
        dX = X - x0[:, None]
        for i, alpha in enumerate(alphas):
            samples[i, start:start + size] = np.prod(dX ** alpha[:, None], axis=0)

    out = []
    for row in samples:
        mean = float(row.mean())
        se = 0.0 if cfg.paths == 1 else float(row.std(ddof=1) / math.sqrt(cfg.paths))
        out.append((mean, se))
    return out


def mc_oracle(
    model: SdeModel,
    x_ini: Sequence[float],
    alpha: Sequence[int],
    T: float,
    cfg: McOracleConfig,
) -> tuple[float, float]:
    """Monte Carlo estimate of one shifted moment; see :func:`mc_oracle_many`."""
    return mc_oracle_many(model, x_ini, [alpha], T, cfg)[0]

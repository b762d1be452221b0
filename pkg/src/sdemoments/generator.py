"""Event-table form of the backward Kolmogorov generator.

For a model ``dX = a(X) dt + B(X) dW`` the adjoint operator

    L = sum_i a_i d_i + 1/2 sum_ij [B B^T]_ij d_i d_j

acts on the shifted monomial basis ``(x - x_ini)^n`` as a lattice process:
each monomial ``c * y^m`` of a shifted drift component ``a_i`` sends
``n -> n + m - e_i`` with weight ``c * n_i``; each monomial of
``1/2 [BB^T]_ij`` sends ``n -> n + m - e_i - e_j`` with weight
``c * n_i * (n_j - delta_ij)``.  Terms with the same displacement are merged
into a single :class:`Event`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .polynomial import MultiIndex, Polynomial, as_multi_index


@dataclass(frozen=True)
class SdeModel:
    """Polynomial drift vector and diffusion matrix ``B B^T``."""

    drift: tuple[Polynomial, ...]
    diffusion: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        drift = tuple(self.drift)
        diffusion = tuple(tuple(row) for row in self.diffusion)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "diffusion", diffusion)
        D = len(drift)
        if D == 0:
            raise ValueError("model needs at least one state variable")
        if len(diffusion) != D or any(len(row) != D for row in diffusion):
            raise ValueError(f"diffusion must be a {D}x{D} matrix of polynomials")
        for p in (*drift, *(q for row in diffusion for q in row)):
            if p.dimension != D:
                raise ValueError(
                    f"polynomial of dimension {p.dimension} in a {D}-dimensional model"
                )
        for i in range(D):
            for j in range(i + 1, D):
                if diffusion[i][j] != diffusion[j][i]:
                    raise ValueError(f"diffusion matrix is not symmetric at ({i}, {j})")

    @property
    def dimension(self) -> int:
        return len(self.drift)


@dataclass(frozen=True)
class Event:
    """One lattice move: weight ``gamma(n)`` and displacement ``shift``."""

    gamma: Polynomial
    shift: tuple[int, ...]


def _n_poly(D: int, i: int) -> Polynomial:
    return Polynomial.variable(D, i)


def raw_events(model: SdeModel, origin: Sequence) -> list[Event]:
    """Unmerged events, one per monomial of the shifted coefficients."""
    D = model.dimension
    if len(origin) != D:
        raise ValueError(f"origin has length {len(origin)}, model dimension is {D}")
    events = []
    for i, a in enumerate(model.drift):
        n_i = _n_poly(D, i)
        for m, c in a.shift(origin).terms.items():
            v = list(m)
            v[i] -= 1
            events.append(Event(n_i * c, tuple(v)))
    for i in range(D):
        for j in range(D):
            n_i = _n_poly(D, i)
            n_j = _n_poly(D, j)
            weight = n_i * (n_j - 1) if i == j else n_i * n_j
            for m, c in model.diffusion[i][j].shift(origin).terms.items():
                v = list(m)
                v[i] -= 1
                v[j] -= 1
                # division keeps symbolic coefficients exact
                events.append(Event(weight * (c / 2), tuple(v)))
    return events


@dataclass(frozen=True)
class Generator:
    """Merged event table of the adjoint operator around ``origin``."""

    origin: tuple
    events: tuple[Event, ...]
    dimension: int
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # numeric (exponents, coeffs) per event; symbolic coefficients skip this
        try:
            compiled = tuple(
                (
                    np.array(ev.shift, dtype=np.int64),
                    np.array(list(ev.gamma.terms), dtype=float).reshape(-1, self.dimension),
                    np.array(list(ev.gamma.terms.values()), dtype=float),
                )
                for ev in self.events
            )
        except TypeError:
            compiled = None
        object.__setattr__(self, "_compiled", compiled)

    @property
    def zero_shift(self) -> tuple[int, ...]:
        return (0,) * self.dimension

    def shifts(self) -> list[tuple[int, ...]]:
        return [ev.shift for ev in self.events]

    # -- scalar queries ------------------------------------------------------

    def diag_element(self, n: Sequence[int]) -> float:
        n = as_multi_index(n, self.dimension)
        return sum(
            (ev.gamma.evaluate(n) for ev in self.events if ev.shift == self.zero_shift),
            0.0,
        )

    def offdiag_targets(self, n: Sequence[int]) -> list[tuple[MultiIndex, float]]:
        n = as_multi_index(n, self.dimension)
        out: dict[MultiIndex, float] = {}
        for ev in self.events:
            if ev.shift == self.zero_shift:
                continue
            target = tuple(a + b for a, b in zip(n, ev.shift))
            if min(target) < 0:
                continue
            value = ev.gamma.evaluate(n)
            if value == 0:
                continue
            out[target] = out.get(target, 0.0) + value
        return [(k, v) for k, v in out.items() if v != 0]

    def matrix_element(self, n_to: Sequence[int], n_from: Sequence[int]) -> float:
        """``[L]_{n_to, n_from}``."""
        n_to = as_multi_index(n_to, self.dimension)
        n_from = as_multi_index(n_from, self.dimension)
        v = tuple(a - b for a, b in zip(n_to, n_from))
        return sum((ev.gamma.evaluate(n_from) for ev in self.events if ev.shift == v), 0.0)

    # -- vectorized kernels used by the propagator ---------------------------

    def _gamma_many(self, k: int, keys: np.ndarray) -> np.ndarray:
        _, exps, coeffs = self._compiled[k]
        pts = keys.astype(float)
        out = np.zeros(len(keys))
        for e, c in zip(exps, coeffs):
            out += c * np.prod(pts ** e, axis=1)
        return out

    def diag_many(self, keys: np.ndarray) -> np.ndarray:
        out = np.zeros(len(keys))
        for k, ev in enumerate(self.events):
            if ev.shift == self.zero_shift:
                out += self._gamma_many(k, keys)
        return out

    def moves_many(self, keys: np.ndarray):
        """Yield ``(shift, gamma)`` for each nonzero-shift event at ``keys``."""
        for k, ev in enumerate(self.events):
            if ev.shift != self.zero_shift:
                yield self._compiled[k][0], self._gamma_many(k, keys)

    def gamma_for_shift(self, shift: tuple[int, ...]) -> int | None:
        for k, ev in enumerate(self.events):
            if ev.shift == shift:
                return k
        return None

    def max_descent(self) -> int:
        """Largest drop in ``sum(n)`` a single move can cause."""
        return max((-sum(ev.shift) for ev in self.events), default=0)

    def format_table(self) -> str:
        """Event table as rows of ``No.  gamma_r(n)  v_r``."""
        names = [f"n{d + 1}" for d in range(self.dimension)]
        rows = [
            (str(r), ev.gamma.format(names), "[" + ",".join(map(str, ev.shift)) + "]")
            for r, ev in enumerate(self.events, start=1)
        ]
        header = ("No.", "gamma_r(n)", "v_r")
        widths = [max(len(x[c]) for x in [header, *rows]) for c in range(3)]
        lines = ["  ".join(s.ljust(w) for s, w in zip(header, widths)).rstrip()]
        lines.append("-" * len(lines[0]))
        lines += ["  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip() for row in rows]
        return "\n".join(lines)


def merge_events(events: Sequence[Event], dimension: int) -> tuple[Event, ...]:
    merged: dict[tuple[int, ...], Polynomial] = {}
    for ev in events:
        merged[ev.shift] = merged[ev.shift] + ev.gamma if ev.shift in merged else ev.gamma
    return tuple(
        Event(gamma, shift) for shift, gamma in sorted(merged.items()) if not gamma.is_zero()
    )


def compile_generator(model: SdeModel, origin: Sequence) -> Generator:
    """Event table of the adjoint generator of ``model`` around ``origin``."""
    origin = tuple(origin)
    events = merge_events(raw_events(model, origin), model.dimension)
    return Generator(origin=origin, events=events, dimension=model.dimension)

"""Sparse multivariate polynomials with exact shift-of-origin rewriting.

A :class:`Polynomial` is an immutable map from exponent tuples to
coefficients.  Coefficients are usually floats, but nothing here depends on
that: ints stay ints (so integer inputs shift exactly) and symbolic
coefficients such as sympy expressions pass straight through, which is how
the event tables are checked symbolically in the tests.
"""

from __future__ import annotations

import itertools
import math
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


def as_multi_index(entries: Iterable[int], dimension: int | None = None) -> MultiIndex:
    """Validate and normalize a lattice point / exponent vector."""
    idx = tuple(int(e) for e in entries)
    if any(e < 0 for e in idx):
        raise ValueError(f"multi-index entries must be non-negative, got {idx}")
    if dimension is not None and len(idx) != dimension:
        raise ValueError(f"expected a multi-index of length {dimension}, got {idx}")
    return idx


class Polynomial:
    """Polynomial in ``dimension`` variables stored as ``{exponents: coeff}``.

    Terms whose coefficient compares equal to zero are dropped on
    construction; no tolerance is applied.
    """

    __slots__ = ("dimension", "terms")

    def __init__(self, dimension: int, terms: Mapping[Sequence[int], object] | None = None):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        merged: dict[MultiIndex, object] = {}
        for exps, coeff in (terms or {}).items():
            key = as_multi_index(exps, dimension)
            merged[key] = merged[key] + coeff if key in merged else coeff
        canon = {k: c for k, c in sorted(merged.items()) if not c == 0}
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", MappingProxyType(canon))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int) -> Polynomial:
        return cls(dimension)

    @classmethod
    def constant(cls, dimension: int, value) -> Polynomial:
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, dimension: int, index: int, coeff=1) -> Polynomial:
        """The coordinate ``x_index`` (0-based), optionally scaled."""
        exps = [0] * dimension
        exps[index] = 1
        return cls(dimension, {tuple(exps): coeff})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=1) -> Polynomial:
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: Polynomial) -> None:
        if self.dimension != other.dimension:
            raise ValueError(
                f"dimension mismatch: {self.dimension} vs {other.dimension}"
            )

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.dimension, other)

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return Polynomial(self.dimension, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.dimension, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Polynomial:
        return self._coerce(other) - self

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial(self.dimension, {k: c * other for k, c in self.terms.items()})
        self._check(other)
        out: dict[MultiIndex, object] = {}
        for (ka, ca), (kb, cb) in itertools.product(self.terms.items(), other.terms.items()):
            k = tuple(a + b for a, b in zip(ka, kb))
            out[k] = out[k] + ca * cb if k in out else ca * cb
        return Polynomial(self.dimension, out)

    def __rmul__(self, other) -> Polynomial:
        return self * other

    def __pow__(self, power: int) -> Polynomial:
        if power < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.dimension, 1)
        for _ in range(power):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.dimension, tuple(self.terms.items())))

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def shift(self, origin: Sequence) -> Polynomial:
        """Rewrite ``p(x)`` as ``q(y)`` with ``y = x - origin``.

        ``q(y) == p(y + origin)`` term by term via the binomial expansion of
        each ``(y_d + origin_d) ** m_d``.
        """
        origin = tuple(origin)
        if len(origin) != self.dimension:
            raise ValueError(
                f"origin has length {len(origin)}, polynomial dimension is {self.dimension}"
            )
        out: dict[MultiIndex, object] = {}
        for exps, coeff in self.terms.items():
            # per-dimension lists of (k, binom(m, k) * o**(m-k))
            factors = [
                [(k, math.comb(m, k) * o ** (m - k)) for k in range(m + 1)]
                for m, o in zip(exps, origin)
            ]
            for combo in itertools.product(*factors):
                c = coeff
                for _, f in combo:
                    c = c * f
                key = tuple(k for k, _ in combo)
                out[key] = out[key] + c if key in out else c
        return Polynomial(self.dimension, out)

    def __call__(self, point: Sequence):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        point = tuple(point)
        if len(point) != self.dimension:
            raise ValueError(
                f"point has length {len(point)}, polynomial dimension is {self.dimension}"
            )
        total = 0
        for exps, coeff in self.terms.items():
            term = coeff
            for x, m in zip(point, exps):
                if m:
                    term = term * x**m
            total = total + term
        return total

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation at the rows of a ``(K, D)`` array."""
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[0])
        for exps, coeff in self.terms.items():
            term = np.full(points.shape[0], float(coeff))
            for d, m in enumerate(exps):
                if m:
                    term *= points[:, d] ** m
            out += term
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self.dimension}, {dict(self.terms)!r})"

    def format(self, names: Sequence[str] | None = None) -> str:
        """Human-readable form, e.g. ``-0.5*n1^2*n2 + 3``."""
        names = names or [f"x{d + 1}" for d in range(self.dimension)]
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            factors = [
                name if m == 1 else f"{name}^{m}" for name, m in zip(names, exps) if m
            ]
            if not factors:
                parts.append(f"{coeff:g}" if isinstance(coeff, float) else str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            elif coeff == -1:
                parts.append("-" + "*".join(factors))
            else:
                c = f"{coeff:g}" if isinstance(coeff, float) else f"({coeff})"
                parts.append("*".join([c, *factors]))
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.format()

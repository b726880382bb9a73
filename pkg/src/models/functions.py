# src/models/functions.py
"""Pointwise-evaluable continuous functions on the circle ``R mod 1``.

Used for the doubling-map dynamics, whose transfer operators need values at
dyadic points finer than any fixed grid. Functions are closures evaluated on
demand; only identities are checked on the grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from numbers import Number
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class CirclePointFunction:
    """Trigonometric polynomial ``sum c_k exp(2 pi i k t)``."""

    terms: tuple = ()

    def __post_init__(self):
        merged = {}
        for freq, coeff in self.terms:
            merged[int(freq)] = merged.get(int(freq), 0) + complex(coeff)
        object.__setattr__(self, "terms", tuple(sorted((k, c) for k, c in merged.items() if c != 0)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        values = np.zeros(t.shape, dtype=complex)
        for freq, coeff in self.terms:
            values = values + coeff * np.exp(2j * np.pi * freq * t)
        return values

    def is_real(self, tol: float = 1e-12) -> bool:
        coeffs = dict(self.terms)
        return all(abs(c - np.conj(coeffs.get(-k, 0))) <= tol for k, c in coeffs.items())

    def __add__(self, other):
        if isinstance(other, Number):
            other = constant(other)
        return CirclePointFunction(self.terms + other.terms)

    __radd__ = __add__

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return CirclePointFunction(tuple((k, scalar * c) for k, c in self.terms))

    __rmul__ = __mul__

    def to_function(self) -> "PointwiseFunction":
        return PointwiseFunction(self)


def constant(value) -> CirclePointFunction:
    return CirclePointFunction(((0, value),))


def sine(freq: int = 1) -> CirclePointFunction:
    """``sin(2 pi freq t)``."""
    return CirclePointFunction(((freq, -0.5j), (-freq, 0.5j)))


def cosine(freq: int = 1) -> CirclePointFunction:
    return CirclePointFunction(((freq, 0.5), (-freq, 0.5)))


def mode(freq: int) -> CirclePointFunction:
    return CirclePointFunction(((freq, 1.0),))


@dataclass(frozen=True, eq=False)
class PointwiseFunction:
    """Element of ``C(R mod 1)`` given by a vectorized evaluator.

    ``@`` is the pointwise product so the interaction checks can treat these
    like matrix-algebra elements.
    """

    fn: Callable

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=complex)

    def __add__(self, other):
        f, g = self.fn, other.fn
        return PointwiseFunction(lambda t: f(t) + g(t))

    def __sub__(self, other):
        f, g = self.fn, other.fn
        return PointwiseFunction(lambda t: f(t) - g(t))

    def __neg__(self):
        f = self.fn
        return PointwiseFunction(lambda t: -f(t))

    def __matmul__(self, other):
        f, g = self.fn, other.fn
        return PointwiseFunction(lambda t: f(t) * g(t))

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        f = self.fn
        return PointwiseFunction(lambda t: scalar * f(t))

    __rmul__ = __mul__

    def adjoint(self):
        f = self.fn
        return PointwiseFunction(lambda t: np.conj(f(t)))


@dataclass(frozen=True)
class CircleFunctionAlgebra:
    """``C(R mod 1)`` with sup norms estimated on the grid ``k / grid_size``."""

    grid_size: int = 1024

    def __post_init__(self):
        if self.grid_size < 1:
            raise ValueError(f"grid_size must be positive, got {self.grid_size}")

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    def unit(self) -> PointwiseFunction:
        return constant(1.0).to_function()

    def zero(self) -> PointwiseFunction:
        return PointwiseFunction(lambda t: np.zeros_like(t, dtype=complex))

    def basis_samples(self) -> list:
        return [self.unit(), sine(1).to_function(), cosine(1).to_function(),
                mode(1).to_function(), mode(-2).to_function()]

    def random_element(self, rng: np.random.Generator, degree: int = 3) -> PointwiseFunction:
        terms = tuple(
            (k, complex(rng.standard_normal(), rng.standard_normal()))
            for k in range(-degree, degree + 1)
        )
        return CirclePointFunction(terms).to_function()

    def random_positive(self, rng: np.random.Generator) -> PointwiseFunction:
        b = self.random_element(rng)
        return b.adjoint() @ b

    def norm(self, a: PointwiseFunction) -> float:
        return float(np.max(np.abs(a(self.grid))))

    def spectral_floor(self, a: PointwiseFunction) -> float:
        return float(np.min(a(self.grid).real))


class Orbit(str, enum.Enum):
    """Rule producing the weight ``rho_n`` from ``rho``."""

    DOUBLING = "doubling"
    TENT = "tent"

    def __str__(self):
        return self.value


def tent(t):
    t = np.mod(t, 1.0)
    return np.where(t < 0.5, 2 * t, 2 - 2 * t)


def doubling(t):
    return np.mod(2 * np.asarray(t, dtype=float), 1.0)


def iterated_weight(rho: CirclePointFunction, n: int, orbit: Orbit = Orbit.DOUBLING) -> Callable:
    """``rho_n(t) = rho(T^{n-1} t) ... rho(T t) rho(t)`` for the orbit map ``T``.

    Works on arrays of any shape; each orbit level is one call of ``rho``.
    """
    step = doubling if orbit is Orbit.DOUBLING else tent

    def weight(t):
        point = np.asarray(t, dtype=float)
        total = np.ones(point.shape, dtype=complex)
        for level in range(n):
            total = total * rho(point)
            if level < n - 1:
                point = step(point)
        return total

    return weight


def preimages(t, n: int) -> np.ndarray:
    """The ``2^n`` doubling preimages ``(t + k) / 2^n`` stacked on a new first axis."""
    t = np.asarray(t, dtype=float)
    scale = 2 ** n
    offsets = np.arange(scale, dtype=float).reshape((scale,) + (1,) * t.ndim)
    return (t[np.newaxis, ...] + offsets) / scale


class PointwiseAction:
    """Doubling-map endomorphism ``a(t) -> a(2^n t)`` or its weighted transfer
    operator ``L_n(a)(t) = sum_k rho_n((t + k) / 2^n) a((t + k) / 2^n)``."""

    ENDOMORPHISM = "alpha"
    TRANSFER = "transfer"

    def __init__(self, algebra: CircleFunctionAlgebra, kind: str,
                 rho: CirclePointFunction | None = None, orbit: Orbit = Orbit.DOUBLING):
        if kind not in (self.ENDOMORPHISM, self.TRANSFER):
            raise ValueError(f"unknown pointwise action kind {kind!r}")
        if kind == self.TRANSFER and rho is None:
            raise ValueError("transfer action needs a weight rho")
        self.algebra = algebra
        self.kind = kind
        self.rho = rho
        self.orbit = Orbit(orbit)

    def apply(self, n: int, a: PointwiseFunction) -> PointwiseFunction:
        if n < 0:
            raise ValueError(f"degree must be a natural number, got {n}")
        if n == 0:
            return a
        scale = 2 ** n
        if self.kind == self.ENDOMORPHISM:
            return PointwiseFunction(lambda t: a(np.mod(scale * np.asarray(t), 1.0)))
        weight = iterated_weight(self.rho, n, self.orbit)

        def transferred(t):
            points = preimages(t, n)
            return np.sum(weight(points) * a(points), axis=0)

        return PointwiseFunction(transferred)

    def __call__(self, n, a):
        return self.apply(n, a)

    def unit_image(self, n: int) -> PointwiseFunction:
        return self.apply(n, self.algebra.unit())

    def __repr__(self):
        return f"PointwiseAction({self.kind}, orbit={self.orbit})"

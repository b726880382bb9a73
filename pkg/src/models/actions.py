# src/models/actions.py
"""Positive linear maps on finite-dimensional C*-algebras and the
semigroup actions of the natural numbers they generate."""

from __future__ import annotations

import enum
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from src.exceptions import AlgebraMismatch, NotInvariant, NotPositive
from src.models.algebra import (
    AlgebraElement,
    FiniteCStarAlgebra,
    Tolerance,
)

logger = logging.getLogger(__name__)


class MapForm(str, enum.Enum):
    CONJUGATION = "conjugation"
    SUPEROPERATOR = "superoperator"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class LinearMapOnAlgebra:
    """A linear map ``A -> A``.

    Conjugation form stores ``K`` acting on the block-diagonal embedding,
    ``a -> K a K*``; the image must land back on the blocks. Superoperator
    form stores a ``dim x dim`` matrix acting on coordinates in the
    matrix-unit basis.
    """

    algebra: FiniteCStarAlgebra
    form: MapForm
    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        side = self.algebra.size if self.form is MapForm.CONJUGATION else self.algebra.dim
        if M.shape != (side, side):
            raise ValueError(f"{self.form} map needs a {side}x{side} matrix, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("map matrix has non-finite entries")
        object.__setattr__(self, "matrix", M)

    @classmethod
    def conjugation(cls, algebra, K, tol=None) -> "LinearMapOnAlgebra":
        """Build ``a -> K a K*`` and check that it preserves the block structure."""
        f = cls(algebra, MapForm.CONJUGATION, K)
        eps = Tolerance.coerce(tol).eps
        for e in algebra.basis():
            _, residual = algebra.compress(f.matrix @ algebra.embed(e) @ f.matrix.conj().T)
            if residual > eps:
                raise NotInvariant(
                    f"conjugation leaves the block structure (off-block norm {residual:.3g})",
                    witness=e,
                )
        return f

    @classmethod
    def superoperator(cls, algebra, matrix) -> "LinearMapOnAlgebra":
        return cls(algebra, MapForm.SUPEROPERATOR, matrix)

    @classmethod
    def identity(cls, algebra) -> "LinearMapOnAlgebra":
        return cls(algebra, MapForm.CONJUGATION, np.eye(algebra.size))

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.algebra:
            raise AlgebraMismatch("map and element live over different algebras")
        if self.form is MapForm.CONJUGATION:
            K = self.matrix
            image, _ = self.algebra.compress(K @ self.algebra.embed(a) @ K.conj().T)
            return image
        return self.algebra.from_coordinates(self.matrix @ self.algebra.coordinates(a))

    def superoperator_matrix(self) -> np.ndarray:
        if self.form is MapForm.SUPEROPERATOR:
            return self.matrix
        return np.column_stack([self.algebra.coordinates(self(e)) for e in self.algebra.basis()])

    def star_defect(self) -> float:
        """Worst ``||f(e*) - f(e)*||`` over the matrix units."""
        return max(
            (self(e.adjoint()) - self(e).adjoint()).norm() for e in self.algebra.basis()
        )


class SemigroupAction(Protocol):
    """An action of the natural numbers: ``apply(n, a)`` is the n-th map."""

    algebra: Any

    def apply(self, n: int, a): ...


class Action:
    """The semigroup ``n -> f^n`` generated by one map; ``f^0`` is the identity.

    The generator must be *-preserving. ``apply`` multiplies coordinates ``n``
    times by the memoized one-step superoperator ``S``, so
    ``apply(m, apply(n, a))`` and ``apply(m + n, a)`` perform the same
    floating-point operations. ``superoperator(n)`` memoizes ``S^n`` itself.
    """

    def __init__(self, generator: LinearMapOnAlgebra, tol=None):
        if generator.form is MapForm.SUPEROPERATOR:
            eps = Tolerance.coerce(tol).eps
            defect = generator.star_defect()
            if defect > eps * max(1.0, float(np.linalg.norm(generator.matrix, 2))):
                raise NotPositive(
                    f"generator does not preserve adjoints (defect {defect:.3g})",
                    witness=generator.matrix,
                )
        self.generator = generator
        self.algebra = generator.algebra
        self._units = {0: self.algebra.unit()}
        self._superoperators = {0: np.eye(self.algebra.dim, dtype=complex)}
        self._lock = threading.RLock()

    @classmethod
    def identity(cls, algebra) -> "Action":
        return cls(LinearMapOnAlgebra.identity(algebra))

    def apply(self, n: int, a: AlgebraElement) -> AlgebraElement:
        if n < 0:
            raise ValueError(f"degree must be a natural number, got {n}")
        if a.algebra != self.algebra:
            raise AlgebraMismatch("action and element live over different algebras")
        if n == 0:
            return a
        step = self.superoperator(1)
        coords = self.algebra.coordinates(a)
        for _ in range(n):
            coords = step @ coords
        return self.algebra.from_coordinates(coords)

    def __call__(self, n, a):
        return self.apply(n, a)

    def unit_image(self, n: int) -> AlgebraElement:
        """``f^n(1)``, memoized."""
        with self._lock:
            if n not in self._units:
                self._units[n] = self.apply(n, self.algebra.unit())
            return self._units[n]

    def superoperator(self, n: int) -> np.ndarray:
        """Matrix of ``f^n`` on coordinates, memoized."""
        if n < 0:
            raise ValueError(f"degree must be a natural number, got {n}")
        with self._lock:
            if n not in self._superoperators:
                step = self.generator.superoperator_matrix()
                top = max(k for k in self._superoperators if k <= n)
                power = self._superoperators[top]
                for k in range(top + 1, n + 1):
                    power = step @ power
                    self._superoperators[k] = power
            return self._superoperators[n]

    def __repr__(self):
        return f"Action({self.generator.form}, block_dims={list(self.algebra.block_dims)})"


def apply(act: SemigroupAction, n: int, a):
    return act.apply(n, a)


@dataclass
class Verdict:
    """Outcome of a sampled identity check; truthy when it passed."""

    passed: bool
    residual: float = 0.0
    witness: Any = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)


def positivity_check(f: LinearMapOnAlgebra, num_samples: int = 200, tol=None, rng=None) -> Verdict:
    """Sample positives ``p`` and test that ``f(p)`` is self-adjoint with no
    eigenvalue below ``-eps``.

    The rank-one diagonal matrix units are tried first, then ``b*b`` for
    random ``b``. A pass is evidence, a failure comes with its witness.
    """
    eps = Tolerance.coerce(tol).eps
    rng = rng if rng is not None else np.random.default_rng(0)
    algebra = f.algebra
    units = [
        algebra.matrix_unit(i, r, r)
        for i, n in enumerate(algebra.block_dims)
        for r in range(n)
    ]
    worst, witness = np.inf, None
    for k in range(max(num_samples, len(units))):
        p = units[k] if k < len(units) else algebra.random_positive(rng)
        image = f(p)
        defect = (image - image.adjoint()).norm()
        floor = algebra.spectral_floor(image)
        if defect > eps:
            logger.warning("positivity fails: image not self-adjoint (defect %.3g) at sample %d", defect, k)
            return Verdict(False, defect, p, {"self_adjoint_defect": defect, "min_eigenvalue": floor})
        if floor < worst:
            worst, witness = floor, p
        if floor < -eps:
            logger.warning("positivity fails: eigenvalue %.3g at sample %d", floor, k)
            return Verdict(False, -floor, p, {"min_eigenvalue": floor})
    return Verdict(True, max(0.0, -worst), None, {"min_eigenvalue": worst})


def _sample_pairs(algebra, num_samples, rng):
    basis = algebra.basis_samples()
    for a in basis:
        for b in basis:
            yield a, b
    for _ in range(num_samples):
        yield algebra.random_element(rng), algebra.random_element(rng)


def check_transfer_identity(alpha: SemigroupAction, L: SemigroupAction, n: int,
                            num_samples: int = 24, tol=None, rng=None,
                            both_sides: bool = True) -> Verdict:
    """``L_n(alpha_n(a) b) = a L_n(b)`` on sampled pairs, and with
    ``both_sides`` also ``L_n(b alpha_n(a)) = L_n(b) a``."""
    eps = Tolerance.coerce(tol).eps
    rng = rng if rng is not None else np.random.default_rng(0)
    algebra = L.algebra
    worst, witness = 0.0, None
    for a, b in _sample_pairs(algebra, num_samples, rng):
        alpha_a = alpha.apply(n, a)
        residual = algebra.norm(L.apply(n, alpha_a @ b) - a @ L.apply(n, b))
        if both_sides:
            residual = max(residual, algebra.norm(L.apply(n, b @ alpha_a) - L.apply(n, b) @ a))
        if residual > worst:
            worst, witness = residual, (a, b)
    passed = worst <= eps
    if not passed:
        logger.warning("transfer identity fails at n=%d, residual %.3g", n, worst)
    return Verdict(passed, worst, None if passed else witness)


def check_complete_transfer(alpha: SemigroupAction, L: SemigroupAction, n: int,
                            num_samples: int = 24, tol=None, rng=None) -> Verdict:
    """``alpha_n(L_n(a)) = alpha_n(1) a alpha_n(1)`` on samples."""
    eps = Tolerance.coerce(tol).eps
    rng = rng if rng is not None else np.random.default_rng(0)
    algebra = L.algebra
    q = alpha.apply(n, algebra.unit())
    samples = list(algebra.basis_samples())
    samples += [algebra.random_element(rng) for _ in range(num_samples)]
    worst, witness = 0.0, None
    for a in samples:
        residual = algebra.norm(alpha.apply(n, L.apply(n, a)) - q @ a @ q)
        if residual > worst:
            worst, witness = residual, a
    passed = worst <= eps
    if not passed:
        logger.warning("complete transfer identity fails at n=%d, residual %.3g", n, worst)
    return Verdict(passed, worst, None if passed else witness)


def transpose_map(algebra: FiniteCStarAlgebra) -> LinearMapOnAlgebra:
    """Blockwise transpose as a superoperator."""
    cols = [algebra.coordinates(algebra.element([b.T for b in e.blocks])) for e in algebra.basis()]
    return LinearMapOnAlgebra.superoperator(algebra, np.column_stack(cols))

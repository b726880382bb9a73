# src/models/representation.py
"""Covariant representations on finite Hilbert spaces, evaluation of
crossed-product elements, and the truncated regular amplification."""

from __future__ import annotations

import logging
import threading

import numpy as np

from src.exceptions import InvalidRepresentation, NotUnimodular, WindowTooSmall
from src.models.algebra import AlgebraElement, FiniteCStarAlgebra, Tolerance, matrix_norm
from src.models.crossed_product import CrossedProductElement, Monomial, MonomialType

logger = logging.getLogger(__name__)


class CovariantRep:
    """``sigma`` given by the images of the matrix units, and ``U_1``.

    Construction checks that ``sigma`` is a unital *-monomorphism on the
    matrix-unit basis. Powers ``U_n = U_1^n`` are memoized.
    """

    def __init__(self, algebra: FiniteCStarAlgebra, hilbert_dim: int, sigma_images, U1,
                 tol=None, validate: bool = True):
        self.algebra = algebra
        self.hilbert_dim = int(hilbert_dim)
        images = np.array([np.asarray(m, dtype=complex) for m in sigma_images])
        if images.shape != (algebra.dim, self.hilbert_dim, self.hilbert_dim):
            raise InvalidRepresentation(
                f"need {algebra.dim} sigma images of size {self.hilbert_dim}, got shape {images.shape}"
            )
        U1 = np.asarray(U1, dtype=complex)
        if U1.shape != (self.hilbert_dim, self.hilbert_dim):
            raise InvalidRepresentation(f"U1 must be {self.hilbert_dim}x{self.hilbert_dim}, got {U1.shape}")
        self.sigma_images = images
        self.U1 = U1
        self._powers = {0: np.eye(self.hilbert_dim, dtype=complex), 1: U1}
        self._lock = threading.Lock()
        if validate:
            self.validate(tol)

    @classmethod
    def from_inclusion(cls, algebra: FiniteCStarAlgebra, U1, tol=None) -> "CovariantRep":
        """``sigma`` is the block-diagonal embedding."""
        images = [algebra.embed(e) for e in algebra.basis()]
        return cls(algebra, algebra.size, images, U1, tol)

    def validate(self, tol=None) -> None:
        eps = Tolerance.coerce(tol).eps
        basis = self.algebra.basis()
        identity = np.eye(self.hilbert_dim)
        unit_defect = matrix_norm(self.sigma(self.algebra.unit()) - identity)
        if unit_defect > eps:
            raise InvalidRepresentation(f"sigma(1) is not the identity (defect {unit_defect:.3g})")
        for j, e in enumerate(basis):
            image = self.sigma_images[j]
            if matrix_norm(image) <= eps:
                raise InvalidRepresentation("sigma kills a matrix unit", witness=e)
            if matrix_norm(self.sigma(e.adjoint()) - image.conj().T) > eps:
                raise InvalidRepresentation("sigma does not preserve adjoints", witness=e)
            for k, f in enumerate(basis):
                if matrix_norm(self.sigma(e @ f) - image @ self.sigma_images[k]) > eps:
                    raise InvalidRepresentation("sigma is not multiplicative", witness=(e, f))

    def sigma(self, a: AlgebraElement) -> np.ndarray:
        coords = self.algebra.coordinates(a)
        return np.tensordot(coords, self.sigma_images, axes=1)

    def U(self, n: int) -> np.ndarray:
        """``U_n = U_1^n``."""
        if n < 0:
            raise ValueError(f"power must be a natural number, got {n}")
        with self._lock:
            if n not in self._powers:
                top = max(k for k in self._powers if k <= n)
                value = self._powers[top]
                for k in range(top + 1, n + 1):
                    value = value @ self.U1
                    self._powers[k] = value
            return self._powers[n]

    def step(self, x: int, kind: MonomialType) -> np.ndarray:
        Ux = self.U(x)
        return Ux if kind is MonomialType.POSITIVE else Ux.conj().T

    def evaluate(self, el: CrossedProductElement) -> np.ndarray:
        return evaluate(self, el)

    def __repr__(self):
        return f"CovariantRep(block_dims={list(self.algebra.block_dims)}, hilbert_dim={self.hilbert_dim})"


def evaluate_word(rep: CovariantRep, term: Monomial) -> np.ndarray:
    result = rep.sigma(term.coeffs[0])
    for x, c in zip(term.steps, term.coeffs[1:]):
        result = result @ rep.step(x, term.kind) @ rep.sigma(c)
    return result


def evaluate(rep: CovariantRep, el: CrossedProductElement) -> np.ndarray:
    """``sigma`` on coefficients, ``U_x`` / ``U_x*`` on steps, summed over terms."""
    if el.algebra != rep.algebra:
        raise ValueError("element and representation live over different algebras")
    total = np.zeros((rep.hilbert_dim, rep.hilbert_dim), dtype=complex)
    for term in el.terms:
        total = total + evaluate_word(rep, term)
    return total


def gauge_rotate(rep: CovariantRep, lam: complex, tol=None) -> CovariantRep:
    """Same ``sigma``, generator ``lam * U_1`` (so ``U_n -> lam^n U_n``)."""
    eps = Tolerance.coerce(tol).eps
    if abs(abs(lam) - 1.0) > eps:
        raise NotUnimodular(f"|lambda| = {abs(lam):.6g}, expected 1", witness=lam)
    return CovariantRep(rep.algebra, rep.hilbert_dim, rep.sigma_images, lam * rep.U1, validate=False)


def adjoint_rep(rep: CovariantRep) -> CovariantRep:
    """``(sigma, U*)``, a representation of the dual action."""
    return CovariantRep(rep.algebra, rep.hilbert_dim, rep.sigma_images, rep.U1.conj().T, validate=False)


class RegularAmplification:
    """The base representation repeated over the window ``-W..W``.

    Coefficients act diagonally through ``sigma``; ``U_x`` sends the
    component at ``g - x`` through ``U_x`` to ``g``, dropping whatever leaves
    the window. This is only an evaluation of explicit sums of monomials;
    across the window edge it is not multiplicative.
    """

    def __init__(self, base: CovariantRep, window: int):
        if window < 1:
            raise ValueError(f"window must be at least 1, got {window}")
        self.base = base
        self.window = int(window)
        self.copies = 2 * self.window + 1
        self.dim = self.copies * base.hilbert_dim
        self._shifts = {}

    def sigma(self, a: AlgebraElement) -> np.ndarray:
        return np.kron(np.eye(self.copies), self.base.sigma(a))

    def shift(self, x: int, kind: MonomialType = MonomialType.POSITIVE) -> np.ndarray:
        """Truncated image of ``U_x`` (or ``U_x*``)."""
        key = (x, kind)
        if key in self._shifts:
            return self._shifts[key]
        h = self.base.hilbert_dim
        out = np.zeros((self.dim, self.dim), dtype=complex)
        Ux = self.base.U(x)
        for g in range(-self.window, self.window + 1):
            source = g - x
            if -self.window <= source <= self.window:
                row, col = (g + self.window) * h, (source + self.window) * h
                out[row : row + h, col : col + h] = Ux
        out = out if kind is MonomialType.POSITIVE else out.conj().T
        self._shifts[key] = out
        return out

    def evaluate(self, el: CrossedProductElement, power: int = 1) -> np.ndarray:
        """Evaluate ``el``; ``power`` is the largest power of ``el`` the caller
        will form, and the window must cover ``power * max_degree``."""
        needed = el.max_degree * power
        if self.window < needed:
            raise WindowTooSmall(
                f"window {self.window} is smaller than degree {el.max_degree} x power {power}",
                witness=needed,
            )
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for term in el.terms:
            word = self.sigma(term.coeffs[0])
            for x, c in zip(term.steps, term.coeffs[1:]):
                word = word @ self.shift(x, term.kind) @ self.sigma(c)
            total = total + word
        return total

    def coordinate_vector(self, xi0: np.ndarray, g: int = 0) -> np.ndarray:
        """Vector supported on the copy at ``g``."""
        h = self.base.hilbert_dim
        out = np.zeros(self.dim, dtype=complex)
        start = (g + self.window) * h
        out[start : start + h] = np.asarray(xi0, dtype=complex)
        return out

    def component(self, xi: np.ndarray, g: int) -> np.ndarray:
        h = self.base.hilbert_dim
        start = (g + self.window) * h
        return xi[start : start + h]


def amplify_regular(rep: CovariantRep, W: int) -> RegularAmplification:
    return RegularAmplification(rep, W)

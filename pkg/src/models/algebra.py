# src/models/algebra.py
"""Finite-dimensional C*-algebras realized as direct sums of full matrix blocks.

An algebra is ``M_{n_1} + ... + M_{n_m}``; elements keep their blocks
separately so that the block index set is the primitive ideal space of the
algebra. Every equality between operators is decided in operator norm
against a ``Tolerance``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from numbers import Number
from typing import Protocol, Sequence

import numpy as np
from scipy import linalg

from src.exceptions import AlgebraMismatch, NotPartialIsometry, NotProjection

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Numerical equality threshold in operator norm."""

    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not np.isfinite(self.eps) or self.eps < 0:
            raise ValueError(f"tolerance must be a nonnegative real, got {self.eps}")

    @classmethod
    def coerce(cls, tol: "Tolerance | float | None") -> "Tolerance":
        if tol is None:
            return cls()
        if isinstance(tol, Tolerance):
            return tol
        return cls(float(tol))


class SupportsSampling(Protocol):
    """What the action and interaction checks need from an algebra."""

    def unit(self): ...

    def random_element(self, rng: np.random.Generator): ...

    def random_positive(self, rng: np.random.Generator): ...

    def basis_samples(self) -> list: ...

    def norm(self, a) -> float: ...

    def spectral_floor(self, a) -> float: ...


def matrix_norm(M: np.ndarray) -> float:
    """Largest singular value of a dense matrix (0 for empty matrices)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(linalg.svdvals(M)[0])


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A tuple of square blocks over a ``FiniteCStarAlgebra``.

    ``@`` is the algebra product, ``*`` multiplies by scalars.
    """

    algebra: "FiniteCStarAlgebra"
    blocks: tuple

    def _check_same(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatch(
                f"algebras differ: {self.algebra.block_dims} vs {other.algebra.block_dims}"
            )

    def _new(self, blocks):
        return AlgebraElement(self.algebra, tuple(blocks))

    def __add__(self, other):
        self._check_same(other)
        return self._new(x + y for x, y in zip(self.blocks, other.blocks))

    def __sub__(self, other):
        self._check_same(other)
        return self._new(x - y for x, y in zip(self.blocks, other.blocks))

    def __neg__(self):
        return self._new(-x for x in self.blocks)

    def __matmul__(self, other):
        self._check_same(other)
        return self._new(x @ y for x, y in zip(self.blocks, other.blocks))

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._new(scalar * x for x in self.blocks)

    __rmul__ = __mul__

    def adjoint(self) -> "AlgebraElement":
        return self._new(x.conj().T for x in self.blocks)

    def norm(self) -> float:
        return operator_norm(self)

    def block(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def embed(self) -> np.ndarray:
        return self.algebra.embed(self)

    def __repr__(self):
        return f"AlgebraElement(block_dims={list(self.algebra.block_dims)}, norm={self.norm():.3g})"


@dataclass(frozen=True)
class FiniteCStarAlgebra:
    """``M_{n_1} + ... + M_{n_m}`` with the matrix-unit basis ordered by
    block, then row, then column."""

    block_dims: tuple = field()

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"block_dims must be a nonempty list of positive integers: {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @cached_property
    def offsets(self) -> tuple:
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(self.block_dims)]))

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def size(self) -> int:
        """Side of the block-diagonal embedding."""
        return self.offsets[-1]

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    # construction

    def element(self, blocks: Sequence) -> AlgebraElement:
        if len(blocks) != self.num_blocks:
            raise ValueError(f"expected {self.num_blocks} blocks, got {len(blocks)}")
        out = []
        for i, (b, n) in enumerate(zip(blocks, self.block_dims)):
            arr = np.array(b, dtype=complex).reshape(np.shape(b) or (1, 1))
            if arr.shape != (n, n):
                raise ValueError(f"block {i} has shape {arr.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {i} has non-finite entries")
            out.append(arr)
        return AlgebraElement(self, tuple(out))

    def diagonal(self, values: Sequence) -> AlgebraElement:
        """Element of a commutative algebra (all blocks 1x1) from its values."""
        if any(n != 1 for n in self.block_dims):
            raise ValueError("diagonal() needs an algebra of 1x1 blocks")
        return self.element([[[v]] for v in values])

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self, tuple(np.eye(n, dtype=complex) for n in self.block_dims))

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.block_dims))

    def matrix_unit(self, i: int, r: int, c: int) -> AlgebraElement:
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        blocks[i][r, c] = 1.0
        return AlgebraElement(self, tuple(blocks))

    def block_unit(self, i: int) -> AlgebraElement:
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        blocks[i] = np.eye(self.block_dims[i], dtype=complex)
        return AlgebraElement(self, tuple(blocks))

    @cached_property
    def _basis(self) -> tuple:
        return tuple(
            self.matrix_unit(i, r, c)
            for i, n in enumerate(self.block_dims)
            for r in range(n)
            for c in range(n)
        )

    def basis(self) -> list:
        return list(self._basis)

    def basis_samples(self) -> list:
        return self.basis()

    # coordinates and embeddings

    def coordinates(self, a: AlgebraElement) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in a.blocks])

    def from_coordinates(self, vec: np.ndarray) -> AlgebraElement:
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.size != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {vec.size}")
        blocks, pos = [], 0
        for n in self.block_dims:
            blocks.append(vec[pos : pos + n * n].reshape(n, n).copy())
            pos += n * n
        return AlgebraElement(self, tuple(blocks))

    def embed(self, a: AlgebraElement) -> np.ndarray:
        return linalg.block_diag(*a.blocks).astype(complex)

    def compress(self, M: np.ndarray) -> tuple:
        """Split a full matrix into its block-diagonal part and the norm of
        everything off the blocks."""
        M = np.asarray(M, dtype=complex)
        if M.shape != (self.size, self.size):
            raise ValueError(f"expected a {self.size}x{self.size} matrix, got {M.shape}")
        blocks = []
        rest = M.copy()
        for lo, hi in zip(self.offsets[:-1], self.offsets[1:]):
            blocks.append(M[lo:hi, lo:hi].copy())
            rest[lo:hi, lo:hi] = 0
        return AlgebraElement(self, tuple(blocks)), matrix_norm(rest)

    # sampling

    def random_element(self, rng: np.random.Generator) -> AlgebraElement:
        return AlgebraElement(
            self,
            tuple(
                rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                for n in self.block_dims
            ),
        )

    def random_positive(self, rng: np.random.Generator) -> AlgebraElement:
        b = self.random_element(rng)
        return b.adjoint() @ b

    # metric

    def norm(self, a: AlgebraElement) -> float:
        return operator_norm(a)

    def spectral_floor(self, a: AlgebraElement) -> float:
        """Smallest eigenvalue of the hermitian part of ``a``."""
        return min(
            float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in a.blocks
        )


def operator_norm(a: AlgebraElement) -> float:
    return max(matrix_norm(b) for b in a.blocks)


def commutator_norm(a: AlgebraElement, b: AlgebraElement) -> float:
    return operator_norm(a @ b - b @ a)


def is_projection(a: AlgebraElement, tol=None) -> bool:
    eps = Tolerance.coerce(tol).eps
    return operator_norm(a - a.adjoint()) <= eps and operator_norm(a @ a - a) <= eps


def is_partial_isometry(M: np.ndarray, tol=None) -> bool:
    eps = Tolerance.coerce(tol).eps
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return matrix_norm(M @ M.conj().T @ M - M) <= eps


def is_matrix_projection(P: np.ndarray, tol=None) -> bool:
    eps = Tolerance.coerce(tol).eps
    P = np.asarray(P, dtype=complex)
    return matrix_norm(P - P.conj().T) <= eps and matrix_norm(P @ P - P) <= eps


def halmos_wallen_check(S: np.ndarray, T: np.ndarray, tol=None) -> tuple:
    """Predict whether ``ST`` is a partial isometry from whether ``S*S``
    commutes with ``TT*``, and compare with the direct test.

    :param S: square partial isometry
    :param T: square partial isometry of the same size
    :return: ``(predicted, actual)``
    """
    tol = Tolerance.coerce(tol)
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    if S.shape != T.shape:
        raise ValueError(f"shapes differ: {S.shape} vs {T.shape}")
    for name, M in (("S", S), ("T", T)):
        if not is_partial_isometry(M, tol):
            raise NotPartialIsometry(f"{name} is not a partial isometry", witness=M)
    source = S.conj().T @ S
    target = T @ T.conj().T
    predicted = matrix_norm(source @ target - target @ source) <= tol.eps
    actual = is_partial_isometry(S @ T, tol)
    if predicted != actual:
        logger.warning("Halmos-Wallen prediction %s disagrees with direct test %s", predicted, actual)
    return predicted, actual


def hereditary_corner_membership(p: AlgebraElement, a: AlgebraElement, tol=None) -> bool:
    tol = Tolerance.coerce(tol)
    if not is_projection(p, tol):
        raise NotProjection("corner must be cut by a projection", witness=p)
    return operator_norm(p @ a @ p - a) <= tol.eps


def is_central(a: AlgebraElement, tol=None) -> bool:
    """``a`` commutes with every matrix unit."""
    eps = Tolerance.coerce(tol).eps
    return max(commutator_norm(a, e) for e in a.algebra.basis()) <= eps


def random_partial_isometry(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random ``n x n`` partial isometry: SVD of a random matrix with a
    random subset of singular values set to 1 and the rest to 0."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    U, _, Vh = linalg.svd(A)
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    if not 0 <= rank <= n:
        raise ValueError(f"rank must lie in [0, {n}], got {rank}")
    keep = np.zeros(n)
    keep[rng.permutation(n)[:rank]] = 1.0
    return U @ np.diag(keep) @ Vh


def truncated_shift(n: int) -> np.ndarray:
    """``S e_i = e_{i+1}``, ``S e_n = 0``."""
    return np.eye(n, k=-1, dtype=complex)

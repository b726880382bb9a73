import numpy as np
import pytest

from src.exceptions import AlgebraMismatch, NotPartialIsometry, NotProjection
from src.models.algebra import (
    FiniteCStarAlgebra,
    Tolerance,
    halmos_wallen_check,
    hereditary_corner_membership,
    is_central,
    is_partial_isometry,
    is_projection,
    operator_norm,
    random_partial_isometry,
    truncated_shift,
)
from src.services.corpus import example_2_3_partial_isometry


class TestFiniteCStarAlgebra:
    """Construction and bookkeeping of block algebras."""

    def test_dimensions(self, mixed_algebra):
        """Size and dimension follow the block sizes."""
        assert mixed_algebra.num_blocks == 3
        assert mixed_algebra.size == 6
        assert mixed_algebra.dim == 4 + 1 + 9

    def test_rejects_empty_block_list(self):
        with pytest.raises(ValueError):
            FiniteCStarAlgebra(())

    def test_rejects_wrong_block_shape(self, m2):
        with pytest.raises(ValueError):
            m2.element([np.eye(3)])

    def test_rejects_non_finite_entries(self, m2):
        with pytest.raises(ValueError):
            m2.element([[[np.nan, 0], [0, 1]]])

    def test_basis_order_is_block_row_column(self, mixed_algebra):
        basis = mixed_algebra.basis()
        assert len(basis) == mixed_algebra.dim
        assert basis[1].blocks[0][0, 1] == 1
        assert basis[4].blocks[1][0, 0] == 1

    def test_coordinates_invert(self, mixed_algebra, rng):
        a = mixed_algebra.random_element(rng)
        back = mixed_algebra.from_coordinates(mixed_algebra.coordinates(a))
        assert operator_norm(back - a) == 0

    def test_compress_reports_off_block_residual(self, mixed_algebra):
        M = np.zeros((6, 6))
        M[0, 5] = 3.0
        element, residual = mixed_algebra.compress(M)
        assert residual == pytest.approx(3.0)
        assert operator_norm(element) == 0

    def test_mismatched_algebras(self, m2, mixed_algebra):
        with pytest.raises(AlgebraMismatch):
            m2.unit() + mixed_algebra.unit()


class TestOperatorNorm:
    """Operator norm and C*-identities."""

    def test_unit_and_zero(self, mixed_algebra):
        assert operator_norm(mixed_algebra.unit()) == pytest.approx(1.0)
        assert operator_norm(mixed_algebra.zero()) == 0.0

    def test_nilpotent_block(self, m2):
        assert operator_norm(m2.element([[[0, 2], [0, 0]]])) == pytest.approx(2.0)

    def test_c_star_identity_and_submultiplicativity(self, mixed_algebra, rng):
        for _ in range(20):
            a, b = mixed_algebra.random_element(rng), mixed_algebra.random_element(rng)
            assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9
            assert operator_norm(a @ a.adjoint()) == pytest.approx(operator_norm(a) ** 2)


class TestPredicates:
    """Projections, partial isometries and corners."""

    def test_half_all_ones_is_projection(self, m2):
        assert is_projection(m2.element([0.5 * np.ones((2, 2))]))

    def test_non_idempotent(self, m2):
        assert not is_projection(m2.element([np.diag([1, 0.5])]))

    def test_shift_is_partial_isometry(self):
        assert is_partial_isometry(truncated_shift(5))

    def test_diag_is_not_partial_isometry(self):
        assert not is_partial_isometry(np.diag([1.0, 2.0]))

    def test_partial_isometry_needs_square(self):
        with pytest.raises(ValueError):
            is_partial_isometry(np.zeros((2, 3)))

    def test_partial_isometry_iff_both_projections(self, rng):
        for n in range(2, 6):
            M = random_partial_isometry(n, rng)
            assert is_partial_isometry(M, 1e-8)
            P, Q = M.conj().T @ M, M @ M.conj().T
            assert np.allclose(P @ P, P) and np.allclose(Q @ Q, Q)

    def test_corner_membership(self, m2):
        p = m2.matrix_unit(0, 0, 0)
        assert hereditary_corner_membership(m2.unit(), m2.matrix_unit(0, 0, 1))
        assert not hereditary_corner_membership(p, m2.matrix_unit(0, 0, 1))

    def test_corner_needs_projection(self, m2):
        with pytest.raises(NotProjection):
            hereditary_corner_membership(2 * m2.unit(), m2.unit())

    def test_central_elements(self, mixed_algebra):
        assert is_central(mixed_algebra.block_unit(1))
        assert not is_central(mixed_algebra.matrix_unit(0, 0, 0))

    def test_tolerance_coercion(self):
        assert Tolerance.coerce(None).eps == 1e-9
        assert Tolerance.coerce(1e-6).eps == 1e-6
        with pytest.raises(ValueError):
            Tolerance(-1.0)


class TestHalmosWallen:
    """``ST`` is a partial isometry iff ``S*S`` commutes with ``TT*``."""

    def test_unitaries(self, rng):
        U = random_partial_isometry(4, rng, rank=4)
        assert halmos_wallen_check(U, U) == (True, True)

    def test_shift_with_itself(self):
        S = truncated_shift(4)
        assert halmos_wallen_check(S, S) == (True, True)

    def test_implementing_isometry_of_two_by_two_example(self):
        W = example_2_3_partial_isometry()
        assert halmos_wallen_check(W, W) == (False, False)

    def test_rejects_non_partial_isometry(self):
        with pytest.raises(NotPartialIsometry):
            halmos_wallen_check(np.diag([1.0, 2.0]), np.eye(2))

    @pytest.mark.slow
    def test_random_pairs_never_disagree(self, rng):
        mismatches = 0
        for trial in range(500):
            n = 2 + trial % 5
            S, T = random_partial_isometry(n, rng), random_partial_isometry(n, rng)
            predicted, actual = halmos_wallen_check(S, T, Tolerance(1e-8))
            mismatches += predicted != actual
        assert mismatches == 0

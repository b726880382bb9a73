import numpy as np
import pytest

from src.exceptions import AlgebraMismatch, NotInvariant, NotPositive
from src.models.actions import (
    Action,
    LinearMapOnAlgebra,
    MapForm,
    apply,
    check_complete_transfer,
    check_transfer_identity,
    positivity_check,
    transpose_map,
)
from src.models.algebra import FiniteCStarAlgebra, operator_norm
from src.services.corpus import example_2_3_maps


def trace_twist(algebra):
    """``a -> a + i tr(a) 1`` on ``M_2``: Hermitian part positive, image not self-adjoint."""
    M = np.eye(algebra.dim, dtype=complex)
    for i, j in [(0, 0), (0, 3), (3, 0), (3, 3)]:
        M[i, j] += 1j
    return LinearMapOnAlgebra.superoperator(algebra, M)


class TestLinearMapOnAlgebra:
    """Conjugation and superoperator forms."""

    def test_conjugation_matches_superoperator(self, m2, rng):
        K = rng.standard_normal((2, 2))
        f = LinearMapOnAlgebra.conjugation(m2, K)
        g = LinearMapOnAlgebra.superoperator(m2, f.superoperator_matrix())
        a = m2.random_element(rng)
        assert operator_norm(f(a) - g(a)) < 1e-12
        assert f.form is MapForm.CONJUGATION

    def test_conjugation_must_preserve_blocks(self):
        algebra = FiniteCStarAlgebra((1, 1))
        K = np.ones((2, 2)) / np.sqrt(2)
        with pytest.raises(NotInvariant):
            LinearMapOnAlgebra.conjugation(algebra, K)

    def test_wrong_matrix_size(self, m2):
        with pytest.raises(ValueError):
            LinearMapOnAlgebra.superoperator(m2, np.eye(3))

    def test_star_defect(self, m2):
        f = LinearMapOnAlgebra.superoperator(m2, 1j * np.eye(4))
        assert f.star_defect() == pytest.approx(2.0)
        assert LinearMapOnAlgebra.identity(m2).star_defect() == 0

    def test_other_algebra_rejected(self, m2, mixed_algebra):
        with pytest.raises(AlgebraMismatch):
            LinearMapOnAlgebra.identity(m2)(mixed_algebra.unit())


class TestPositivity:
    """Sampled positivity of maps."""

    def test_transpose_is_positive(self, mixed_algebra, rng):
        verdict = positivity_check(transpose_map(mixed_algebra), num_samples=50, rng=rng)
        assert verdict.passed

    def test_negation_fails_with_witness(self, m2, rng):
        verdict = positivity_check(LinearMapOnAlgebra.superoperator(m2, -np.eye(4)), rng=rng)
        assert not verdict
        assert verdict.witness is not None
        assert verdict.detail["min_eigenvalue"] < 0

    def test_non_self_adjoint_image_fails(self, m2, rng):
        verdict = positivity_check(trace_twist(m2), rng=rng)
        assert not verdict
        assert verdict.witness is not None
        assert verdict.detail["self_adjoint_defect"] == pytest.approx(2.0)


class TestAction:
    """Semigroups generated by one map."""

    def test_zero_is_identity(self, shift, rng):
        a = shift.algebra.random_element(rng)
        assert shift.interaction.V.apply(0, a) is a

    def test_semigroup_law_is_exact(self, shift, rng):
        V = shift.interaction.V
        a = shift.algebra.random_element(rng)
        assert operator_norm(V.apply(3, a) - V.apply(1, V.apply(2, a))) == 0

    def test_shift_image(self, shift):
        a = shift.algebra.diagonal([1, 2, 3, 4])
        image = apply(shift.interaction.V, 1, a)
        assert np.allclose([b[0, 0] for b in image.blocks], [0, 1, 2, 3])

    def test_unit_images_memoized(self, shift):
        V = shift.interaction.V
        assert V.unit_image(2) is V.unit_image(2)
        assert np.allclose([b[0, 0] for b in V.unit_image(2).blocks], [0, 0, 1, 1])

    def test_negative_degree(self, shift):
        with pytest.raises(ValueError):
            shift.interaction.V.apply(-1, shift.algebra.unit())

    def test_identity_action(self, m2, rng):
        a = m2.random_element(rng)
        assert operator_norm(Action.identity(m2).apply(5, a) - a) == 0

    def test_generator_must_preserve_adjoints(self, m2):
        with pytest.raises(NotPositive):
            Action(trace_twist(m2))
        with pytest.raises(NotPositive):
            Action(LinearMapOnAlgebra.superoperator(m2, 1j * np.eye(4)))

    def test_transpose_generates(self, mixed_algebra, rng):
        action = Action(transpose_map(mixed_algebra))
        a = mixed_algebra.random_element(rng)
        assert operator_norm(action.apply(2, a) - a) < 1e-12

    def test_superoperator_powers_memoized(self, shift):
        V = shift.interaction.V
        assert V.superoperator(3) is V.superoperator(3)
        assert np.array_equal(V.superoperator(3), V.superoperator(1) @ V.superoperator(2))
        assert np.array_equal(V.superoperator(0), np.eye(shift.algebra.dim))

    def test_apply_matches_iterated_generator(self, rng):
        """Test that applying a power agrees with iterating the generator."""
        algebra, V, H = example_2_3_maps()
        for action in (V, H):
            a = algebra.random_element(rng)
            iterated = a
            for n in range(1, 5):
                iterated = action.generator(iterated)
                assert operator_norm(action.apply(n, a) - iterated) <= 1e-12 * (1 + operator_norm(a))

    def test_apply_other_algebra(self, shift, m2):
        with pytest.raises(AlgebraMismatch):
            shift.interaction.V.apply(0, m2.unit())


class TestTransferIdentity:
    """``L_n(alpha_n(a) b) = a L_n(b)``."""

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_shift_pair_is_a_transfer_pair(self, shift, rng, n):
        I = shift.interaction
        assert check_transfer_identity(I.V, I.H, n, num_samples=8, rng=rng).passed
        assert check_complete_transfer(I.V, I.H, n, num_samples=8, rng=rng).passed

    def test_failure_reports_witness(self, shift, rng):
        identity = Action.identity(shift.algebra)
        verdict = check_transfer_identity(identity, shift.interaction.V, 1, num_samples=4, rng=rng)
        assert not verdict.passed
        assert verdict.witness is not None

import pytest

from src.exceptions import FormError, HypothesisError, NotAnInteraction, NotProjection
from src.models.algebra import operator_norm
from src.models.crossed_product import CrossedProductElement, Monomial, from_words, random_crossed_element
from src.services.corpus import load_fixture
from src.services.dynamics import (
    block_seminorm,
    coefficient_recovery_check,
    compressed_subspaces_orthogonal,
    compression_vanishing_check,
    induced_partial_map,
    partial_dynamics,
    prim_support,
    topological_freedom_check,
)


def single_step_element(fx, rng):
    """``c0 + c1 U_1 + c2 U_1*`` with random diagonal coefficients."""
    algebra, I = fx.algebra, fx.interaction
    c = [algebra.random_element(rng) for _ in range(3)]
    unit = algebra.unit()
    return from_words(algebra, [((c[0],), ()), ((c[1], unit), (1,)), ((c[2], unit), (-1,))], I)


class TestSupports:
    """Block supports and seminorms."""

    def test_prim_support(self, shift):
        assert prim_support(shift.interaction.v1(1)) == {1, 2, 3}
        assert prim_support(shift.interaction.h1(2)) == {0, 1}
        assert prim_support(shift.algebra.zero()) == set()

    def test_support_needs_projection(self, shift):
        with pytest.raises(NotProjection):
            prim_support(shift.algebra.diagonal([1, 2, 0, 0]))

    def test_block_seminorms_recover_norm(self, mixed_algebra, rng):
        a = mixed_algebra.random_element(rng)
        seminorms = [block_seminorm(a, i) for i in range(mixed_algebra.num_blocks)]
        assert max(seminorms) == pytest.approx(operator_norm(a))


class TestPartialDynamics:
    """Partial maps on blocks induced by a complete interaction."""

    def test_shift_moves_blocks_up(self, shift):
        assert induced_partial_map(shift.interaction, 1) == {0: 1, 1: 2, 2: 3}
        assert induced_partial_map(shift.interaction, 3) == {0: 3}

    def test_semigroup(self, shift6):
        dynamics = partial_dynamics(shift6.interaction, 4)
        assert dynamics.semigroup_ok
        assert dynamics.t(2, 1) == 3
        assert dynamics.t(2, 5) is None
        assert dynamics.dom_neg[1] == [0, 1, 2, 3, 4]
        assert dynamics.dom_pos[1] == [1, 2, 3, 4, 5]
        assert dynamics.fixed_points() == []

    def test_degree_positive(self, shift):
        with pytest.raises(ValueError):
            induced_partial_map(shift.interaction, 0)

    def test_needs_complete_interaction(self):
        """Test that noncommuting unit images stop the construction."""
        fx = load_fixture("ex23")
        with pytest.raises(NotAnInteraction):
            induced_partial_map(fx.interaction, 1)

    def test_shift_is_free(self, shift):
        verdict = topological_freedom_check(shift.interaction, 4)
        assert verdict.verdict
        assert verdict.fixed_points == []

    def test_trivial_fixes_its_block(self, trivial):
        verdict = topological_freedom_check(trivial.interaction, 2)
        assert not verdict.verdict
        assert verdict.fixed_points == [(1, 0), (2, 0)]


class TestCompressions:
    """Compressions of ``(sigma x U)(a)`` to one block."""

    def test_subspaces_orthogonal_on_shift(self, shift):
        for i in range(3):
            assert compressed_subspaces_orthogonal(shift.rep, 1, i).passed

    def test_subspaces_overlap_on_trivial(self, trivial):
        verdict = compressed_subspaces_orthogonal(trivial.rep, 1, 0)
        assert not verdict.passed
        assert verdict.witness == (1, 0)

    @pytest.mark.parametrize("block", [0, 1, 2, 3])
    def test_compression_vanishes(self, shift, rng, block):
        a = single_step_element(shift, rng)
        assert compression_vanishing_check(shift.rep, shift.interaction, a, block).passed

    def test_fixed_block_rejected(self, trivial, rng):
        a = single_step_element(trivial, rng)
        with pytest.raises(HypothesisError):
            compression_vanishing_check(trivial.rep, trivial.interaction, a, 0)

    def test_two_step_monomial_rejected(self, shift):
        unit = shift.algebra.unit()
        a = CrossedProductElement(shift.algebra, (Monomial((unit, unit, unit), (1, 1)),))
        with pytest.raises(FormError):
            compression_vanishing_check(shift.rep, shift.interaction, a, 0)


class TestCoefficientRecovery:
    """``||E0(a)|| <= ||(sigma x U)(a)||`` under topological freedom."""

    def test_shift_recovers(self, shift, rng):
        samples = [random_crossed_element(shift.interaction, rng) for _ in range(100)]
        report = coefficient_recovery_check(shift.rep, shift.interaction, samples)
        assert report.passed
        assert report.freedom.verdict
        assert len(report.margins) == 100
        assert not report.bypassed

    def test_trivial_needs_freedom(self, trivial):
        a = CrossedProductElement.from_algebra(trivial.algebra.unit()) - CrossedProductElement.generator(
            trivial.algebra, 1
        )
        with pytest.raises(HypothesisError):
            coefficient_recovery_check(trivial.rep, trivial.interaction, [a])

    def test_trivial_bypass_shows_failure(self, trivial):
        a = CrossedProductElement.from_algebra(trivial.algebra.unit()) - CrossedProductElement.generator(
            trivial.algebra, 1
        )
        report = coefficient_recovery_check(trivial.rep, trivial.interaction, [a], bypass=True)
        assert not report.passed
        assert report.bypassed
        assert report.margins == [pytest.approx(-1.0)]

    def test_degree_zero_needs_no_dynamics(self, trivial):
        a = CrossedProductElement.from_algebra(trivial.algebra.unit())
        report = coefficient_recovery_check(trivial.rep, trivial.interaction, [a])
        assert report.passed
        assert report.freedom is None

import numpy as np
import pytest

from src.exceptions import InvalidCocycle
from src.models.functions import CircleFunctionAlgebra, constant, doubling, mode, preimages, sine
from src.models.interaction import Interaction, InteractionReport
from src.services.corpus import (
    ExampleRun,
    example_2_3,
    example_3_1,
    fixture_run,
    load_fixture,
    rho_choice,
    shift_fixture,
    validate_cocycle,
)


class TestTwoByTwoExample:
    """Maps on ``M_2`` that interact at degree 1 only."""

    @pytest.fixture
    def run(self, rng):
        return example_2_3(num_samples=8, rng=rng)

    def test_outcomes_as_expected(self, run):
        assert run.as_expected
        assert not run.report.passed

    def test_hvh_at_unit(self, run):
        assert run.report.find("hvh_at_unit", 2)[0].residual == pytest.approx(3 / 8)

    def test_unit_images_do_not_commute(self, run):
        assert run.details["commutator_norm"] == pytest.approx(0.5)
        assert run.report.find("unit_projections_commute", 1)[0].informational

    def test_square_of_implementing_isometry(self, run):
        assert run.details["W_squared_is_partial_isometry"] is False


class TestDoublingExample:
    """Doubling map with a weighted transfer operator."""

    def test_constant_weight(self, rng):
        run = example_3_1("half", n_max=2, grid_size=256, num_samples=4, rng=rng)
        assert run.as_expected
        assert run.details["completeness_defect"] == pytest.approx(1.0)
        assert run.details["compared_with"] == "sine"
        assert run.details["nonuniqueness_gap"] == pytest.approx(1.0)

    def test_sine_weight(self, rng):
        """Test that L_1(sin) = sin^2(pi t), so alpha_1 L_1 misses sin by 2."""
        run = example_3_1("sine", n_max=2, grid_size=256, num_samples=4, rng=rng)
        assert run.as_expected
        assert run.details["completeness_defect"] == pytest.approx(2.0)

    def test_completeness_fails_at_vh_corner_only(self, rng):
        run = example_3_1("half", n_max=1, grid_size=128, num_samples=4, rng=rng)
        assert not run.report.find("vh_corner", 1)[0].passed
        assert run.report.find("hv_corner", 1)[0].passed

    def test_tent_orbit_breaks_cocycle(self, rng):
        run = example_3_1("sine", n_max=2, grid_size=256, orbit="tent", num_samples=4, rng=rng)
        assert not run.as_expected
        assert not run.report.find("cocycle_sum", 2)[0].passed

    def test_preimages_map_back(self):
        t = np.linspace(0, 1, 9, endpoint=False).reshape(3, 3)
        points = preimages(t, 2)
        assert points.shape == (4, 3, 3)
        assert np.allclose(doubling(doubling(points)), t[np.newaxis])

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["half", "sine"])
    def test_full_size_run(self, name, rng):
        """Test degrees up to 3 on 1024 grid points."""
        run = example_3_1(name, n_max=3, grid_size=1024, rng=rng)
        assert run.as_expected
        for check in ("cocycle_sum", "transfer_unital", "transfer_identity"):
            items = run.report.find(check, 3)
            assert items and all(item.passed for item in items)
        assert run.report.find("action_property", 3)[0].passed

    def test_unknown_weight(self):
        with pytest.raises(ValueError):
            rho_choice("cosine")


class TestCocycle:
    """Validation of the weight ``rho``."""

    grid = CircleFunctionAlgebra(64).grid

    @pytest.mark.parametrize("name", ["half", "sine"])
    def test_builtin_weights_valid(self, name):
        validate_cocycle(rho_choice(name), self.grid)

    def test_sum_not_one(self):
        with pytest.raises(InvalidCocycle):
            validate_cocycle(constant(0.7), self.grid)

    def test_not_real(self):
        with pytest.raises(InvalidCocycle):
            validate_cocycle(constant(0.5) + 0.1 * mode(1), self.grid)

    def test_leaves_unit_interval(self):
        """Test that 1/2 + sin(2 pi t) sums correctly but exceeds 1."""
        with pytest.raises(InvalidCocycle) as excinfo:
            validate_cocycle(constant(0.5) + sine(1), self.grid)
        assert excinfo.value.witness is not None


class TestFixtures:
    """Standard fixtures and how they are loaded."""

    def test_shift_needs_three_blocks(self):
        with pytest.raises(ValueError):
            shift_fixture(2)

    @pytest.mark.parametrize("spec, blocks", [("shift", 4), ("shift:6", 6), ("trivial", 1), ("ex23", 1)])
    def test_load(self, spec, blocks):
        assert load_fixture(spec).algebra.num_blocks == blocks

    def test_unknown(self):
        with pytest.raises(ValueError):
            load_fixture("torus")

    def test_fixture_run_on_shift(self, shift, rng):
        run = fixture_run(shift, 3, num_samples=6, rng=rng)
        assert run.report.passed
        assert run.as_expected
        assert np.isclose(run.report.worst("covariance"), 0.0)

    def test_unexpected_pass_is_not_as_expected(self, trivial):
        report = InteractionReport(title="t")
        report.add("a", 1, 0.0, 1e-9)
        run = ExampleRun("t", trivial.interaction, report, {("a", 1)})
        assert not run.as_expected

    def test_interaction_is_carried(self, trivial):
        run = ExampleRun("t", trivial.interaction, InteractionReport(title="t"))
        assert isinstance(run.interaction, Interaction)
        assert run.as_expected

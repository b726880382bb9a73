import json

import pytest

from src.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, run

pytestmark = pytest.mark.integration


def invoke(app, capsys, *argv):
    """Run the command group and return the exit code and the decoded report."""
    code = run(list(argv), app=app)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestExamples:
    """``covalg example``."""

    def test_two_by_two(self, app, capsys):
        code, report = invoke(app, capsys, "example", "ex23")
        assert code == EXIT_OK
        assert report["command"] == "example ex23"
        assert report["details"]["commutator_norm"] == pytest.approx(0.5)
        failing = {(c["name"], c["x"]) for c in report["checks"] if not c["passed"]}
        assert ("vhv", 2) in failing and ("hvh", 2) in failing
        assert all(c["passed"] for c in report["checks"] if c["x"] == 1 and not c["informational"])

    def test_doubling_with_sine(self, app, capsys):
        code, report = invoke(app, capsys, "example", "ex31", "--rho", "sine", "--n", "2", "--samples", "4")
        assert code == EXIT_OK
        assert report["details"]["rho"] == "sine"

    def test_shift(self, app, capsys):
        code, report = invoke(app, capsys, "example", "shift", "--n", "5", "--x-max", "3")
        assert code == EXIT_OK
        assert report["passed"]

    def test_trivial_failures_are_expected(self, app, capsys):
        code, report = invoke(app, capsys, "example", "trivial", "--x-max", "2")
        assert code == EXIT_OK
        assert ["property_star", 1] in report["details"]["expected_failures"]

    def test_unknown_example(self, app, capsys):
        code, report = invoke(app, capsys, "example", "torus")
        assert code == EXIT_ERROR
        assert report["error"]["type"] == "MalformedInput"


class TestCommands:
    """Commands run against fixtures and input files."""

    def test_topfree_on_shift(self, app, capsys):
        code, report = invoke(app, capsys, "topfree", "--fixture", "shift:4")
        assert code == EXIT_OK
        assert report["details"]["verdict"]["verdict"] is True

    def test_topfree_on_trivial(self, app, capsys):
        code, report = invoke(app, capsys, "topfree", "--fixture", "trivial", "--x-max", "2")
        assert code == EXIT_FAILED
        assert report["details"]["verdict"]["fixed_points"] == [[1, 0], [2, 0]]

    def test_topfree_with_elements(self, app, capsys, tmp_path, shift_document):
        path = tmp_path / "shift.json"
        path.write_bytes(shift_document)
        code, report = invoke(app, capsys, "topfree", "-i", str(path), "--x-max", "2")
        assert code == EXIT_OK
        assert "coefficient_recovery" in {c["name"] for c in report["checks"]}

    def test_norm_on_fixture(self, app, capsys):
        code, report = invoke(app, capsys, "norm", "--fixture", "shift:4", "--samples", "8", "--max-k", "2")
        assert code == EXIT_OK
        for entry in report["details"]["elements"]:
            enclosure = entry["enclosure"]
            assert enclosure["lower"] <= enclosure["upper"] + 1e-8

    def test_norm_from_file(self, app, capsys, fixtures_dir):
        code, report = invoke(app, capsys, "norm", "--input", str(fixtures_dir / "trivial.json"), "--max-k", "2")
        assert code == EXIT_OK
        enclosure = report["details"]["elements"][0]["enclosure"]
        assert enclosure["lower_by_k"][0] == pytest.approx(6 ** 0.25)

    def test_property_star_from_file(self, app, capsys, fixtures_dir):
        code, _ = invoke(app, capsys, "property-star", "--input", str(fixtures_dir / "shift_4.json"))
        assert code == EXIT_OK
        code, report = invoke(app, capsys, "property-star", "--input", str(fixtures_dir / "trivial.json"))
        assert code == EXIT_FAILED
        assert report["details"]["margins"] == [pytest.approx(-1.0)]

    def test_derive_dual(self, app, capsys):
        code, report = invoke(app, capsys, "derive-dual", "--fixture", "shift:4")
        assert code == EXIT_OK
        assert {c["name"] for c in report["checks"]} == {
            "matches_given_dual_rep", "matches_given_dual_projections", "methods_agree",
        }

    def test_verify_rep(self, app, capsys):
        code, report = invoke(app, capsys, "verify-rep", "--fixture", "shift:4")
        assert code == EXIT_OK
        assert report["details"]["power_certificate"]["stabilized_at"] == 4

    def test_check_complete_needs_interaction(self, app, capsys):
        code, report = invoke(app, capsys, "check-complete", "--fixture", "ex23", "--x-max", "2")
        assert code == EXIT_ERROR
        assert report["error"]["type"] == "NotAnInteraction"
        assert report["error"]["witness"] is not None

    def test_malformed_file(self, app, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, report = invoke(app, capsys, "check-interaction", "--input", str(path))
        assert code == EXIT_ERROR
        assert report["error"]["type"] == "MalformedInput"

    def test_no_input(self, app, capsys):
        code, report = invoke(app, capsys, "check-interaction")
        assert code == EXIT_ERROR
        assert "--fixture" in report["error"]["message"]

    def test_unknown_fixture(self, app, capsys):
        code, report = invoke(app, capsys, "verify-rep", "--fixture", "torus")
        assert code == EXIT_ERROR

    def test_reports_are_deterministic(self, app, capsys):
        """Test that two runs agree on everything except the timings."""
        argv = ("check-interaction", "--fixture", "shift:4", "--samples", "4", "--x-max", "2")
        _, first = invoke(app, capsys, *argv)
        _, second = invoke(app, capsys, *argv)
        first.pop("timings")
        second.pop("timings")
        assert first == second
        assert first["options"]["seed"] == app.config["SEED"]


class TestDocumentShapes:
    """Top-level interaction documents and separate element files."""

    def test_document_sets_x_max(self, app, capsys, tmp_path, flat_shift_document):
        path = tmp_path / "interaction.json"
        path.write_bytes(flat_shift_document)
        code, report = invoke(app, capsys, "check-interaction", "--input", str(path), "--samples", "4")
        assert code == EXIT_OK
        assert report["options"]["x_max"] == 2

    def test_flag_beats_document(self, app, capsys, tmp_path, flat_shift_document):
        path = tmp_path / "interaction.json"
        path.write_bytes(flat_shift_document)
        code, report = invoke(app, capsys, "check-interaction", "-i", str(path), "--samples", "4", "--x-max", "1")
        assert code == EXIT_OK
        assert report["options"]["x_max"] == 1

    def test_element_file(self, app, capsys, tmp_path, flat_shift_document, monomial_element_document):
        interaction = tmp_path / "i.json"
        interaction.write_bytes(flat_shift_document)
        element = tmp_path / "el.json"
        element.write_bytes(monomial_element_document)
        code, report = invoke(app, capsys, "norm", "--element", str(element), "--interaction", str(interaction),
                              "--max-k", "3")
        assert code == EXIT_OK
        [entry] = report["details"]["elements"]
        assert entry["enclosure"]["k_used"] == 3
        assert entry["enclosure"]["lower"] <= entry["enclosure"]["upper"]

    def test_malformed_element_file(self, app, capsys, tmp_path):
        element = tmp_path / "el.json"
        element.write_text('[{"type": "pos"}]')
        code, report = invoke(app, capsys, "norm", "--fixture", "shift:3", "--element", str(element))
        assert code == EXIT_ERROR
        assert report["error"]["type"] == "MalformedInput"

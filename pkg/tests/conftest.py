import sys
from pathlib import Path

# Add project root to Python path before any other imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest
from src import create_app
from src.models.algebra import FiniteCStarAlgebra
from src.models.crossed_product import CrossedProductElement
from src.schemas.payloads import crossed_element_payload, encode, interaction_payload, rep_payload
from src.services.corpus import shift_fixture, trivial_fixture


@pytest.fixture(scope="session")
def app():
    """Create application for testing."""
    app = create_app("test")

    return app


@pytest.fixture
def client(app):
    """Create a test client for the Flask application."""
    return app.test_client()


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20240611)


@pytest.fixture
def m2():
    return FiniteCStarAlgebra((2,))


@pytest.fixture
def mixed_algebra():
    """M_2 + C + M_3."""
    return FiniteCStarAlgebra((2, 1, 3))


@pytest.fixture
def shift():
    """Shift fixture on C^4."""
    return shift_fixture(4)


@pytest.fixture
def shift6():
    return shift_fixture(6)


@pytest.fixture
def trivial():
    return trivial_fixture()


@pytest.fixture
def fixtures_dir():
    return project_root / "fixtures"


@pytest.fixture
def shift_document(shift):
    """JSON input for the shift fixture with two single-step elements."""
    algebra = shift.algebra
    u = CrossedProductElement.generator(algebra, 1)
    one = CrossedProductElement.from_algebra(algebra.unit())
    elements = [one - u, one + 2 * u]
    return encode(
        {
            "interaction": interaction_payload(shift.interaction),
            "rep": rep_payload(shift.rep),
            "elements": [crossed_element_payload(a) for a in elements],
        }
    )


SHIFT3_K = "[[[0, 0], [0, 0], [0, 0]], [[1, 0], [0, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]]]"
SHIFT3_K_ADJOINT = "[[[0, 0], [1, 0], [0, 0]], [[0, 0], [0, 0], [1, 0]], [[0, 0], [0, 0], [0, 0]]]"
DIAG_235 = '{"block_dims": [1, 1, 1], "blocks": [[[[2, 0]]], [[[3, 0]]], [[[5, 0]]]]}'
ONES_3 = '{"block_dims": [1, 1, 1], "blocks": [[[[1, 0]]], [[[1, 0]]], [[[1, 0]]]]}'


@pytest.fixture
def flat_shift_document():
    """Shift on C^3 written with top-level ``algebra``, ``V``, ``H`` and ``x_max``."""
    return (
        '{"algebra": {"block_dims": [1, 1, 1]},'
        f' "V": {{"form": "conjugation", "K": {SHIFT3_K}}},'
        f' "H": {{"form": "conjugation", "K": {SHIFT3_K_ADJOINT}}},'
        ' "x_max": 2}'
    ).encode()


@pytest.fixture
def monomial_element_document():
    """``D U_1 + U_1* D`` with ``D = diag(2, 3, 5)`` as a list of typed monomials."""
    return (
        f'[{{"type": "pos", "word": [{{"coeff": {DIAG_235}, "step": 1}}]}},'
        f' {{"type": "neg", "word": [{{"coeff": {ONES_3}, "step": 1}}, {{"coeff": {DIAG_235}, "step": 0}}]}}]'
    ).encode()

#!/usr/bin/env python3
"""Write the standard fixtures as CLI input files under fixtures/."""
import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.models.crossed_product import from_words
from src.schemas.payloads import crossed_element_payload, encode, interaction_payload, rep_payload
from src.services.corpus import load_fixture


def fixture_document(spec):
    """Interaction, representation and a sample element of the fixture."""
    fx = load_fixture(spec)
    algebra, I = fx.algebra, fx.interaction
    unit = algebra.unit()
    sample = from_words(algebra, [((unit,), ()), ((-1.0 * unit, unit), (1,))], I)
    return {
        "interaction": interaction_payload(I),
        "rep": rep_payload(fx.rep),
        "element": crossed_element_payload(sample),
    }


def export_fixtures(target):
    target.mkdir(parents=True, exist_ok=True)
    for spec in ("shift:4", "shift:6", "trivial", "ex23"):
        path = target / f"{spec.replace(':', '_')}.json"
        path.write_bytes(encode(fixture_document(spec)))
        print(f"Wrote {path}")


if __name__ == "__main__":
    export_fixtures(Path(sys.argv[1]) if len(sys.argv) > 1 else project_root / "fixtures")

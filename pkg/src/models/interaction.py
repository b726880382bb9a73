# src/models/interaction.py
"""Interactions: pairs of actions on one algebra, and the reports the
checks produce about them."""

from __future__ import annotations

import logging
from typing import Any

import msgspec

from src.exceptions import AlgebraMismatch

logger = logging.getLogger(__name__)


class Interaction:
    """A pair ``(V, H)`` of semigroup actions on the same algebra.

    ``certified_up_to`` records the largest degree at which the interaction
    axioms were verified, ``complete_up_to`` the same for completeness.
    Both are set by the checks in ``src.services.interactions``.
    """

    def __init__(self, V, H):
        if V.algebra != H.algebra:
            raise AlgebraMismatch("V and H act on different algebras")
        self.V = V
        self.H = H
        self.algebra = V.algebra
        self.certified_up_to = 0
        self.complete_up_to = 0

    def v1(self, n: int):
        """``V_n(1)``."""
        return self.V.unit_image(n)

    def h1(self, n: int):
        """``H_n(1)``."""
        return self.H.unit_image(n)

    def swapped(self) -> "Interaction":
        swapped = Interaction(self.H, self.V)
        swapped.certified_up_to = self.certified_up_to
        swapped.complete_up_to = self.complete_up_to
        return swapped

    def __repr__(self):
        return (
            f"Interaction(V={self.V!r}, H={self.H!r}, "
            f"certified_up_to={self.certified_up_to}, complete_up_to={self.complete_up_to})"
        )


class CheckItem(msgspec.Struct, kw_only=True):
    """One verified identity at one degree.

    ``informational`` items are reported but do not decide ``passed`` of
    the enclosing report.
    """

    name: str
    x: int | None = None
    passed: bool
    residual: float = 0.0
    witness: Any = None
    informational: bool = False


class InteractionReport(msgspec.Struct, kw_only=True):
    title: str
    items: list[CheckItem] = msgspec.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items if not item.informational)

    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.passed and not item.informational]

    def find(self, name: str, x: int | None = None) -> list[CheckItem]:
        return [item for item in self.items if item.name == name and (x is None or item.x == x)]

    def worst(self, name: str, x: int | None = None) -> float:
        return max((item.residual for item in self.find(name, x)), default=0.0)

    def add(self, name, x, residual, eps, witness=None, informational=False) -> CheckItem:
        """Record ``residual <= eps`` as an item; failing items keep their witness."""
        passed = bool(residual <= eps)
        item = CheckItem(
            name=name,
            x=x,
            passed=passed,
            residual=float(residual),
            witness=None if passed else witness,
            informational=informational,
        )
        if not passed and not informational:
            logger.warning("%s: %s fails at x=%s, residual %.3g", self.title, name, x, residual)
        self.items.append(item)
        return item

    def extend(self, other: "InteractionReport") -> "InteractionReport":
        self.items.extend(other.items)
        return self

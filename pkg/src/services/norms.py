# src/services/norms.py
"""Two-sided enclosure of the universal norm of a symbolic element.

With ``b = a a*``, ``q_k = b^k`` and ``n_k = ||E0(q_k^2)||``:

    n_k^(1/4k) <= ||a|| <= ((2 |F_k| + 1) n_k)^(1/4k)

where ``F_k`` is the set of positive degrees in the support of ``q_k``.
"""

from __future__ import annotations

import logging

import msgspec

from src.models.crossed_product import E0, CrossedProductElement, adjoint, degree_support, multiply

logger = logging.getLogger(__name__)

DEFAULT_MAX_K = 3
ROUNDING_SLACK = 1e-12


class NormEnclosure(msgspec.Struct, kw_only=True):
    lower: float
    upper: float
    k_used: int
    growth_trace: list[int]
    lower_by_k: list[float] = msgspec.field(default_factory=list)
    upper_by_k: list[float] = msgspec.field(default_factory=list)
    width_by_k: list[float] = msgspec.field(default_factory=list)
    growth_bound: int = 0
    growth_ok: bool = True

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def positive_degrees(a: CrossedProductElement) -> set:
    return {abs(d) for d in degree_support(a)}


def norm_enclosure(a: CrossedProductElement, I, k_max: int = DEFAULT_MAX_K) -> NormEnclosure:
    """Enclose ``||a||`` using ``k = 1..k_max``.

    ``growth_ok`` records that ``|F_k| <= 1 + k M`` with ``M`` the largest
    degree in the support of ``a a*``.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    b = multiply(a, adjoint(a), I)
    largest = max(positive_degrees(b), default=0)
    q = b
    lower_by_k, upper_by_k, widths, trace = [], [], [], []
    lower, upper = 0.0, float("inf")
    growth_ok = True
    for k in range(1, k_max + 1):
        if k > 1:
            q = multiply(q, b, I)
        p = multiply(q, q, I)
        n_k = E0(p).norm()
        support = positive_degrees(q)
        trace.append(len(support))
        growth_ok = growth_ok and len(support) <= 1 + k * largest
        lo = n_k ** (1.0 / (4 * k))
        hi = ((2 * len(support) + 1) * n_k) ** (1.0 / (4 * k))
        lower_by_k.append(lo)
        upper_by_k.append(hi)
        lower, upper = max(lower, lo), min(upper, hi)
        if lower > upper:
            if lower - upper > ROUNDING_SLACK * (1.0 + upper):
                logger.warning("k=%d: bounds cross, lower %.17g > upper %.17g", k, lower, upper)
            else:
                # bounds from different k met up to rounding
                upper = lower
        widths.append(upper - lower)
        logger.debug("k=%d: |F_k|=%d, enclosure [%.6g, %.6g]", k, len(support), lo, hi)
    if not growth_ok:
        logger.warning("degree support outgrew the linear bound: %s", trace)
    return NormEnclosure(
        lower=lower,
        upper=upper,
        k_used=k_max,
        growth_trace=trace,
        lower_by_k=lower_by_k,
        upper_by_k=upper_by_k,
        width_by_k=widths,
        growth_bound=largest,
        growth_ok=growth_ok,
    )

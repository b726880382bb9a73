# src/services/dynamics.py
"""Partial dynamics induced on the block index set of a finite algebra.

Blocks are 0-based. For a complete interaction the corner
``A_x = V_x(1) A V_x(1)`` is carried by ``H_x`` onto ``A_-x = H_x(1) A H_x(1)``,
which induces a partial bijection ``t[x]`` from the blocks supporting
``A_-x`` to the blocks supporting ``A_x``.
"""

from __future__ import annotations

import logging

import msgspec
import numpy as np

from src.exceptions import AmbiguousBlock, FormError, HypothesisError, NotAnInteraction, NotProjection
from src.models.actions import Verdict
from src.models.algebra import AlgebraElement, Tolerance, is_projection, matrix_norm
from src.models.crossed_product import E0, CrossedProductElement, degree_support
from src.models.interaction import Interaction
from src.models.representation import CovariantRep, evaluate
from src.services.interactions import DEFAULT_SAMPLES, check_complete

logger = logging.getLogger(__name__)


def prim_support(p: AlgebraElement, tol=None) -> set:
    """Blocks on which the projection ``p`` is nonzero."""
    tol = Tolerance.coerce(tol)
    if not is_projection(p, tol):
        raise NotProjection("support is only defined for projections", witness=p)
    return {i for i, block in enumerate(p.blocks) if matrix_norm(block) > tol.eps}


def block_seminorm(a: AlgebraElement, i: int) -> float:
    return matrix_norm(a.blocks[i])


def _require_complete(I: Interaction, x: int, tol, rng=None) -> None:
    if I.complete_up_to >= x:
        return
    rng = rng if rng is not None else np.random.default_rng(0)
    report = check_complete(I, x, DEFAULT_SAMPLES, tol, rng)
    if not report.passed:
        failure = report.failures()[0]
        raise NotAnInteraction(
            f"interaction is not complete: {failure.name} fails at x={failure.x}", witness=failure.witness
        )


def induced_partial_map(I: Interaction, x: int, tol=None) -> dict:
    """``t[x]`` as a dict from blocks of ``A_-x`` to blocks of ``A_x``."""
    if x < 1:
        raise ValueError(f"degree must be at least 1, got {x}")
    tol = Tolerance.coerce(tol)
    _require_complete(I, x, tol)
    algebra = I.algebra
    q = I.v1(x)
    dom_neg, dom_pos = prim_support(I.h1(x), tol), prim_support(q, tol)
    responders = {i: set() for i in dom_neg}
    for e in algebra.basis():
        j = next(k for k, block in enumerate(e.blocks) if block.any())
        if j not in dom_pos:
            continue
        compressed = q @ e @ q
        if compressed.norm() <= tol.eps:
            continue
        image = I.H.apply(x, compressed)
        for i in dom_neg:
            if block_seminorm(image, i) > tol.eps:
                responders[i].add(j)
    table = {}
    for i in sorted(dom_neg):
        if len(responders[i]) != 1:
            raise AmbiguousBlock(
                f"block {i} answers to {len(responders[i])} blocks at x={x}", witness=sorted(responders[i])
            )
        table[i] = responders[i].pop()
    if len(set(table.values())) != len(table):
        raise AmbiguousBlock(f"t[{x}] is not injective", witness=table)
    return table


class PartialDynamics(msgspec.Struct, kw_only=True):
    m: int
    x_max: int
    dom_neg: dict[int, list[int]]
    dom_pos: dict[int, list[int]]
    maps: dict[int, dict[int, int]]
    semigroup_ok: bool = True

    def t(self, x: int, i: int) -> int | None:
        return self.maps[x].get(i)

    def fixed_points(self) -> list[tuple[int, int]]:
        return [(x, i) for x in sorted(self.maps) for i, j in sorted(self.maps[x].items()) if i == j]


def _semigroup_holds(maps: dict, x_max: int) -> bool:
    for x in range(1, x_max):
        for y in range(1, x_max - x + 1):
            for i, j in maps[y].items():
                k = maps[x].get(j)
                if k is not None and maps[x + y].get(i) != k:
                    logger.warning("t[%d] != t[%d] o t[%d] at block %d", x + y, x, y, i)
                    return False
    return True


def partial_dynamics(I: Interaction, x_max: int, tol=None) -> PartialDynamics:
    tol = Tolerance.coerce(tol)
    maps, dom_neg, dom_pos = {}, {}, {}
    for x in range(1, x_max + 1):
        maps[x] = induced_partial_map(I, x, tol)
        dom_neg[x] = sorted(prim_support(I.h1(x), tol))
        dom_pos[x] = sorted(prim_support(I.v1(x), tol))
    return PartialDynamics(
        m=I.algebra.num_blocks,
        x_max=x_max,
        dom_neg=dom_neg,
        dom_pos=dom_pos,
        maps=maps,
        semigroup_ok=_semigroup_holds(maps, x_max),
    )


class FreedomVerdict(msgspec.Struct, kw_only=True):
    """Topological freedom up to ``x_max``: no ``t[x]`` has a fixed block.

    On a finite discrete space the fixed-point sets are their own interiors,
    so the three usual formulations coincide.
    """

    verdict: bool
    x_max: int
    fixed_points: list[tuple[int, int]] = msgspec.field(default_factory=list)


def topological_freedom_check(I: Interaction, x_max: int, tol=None) -> FreedomVerdict:
    dynamics = partial_dynamics(I, x_max, tol)
    fixed = dynamics.fixed_points()
    if fixed:
        logger.info("not topologically free up to x=%d: %d fixed blocks", x_max, len(fixed))
    return FreedomVerdict(verdict=not fixed, x_max=x_max, fixed_points=fixed)


def compressed_subspaces_orthogonal(rep: CovariantRep, x: int, i: int, tol=None) -> Verdict:
    """``P1 = sigma(1_i)`` and ``P2 = U_x P1 U_x*`` have orthogonal ranges."""
    eps = Tolerance.coerce(tol).eps
    P1 = rep.sigma(rep.algebra.block_unit(i))
    Ux = rep.U(x)
    P2 = Ux @ P1 @ Ux.conj().T
    residual = matrix_norm(P1 @ P2)
    return Verdict(residual <= eps, residual, None if residual <= eps else (x, i))


def _require_form(a: CrossedProductElement) -> None:
    if not a.is_single_step():
        raise FormError("every monomial must carry exactly one step symbol", witness=a)


def compression_vanishing_check(rep: CovariantRep, I: Interaction, a: CrossedProductElement, i: int,
                                tol=None) -> Verdict:
    """``P_i (sigma x U)(a) P_i = P_i sigma(E0(a)) P_i`` for ``P_i = sigma(1_i)``.

    Requires that block ``i`` moves under every ``t[|d|]`` for ``d`` in the
    support of ``a`` and that the images it moves to are distinct.
    """
    tol = Tolerance.coerce(tol)
    _require_form(a)
    images = {}
    for x in sorted({abs(d) for d in degree_support(a)}):
        table = induced_partial_map(I, x, tol)
        inverse = {j: k for k, j in table.items()}
        forward, backward = table.get(i), inverse.get(i)
        if i in (forward, backward):
            raise HypothesisError(f"block {i} is fixed by t[{x}]", witness=(x, i))
        for target in (forward, backward):
            if target is None:
                continue
            if target in images and images[target] != x:
                raise HypothesisError(
                    f"block {i} is sent to block {target} by two degrees", witness=(images[target], x)
                )
            images[target] = x
    P = rep.sigma(rep.algebra.block_unit(i))
    residual = matrix_norm(P @ evaluate(rep, a) @ P - P @ rep.sigma(E0(a)) @ P)
    return Verdict(residual <= tol.eps, residual, None if residual <= tol.eps else i)


class MarginReport(msgspec.Struct, kw_only=True):
    """``||(sigma x U)(a)|| - ||E0(a)||`` per sample; all must be >= -eps."""

    passed: bool
    margins: list[float]
    freedom: FreedomVerdict | None = None
    bypassed: bool = False


def coefficient_recovery_check(rep: CovariantRep, I: Interaction, samples, tol=None, x_max: int | None = None,
                               bypass: bool = False) -> MarginReport:
    """The representation recovers ``E0``: ``||E0(a)|| <= ||(sigma x U)(a)|| + eps``.

    Needs topological freedom up to the largest degree in ``samples``;
    ``bypass=True`` skips that requirement so a non-free system can show the
    bound failing.
    """
    tol = Tolerance.coerce(tol)
    samples = list(samples)
    for a in samples:
        _require_form(a)
    if x_max is None:
        x_max = max((a.max_degree for a in samples), default=0)
    freedom = None
    if x_max >= 1:
        freedom = topological_freedom_check(I, x_max, tol)
        if not freedom.verdict and not bypass:
            raise HypothesisError(
                f"not topologically free up to x={x_max}", witness=freedom.fixed_points
            )
    margins = [matrix_norm(evaluate(rep, a)) - E0(a).norm() for a in samples]
    passed = all(m >= -tol.eps for m in margins)
    if not passed:
        logger.warning("coefficient recovery fails, worst margin %.6g", min(margins))
    return MarginReport(passed=passed, margins=margins, freedom=freedom, bypassed=bypass)

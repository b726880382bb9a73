# src/services/interactions.py
"""Checks of the interaction axioms, completeness and the projection
families, plus the two constructions of the dual action."""

from __future__ import annotations

import logging

import numpy as np
from scipy import linalg

from src.exceptions import (
    HypothesisFailed,
    NotAnInteraction,
    NotPartialIsometry,
    SingularRestriction,
)
from src.models.actions import Action, LinearMapOnAlgebra
from src.models.algebra import (
    FiniteCStarAlgebra,
    Tolerance,
    commutator_norm,
    is_partial_isometry,
    is_projection,
    operator_norm,
)
from src.models.interaction import Interaction, InteractionReport

logger = logging.getLogger(__name__)

DEFAULT_X_MAX = 4
DEFAULT_SAMPLES = 24
INJECTIVITY_THRESHOLD = 1e-7

AXIOMS = ("vhv", "hvh", "v_mult", "h_mult")


def _rng(rng):
    return rng if rng is not None else np.random.default_rng(0)


def sample_elements(algebra, num_samples, rng) -> list:
    """The unit, the algebra's basis samples, then ``num_samples`` random elements."""
    samples = [algebra.unit()] + list(algebra.basis_samples())
    samples += [algebra.random_element(rng) for _ in range(num_samples)]
    return samples


def axiom_residual(I: Interaction, axiom: str, x: int, a, b=None) -> float:
    """Residual of one interaction axiom at degree ``x``.

    For the multiplicativity axioms ``a`` is the range element (``H_x(c)``
    for ``v_mult``, ``V_x(c)`` for ``h_mult``) and it is tried on both sides
    of ``b``.
    """
    V, H, norm = I.V, I.H, I.algebra.norm
    if axiom == "vhv":
        va = V.apply(x, a)
        return norm(V.apply(x, H.apply(x, va)) - va)
    if axiom == "hvh":
        ha = H.apply(x, a)
        return norm(H.apply(x, V.apply(x, ha)) - ha)
    if axiom in ("v_mult", "h_mult"):
        f = V if axiom == "v_mult" else H
        fa, fb = f.apply(x, a), f.apply(x, b)
        return max(norm(f.apply(x, a @ b) - fa @ fb), norm(f.apply(x, b @ a) - fb @ fa))
    raise ValueError(f"unknown axiom {axiom!r}")


def check_interaction(I: Interaction, x_max: int = DEFAULT_X_MAX, num_samples: int = DEFAULT_SAMPLES,
                      tol=None, rng=None) -> InteractionReport:
    """Sample the four interaction axioms at every degree ``1..x_max``.

    The multiplicativity axioms are tested with one factor taken from the
    range of the other action, ``H_x(c)`` resp. ``V_x(c)`` for sampled ``c``.
    Sets ``I.certified_up_to`` to the largest degree below which every axiom
    passed.
    """
    if x_max < 1:
        raise ValueError(f"x_max must be at least 1, got {x_max}")
    eps = Tolerance.coerce(tol).eps
    rng = _rng(rng)
    report = InteractionReport(title="interaction")
    samples = sample_elements(I.algebra, num_samples, rng)
    partners = samples[1:] + samples[:1]
    certified = 0
    for x in range(1, x_max + 1):
        worst = dict.fromkeys(AXIOMS, 0.0)
        witness = dict.fromkeys(AXIOMS)
        for a, b in zip(samples, partners):
            trials = (
                ("vhv", a, None),
                ("hvh", a, None),
                ("v_mult", I.H.apply(x, a), b),
                ("h_mult", I.V.apply(x, a), b),
            )
            for axiom, left, right in trials:
                residual = axiom_residual(I, axiom, x, left, right)
                if residual > worst[axiom]:
                    worst[axiom] = residual
                    witness[axiom] = a if right is None else (a, b)
        for axiom in AXIOMS:
            report.add(axiom, x, worst[axiom], eps, witness[axiom])
        if certified == x - 1 and all(worst[axiom] <= eps for axiom in AXIOMS):
            certified = x
    I.certified_up_to = max(I.certified_up_to, certified)
    logger.info("interaction axioms certified up to x=%d (requested %d)", certified, x_max)
    return report


def _require_interaction(I, x_max, num_samples, tol, rng):
    if I.certified_up_to >= x_max:
        return
    report = check_interaction(I, x_max, num_samples, tol, rng)
    if not report.passed:
        failure = report.failures()[0]
        raise NotAnInteraction(
            f"axiom {failure.name} fails at x={failure.x} (residual {failure.residual:.3g})",
            witness=failure.witness,
        )


def check_complete(I: Interaction, x_max: int = DEFAULT_X_MAX, num_samples: int = DEFAULT_SAMPLES,
                   tol=None, rng=None) -> InteractionReport:
    """Completeness: ``H_x V_x(a) = H_x(1) a H_x(1)``, ``V_x H_x(a) = V_x(1) a V_x(1)``
    and ``[H_y(1), V_x(1)] = 0`` for all ``x, y <= x_max``."""
    eps = Tolerance.coerce(tol).eps
    rng = _rng(rng)
    _require_interaction(I, x_max, num_samples, tol, rng)
    norm = I.algebra.norm
    report = InteractionReport(title="completeness")
    samples = sample_elements(I.algebra, num_samples, rng)
    complete = 0
    for x in range(1, x_max + 1):
        p, q = I.h1(x), I.v1(x)
        worst_hv, worst_vh, w_hv, w_vh = 0.0, 0.0, None, None
        for a in samples:
            r = norm(I.H.apply(x, I.V.apply(x, a)) - p @ a @ p)
            if r > worst_hv:
                worst_hv, w_hv = r, a
            r = norm(I.V.apply(x, I.H.apply(x, a)) - q @ a @ q)
            if r > worst_vh:
                worst_vh, w_vh = r, a
        report.add("hv_corner", x, worst_hv, eps, w_hv)
        report.add("vh_corner", x, worst_vh, eps, w_vh)
        commute = 0.0
        for y in range(1, x_max + 1):
            h = I.h1(y)
            commute = max(commute, norm(h @ q - q @ h))
        report.add("unit_projections_commute", x, commute, eps)
        if complete == x - 1 and max(worst_hv, worst_vh, commute) <= eps:
            complete = x
    I.complete_up_to = max(I.complete_up_to, complete)
    return report


def check_projection_family(I: Interaction, x_max: int = DEFAULT_X_MAX, num_samples: int = DEFAULT_SAMPLES,
                            tol=None, rng=None) -> InteractionReport:
    """``V_x(1)``, ``H_x(1)`` are decreasing projections, absorb into later
    degrees, and act as units on the ranges of later degrees."""
    tol = Tolerance.coerce(tol)
    eps = tol.eps
    rng = _rng(rng)
    _require_interaction(I, x_max, num_samples, tol, rng)
    norm = I.algebra.norm
    report = InteractionReport(title="projection family")
    samples = sample_elements(I.algebra, num_samples, rng)
    for x in range(1, x_max + 1):
        q, p = I.v1(x), I.h1(x)
        report.add("v1_projection", x, max(norm(q - q.adjoint()), norm(q @ q - q)), eps, q)
        report.add("h1_projection", x, max(norm(p - p.adjoint()), norm(p @ p - p)), eps, p)
        decreasing = absorbs = unit_on_range = 0.0
        for y in range(x, x_max + 1):
            qy, py = I.v1(y), I.h1(y)
            decreasing = max(decreasing, norm(q @ qy - qy), norm(p @ py - py))
            for a in samples:
                va, ha = I.V.apply(y, a), I.H.apply(y, a)
                absorbs = max(
                    absorbs,
                    norm(I.V.apply(y, p @ a) - va),
                    norm(I.V.apply(y, a @ p) - va),
                    norm(I.H.apply(y, q @ a) - ha),
                    norm(I.H.apply(y, a @ q) - ha),
                )
                unit_on_range = max(
                    unit_on_range,
                    norm(q @ va - va), norm(va @ q - va),
                    norm(p @ ha - ha), norm(ha @ p - ha),
                )
        report.add("decreasing", x, decreasing, eps)
        report.add("absorption", x, absorbs, eps)
        report.add("unit_on_range", x, unit_on_range, eps)
        report.add("v1_h1_commute", x, norm(q @ p - p @ q), eps, informational=True)
    return report


def check_conditional_expectations(I: Interaction, x: int, num_samples: int = DEFAULT_SAMPLES,
                                   tol=None, rng=None) -> InteractionReport:
    """``E_V = V_x H_x`` and ``E_H = H_x V_x`` are conditional expectations
    onto the ranges, and ``V_x``, ``H_x`` invert one another between them."""
    eps = Tolerance.coerce(tol).eps
    rng = _rng(rng)
    _require_interaction(I, x, num_samples, tol, rng)
    algebra, norm = I.algebra, I.algebra.norm
    V = lambda a: I.V.apply(x, a)  # noqa: E731
    H = lambda a: I.H.apply(x, a)  # noqa: E731
    expectations = {"E_V": lambda a: V(H(a)), "E_H": lambda a: H(V(a))}
    samples = sample_elements(algebra, num_samples, rng)
    triples = list(zip(samples, samples[1:] + samples[:1], samples[2:] + samples[:2]))
    positives = [algebra.random_positive(rng) for _ in range(num_samples)]
    report = InteractionReport(title=f"conditional expectations at x={x}")
    for name, E in expectations.items():
        idempotent = max(norm(E(E(a)) - E(a)) for a in samples)
        module = max(norm(E(E(a) @ b @ E(c)) - E(a) @ E(b) @ E(c)) for a, b, c in triples)
        floor = min(algebra.spectral_floor(E(p)) for p in positives) if positives else 0.0
        report.add(f"{name}_idempotent", x, idempotent, eps)
        report.add(f"{name}_module", x, module, eps)
        report.add(f"{name}_positive", x, max(0.0, -floor), eps)
    inverse = max(
        max(norm(H(V(H(c))) - H(c)), norm(V(H(V(c))) - V(c))) for c in samples
    )
    report.add("inverse_pair", x, inverse, eps)
    through = max(
        max(norm(V(H(V(a))) - V(a)), norm(H(V(H(a))) - H(a))) for a in samples
    )
    report.add("factor_through_expectation", x, through, eps)
    return report


def check_central_multiplicativity(I: Interaction, x_max: int = DEFAULT_X_MAX,
                                   num_samples: int = DEFAULT_SAMPLES, tol=None, rng=None) -> InteractionReport:
    """When every ``H_x(1)`` is central and the interaction is complete,
    ``V_x`` is multiplicative on all of the algebra.

    Centrality is informational; multiplicativity is required exactly when
    centrality and completeness hold at that degree.
    """
    tol = Tolerance.coerce(tol)
    eps = tol.eps
    rng = _rng(rng)
    if I.complete_up_to < x_max:
        check_complete(I, x_max, num_samples, tol, rng)
    algebra, norm = I.algebra, I.algebra.norm
    samples = sample_elements(algebra, num_samples, rng)
    partners = samples[1:] + samples[:1]
    report = InteractionReport(title="central unit images")
    for x in range(1, x_max + 1):
        p = I.h1(x)
        central = max(norm(p @ e - e @ p) for e in algebra.basis_samples())
        mult = max(
            norm(I.V.apply(x, a @ b) - I.V.apply(x, a) @ I.V.apply(x, b))
            for a, b in zip(samples, partners)
        )
        premise = central <= eps and I.complete_up_to >= x
        report.add("h1_central", x, central, eps, p, informational=True)
        report.add("v_multiplicative", x, mult, eps, informational=not premise)
    return report


def check_hereditary_ranges(I: Interaction, x_max: int = DEFAULT_X_MAX, tol=None) -> InteractionReport:
    """``V_x(A) = V_x(1) A V_x(1)`` and likewise for ``H``: the range sits in
    the corner and reaches every corner matrix unit."""
    eps = Tolerance.coerce(tol).eps
    algebra = I.algebra
    report = InteractionReport(title="hereditary ranges")
    for x in range(1, x_max + 1):
        for name, act, proj in (("v_range_is_corner", I.V, I.v1(x)), ("h_range_is_corner", I.H, I.h1(x))):
            M = act.superoperator(x)
            inside = max(operator_norm(proj @ act.apply(x, e) @ proj - act.apply(x, e)) for e in algebra.basis())
            targets = np.column_stack([algebra.coordinates(proj @ e @ proj) for e in algebra.basis()])
            solution = linalg.lstsq(M, targets)[0]
            reached = float(np.max(np.linalg.norm(M @ solution - targets, axis=0)))
            report.add(name, x, max(inside, reached), eps)
    return report


def derive_dual_from_rep(V: Action, U1: np.ndarray, tol=None) -> Action:
    """The action ``a -> U1* a U1`` paired with ``V`` by a partial isometry
    acting on the algebra's block-diagonal embedding."""
    tol = Tolerance.coerce(tol)
    U1 = np.asarray(U1, dtype=complex)
    if U1.shape != (V.algebra.size, V.algebra.size):
        raise ValueError(f"U1 must be {V.algebra.size}x{V.algebra.size}, got {U1.shape}")
    if not is_partial_isometry(U1, tol):
        raise NotPartialIsometry("U1 is not a partial isometry", witness=U1)
    generator = LinearMapOnAlgebra.conjugation(V.algebra, U1.conj().T, tol)
    logger.info("derived dual action by conjugation with U1*")
    return Action(generator)


def _compression_superoperator(algebra: FiniteCStarAlgebra, p) -> np.ndarray:
    return np.column_stack([algebra.coordinates(p @ e @ p) for e in algebra.basis()])


class DualTable:
    """``H_x`` for ``x <= x_max`` stored as coordinate matrices."""

    def __init__(self, algebra: FiniteCStarAlgebra, matrices: dict, residuals: dict):
        self.algebra = algebra
        self.matrices = matrices
        self.residuals = residuals
        self.x_max = max(matrices)
        self.semigroup_residual = 0.0

    def apply(self, n: int, a):
        if n == 0:
            return a
        if n not in self.matrices:
            raise ValueError(f"dual table holds degrees 1..{self.x_max}, asked for {n}")
        return self.algebra.from_coordinates(self.matrices[n] @ self.algebra.coordinates(a))

    def __call__(self, n, a):
        return self.apply(n, a)

    def unit_image(self, n: int):
        return self.apply(n, self.algebra.unit())

    def superoperator(self, n: int) -> np.ndarray:
        if n == 0:
            return np.eye(self.algebra.dim, dtype=complex)
        return self.matrices[n]


def _fail(item, message, witness=None):
    logger.warning("dual construction hypothesis %s fails: %s", item, message)
    raise HypothesisFailed(message, item=item, witness=witness)


def derive_dual_from_projections(V: Action, P: list, tol=None,
                                 injectivity_threshold: float = INJECTIVITY_THRESHOLD) -> DualTable:
    """Rebuild the dual action from ``V`` and its projection family.

    ``P[x - 1]`` is ``P_x`` (``P_0 = 1``). After checking the hypotheses that
    make the construction unique, ``H_x(a)`` is the unique ``h`` in the
    corner ``P_x A P_x`` with ``V_x(h) = V_x(1) a V_x(1)``, solved by least
    squares over an orthonormal basis of the corner.

    :raises HypothesisFailed: a hypothesis fails; ``item`` names which one
    :raises SingularRestriction: ``V_x`` is not injective on the corner
    """
    tol = Tolerance.coerce(tol)
    eps = tol.eps
    algebra = V.algebra
    x_max = len(P)
    if x_max < 1:
        raise ValueError("need at least P_1")
    projections = [algebra.unit()] + list(P)
    norm = operator_norm

    for x in range(1, x_max + 1):
        q = V.unit_image(x)
        if not is_projection(q, tol):
            _fail("v1_projection", f"V_{x}(1) is not a projection", q)
        if not is_projection(projections[x], tol):
            _fail("p_projection", f"P_{x} is not a projection", projections[x])
        if norm(projections[x - 1] @ projections[x] - projections[x]) > eps:
            _fail("p_decreasing", f"P_{x} is not below P_{x - 1}", projections[x])
    for x in range(1, x_max + 1):
        q = V.unit_image(x)
        for y in range(0, x_max + 1):
            if commutator_norm(q, projections[y]) > eps:
                _fail("commute", f"V_{x}(1) does not commute with P_{y}", (x, y))
            if x + y <= x_max:
                residual = norm(V.apply(x, projections[x + y]) - q @ projections[y])
                if residual > eps:
                    _fail("shift_compatibility", f"V_{x}(P_{x + y}) != V_{x}(1) P_{y}", (x, y))

    matrices, residuals = {}, {}
    for x in range(1, x_max + 1):
        q, p = V.unit_image(x), projections[x]
        corner = linalg.orth(_compression_superoperator(algebra, p))
        Vx = V.superoperator(x)
        targets = _compression_superoperator(algebra, q)
        image_of_corner = Vx @ corner
        if corner.shape[1]:
            floor = float(linalg.svdvals(image_of_corner)[-1])
            if floor < injectivity_threshold:
                raise SingularRestriction(
                    f"V_{x} is not injective on P_{x} A P_{x} (smallest singular value {floor:.3g})",
                    witness=x,
                )
            coefficients = linalg.lstsq(image_of_corner, targets)[0]
            Hx = corner @ coefficients
            residual = float(np.max(np.linalg.norm(image_of_corner @ coefficients - targets, axis=0)))
        else:
            Hx = np.zeros((algebra.dim, algebra.dim), dtype=complex)
            residual = float(np.max(np.linalg.norm(targets, axis=0)))
        if residual > eps:
            _fail("range_is_corner", f"V_{x}(P_{x} A P_{x}) misses the corner of V_{x}(1)", x)
        for e in algebra.basis():
            for f in algebra.basis():
                a, b = p @ e @ p, p @ f @ p
                if norm(V.apply(x, a @ b) - V.apply(x, a) @ V.apply(x, b)) > eps:
                    _fail("corner_homomorphism", f"V_{x} is not multiplicative on P_{x} A P_{x}", (a, b))
        matrices[x] = Hx
        residuals[x] = residual

    table = DualTable(algebra, matrices, residuals)
    worst = 0.0
    for x in range(1, x_max + 1):
        for y in range(1, x_max + 1 - x):
            for e in algebra.basis():
                worst = max(worst, norm(table.apply(x, table.apply(y, e)) - table.apply(x + y, e)))
    table.semigroup_residual = worst
    if worst > eps:
        _fail("semigroup", f"derived maps fail H_x H_y = H_(x+y) (residual {worst:.3g})")
    logger.info("derived dual table up to x=%d, worst residual %.3g", x_max, max(residuals.values()))
    return table


def dual_agreement(first, second, x_max: int, algebra: FiniteCStarAlgebra) -> float:
    """Largest ``||first_x(e) - second_x(e)||`` over matrix units and ``x <= x_max``."""
    return max(
        operator_norm(first.apply(x, e) - second.apply(x, e))
        for x in range(1, x_max + 1)
        for e in algebra.basis()
    )

# src/services/covariance.py
"""Verification of covariant representations and property (*)."""

from __future__ import annotations

import logging

import msgspec
import numpy as np
from scipy import linalg

from src.models.actions import Verdict
from src.models.algebra import Tolerance, halmos_wallen_check, is_partial_isometry, matrix_norm
from src.models.crossed_product import E0, CrossedProductElement
from src.models.interaction import Interaction, InteractionReport
from src.models.representation import CovariantRep, evaluate
from src.services.interactions import DEFAULT_SAMPLES, DEFAULT_X_MAX, _require_interaction, sample_elements

logger = logging.getLogger(__name__)


def _range_residual(rep: CovariantRep, M: np.ndarray) -> float:
    """Operator-norm distance from ``M`` to its least-squares projection onto ``sigma(A)``."""
    images = rep.sigma_images.reshape(rep.algebra.dim, -1).T
    coeffs = linalg.lstsq(images, M.reshape(-1))[0]
    return matrix_norm(M - (images @ coeffs).reshape(M.shape))


def verify_covariant(rep: CovariantRep, I: Interaction, x_max: int = DEFAULT_X_MAX,
                     num_samples: int = DEFAULT_SAMPLES, tol=None, rng=None) -> InteractionReport:
    """For each ``x <= x_max``: ``U_x`` is a partial isometry,
    ``sigma(V_x(a)) = U_x sigma(a) U_x*``, and ``U_x* sigma(a) U_x`` lies in
    ``sigma(A)`` and equals ``sigma(H_x(a))``."""
    tol = Tolerance.coerce(tol)
    eps = tol.eps
    rng = rng if rng is not None else np.random.default_rng(0)
    _require_interaction(I, x_max, num_samples, tol, rng)
    report = InteractionReport(title="covariant representation")
    samples = sample_elements(rep.algebra, num_samples, rng)
    for x in range(1, x_max + 1):
        Ux = rep.U(x)
        report.add("u_partial_isometry", x, matrix_norm(Ux @ Ux.conj().T @ Ux - Ux), eps, Ux)
        covariance = in_range = dual = 0.0
        w_cov = w_range = w_dual = None
        for a in samples:
            sa = rep.sigma(a)
            r = matrix_norm(rep.sigma(I.V.apply(x, a)) - Ux @ sa @ Ux.conj().T)
            if r > covariance:
                covariance, w_cov = r, a
            pulled = Ux.conj().T @ sa @ Ux
            r = _range_residual(rep, pulled)
            if r > in_range:
                in_range, w_range = r, a
            r = matrix_norm(pulled - rep.sigma(I.H.apply(x, a)))
            if r > dual:
                dual, w_dual = r, a
        report.add("covariance", x, covariance, eps, w_cov)
        report.add("dual_in_range", x, in_range, eps, w_range)
        report.add("dual_covariance", x, dual, eps, w_dual)
    return report


class PowerCertificate(msgspec.Struct, kw_only=True):
    """Every power of ``U_1`` is a partial isometry once the source
    projections of the powers stop changing."""

    certified: bool
    stabilized_at: int | None = None
    checked_up_to: int = 0
    halmos_wallen_agree: bool = True


def certify_power_partial_isometries(rep: CovariantRep, tol=None, max_power: int | None = None) -> PowerCertificate:
    """Inductive certificate that ``U_x`` is a partial isometry for every ``x``.

    ``U_(x+1) = U_x U_1`` is a partial isometry iff ``U_x* U_x`` commutes with
    ``U_1 U_1*``; the source projections ``U_x* U_x`` decrease, and once two
    consecutive ones agree they agree forever, since
    ``U_(x+1)* U_(x+1) = U_1* (U_x* U_x) U_1``.
    """
    tol = Tolerance.coerce(tol)
    eps = tol.eps
    limit = max_power if max_power is not None else rep.hilbert_dim + 1
    U1 = rep.U(1)
    if not is_partial_isometry(U1, tol):
        return PowerCertificate(certified=False, checked_up_to=0)
    agree = True
    for x in range(1, limit + 1):
        Ux, Unext = rep.U(x), rep.U(x + 1)
        predicted, actual = halmos_wallen_check(Ux, U1, tol)
        agree = agree and predicted == actual
        if not actual:
            logger.info("U_%d is not a partial isometry", x + 1)
            return PowerCertificate(certified=False, checked_up_to=x, halmos_wallen_agree=agree)
        source, next_source = Ux.conj().T @ Ux, Unext.conj().T @ Unext
        if matrix_norm(source - next_source) <= eps:
            logger.info("power partial isometries certified, source projections stable from x=%d", x)
            return PowerCertificate(certified=True, stabilized_at=x, checked_up_to=x + 1,
                                    halmos_wallen_agree=agree)
    return PowerCertificate(certified=False, checked_up_to=limit + 1, halmos_wallen_agree=agree)


def property_star_check(rep: CovariantRep, a: CrossedProductElement, tol=None) -> Verdict:
    """``||E0(a)|| <= ||(sigma x U)(a)|| + eps``."""
    eps = Tolerance.coerce(tol).eps
    e0 = E0(a).norm()
    image = matrix_norm(evaluate(rep, a))
    passed = e0 <= image + eps
    if not passed:
        logger.warning("property (*) fails: ||E0(a)|| = %.6g > %.6g", e0, image)
    return Verdict(passed, max(0.0, e0 - image), None if passed else a,
                   {"e0_norm": e0, "rep_norm": image, "margin": image - e0})

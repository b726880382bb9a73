# src/models/crossed_product.py
"""The dense *-algebra of the crossed product, handled symbolically.

A monomial is a word ``c_0 g(s_1) c_1 ... g(s_m) c_m`` with coefficients in
the algebra and steps ``g(x) = U_x`` (positive type) or ``g(x) = U_x*``
(negative type). Elements are finite sums of such words, never mixing both
kinds of steps inside one word.

Products are brought to this form with the relations

    U_x a U_y*  = V_x(a) U_(y-x)*   (x <= y),   U_(x-y) V_y(a)   (x > y)
    U_x* a U_y  = H_x(a) U_(y-x)    (x <= y),   U_(x-y)* H_y(a)  (x > y)

followed by three further valid identities: a coefficient commuting with
``H_x(1)`` moves left through ``U_x`` as ``V_x(c)`` (dually for ``U_x*``
and ``V_x(1)``), ``U_x 1 U_y = U_(x+y)``, and ``c U_x = c V_x(1) U_x H_x(1)``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from numbers import Number

import numpy as np

from src.exceptions import AlgebraMismatch
from src.models.algebra import AlgebraElement, FiniteCStarAlgebra, operator_norm

logger = logging.getLogger(__name__)

PRUNE_THRESHOLD = 1e-14
# Coefficients are moved through a step only when they commute with the
# relevant projection at this level, so rewriting adds no visible error.
COMMUTE_THRESHOLD = 1e-12


class MonomialType(str, enum.Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"

    def __str__(self):
        return self.value

    @property
    def sign(self) -> int:
        return 1 if self is MonomialType.POSITIVE else -1

    def flipped(self) -> "MonomialType":
        return MonomialType.NEGATIVE if self is MonomialType.POSITIVE else MonomialType.POSITIVE


@dataclass(frozen=True, eq=False)
class Monomial:
    """``coeffs[0] g(steps[0]) coeffs[1] ... g(steps[-1]) coeffs[-1]``."""

    coeffs: tuple
    steps: tuple = ()
    kind: MonomialType = MonomialType.POSITIVE

    def __post_init__(self):
        if len(self.coeffs) != len(self.steps) + 1:
            raise ValueError("a monomial has exactly one more coefficient than steps")
        if any(int(s) < 1 for s in self.steps):
            raise ValueError(f"steps must be positive integers, got {self.steps}")
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))
        if not self.steps:
            object.__setattr__(self, "kind", MonomialType.POSITIVE)

    @property
    def degree(self) -> int:
        return sum(self.steps)

    @property
    def signed_degree(self) -> int:
        return self.kind.sign * self.degree

    @property
    def signed_steps(self) -> tuple:
        return tuple(self.kind.sign * s for s in self.steps)

    def scaled(self, scalar) -> "Monomial":
        return Monomial((scalar * self.coeffs[0],) + self.coeffs[1:], self.steps, self.kind)

    def adjoint(self) -> "Monomial":
        return Monomial(
            tuple(c.adjoint() for c in reversed(self.coeffs)),
            tuple(reversed(self.steps)),
            self.kind.flipped(),
        )


class CrossedProductElement:
    """Finite sum of non-mixed monomials over one algebra."""

    def __init__(self, algebra: FiniteCStarAlgebra, terms=()):
        self.algebra = algebra
        self.terms = tuple(terms)
        for term in self.terms:
            if term.coeffs[0].algebra != algebra:
                raise AlgebraMismatch("monomial coefficients live over another algebra")

    @classmethod
    def from_algebra(cls, a: AlgebraElement) -> "CrossedProductElement":
        return cls(a.algebra, (Monomial((a,)),))

    @classmethod
    def zero(cls, algebra) -> "CrossedProductElement":
        return cls(algebra, ())

    @classmethod
    def generator(cls, algebra, x: int, adjoint: bool = False) -> "CrossedProductElement":
        """``U_x`` or, with ``adjoint``, ``U_x*``."""
        if x == 0:
            return cls.from_algebra(algebra.unit())
        kind = MonomialType.NEGATIVE if adjoint else MonomialType.POSITIVE
        return cls(algebra, (Monomial((algebra.unit(), algebra.unit()), (x,), kind),))

    def _check_same(self, other):
        if not isinstance(other, CrossedProductElement):
            raise TypeError(f"expected CrossedProductElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatch("elements live over different algebras")

    def __add__(self, other):
        self._check_same(other)
        return CrossedProductElement(self.algebra, combine_terms(self.terms + other.terms))

    def __neg__(self):
        return CrossedProductElement(self.algebra, tuple(t.scaled(-1) for t in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return CrossedProductElement(self.algebra, tuple(t.scaled(scalar) for t in self.terms))

    __rmul__ = __mul__

    @property
    def max_degree(self) -> int:
        """Largest total step count of a single monomial."""
        return max((t.degree for t in self.terms), default=0)

    def is_single_step(self) -> bool:
        return all(len(t.steps) <= 1 for t in self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"CrossedProductElement(terms={len(self.terms)}, support={sorted(degree_support(self))})"


def _is_unit(c: AlgebraElement) -> bool:
    return operator_norm(c - c.algebra.unit()) <= PRUNE_THRESHOLD


def _cancel_mixed(coeffs: list, steps: list, I) -> None:
    """Rewrite adjacent steps of opposite sign until none remain (in place).

    Every rewrite lowers the total step count, so this terminates.
    """
    i = 0
    while i < len(steps) - 1:
        s, t = steps[i], steps[i + 1]
        if (s > 0) == (t > 0):
            i += 1
            continue
        x, y = abs(s), abs(t)
        middle = coeffs[i + 1]
        act = I.V if s > 0 else I.H
        sign = 1 if s > 0 else -1
        if x <= y:
            # g(x) c g(-y) = act_x(c) g(-(y - x))
            coeffs[i] = coeffs[i] @ act.apply(x, middle)
            del coeffs[i + 1]
            if x == y:
                coeffs[i] = coeffs[i] @ coeffs[i + 1]
                del coeffs[i + 1]
                del steps[i : i + 2]
            else:
                steps[i : i + 2] = [-sign * (y - x)]
        else:
            # g(x) c g(-y) = g(x - y) act_y(c)
            coeffs[i + 1] = act.apply(y, middle) @ coeffs[i + 2]
            del coeffs[i + 2]
            steps[i : i + 2] = [sign * (x - y)]
        i = max(i - 1, 0)


def _push_left(coeffs: list, steps: list, I) -> None:
    """Move coefficients leftwards through steps when they commute with the
    source projection, then fuse steps separated by the unit."""
    unit = I.algebra.unit()
    for i in range(len(steps) - 1, -1, -1):
        c = coeffs[i + 1]
        x = abs(steps[i])
        if steps[i] > 0:
            source, act = I.h1(x), I.V
        else:
            source, act = I.v1(x), I.H
        if operator_norm(c @ source - source @ c) <= COMMUTE_THRESHOLD:
            coeffs[i] = coeffs[i] @ act.apply(x, c)
            coeffs[i + 1] = unit
    i = 0
    while i < len(steps) - 1:
        if _is_unit(coeffs[i + 1]):
            steps[i : i + 2] = [steps[i] + steps[i + 1]]
            del coeffs[i + 1]
        else:
            i += 1


def _compress(coeffs: list, steps: list, I) -> None:
    """``c U_x d -> c V_x(1) U_x H_x(1) d`` and the mirror rule for ``U_x*``."""
    for i, s in enumerate(steps):
        x = abs(s)
        left, right = (I.v1(x), I.h1(x)) if s > 0 else (I.h1(x), I.v1(x))
        coeffs[i] = coeffs[i] @ left
        coeffs[i + 1] = right @ coeffs[i + 1]


def normalize_word(coeffs, signed_steps, I, prune: float = PRUNE_THRESHOLD) -> Monomial | None:
    """Bring a possibly mixed word to a non-mixed monomial, or ``None`` if it vanishes."""
    coeffs = list(coeffs)
    steps = [int(s) for s in signed_steps]
    if len(coeffs) != len(steps) + 1:
        raise ValueError("a word has exactly one more coefficient than steps")
    zero_steps = [k for k, s in enumerate(steps) if s == 0]
    for k in reversed(zero_steps):
        coeffs[k] = coeffs[k] @ coeffs[k + 1]
        del coeffs[k + 1]
        del steps[k]
    _cancel_mixed(coeffs, steps, I)
    if steps:
        _push_left(coeffs, steps, I)
        _compress(coeffs, steps, I)
    if any(operator_norm(c) <= prune for c in coeffs):
        return None
    kind = MonomialType.NEGATIVE if steps and steps[0] < 0 else MonomialType.POSITIVE
    return Monomial(tuple(coeffs), tuple(abs(s) for s in steps), kind)


def _same(a: AlgebraElement, b: AlgebraElement) -> bool:
    return a is b or all(np.array_equal(x, y) for x, y in zip(a.blocks, b.blocks))


def combine_terms(terms, prune: float = PRUNE_THRESHOLD) -> tuple:
    """Merge monomials with the same step pattern that differ in at most one
    coefficient slot, and drop the ones whose coefficients vanish."""
    groups: dict = {}
    for term in terms:
        bucket = groups.setdefault((term.kind, term.steps), [])
        for k, existing in enumerate(bucket):
            differing = [j for j, (c, d) in enumerate(zip(existing.coeffs, term.coeffs)) if not _same(c, d)]
            if len(differing) <= 1:
                coeffs = list(existing.coeffs)
                j = differing[0] if differing else 0
                coeffs[j] = existing.coeffs[j] + term.coeffs[j]
                bucket[k] = Monomial(tuple(coeffs), existing.steps, existing.kind)
                break
        else:
            bucket.append(term)
    out = []
    for bucket in groups.values():
        out.extend(t for t in bucket if all(operator_norm(c) > prune for c in t.coeffs))
    return tuple(out)


def from_words(algebra, words, I) -> CrossedProductElement:
    """Element from raw words ``[(coeffs, signed_steps), ...]``, normalized."""
    terms = []
    for coeffs, signed_steps in words:
        term = normalize_word(coeffs, signed_steps, I)
        if term is not None:
            terms.append(term)
    return CrossedProductElement(algebra, combine_terms(terms))


def multiply(a: CrossedProductElement, b: CrossedProductElement, I) -> CrossedProductElement:
    a._check_same(b)
    if a.algebra != I.algebra:
        raise AlgebraMismatch("elements and interaction live over different algebras")
    terms = []
    for s in a.terms:
        for t in b.terms:
            coeffs = s.coeffs[:-1] + (s.coeffs[-1] @ t.coeffs[0],) + t.coeffs[1:]
            term = normalize_word(coeffs, s.signed_steps + t.signed_steps, I)
            if term is not None:
                terms.append(term)
    return CrossedProductElement(a.algebra, combine_terms(terms))


def adjoint(a: CrossedProductElement) -> CrossedProductElement:
    return CrossedProductElement(a.algebra, tuple(t.adjoint() for t in a.terms))


def E0(a: CrossedProductElement) -> AlgebraElement:
    """Degree-zero part."""
    total = a.algebra.zero()
    for term in a.terms:
        if not term.steps:
            total = total + term.coeffs[0]
    return total


def degree_support(a: CrossedProductElement) -> set:
    return {t.signed_degree for t in a.terms if t.steps}


def quasi_monomials(a: CrossedProductElement) -> dict:
    """Terms grouped by signed degree; degree 0 holds the coefficient part."""
    groups: dict = {}
    for term in a.terms:
        groups.setdefault(term.signed_degree, []).append(term)
    return groups


def power(a: CrossedProductElement, n: int, I) -> CrossedProductElement:
    if n < 0:
        raise ValueError(f"power must be a natural number, got {n}")
    result = CrossedProductElement.from_algebra(a.algebra.unit())
    base = a
    while n:
        if n & 1:
            result = multiply(result, base, I)
        n >>= 1
        if n:
            base = multiply(base, base, I)
    return result


def random_crossed_element(I, rng: np.random.Generator, degrees=(1, -1, 2, -2), num_terms: int = 3,
                           max_steps: int = 1, scale: float = 1.0) -> CrossedProductElement:
    """Random element: a coefficient term plus ``num_terms`` words of up to
    ``max_steps`` steps drawn from ``degrees`` (mixed words allowed)."""
    algebra = I.algebra
    words = [((scale * algebra.random_element(rng),), ())]
    for _ in range(num_terms):
        length = int(rng.integers(1, max_steps + 1))
        steps = tuple(int(rng.choice(degrees)) for _ in range(length))
        coeffs = tuple(scale * algebra.random_element(rng) for _ in range(length + 1))
        words.append((coeffs, steps))
    return from_words(algebra, words, I)

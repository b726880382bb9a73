# src/schemas/payloads.py
"""JSON payloads read by the CLI and the HTTP endpoints, and the encoder
for everything they write back.

Complex numbers travel as ``[re, im]`` pairs; matrices are row lists of
such pairs. See ``docs/schemas.md``.
"""

from __future__ import annotations

from typing import Any, Literal, Union

import msgspec
import numpy as np

from src.exceptions import CovalgError, MalformedInput, NotPositive
from src.models.actions import Action, LinearMapOnAlgebra, MapForm, positivity_check
from src.models.algebra import AlgebraElement, FiniteCStarAlgebra
from src.models.crossed_product import CrossedProductElement, from_words
from src.models.functions import CirclePointFunction, PointwiseFunction
from src.models.interaction import Interaction
from src.models.representation import CovariantRep

Complex = tuple[float, float]
Matrix = list[list[Complex]]

POSITIVITY_SAMPLES = 64


class AlgebraElementPayload(msgspec.Struct, forbid_unknown_fields=True):
    block_dims: list[int]
    blocks: list[Matrix]


class ConjugationPayload(msgspec.Struct, tag="conjugation", tag_field="form", forbid_unknown_fields=True):
    """``a -> K a K*`` with ``K`` acting on the block-diagonal embedding."""

    K: Matrix


class SuperoperatorPayload(msgspec.Struct, tag="superoperator", tag_field="form", forbid_unknown_fields=True):
    """Matrix on coordinates in the matrix-unit basis (block, row, column order)."""

    matrix: Matrix


LinearMapPayload = Union[ConjugationPayload, SuperoperatorPayload]


class InteractionPayload(msgspec.Struct, forbid_unknown_fields=True):
    block_dims: list[int]
    V: LinearMapPayload
    H: LinearMapPayload | None = None


class AlgebraPayload(msgspec.Struct, forbid_unknown_fields=True):
    block_dims: list[int]


class RepresentationPayload(msgspec.Struct, forbid_unknown_fields=True):
    """``sigma`` (or ``sigma_images``) as images of the matrix units;
    omitted means the inclusion."""

    U1: Matrix
    hilbert_dim: int | None = None
    sigma: list[Matrix] | None = None
    sigma_images: list[Matrix] | None = None


class WordPayload(msgspec.Struct, forbid_unknown_fields=True):
    """``coeffs[0] g(steps[0]) coeffs[1] ...``; positive steps are ``U_x``,
    negative ones ``U_|x|*``."""

    coeffs: list[list[Matrix]]
    steps: list[int] = []


class CrossedElementPayload(msgspec.Struct, forbid_unknown_fields=True):
    terms: list[WordPayload]


Coefficient = Union[list[Matrix], AlgebraElementPayload]


class WordItemPayload(msgspec.Struct, forbid_unknown_fields=True):
    """One ``coeff`` followed by ``U_step`` (``U_step*`` in a negative monomial)."""

    coeff: Coefficient
    step: int = 0


class MonomialPayload(msgspec.Struct, forbid_unknown_fields=True):
    type: Literal["pos", "neg"]
    word: list[WordItemPayload]


ElementPayload = Union[CrossedElementPayload, list[MonomialPayload]]


class InputDocument(msgspec.Struct, forbid_unknown_fields=True):
    """Everything a command may read; each command takes what it needs.

    The interaction comes either nested under ``interaction`` or spread
    over the top-level ``algebra``, ``V`` and ``H`` keys.
    """

    interaction: InteractionPayload | None = None
    algebra: Union[list[int], AlgebraPayload, None] = None
    V: LinearMapPayload | None = None
    H: LinearMapPayload | None = None
    x_max: int | None = None
    rep: RepresentationPayload | None = None
    element: ElementPayload | None = None
    elements: list[ElementPayload] | None = None
    projections: list[list[Matrix]] | None = None


def decode_input(data: bytes | str) -> InputDocument:
    try:
        return msgspec.json.decode(data, type=InputDocument)
    except (msgspec.DecodeError, msgspec.ValidationError) as e:
        raise MalformedInput(str(e)) from e


def decode_element(data: bytes | str) -> ElementPayload:
    try:
        return msgspec.json.decode(data, type=ElementPayload)
    except (msgspec.DecodeError, msgspec.ValidationError) as e:
        raise MalformedInput(str(e)) from e


def with_element(doc: InputDocument | None, element: ElementPayload) -> InputDocument:
    """``doc`` with ``element`` set; an element already in ``doc`` is an error."""
    doc = doc if doc is not None else InputDocument()
    if doc.element is not None:
        raise MalformedInput("element given both in the input and separately")
    return msgspec.structs.replace(doc, element=element)


def require(doc: InputDocument, *names: str) -> None:
    missing = [name for name in names if getattr(doc, name) is None]
    if missing:
        raise MalformedInput(f"input is missing {', '.join(missing)}")


def interaction_of(doc: InputDocument) -> InteractionPayload:
    """The nested ``interaction``, or one assembled from ``algebra``/``V``/``H``."""
    flat = doc.algebra is not None or doc.V is not None or doc.H is not None
    if not flat:
        require(doc, "interaction")
        return doc.interaction
    if doc.interaction is not None:
        raise MalformedInput("give either interaction or algebra/V/H, not both")
    require(doc, "algebra", "V")
    block_dims = doc.algebra if isinstance(doc.algebra, list) else doc.algebra.block_dims
    return InteractionPayload(block_dims=block_dims, V=doc.V, H=doc.H)


def to_array(matrix: Matrix) -> np.ndarray:
    if not matrix:
        raise MalformedInput("empty matrix")
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise MalformedInput("matrix entries must be [re, im] pairs in rectangular rows")
    return arr[..., 0] + 1j * arr[..., 1]


def _build(factory, *args):
    """Turn value errors from the domain constructors into ``MalformedInput``."""
    try:
        return factory(*args)
    except CovalgError:
        raise
    except (ValueError, TypeError) as e:
        raise MalformedInput(str(e)) from e


def build_algebra(block_dims: list[int]) -> FiniteCStarAlgebra:
    return _build(FiniteCStarAlgebra, tuple(block_dims))


def build_element(algebra: FiniteCStarAlgebra, blocks: Coefficient) -> AlgebraElement:
    if isinstance(blocks, AlgebraElementPayload):
        if tuple(blocks.block_dims) != tuple(algebra.block_dims):
            raise MalformedInput(f"element has block_dims {blocks.block_dims}, expected {list(algebra.block_dims)}")
        blocks = blocks.blocks
    return _build(algebra.element, [to_array(b) for b in blocks])


def build_map(algebra: FiniteCStarAlgebra, payload: LinearMapPayload, tol=None) -> LinearMapOnAlgebra:
    """Conjugations are positive as given; a superoperator must pass the
    sampled positivity check."""
    if isinstance(payload, ConjugationPayload):
        return _build(LinearMapOnAlgebra.conjugation, algebra, to_array(payload.K), tol)
    f = _build(LinearMapOnAlgebra.superoperator, algebra, to_array(payload.matrix))
    verdict = positivity_check(f, num_samples=POSITIVITY_SAMPLES, tol=tol)
    if not verdict:
        raise NotPositive(f"superoperator is not positive: {verdict.detail}", witness=verdict.witness)
    return f


def build_interaction(payload: InteractionPayload, tol=None) -> Interaction:
    """``H`` may be omitted only by commands that derive it; they get ``V`` as both."""
    algebra = build_algebra(payload.block_dims)
    V = Action(build_map(algebra, payload.V, tol), tol)
    H = Action(build_map(algebra, payload.H, tol), tol) if payload.H is not None else V
    return Interaction(V, H)


def build_rep(algebra: FiniteCStarAlgebra, payload: RepresentationPayload, tol=None) -> CovariantRep:
    U1 = to_array(payload.U1)
    if payload.sigma is not None and payload.sigma_images is not None:
        raise MalformedInput("give either sigma or sigma_images, not both")
    sigma = payload.sigma if payload.sigma is not None else payload.sigma_images
    if sigma is None:
        return _build(CovariantRep.from_inclusion, algebra, U1, tol)
    dim = payload.hilbert_dim if payload.hilbert_dim is not None else U1.shape[0]
    images = [to_array(m) for m in sigma]
    return _build(CovariantRep, algebra, dim, images, U1, tol)


def monomial_word(algebra: FiniteCStarAlgebra, monomial: MonomialPayload) -> tuple[tuple, tuple]:
    """``a1 U_x1 a2 U_x2 ...`` as coefficients and signed steps; a zero step
    merges its coefficient into the next one."""
    if not monomial.word:
        raise MalformedInput("a monomial needs at least one coefficient")
    sign = 1 if monomial.type == "pos" else -1
    coeffs, steps = [], []
    current = None
    for item in monomial.word:
        if item.step < 0:
            raise MalformedInput("monomial steps must be natural numbers; use type 'neg' for adjoints")
        c = build_element(algebra, item.coeff)
        current = c if current is None else current @ c
        if item.step:
            coeffs.append(current)
            steps.append(sign * item.step)
            current = None
    coeffs.append(current if current is not None else algebra.unit())
    return tuple(coeffs), tuple(steps)


def build_crossed_element(payload: ElementPayload, I: Interaction) -> CrossedProductElement:
    algebra = I.algebra
    if isinstance(payload, list):
        return from_words(algebra, [monomial_word(algebra, m) for m in payload], I)
    words = []
    for word in payload.terms:
        if len(word.coeffs) != len(word.steps) + 1:
            raise MalformedInput("a word needs exactly one more coefficient than steps")
        if any(s == 0 for s in word.steps):
            raise MalformedInput("steps must be nonzero integers")
        words.append((tuple(build_element(algebra, c) for c in word.coeffs), tuple(word.steps)))
    return from_words(algebra, words, I)


# encoding


def complex_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return np.stack([M.real, M.imag], axis=-1).tolist()


def element_payload(a: AlgebraElement) -> dict:
    return {"block_dims": list(a.algebra.block_dims), "blocks": [complex_matrix(b) for b in a.blocks]}


def map_payload(f: LinearMapOnAlgebra) -> dict:
    if f.form is MapForm.CONJUGATION:
        return {"form": "conjugation", "K": complex_matrix(f.matrix)}
    return {"form": "superoperator", "matrix": complex_matrix(f.matrix)}


def interaction_payload(I: Interaction) -> dict:
    return {
        "block_dims": list(I.algebra.block_dims),
        "V": map_payload(I.V.generator),
        "H": map_payload(I.H.generator),
    }


def rep_payload(rep: CovariantRep) -> dict:
    return {
        "U1": complex_matrix(rep.U1),
        "hilbert_dim": rep.hilbert_dim,
        "sigma": [complex_matrix(m) for m in rep.sigma_images],
    }


def crossed_element_payload(a: CrossedProductElement) -> dict:
    return {
        "terms": [
            {
                "coeffs": [[complex_matrix(b) for b in c.blocks] for c in term.coeffs],
                "steps": list(term.signed_steps),
            }
            for term in a.terms
        ]
    }


def enc_hook(obj: Any) -> Any:
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_matrix(obj) if obj.ndim else [float(obj.real), float(obj.imag)]
        return obj.tolist()
    if isinstance(obj, np.generic):
        return enc_hook(obj.item()) if np.iscomplexobj(obj) else obj.item()
    if isinstance(obj, AlgebraElement):
        return element_payload(obj)
    if isinstance(obj, CrossedProductElement):
        return crossed_element_payload(obj)
    if isinstance(obj, CirclePointFunction):
        return {"terms": [[k, [c.real, c.imag]] for k, c in obj.terms]}
    if isinstance(obj, PointwiseFunction):
        return repr(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise NotImplementedError(f"cannot encode {type(obj).__name__}")


encoder = msgspec.json.Encoder(enc_hook=enc_hook)


def encode(obj: Any) -> bytes:
    return encoder.encode(obj)


def to_builtins(obj: Any) -> Any:
    return msgspec.to_builtins(obj, enc_hook=enc_hook)


def encode_error(e: CovalgError) -> bytes:
    """``{"error": ...}`` for a domain error; a witness msgspec cannot
    encode is replaced by its ``repr``."""
    body = e.to_dict()
    try:
        return encoder.encode({"error": body})
    except (NotImplementedError, TypeError):
        body["witness"] = repr(body["witness"])
        return encoder.encode({"error": body})

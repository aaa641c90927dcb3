"""Conjugation by permutations, unipotent/cyclic normal forms and Bott tower extraction."""
import itertools
import logging
import math
from typing import List, Optional, Sequence

import networkx as nx

from .charmat import is_valid, iter_principal_minors
from .config import PERMUTATION_GUARD
from .exceptions import (
    InvariantViolation,
    MatrixFormatError,
    NotNormalized,
    NotUnipotent,
    PermutationSearchExceeded,
)
from .models import (
    BottStage,
    BottTowerDescription,
    Certificates,
    ClassificationStatus,
    CoefficientMode,
    NormalFormResult,
    Permutation,
    Shape,
    VectorMatrix,
)

logger = logging.getLogger(__name__)


def conjugate(A: VectorMatrix, sigma: Permutation) -> VectorMatrix:
    """A_sigma: block (i, j) of the result is block (sigma^-1(i), sigma^-1(j)) of A."""
    if sigma.size != A.m:
        raise MatrixFormatError(f"permutation of {sigma.size} letters cannot act on {A.m} factors")
    source = [sigma.inverse()(i) - 1 for i in range(1, A.m + 1)]
    return VectorMatrix(
        shape=Shape(tuple(A.dims[s] for s in source)),
        mode=A.mode,
        blocks=tuple(tuple(A.blocks[r][c] for c in source) for r in source),
    )


def _check_normalized(A: VectorMatrix) -> None:
    if A.mode is CoefficientMode.GF2 or A.is_normalized:
        return
    diagonal = [x for i in range(A.m) for x in A.blocks[i][i]]
    if all(x in (1, -1) for x in diagonal):
        raise NotNormalized(
            f"diagonal components {diagonal} contain -1; run normalize_signs before classifying"
        )


def _is_zero(block: Sequence[int]) -> bool:
    return not any(block)


def classify(A: VectorMatrix) -> NormalFormResult:
    """Sorts a matrix into unipotent, cyclic, non-Bott or invalid.

    Valid matrices whose principal minors are all 1 are triangularized by a
    topological sort of the nonzero off-diagonal blocks. Valid matrices whose
    proper minors are 1 but some determinant is -1 are brought into cyclic
    form by a permutation search. Anything else valid carries a proper minor
    different from 1 and gets no normal form.
    """
    _check_normalized(A)

    validity = is_valid(A)
    if not validity.valid:
        logger.debug("classify: invalid, violating minor %s", validity.certificate)
        return NormalFormResult(
            status=ClassificationStatus.INVALID,
            certificates=Certificates(violation=validity.certificate),
        )

    m = A.m
    witness = None
    negative_determinant = False
    for record in iter_principal_minors(A, deduplicate=True):
        if record.value == 1:
            continue
        if len(record.subset) < m:
            witness = record
            break
        negative_determinant = True

    if witness is not None:
        logger.debug("classify: non_bott, proper minor %s", witness)
        return NormalFormResult(
            status=ClassificationStatus.NON_BOTT,
            certificates=Certificates(witness=witness),
        )
    if negative_determinant:
        return _cyclic_normal_form(A)
    return _unipotent_normal_form(A)


def _unipotent_normal_form(A: VectorMatrix) -> NormalFormResult:
    m = A.m
    graph = nx.DiGraph()
    graph.add_nodes_from(range(m))
    graph.add_edges_from(
        (i, j) for i in range(m) for j in range(m) if i != j and not _is_zero(A.blocks[i][j])
    )
    try:
        order = list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible:
        raise InvariantViolation(
            "nonzero off-diagonal blocks form a cycle although every principal minor is 1"
        )

    images = [0] * m
    for position, factor in enumerate(order, start=1):
        images[factor] = position
    sigma = Permutation(tuple(images))
    triangular = conjugate(A, sigma)
    if not is_upper_triangular(triangular):
        raise InvariantViolation(f"conjugation by {list(sigma.root)} did not triangularize the matrix")

    logger.debug("classify: unipotent, sigma=%s", list(sigma.root))
    return NormalFormResult(
        status=ClassificationStatus.UNIPOTENT,
        sigma=sigma,
        normal_form=triangular,
    )


def is_upper_triangular(A: VectorMatrix) -> bool:
    """Unit diagonal and zero blocks strictly below it."""
    return A.is_normalized and all(
        _is_zero(A.blocks[i][j]) for i in range(A.m) for j in range(i)
    )


def is_cyclic_form(A: VectorMatrix) -> bool:
    """Nonzero off-diagonal blocks exactly at (i, i+1) and at the corner (m, 1)."""
    m = A.m
    if m < 2:
        return False
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            on_cycle = j == (i + 1) % m
            if on_cycle == _is_zero(A.blocks[i][j]):
                return False
    return True


def cyclic_components(A: VectorMatrix) -> List[int]:
    """b_1..b_m of a cyclic form, in row order.

    Row i carries a single nonzero off-diagonal block whose nonzero components
    all coincide; that common value is b_i.
    """
    m = A.m
    components = []
    for i in range(m):
        block = A.blocks[i][(i + 1) % m]
        values = {x for x in block if x}
        if len(values) != 1:
            raise InvariantViolation(
                f"cyclic block ({i + 1},{(i + 1) % m + 1}) = {list(block)} has unequal nonzero components"
            )
        components.append(values.pop())
    return components


def _cyclic_normal_form(A: VectorMatrix) -> NormalFormResult:
    m = A.m
    if m > PERMUTATION_GUARD:
        raise PermutationSearchExceeded(
            f"cyclic normal form search over {m} factors exceeds the guard of {PERMUTATION_GUARD}"
        )

    # Rotating a cyclic form gives another cyclic form, so factor 1 can stay first.
    for tail in itertools.permutations(range(2, m + 1)):
        sigma = Permutation((1,) + tail)
        candidate = conjugate(A, sigma)
        if not is_cyclic_form(candidate):
            continue
        components = cyclic_components(candidate)
        product = math.prod(components)
        if product != (-1) ** m * 2:
            raise InvariantViolation(
                f"cyclic components {components} multiply to {product}, expected {(-1) ** m * 2}"
            )
        logger.debug("classify: cyclic, sigma=%s components=%s", list(sigma.root), components)
        return NormalFormResult(
            status=ClassificationStatus.CYCLIC,
            sigma=sigma,
            normal_form=candidate,
            certificates=Certificates(components=components, component_product=product),
        )

    raise InvariantViolation("proper minors are all 1 with a determinant -1, but no cyclic form exists")


def _render_bundle(stage: int, exponents: List[Sequence[int]]) -> str:
    if all(_is_zero(b) for b in exponents):
        return "trivial"
    factors = [
        f"(xi_{i}^{stage})^{list(b)}"
        for i, b in enumerate(exponents, start=1)
        if not _is_zero(b)
    ]
    return f"xi_{stage} = " + " (.) ".join(factors)


def bott_tower(A: VectorMatrix, result: Optional[NormalFormResult] = None) -> BottTowerDescription:
    """Reads the generalized Bott tower off the unipotent normal form.

    Stage j is the projectivization P(F + xi_j) over stage j - 1, with fiber
    FP^{n_j}; its exponent vectors are the blocks above the diagonal in column j.
    """
    result = result or classify(A)
    if result.status is not ClassificationStatus.UNIPOTENT:
        raise NotUnipotent(f"matrix classifies as {result.status.value}; only unipotent matrices are Bott towers")

    triangular = result.normal_form
    sigma = result.sigma
    inverse = sigma.inverse()
    real = triangular.mode is CoefficientMode.GF2
    field = "R" if real else "C"

    stages = []
    for j in range(1, triangular.m + 1):
        exponents = [triangular.blocks[i][j - 1] for i in range(j - 1)]
        fiber_dim = triangular.dims[j - 1]
        stages.append(
            BottStage(
                stage=j,
                factor=inverse(j),
                fiber_dim=fiber_dim,
                fiber=f"{field}P^{fiber_dim}",
                exponents=exponents,
                bundle=_render_bundle(j, exponents),
            )
        )
    return BottTowerDescription(field=field, sigma=sigma, stages=stages)


def tower_matrix(tower: BottTowerDescription, mode: CoefficientMode = CoefficientMode.INTEGER) -> VectorMatrix:
    """The unipotent matrix whose tower is the given description."""
    dims = tuple(stage.fiber_dim for stage in tower.stages)
    m = len(dims)
    blocks = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                row.append((1,) * dims[j])
            elif i < j:
                row.append(tuple(tower.stages[j].exponents[i]))
            else:
                row.append((0,) * dims[j])
        blocks.append(tuple(row))
    return VectorMatrix(shape=Shape(dims), mode=mode, blocks=tuple(blocks))

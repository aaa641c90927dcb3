"""Vector matrices: submatrices, principal minors, validity and sign normalization."""
import itertools
import logging
from collections import Counter
from typing import Dict, Iterator, List, Sequence, Tuple

from .coefficients.registry import coefficients_for_mode
from .exceptions import InvalidDiagonal, MatrixFormatError
from .models import (
    CoefficientMode,
    MinorRecord,
    MinorReport,
    Shape,
    SignNormalization,
    ValidityReport,
    VectorMatrix,
)
from .polytope import check_multi_index, check_vertex, facets, facets_at_vertex, multi_indices

logger = logging.getLogger(__name__)

Matrix = List[List[int]]


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant: cofactor expansion up to 3x3, Bareiss elimination above."""
    size = len(rows)
    if size == 0:
        return 1
    if size == 1:
        return rows[0][0]
    if size == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if size == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return _bareiss(rows)


def _bareiss(rows: Sequence[Sequence[int]]) -> int:
    a = [list(row) for row in rows]
    size = len(a)
    sign, previous = 1, 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for r in range(k + 1, size):
            for c in range(k + 1, size):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]) // previous
        previous = a[k][k]
    return sign * a[size - 1][size - 1]


def submatrix(A: VectorMatrix, k: Sequence[int]) -> Matrix:
    """The m x m scalar matrix A_{k_1...k_m}: column j is the k_j-th column of block column j."""
    check_multi_index(A.shape, k)
    m = A.m
    return [[A.blocks[i][j][k[j] - 1] for j in range(m)] for i in range(m)]


def nonempty_subsets(m: int) -> Iterator[Tuple[int, ...]]:
    """Zero-based subsets of range(m) by increasing size, lexicographic within a size."""
    for size in range(1, m + 1):
        yield from itertools.combinations(range(m), size)


def iter_principal_minors(A: VectorMatrix, deduplicate: bool = False) -> Iterator[MinorRecord]:
    """Yields every (multi-index, subset, minor) record in a fixed order.

    Multi-indices run lexicographically; for each, subsets run by size then
    lexicographically. With ``deduplicate``, a minor already produced for the
    same subset and the same coordinates inside it is skipped.
    GF2 matrices report minors mod 2.
    """
    coefficients = coefficients_for_mode(A.mode)
    subsets = list(nonempty_subsets(A.m))
    seen = set()
    for k in multi_indices(A.shape):
        scalar = submatrix(A, k)
        for subset in subsets:
            if deduplicate:
                key = (subset, tuple(k[j] for j in subset))
                if key in seen:
                    continue
                seen.add(key)
            value = determinant([[scalar[r][c] for c in subset] for r in subset])
            yield MinorRecord(
                multi_index=tuple(k),
                subset=tuple(j + 1 for j in subset),
                value=coefficients.reduce(value),
            )


def principal_minors(A: VectorMatrix, deduplicate: bool = False) -> MinorReport:
    return MinorReport(records=list(iter_principal_minors(A, deduplicate=deduplicate)))


def is_valid(A: VectorMatrix) -> ValidityReport:
    """Checks the basis condition at every vertex through principal minors.

    Integer mode accepts minors +1 and -1; GF2 mode accepts minors equal to 1.
    The first violating record is returned as the certificate.
    """
    coefficients = coefficients_for_mode(A.mode)
    for record in iter_principal_minors(A, deduplicate=True):
        if not coefficients.is_unit_minor(record.value):
            return ValidityReport(valid=False, certificate=record)
    return ValidityReport(valid=True)


def normalize_signs(A: VectorMatrix) -> SignNormalization:
    """Flips the sign of every scalar column whose diagonal component is -1.

    GF2 matrices have no signs to fix and are returned unchanged.
    """
    if A.mode is CoefficientMode.GF2:
        logger.debug("sign normalization is a no-op in gf2 mode")
        return SignNormalization(matrix=A, flips=[])

    m = A.m
    flips: List[Tuple[int, int]] = []
    for j in range(m):
        for p, value in enumerate(A.blocks[j][j]):
            if value not in (1, -1):
                raise InvalidDiagonal(
                    f"diagonal component a^{j + 1}_{{{j + 1},{p + 1}}} = {value}; "
                    f"a characteristic matrix needs +1 or -1 there"
                )
            if value == -1:
                flips.append((j + 1, p + 1))
    if not flips:
        return SignNormalization(matrix=A, flips=[])

    flipped = set(flips)
    blocks = tuple(
        tuple(
            tuple(-x if (j + 1, p + 1) in flipped else x for p, x in enumerate(A.blocks[i][j]))
            for j in range(m)
        )
        for i in range(m)
    )
    return SignNormalization(matrix=A.model_copy(update={"blocks": blocks}), flips=flips)


def characteristic_matrix(A: VectorMatrix) -> Matrix:
    """The (n+m) x n matrix of characteristic vectors: the rows a_1..a_m over I_n."""
    n = A.shape.n
    rows = [list(A.row_vector(i)) for i in range(A.m)]
    rows.extend([1 if c == r else 0 for c in range(n)] for r in range(n))
    return rows


def vertex_determinant(A: VectorMatrix, vertex: Sequence[int]) -> int:
    """Determinant of the characteristic vectors of the n facets meeting at a vertex."""
    check_vertex(A.shape, vertex)
    char = characteristic_matrix(A)
    row_of = {facet: r for r, facet in enumerate(facets(A.shape))}
    rows = [char[row_of[facet]] for facet in facets_at_vertex(A.shape, vertex)]
    return coefficients_for_mode(A.mode).reduce(determinant(rows))


def minor_spectrum(A: VectorMatrix) -> Dict[str, List[Tuple[int, int]]]:
    """Multisets of (subset size, value) for proper minors and for determinants.

    Conjugation by a permutation leaves both multisets unchanged.
    """
    proper, determinants = Counter(), Counter()
    for record in iter_principal_minors(A):
        target = determinants if len(record.subset) == A.m else proper
        target[(len(record.subset), record.value)] += 1
    return {
        "proper": sorted(proper.elements()),
        "determinants": sorted(determinants.elements()),
    }


def to_mode(A: VectorMatrix, mode: CoefficientMode) -> VectorMatrix:
    """Reduces an Integer matrix mod 2, or reads a GF2 matrix as 0/1 integers."""
    if A.mode is mode:
        return A
    blocks = A.blocks
    if mode is CoefficientMode.GF2:
        blocks = tuple(tuple(tuple(x % 2 for x in vector) for vector in row) for row in A.blocks)
    return VectorMatrix(shape=A.shape, mode=mode, blocks=blocks)


def delete_factor(A: VectorMatrix, j: int) -> VectorMatrix:
    """Removes block row j and block column j (1-based): the matrix of a facial submanifold."""
    m = A.m
    if m < 2:
        raise MatrixFormatError("a single-factor matrix has no facial submanifold to restrict to")
    if not 1 <= j <= m:
        raise MatrixFormatError(f"factor index {j} out of range 1..{m}")
    keep = [i for i in range(m) if i != j - 1]
    return VectorMatrix(
        shape=Shape(tuple(A.dims[i] for i in keep)),
        mode=A.mode,
        blocks=tuple(tuple(A.blocks[r][c] for c in keep) for r in keep),
    )

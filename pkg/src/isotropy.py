"""Isotropy of the K = (S^1)^m action on a product of spheres, computed through Smith normal form.

A point of S^{2n_1+1} x ... x S^{2n_m+1} is described only by which of its
coordinates z^i_j are nonzero. An element g of K fixes the point exactly when
g^row = 1 for every exponent row contributed by a nonzero coordinate, so the
isotropy group is dual to Z^m modulo the row lattice.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from .exceptions import MatrixFormatError
from .models import CoefficientMode, CoordinatePattern, IsotropyGroup, VectorMatrix
from .polytope import vertices

logger = logging.getLogger(__name__)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> List[int]:
    """Invariant factors d_1 | d_2 | ... of an integer matrix, min(rows, cols) of them.

    Pivots on the entry of smallest absolute value and clears its row and
    column with exact integer division. Zero factors come last.
    """
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    size = min(rows, cols)
    factors: List[int] = []

    for t in range(size):
        pivot = _smallest_entry(a, ((i, j) for i in range(t, rows) for j in range(t, cols)))
        if pivot is None:
            break
        _move_to(a, t, pivot)
        while True:
            p = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]

            remainder = _smallest_entry(
                a,
                [(i, t) for i in range(t + 1, rows)] + [(t, j) for j in range(t + 1, cols)],
            )
            if remainder is not None:
                _move_to(a, t, remainder)
                continue

            stray = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if stray is not None:
                a[t] = [x + y for x, y in zip(a[t], a[stray[0]])]
                continue
            break
        factors.append(abs(a[t][t]))

    return factors + [0] * (size - len(factors))


def _smallest_entry(a: List[List[int]], positions) -> Optional[Tuple[int, int]]:
    best = None
    for i, j in positions:
        if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
            best = (i, j)
    return best


def _move_to(a: List[List[int]], t: int, position: Tuple[int, int]) -> None:
    i, j = position
    a[t], a[i] = a[i], a[t]
    if j != t:
        for row in a:
            row[t], row[j] = row[j], row[t]


def relation_rows(A: VectorMatrix, pattern: CoordinatePattern) -> List[List[int]]:
    """Exponent rows of the K-action for the nonzero coordinates in the pattern.

    A nonzero z^i_0 contributes the standard row e_i; a nonzero z^i_j with
    j >= 1 contributes (a^i_{1j}, ..., a^i_{mj}).
    """
    _check_pattern(A, pattern)
    m = A.m
    rows: List[List[int]] = []
    for i, part in enumerate(pattern.coordinates):
        for j in sorted(set(part)):
            if j == 0:
                rows.append([1 if c == i else 0 for c in range(m)])
            else:
                rows.append([A.blocks[l][i][j - 1] for l in range(m)])
    return rows


def isotropy_of_pattern(A: VectorMatrix, pattern: CoordinatePattern) -> IsotropyGroup:
    rows = relation_rows(A, pattern)
    factors = smith_normal_form(rows)
    rank = sum(1 for d in factors if d)
    return IsotropyGroup(free_rank=A.m - rank, torsion=[d for d in factors if d > 1])


def minimal_patterns(A: VectorMatrix):
    """One singleton pattern per vertex label: P_i = {j_i}."""
    for vertex in vertices(A.shape):
        yield CoordinatePattern(coordinates=tuple((j,) for j in vertex))


def find_isotropic_pattern(A: VectorMatrix) -> Optional[Tuple[CoordinatePattern, IsotropyGroup]]:
    """The first minimal pattern with nontrivial isotropy, or None when the action is free."""
    for pattern in minimal_patterns(A):
        group = isotropy_of_pattern(A, pattern)
        if not group.trivial:
            logger.debug("nontrivial isotropy %s at pattern %s", group, pattern.coordinates)
            return pattern, group
    return None


def is_action_free(A: VectorMatrix) -> bool:
    """Enlarging a pattern only adds rows, so the minimal patterns decide freeness."""
    return find_isotropic_pattern(A) is None


def _check_pattern(A: VectorMatrix, pattern: CoordinatePattern) -> None:
    if A.mode is not CoefficientMode.INTEGER:
        raise MatrixFormatError("isotropy is computed for Integer matrices only")
    coordinates = pattern.coordinates
    if len(coordinates) != A.m:
        raise MatrixFormatError(f"pattern has {len(coordinates)} factors, matrix has {A.m}")
    for i, (part, d) in enumerate(zip(coordinates, A.dims), start=1):
        if any(j > d for j in part):
            raise MatrixFormatError(f"pattern for factor {i} names a coordinate above n_{i} = {d}: {list(part)}")

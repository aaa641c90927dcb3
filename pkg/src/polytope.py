"""Vertices, facets and multi-indices of a product of simplices.

Labels follow the usual notation for Delta^{n_1} x ... x Delta^{n_m}:

* vertex v_{j_1...j_m} is the tuple (j_1, ..., j_m) with 0 <= j_i <= n_i;
* facet F^i_k is the pair (i, k) with 1 <= i <= m and 0 <= k <= n_i, where F^i_k
  lies opposite the vertex v^i_k of the i-th simplex;
* multi-index (k_1, ..., k_m) picks one coordinate per block column, 1 <= k_j <= n_j.

Everything here is lazy; census workloads never materialize vertex lists.
"""
import itertools
from typing import Iterator, List, Sequence, Tuple, Union

from .models import MultiIndex, Shape

ShapeLike = Union[Shape, Sequence[int]]


def as_shape(shape: ShapeLike) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(tuple(shape))


def vertices(shape: ShapeLike) -> Iterator[Tuple[int, ...]]:
    """Yields the prod(n_i + 1) vertex labels in lexicographic order."""
    dims = as_shape(shape).dims
    return itertools.product(*(range(d + 1) for d in dims))


def multi_indices(shape: ShapeLike) -> Iterator[MultiIndex]:
    """Yields the prod(n_i) multi-indices in lexicographic order."""
    dims = as_shape(shape).dims
    return itertools.product(*(range(1, d + 1) for d in dims))


def facets(shape: ShapeLike) -> Iterator[Tuple[int, int]]:
    """Yields the n + m facets in the order F^1_0..F^m_0, F^1_1..F^1_{n_1}, ..., F^m_{n_m}.

    This is the row order of the characteristic matrix (A over I_n).
    """
    dims = as_shape(shape).dims
    for i in range(1, len(dims) + 1):
        yield (i, 0)
    for i, d in enumerate(dims, start=1):
        for k in range(1, d + 1):
            yield (i, k)


def facets_at_vertex(shape: ShapeLike, vertex: Sequence[int]) -> List[Tuple[int, int]]:
    """The n facets meeting at a vertex: every F^i_k except F^i_{j_i}."""
    shape = as_shape(shape)
    check_vertex(shape, vertex)
    return [(i, k) for i, k in facets(shape) if k != vertex[i - 1]]


def check_vertex(shape: Shape, vertex: Sequence[int]) -> None:
    dims = shape.dims
    if len(vertex) != len(dims) or any(not 0 <= j <= d for j, d in zip(vertex, dims)):
        raise IndexError(f"vertex {tuple(vertex)} out of range for shape {list(dims)}")


def check_multi_index(shape: Shape, k: Sequence[int]) -> None:
    dims = shape.dims
    if len(k) != len(dims) or any(not 1 <= j <= d for j, d in zip(k, dims)):
        raise IndexError(f"multi-index {tuple(k)} out of range for shape {list(dims)}")


def poincare_polynomial(shape: ShapeLike) -> List[int]:
    """Coefficients of prod_i (1 + t + ... + t^{n_i}), lowest degree first."""
    coefficients = [1]
    for d in as_shape(shape).dims:
        out = [0] * (len(coefficients) + d)
        for degree, c in enumerate(coefficients):
            for shift in range(d + 1):
                out[degree + shift] += c
        coefficients = out
    return coefficients

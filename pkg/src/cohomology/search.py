"""Searches in H^2(M; Q): nilpotent directions and product structures.

A class x = sum_j c_j y_j with x^(N+1) = 0 can only involve generators with
n_j <= N, because a nonzero c_j forces x^(n_j) != 0. Searches restrict their
support accordingly. Every witness is re-verified by exact multiplication.
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring as polynomial_ring

from ..exceptions import InvariantViolation, MatrixFormatError, MatrixNotValid
from ..models import (
    ClassificationStatus,
    NilpotentSearchResult,
    ProductSearchOutcome,
    ProductWitness,
    SearchStatus,
    VectorMatrix,
)
from ..normal_form import classify
from .ring import GradedRing, build_ring, power

logger = logging.getLogger(__name__)

Direction = Tuple[Fraction, ...]


def default_support(r: GradedRing, degree: int) -> List[int]:
    """Generators y_j that may appear in a class whose (degree + 1)-st power vanishes."""
    return [j for j, d in enumerate(r.dims, start=1) if d <= degree]


def height_rationals(height: int) -> List[Fraction]:
    """All p/q with |p| <= H and 1 <= q <= H, smallest height first."""
    values = {Fraction(p, q) for q in range(1, height + 1) for p in range(-height, height + 1)}
    return sorted(values, key=lambda v: (max(abs(v.numerator), v.denominator), v.denominator, abs(v), v))


class _PowerForm:
    """x^k for x supported on ``support``, expanded once as sum_alpha multinomial * c^alpha * y^alpha."""

    def __init__(self, r: GradedRing, support: Sequence[int], k: int):
        self.support = list(support)
        self.k = k
        self.terms: List[Tuple[Tuple[int, ...], List[Fraction]]] = []
        for alpha in _compositions(k, len(self.support)):
            coefficient = math.factorial(k)
            for a in alpha:
                coefficient //= math.factorial(a)
            exponent = [0] * r.m
            for j, a in zip(self.support, alpha):
                exponent[j - 1] = a
            coords = [coefficient * r.to_fraction(c) for c in r.reduce_monomial(exponent)]
            if any(coords):
                self.terms.append((alpha, coords))
        self.size = len(r.basis(k))

    def evaluate(self, c: Sequence[Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * self.size
        for alpha, coords in self.terms:
            weight = math.prod(x ** a for x, a in zip(c, alpha))
            if weight:
                for position, value in enumerate(coords):
                    out[position] += weight * value
        return out

    def vanishes(self, c: Sequence[Fraction]) -> bool:
        return not any(self.evaluate(c))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _normalized_directions(size: int, values: Sequence[Fraction]):
    """Vectors whose first nonzero coordinate is 1, remaining coordinates drawn from values."""
    for lead in range(size):
        for tail in itertools.product(values, repeat=size - lead - 1):
            yield (Fraction(0),) * lead + (Fraction(1),) + tuple(tail)


def _direction_key(v: Direction):
    nonzero = [i for i, x in enumerate(v) if x]
    return (len(nonzero), nonzero[0] if nonzero else 0, [abs(x) for x in v], v)


def _solve_pair(form: _PowerForm) -> Optional[List[Direction]]:
    """Exact solutions for a two-generator support, or None when every direction vanishes."""
    R, t = polynomial_ring("t", QQ)
    polynomials = [R.zero] * form.size
    for alpha, coords in form.terms:
        for position, value in enumerate(coords):
            if value:
                polynomials[position] += QQ(value.numerator, value.denominator) * t ** alpha[1]
    nonzero = [f for f in polynomials if f]
    if not nonzero:
        return None

    common = nonzero[0]
    for f in nonzero[1:]:
        common = common.gcd(f)
    solutions: List[Direction] = []
    if common.degree() > 0:
        _, factors = common.factor_list()
        for factor, _multiplicity in factors:
            if factor.degree() != 1:
                continue
            terms = dict(factor.terms())
            root = QQ.to_sympy(-terms.get((0,), QQ.zero) / terms[(1,)])
            solutions.append((Fraction(1), Fraction(int(root.p), int(root.q))))
    if form.vanishes((Fraction(0), Fraction(1))):
        solutions.append((Fraction(0), Fraction(1)))
    return solutions


def search_nilpotents(
    r: GradedRing,
    degree: int,
    height: int,
    support: Optional[Sequence[int]] = None,
) -> NilpotentSearchResult:
    """Finds classes x != 0 in H^2 with x^(degree + 1) = 0, up to scaling.

    Supports of one or two generators are solved exactly. Larger supports are
    scanned over the normalized grid of height ``height`` and are never exact.
    """
    if r.domain != QQ:
        raise MatrixFormatError(f"nilpotent search runs over the rationals, got '{r.coefficients.name}' coefficients")
    if degree < 1 or height < 1:
        raise ValueError(f"degree and height must be positive, got degree={degree}, height={height}")
    support = sorted(set(support)) if support is not None else default_support(r, degree)
    if any(not 1 <= j <= r.m for j in support):
        raise IndexError(f"support {support} out of range 1..{r.m}")

    k = degree + 1
    exact = True
    if not support:
        directions: List[Direction] = []
    elif k > r.n:
        # Everything vanishes above the top degree; report the generators.
        directions = [tuple(Fraction(int(i == p)) for i in range(len(support))) for p in range(len(support))]
        exact = False
    else:
        form = _PowerForm(r, support, k)
        if len(support) == 1:
            directions = [(Fraction(1),)] if form.vanishes((Fraction(1),)) else []
        else:
            solved = _solve_pair(form) if len(support) == 2 else None
            if solved is None:
                if len(support) == 2:
                    logger.warning("every direction in support %s satisfies x^%d = 0; falling back to the grid", support, k)
                grid = height_rationals(height)
                logger.debug("scanning %d rationals over support %s", len(grid), support)
                directions = [c for c in _normalized_directions(len(support), grid) if form.vanishes(c)]
                exact = False
            else:
                directions = solved

    witnesses = []
    for direction in sorted(set(directions), key=_direction_key):
        full = [Fraction(0)] * r.m
        for j, c in zip(support, direction):
            full[j - 1] = c
        if not power(r, r.linear_form(full), k).is_zero:
            raise InvariantViolation(f"nilpotent witness {[str(c) for c in full]} does not verify")
        witnesses.append([str(c) for c in full])

    return NilpotentSearchResult(degree=degree, height=height, support=list(support), exact=exact, witnesses=witnesses)


def _rank(rows: List[List[Fraction]]) -> int:
    if not rows:
        return 0
    return DomainMatrix(
        [[QQ(x.numerator, x.denominator) for x in row] for row in rows], (len(rows), len(rows[0])), QQ
    ).rank()


def _assign(order: List[int], pools: Dict[int, List[List[Fraction]]], dims, chosen: Dict[int, List[Fraction]]) -> bool:
    if len(chosen) == len(order):
        return True
    factor = order[len(chosen)]
    for candidate in pools[dims[factor]]:
        rows = list(chosen.values()) + [candidate]
        if _rank(rows) == len(rows):
            chosen[factor] = candidate
            if _assign(order, pools, dims, chosen):
                return True
            del chosen[factor]
    return False


def product_structure(A: VectorMatrix, height: int, ring: Optional[GradedRing] = None) -> ProductSearchOutcome:
    """Looks for x_1..x_m in H^2(M; Q) with H^*(M; Q) = Q[x] / (x_i^(n_i + 1)).

    Factors are handled in order of decreasing n_i; x_i is drawn from the
    nilpotent directions of degree n_i supported on {j : n_j <= n_i}.
    """
    result = classify(A)
    if result.status is ClassificationStatus.INVALID:
        raise MatrixNotValid("product search needs a valid matrix", certificate=result.certificates.violation)
    if result.status is ClassificationStatus.CYCLIC:
        smallest = min(A.dims)
        logger.info("product search: cyclic form, no class in H^2 has vanishing %d-th power", smallest + 1)
        return ProductSearchOutcome(
            status=SearchStatus.DISPROVED,
            height=height,
            certificate=f"cyclic-form obstruction: no nonzero x in H^2 with x^{smallest + 1} = 0",
        )

    r = ring or build_ring(A, "rational")
    dims = A.dims
    pools: Dict[int, List[List[Fraction]]] = {}
    all_exact = True
    for value in sorted(set(dims), reverse=True):
        search = search_nilpotents(r, value, height)
        all_exact = all_exact and search.exact
        pools[value] = [[Fraction(c) for c in w] for w in search.witnesses]
        logger.debug("product search: %d directions for n = %d", len(pools[value]), value)

    order = sorted(range(A.m), key=lambda i: (-dims[i], i))
    chosen: Dict[int, List[Fraction]] = {}
    if _assign(order, pools, dims, chosen):
        D = [chosen[i] for i in range(A.m)]
        for i, row in enumerate(D):
            if not power(r, r.linear_form(row), dims[i] + 1).is_zero:
                raise InvariantViolation(f"x_{i + 1} = {[str(c) for c in row]} fails x^{dims[i] + 1} = 0")
        matrix = DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in D], (A.m, A.m), QQ)
        if matrix.det() == QQ.zero:
            raise InvariantViolation("assigned product generators are linearly dependent")
        inverse = [[str(QQ.to_sympy(x)) for x in row] for row in matrix.inv().to_list()]
        logger.info("product search: found generators for shape %s", list(dims))
        return ProductSearchOutcome(
            status=SearchStatus.FOUND,
            height=height,
            witness=ProductWitness(
                coefficients=[[str(x) for x in row] for row in D],
                inverse=inverse,
                exponents=[d + 1 for d in dims],
            ),
        )

    if A.m <= 2 and all_exact:
        logger.info("product search: exact solve rules out a product structure")
        return ProductSearchOutcome(status=SearchStatus.DISPROVED, height=height, certificate="exact m<=2 solve")
    logger.info("product search: nothing found up to height %d", height)
    return ProductSearchOutcome(status=SearchStatus.NONE_UP_TO_BOUND, height=height)

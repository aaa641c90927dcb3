"""Cohomology rings K[y_1, ..., y_m] / (g_1, ..., g_m) of quasitoric manifolds and small covers.

The relation g_k is y_k * prod_{p=1..n_k} (a^k_{1p} y_1 + ... + a^k_{mp} y_m), where
a^k_{ip} is component p of block (i, k). Every graded piece is reduced by exact
linear elimination onto the monomials y^e with e_k <= n_k; the elimination has
to leave exactly those monomials free or the build fails.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import xring

from ..charmat import delete_factor, is_valid
from ..coefficients.base import CoefficientSystem
from ..coefficients.registry import resolve_ring_coefficients
from ..exceptions import (
    InvariantViolation,
    MatrixFormatError,
    MatrixNotValid,
    MixedRingError,
    NotNormalized,
    RankMismatch,
)
from ..isotropy import smith_normal_form
from ..models import CoefficientMode, VectorMatrix
from ..polytope import poincare_polynomial

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
CoefficientsLike = Union[CoefficientSystem, str, None]


def monomials(m: int, degree: int) -> Iterator[Monomial]:
    """Exponent vectors of total degree ``degree`` in m variables, descending lexicographic."""
    if degree < 0:
        return
    if m == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials(m - 1, degree - first):
            yield (first,) + rest


def format_monomial(e: Sequence[int]) -> str:
    factors = [f"y{k}" if p == 1 else f"y{k}^{p}" for k, p in enumerate(e, start=1) if p]
    return "*".join(factors) or "1"


@dataclass(frozen=True, eq=False)
class GradedPiece:
    degree: int
    basis: Tuple[Monomial, ...]
    index: Dict[Monomial, int]
    reductions: Dict[Monomial, Tuple[Any, ...]]    # monomial outside the basis -> basis coordinates


class GradedRing:
    """A finite-rank graded ring with normal-form coordinates in every degree."""

    def __init__(
        self,
        matrix: VectorMatrix,
        coefficients: CoefficientSystem,
        polynomial_ring,
        relations: List[Any],
        pieces: List[GradedPiece],
    ):
        self.matrix = matrix
        self.coefficients = coefficients
        self.domain = coefficients.domain
        self.polynomial_ring = polynomial_ring
        self.relations = relations
        self.pieces = pieces

    def __repr__(self) -> str:
        return f"GradedRing(shape={list(self.dims)}, coefficients={self.coefficients.name})"

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.matrix.dims

    @property
    def m(self) -> int:
        return self.matrix.m

    @property
    def n(self) -> int:
        return self.matrix.shape.n

    @property
    def degree_factor(self) -> int:
        """Cohomological degree of a generator: 2 for quasitoric manifolds, 1 for small covers."""
        return 2 if self.matrix.mode is CoefficientMode.INTEGER else 1

    @property
    def real_dimension(self) -> int:
        return self.degree_factor * self.n

    def basis(self, degree: int) -> Tuple[Monomial, ...]:
        if 0 <= degree <= self.n:
            return self.pieces[degree].basis
        return ()

    def to_domain(self, value: Any) -> Any:
        if isinstance(value, Fraction):
            return self.domain.convert(value.numerator) / self.domain.convert(value.denominator)
        return self.domain.convert(value)

    def to_fraction(self, value: Any) -> Fraction:
        number = self.domain.to_sympy(value)
        return Fraction(int(number.p), int(number.q))

    def reduce_monomial(self, e: Sequence[int]) -> Tuple[Any, ...]:
        e = tuple(e)
        degree = sum(e)
        if degree > self.n:
            return ()
        piece = self.pieces[degree]
        if e in piece.index:
            K = self.domain
            position = piece.index[e]
            return tuple(K.one if c == position else K.zero for c in range(len(piece.basis)))
        return piece.reductions[e]

    def zero(self, degree: int) -> "RingElement":
        return RingElement(self, degree, tuple(self.domain.zero for _ in self.basis(degree)))

    def one(self) -> "RingElement":
        return RingElement(self, 0, (self.domain.one,))

    def monomial(self, e: Sequence[int]) -> "RingElement":
        return RingElement(self, sum(e), self.reduce_monomial(e))

    def generator(self, k: int) -> "RingElement":
        """y_k, 1-based."""
        if not 1 <= k <= self.m:
            raise IndexError(f"generator y_{k} out of range 1..{self.m}")
        return self.monomial(tuple(1 if i == k - 1 else 0 for i in range(self.m)))

    def linear_form(self, coefficients: Sequence[Any]) -> "RingElement":
        """sum_k c_k y_k for integer, Fraction or domain coefficients."""
        if len(coefficients) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(coefficients)}")
        out = self.zero(1)
        for k, c in enumerate(coefficients, start=1):
            c = self.to_domain(c)
            if c != self.domain.zero:
                out = out + self.generator(k).scale(c)
        return out


@dataclass(frozen=True)
class RingElement:
    ring: GradedRing
    degree: int
    coordinates: Tuple[Any, ...]

    @property
    def is_zero(self) -> bool:
        zero = self.ring.domain.zero
        return all(c == zero for c in self.coordinates)

    def _check_compatible(self, other: "RingElement") -> None:
        if other.ring is not self.ring:
            raise MixedRingError(f"cannot combine elements of {self.ring!r} and {other.ring!r}")
        if other.degree != self.degree:
            raise ValueError(f"cannot add elements of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check_compatible(other)
        return RingElement(self.ring, self.degree, tuple(a + b for a, b in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, self.degree, tuple(-a for a in self.coordinates))

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, c: Any) -> "RingElement":
        c = self.ring.to_domain(c)
        return RingElement(self.ring, self.degree, tuple(c * a for a in self.coordinates))

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return multiply(self.ring, self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "RingElement":
        return power(self.ring, self, k)

    def terms(self) -> List[Tuple[str, str]]:
        """(coefficient, monomial) pairs of the nonzero coordinates."""
        zero = self.ring.domain.zero
        return [
            (self.ring.coefficients.format(c), format_monomial(e))
            for e, c in zip(self.ring.basis(self.degree), self.coordinates)
            if c != zero
        ]

    def __str__(self) -> str:
        return " + ".join(f"{c}*{e}" for c, e in self.terms()) or "0"


def relation_polynomials(A: VectorMatrix):
    """The polynomial ring Z[y_1..y_m] and the relations g_1..g_m in it."""
    m = A.m
    polynomial_ring, gens = xring([f"y{k}" for k in range(1, m + 1)], ZZ)
    relations = []
    for k in range(m):
        g = gens[k]
        for p in range(A.dims[k]):
            g = g * sum((A.blocks[i][k][p] * gens[i] for i in range(m)), polynomial_ring.zero)
        relations.append(g)
    return polynomial_ring, relations


def _relation_rows(
    relations: Sequence[Any],
    dims: Sequence[int],
    degree: int,
    column: Dict[Monomial, int],
) -> List[List[int]]:
    """Integer coefficient rows of mu * g_k for every monomial mu landing in the given degree."""
    m = len(dims)
    rows = []
    for g, d in zip(relations, dims):
        for mu in monomials(m, degree - (d + 1)):
            row = [0] * len(column)
            for exponent, c in g.items():
                row[column[tuple(a + b for a, b in zip(mu, exponent))]] += int(c)
            rows.append(row)
    return rows


def _graded_piece(relations, dims: Sequence[int], degree: int, domain) -> GradedPiece:
    m = len(dims)
    candidates = list(monomials(m, degree))
    outside = [e for e in candidates if any(p > d for p, d in zip(e, dims))]
    basis = [e for e in candidates if all(p <= d for p, d in zip(e, dims))]
    columns = outside + basis
    column = {e: c for c, e in enumerate(columns)}

    rows = _relation_rows(relations, dims, degree, column)
    if rows:
        matrix = DomainMatrix(
            [[domain.convert(x) for x in row] for row in rows],
            (len(rows), len(columns)),
            domain,
        )
        reduced, pivots = matrix.rref()
        entries = reduced.to_list()
    else:
        entries, pivots = [], ()

    if tuple(pivots) != tuple(range(len(outside))):
        raise RankMismatch(
            f"degree {degree}: relations have pivots {list(pivots)} but the "
            f"{len(outside)} monomials outside the basis need pivots {list(range(len(outside)))}"
        )

    skip = len(outside)
    reductions = {e: tuple(-x for x in entries[r][skip:]) for r, e in enumerate(outside)}
    return GradedPiece(
        degree=degree,
        basis=tuple(basis),
        index={e: c for c, e in enumerate(basis)},
        reductions=reductions,
    )


def resolve_coefficients(A: VectorMatrix, coefficients: CoefficientsLike) -> CoefficientSystem:
    if isinstance(coefficients, CoefficientSystem):
        return coefficients
    return resolve_ring_coefficients(A.mode, coefficients or "")


def _check_ring_input(A: VectorMatrix, coefficients: CoefficientSystem) -> None:
    if A.mode is CoefficientMode.GF2 and coefficients.name != "gf2":
        raise MatrixFormatError(
            f"a small cover matrix only determines the mod 2 ring, got '{coefficients.name}' coefficients"
        )
    validity = is_valid(A)
    if not validity.valid:
        raise MatrixNotValid("the cohomology ring needs a valid matrix", certificate=validity.certificate)
    if not A.is_normalized:
        raise NotNormalized("the cohomology ring is read off a matrix with unit diagonal; run normalize_signs first")


def build_ring(A: VectorMatrix, coefficients: CoefficientsLike = None) -> GradedRing:
    """Builds the graded ring of a valid normalized matrix.

    Rational coefficients are the default for Integer matrices and GF2 for
    small covers. Integer coefficients additionally require every relation
    lattice to be saturated.
    """
    coefficients = resolve_coefficients(A, coefficients)
    _check_ring_input(A, coefficients)

    polynomial_ring, relations = relation_polynomials(A)
    pieces = [_graded_piece(relations, A.dims, d, coefficients.domain) for d in range(A.shape.n + 1)]
    ring = GradedRing(A, coefficients, polynomial_ring, relations, pieces)

    expected = poincare_polynomial(A.shape)
    if poincare_ranks(ring) != expected:
        raise RankMismatch(f"graded ranks {poincare_ranks(ring)} differ from the Poincare polynomial {expected}")

    if coefficients.checks_torsion:
        found = torsion(ring)
        if found:
            raise InvariantViolation(f"integral relation lattices have torsion {found}")

    logger.debug("built %r with ranks %s", ring, expected)
    return ring


def multiply(r: GradedRing, u: RingElement, v: RingElement) -> RingElement:
    """Product of homogeneous elements, reduced through the piece of degree du + dv."""
    if u.ring is not r or v.ring is not r:
        raise MixedRingError(f"elements do not belong to {r!r}")
    degree = u.degree + v.degree
    if degree > r.n:
        return r.zero(degree)

    zero = r.domain.zero
    out = [zero] * len(r.basis(degree))
    for e, a in zip(r.basis(u.degree), u.coordinates):
        if a == zero:
            continue
        for f, b in zip(r.basis(v.degree), v.coordinates):
            if b == zero:
                continue
            ab = a * b
            for position, c in enumerate(r.reduce_monomial(tuple(x + y for x, y in zip(e, f)))):
                if c != zero:
                    out[position] += ab * c
    return RingElement(r, degree, tuple(out))


def power(r: GradedRing, u: RingElement, k: int) -> RingElement:
    if k < 0:
        raise ValueError(f"negative exponent {k}")
    result = r.one()
    for _ in range(k):
        result = multiply(r, result, u)
    return result


def nilpotency_degree(r: GradedRing, u: RingElement) -> Optional[int]:
    """Smallest k with u^k = 0; None for a nonzero element of degree 0."""
    if u.degree == 0:
        return 1 if u.is_zero else None
    current = u
    for k in range(1, r.n + 2):
        if current.is_zero:
            return k
        current = multiply(r, current, u)
    raise InvariantViolation(f"an element of degree {u.degree} survived past the top degree {r.n}")


def poincare_ranks(r: GradedRing) -> List[int]:
    return [len(piece.basis) for piece in r.pieces]


def facial_restriction(A: VectorMatrix, j: int, coefficients: CoefficientsLike = None) -> GradedRing:
    """Ring of the facial submanifold over the product without factor j (1-based)."""
    validity = is_valid(A)
    if not validity.valid:
        raise MatrixNotValid("facial restriction needs a valid matrix", certificate=validity.certificate)
    return build_ring(delete_factor(A, j), coefficients)


def quotient_ranks(r: GradedRing, j: int) -> List[int]:
    """Ranks of r / (y_j) computed directly on the polynomial ring, without the basis machinery."""
    if not 1 <= j <= r.m:
        raise IndexError(f"generator y_{j} out of range 1..{r.m}")
    K = r.domain
    ranks = []
    for degree in range(r.n + 1):
        candidates = list(monomials(r.m, degree))
        column = {e: c for c, e in enumerate(candidates)}
        rows = _relation_rows(r.relations, r.dims, degree, column)
        for mu in monomials(r.m, degree - 1):
            row = [0] * len(candidates)
            row[column[tuple(p + (1 if i == j - 1 else 0) for i, p in enumerate(mu))]] = 1
            rows.append(row)
        rank = 0
        if rows:
            rank = DomainMatrix(
                [[K.convert(x) for x in row] for row in rows], (len(rows), len(candidates)), K
            ).rank()
        ranks.append(len(candidates) - rank)
    while len(ranks) > 1 and ranks[-1] == 0:
        ranks.pop()
    return ranks


def torsion(r: GradedRing) -> Dict[int, List[int]]:
    """Nontrivial invariant factors of the integral relation lattice, per degree."""
    if r.matrix.mode is not CoefficientMode.INTEGER:
        raise MatrixFormatError("integral torsion is defined for Integer matrices only")
    found = {}
    for degree in range(r.n + 1):
        column = {e: c for c, e in enumerate(monomials(r.m, degree))}
        rows = _relation_rows(r.relations, r.dims, degree, column)
        factors = [d for d in smith_normal_form(rows) if d > 1] if rows else []
        if factors:
            found[degree] = factors
    return found


def relations(r: GradedRing) -> List[str]:
    """The relations g_1..g_m written over the ring's coefficients."""
    target = r.polynomial_ring.clone(domain=r.domain)
    return [str(g.set_ring(target)) for g in r.relations]


def ring_payload(r: GradedRing) -> Dict[str, Any]:
    """JSON-ready description: relations, bases and ranks per degree."""
    payload = {
        "shape": list(r.dims),
        "coefficients": r.coefficients.name,
        "real_dimension": r.real_dimension,
        "relations": relations(r),
        "degrees": [
            {
                "degree": piece.degree,
                "cohomological_degree": r.degree_factor * piece.degree,
                "basis": [format_monomial(e) for e in piece.basis],
                "rank": len(piece.basis),
            }
            for piece in r.pieces
        ],
        "ranks": poincare_ranks(r),
    }
    if r.coefficients.checks_torsion:
        payload["torsion"] = {str(d): f for d, f in torsion(r).items()}
    return payload

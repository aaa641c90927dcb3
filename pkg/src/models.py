import json
import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    RootModel,
    computed_field,
    field_validator,
    model_validator,
)

# --- Enums ---

class CoefficientMode(str, Enum):
    INTEGER = "int"   # quasitoric manifolds, Hom(S^1, T^n) = Z^n
    GF2 = "gf2"       # small covers, Hom(S^0, (Z/2)^n) = (Z/2)^n

class ClassificationStatus(str, Enum):
    UNIPOTENT = "unipotent"
    CYCLIC = "cyclic"
    NON_BOTT = "non_bott"
    INVALID = "invalid"

class SearchStatus(str, Enum):
    FOUND = "found"
    NONE_UP_TO_BOUND = "none_up_to_bound"
    DISPROVED = "disproved"

# --- Shapes and vector matrices ---

MultiIndex = Tuple[int, ...]
Block = Tuple[int, ...]


class Shape(RootModel[Tuple[int, ...]]):
    """The tuple (n_1, ..., n_m) describing the product of simplices.

    Serialized in JSON as a bare list, e.g. ``"shape": [2, 1]``.
    """
    model_config = ConfigDict(frozen=True)

    @field_validator("root")
    @classmethod
    def _check_dims(cls, dims: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(dims) == 0:
            raise ValueError("shape must have at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"shape dimensions must be positive, got {list(dims)}")
        return dims

    @classmethod
    def parse(cls, text: str) -> "Shape":
        """Parses the CLI form ``"1,1,2"``."""
        try:
            dims = tuple(int(part) for part in text.split(",") if part.strip())
        except ValueError:
            raise ValueError(f"shape must be a comma separated list of integers, got '{text}'")
        return cls(dims)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.root

    @property
    def m(self) -> int:
        return len(self.root)

    @property
    def n(self) -> int:
        return sum(self.root)

    @property
    def facet_count(self) -> int:
        return self.n + self.m

    @property
    def vertex_count(self) -> int:
        return math.prod(d + 1 for d in self.root)


class VectorMatrix(BaseModel):
    """The m x m block matrix A whose (i, j) entry is a vector of length n_j.

    ``blocks[i][j]`` is the vector a_{i+1}^{j+1} = [a^{j+1}_{i+1,1}, ..., a^{j+1}_{i+1,n_{j+1}}].
    """
    model_config = ConfigDict(frozen=True)

    shape: Shape
    mode: CoefficientMode = CoefficientMode.INTEGER
    blocks: Tuple[Tuple[Block, ...], ...]

    @model_validator(mode="after")
    def _check_blocks(self) -> "VectorMatrix":
        dims = self.shape.dims
        m = len(dims)
        if len(self.blocks) != m:
            raise ValueError(f"expected {m} block rows, got {len(self.blocks)}")
        for i, row in enumerate(self.blocks):
            if len(row) != m:
                raise ValueError(f"block row {i + 1} has {len(row)} blocks, expected {m}")
            for j, vector in enumerate(row):
                if len(vector) != dims[j]:
                    raise ValueError(
                        f"block ({i + 1},{j + 1}) has length {len(vector)}, expected n_{j + 1} = {dims[j]}"
                    )
                if self.mode is CoefficientMode.GF2 and any(x not in (0, 1) for x in vector):
                    raise ValueError(f"block ({i + 1},{j + 1}) has entries outside {{0,1}} in gf2 mode: {list(vector)}")
        return self

    @classmethod
    def identity(cls, shape: "Shape | Tuple[int, ...]", mode: CoefficientMode = CoefficientMode.INTEGER) -> "VectorMatrix":
        """The product matrix: diagonal blocks all ones, everything else zero."""
        shape = shape if isinstance(shape, Shape) else Shape(tuple(shape))
        dims = shape.dims
        blocks = tuple(
            tuple((1 if i == j else 0,) * dims[j] for j in range(len(dims)))
            for i in range(len(dims))
        )
        return cls(shape=shape, mode=mode, blocks=blocks)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.shape.dims

    @property
    def m(self) -> int:
        return self.shape.m

    def block(self, i: int, j: int) -> Block:
        """Zero-based access to the vector a_{i+1}^{j+1}."""
        return self.blocks[i][j]

    def row_vector(self, i: int) -> Tuple[int, ...]:
        """The flattened characteristic vector a_{i+1} in Z^n."""
        return tuple(x for vector in self.blocks[i] for x in vector)

    @property
    def is_normalized(self) -> bool:
        return all(x == 1 for i in range(self.m) for x in self.blocks[i][i])

    def to_json(self) -> str:
        """Canonical compact serialization with sorted keys."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

# --- Minors and validity ---

class MinorRecord(BaseModel):
    multi_index: MultiIndex      # (k_1, ..., k_m), 1 <= k_j <= n_j
    subset: Tuple[int, ...]      # nonempty S of {1..m}, increasing
    value: int

class MinorReport(BaseModel):
    records: List[MinorRecord]

class ValidityReport(BaseModel):
    valid: bool
    certificate: Optional[MinorRecord] = None

class SignNormalization(BaseModel):
    matrix: VectorMatrix
    flips: List[Tuple[int, int]] = []   # (block column j, coordinate p), both 1-based

# --- Isotropy ---

class CoordinatePattern(BaseModel):
    """Per factor, the coordinates z^i_j declared nonzero (0 <= j <= n_i)."""
    model_config = ConfigDict(frozen=True)

    coordinates: Tuple[Tuple[int, ...], ...]

    @field_validator("coordinates")
    @classmethod
    def _check_nonempty(cls, coordinates):
        for i, part in enumerate(coordinates):
            if not part:
                raise ValueError(f"factor {i + 1} has no nonzero coordinate; points lie on a sphere")
            if any(j < 0 for j in part):
                raise ValueError(f"factor {i + 1} has a negative coordinate index: {list(part)}")
        return coordinates

class IsotropyGroup(BaseModel):
    free_rank: int = Field(..., ge=0)
    torsion: List[int] = []

    @computed_field
    @property
    def trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

# --- Normal forms ---

class Permutation(RootModel[Tuple[int, ...]]):
    """A bijection sigma of {1..m}, stored as (sigma(1), ..., sigma(m))."""
    model_config = ConfigDict(frozen=True)

    @field_validator("root")
    @classmethod
    def _check_bijection(cls, images: Tuple[int, ...]) -> Tuple[int, ...]:
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {list(images)}")
        return images

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @property
    def size(self) -> int:
        return len(self.root)

    def __call__(self, i: int) -> int:
        return self.root[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.root)
        for i, image in enumerate(self.root, start=1):
            inv[image - 1] = i
        return Permutation(tuple(inv))

class Certificates(BaseModel):
    violation: Optional[MinorRecord] = None     # invalid: first minor outside the unit set
    witness: Optional[MinorRecord] = None       # non_bott: a proper principal minor != 1
    components: Optional[List[int]] = None      # cyclic: b_1..b_m, row order
    component_product: Optional[int] = None

class NormalFormResult(BaseModel):
    status: ClassificationStatus
    sigma: Optional[Permutation] = None
    normal_form: Optional[VectorMatrix] = None
    certificates: Certificates = Certificates()

class BottStage(BaseModel):
    stage: int
    factor: int                      # index of the factor in the input matrix
    fiber_dim: int
    fiber: str                       # CP^n or RP^n
    exponents: List[Block]           # b_i^j for i < j
    bundle: str

class BottTowerDescription(BaseModel):
    field: str                       # "C" for quasitoric, "R" for small covers
    sigma: Permutation
    stages: List[BottStage]

    @model_validator(mode="after")
    def _check_stages(self) -> "BottTowerDescription":
        for position, stage in enumerate(self.stages, start=1):
            if stage.stage != position or len(stage.exponents) != position - 1:
                raise ValueError(f"stage {position} must carry exactly {position - 1} exponent vectors")
        return self

# --- Cohomology searches ---

class NilpotentSearchResult(BaseModel):
    degree: int                      # N; witnesses satisfy x^(N+1) = 0
    height: int
    support: List[int]
    exact: bool                      # True when the witness list is provably complete
    witnesses: List[List[str]] = []  # normalized coefficient vectors over y_1..y_m

    @property
    def disproved(self) -> bool:
        return self.exact and not self.witnesses

class ProductWitness(BaseModel):
    coefficients: List[List[str]]    # x_i = sum_j coefficients[i][j] * y_j
    inverse: List[List[str]]         # y_j = sum_i inverse[j][i] * x_i
    exponents: List[int]             # x_i^(n_i + 1) = 0, verified

class ProductSearchOutcome(BaseModel):
    status: SearchStatus
    height: int
    witness: Optional[ProductWitness] = None
    certificate: Optional[str] = None

# --- Census ---

class CensusCounts(BaseModel):
    scanned: int = 0
    valid: int = 0
    unipotent: int = 0
    cyclic: int = 0
    general_non_bott: int = 0

    @model_validator(mode="after")
    def _check_partition(self) -> "CensusCounts":
        if self.valid != self.unipotent + self.cyclic + self.general_non_bott:
            raise ValueError(
                f"valid count {self.valid} does not split into unipotent + cyclic + general_non_bott"
            )
        return self

class CensusEntry(BaseModel):
    status: ClassificationStatus
    matrix: VectorMatrix

class CensusReport(BaseModel):
    shape: Shape
    bound: int
    mode: CoefficientMode = CoefficientMode.INTEGER
    counts: CensusCounts = CensusCounts()
    orbits: Optional[int] = None
    representatives: Optional[List[CensusEntry]] = None

    def merge(self, other: "CensusReport") -> "CensusReport":
        """Combines two partial reports over disjoint parts of the same search space."""
        if (self.shape, self.bound, self.mode) != (other.shape, other.bound, other.mode):
            raise ValueError("cannot merge census reports of different searches")
        counts = CensusCounts(**{
            key: getattr(self.counts, key) + getattr(other.counts, key)
            for key in CensusCounts.model_fields
        })
        representatives = None
        if self.representatives is not None or other.representatives is not None:
            merged = {}
            for entry in (self.representatives or []) + (other.representatives or []):
                merged.setdefault(entry.matrix.to_json(), entry)
            representatives = [merged[key] for key in sorted(merged)]
        return CensusReport(
            shape=self.shape,
            bound=self.bound,
            mode=self.mode,
            counts=counts,
            orbits=len(representatives) if representatives is not None else None,
            representatives=representatives,
        )

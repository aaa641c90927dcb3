"""Exhaustive census of valid normalized matrices with bounded off-diagonal entries."""
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .charmat import determinant, is_valid
from .coefficients.registry import coefficients_for_mode
from .config import PERMUTATION_GUARD
from .exceptions import InvariantViolation, PermutationSearchExceeded
from .models import (
    Block,
    CensusCounts,
    CensusEntry,
    CensusReport,
    ClassificationStatus,
    CoefficientMode,
    NormalFormResult,
    Permutation,
    Shape,
    VectorMatrix,
)
from .normal_form import classify, conjugate
from .polytope import ShapeLike, as_shape

logger = logging.getLogger(__name__)

STATUS_COUNTERS = {
    ClassificationStatus.UNIPOTENT: "unipotent",
    ClassificationStatus.CYCLIC: "cyclic",
    ClassificationStatus.NON_BOTT: "general_non_bott",
}


class CensusEngine:
    """Backtracking search over the off-diagonal blocks of a normalized matrix.

    Blocks are filled column by column: for t = 2..m and i < t, block (i, t)
    and then block (t, i). Once both are set, every principal minor on a
    subset whose two largest factors are i and t is fully determined and is
    checked, so invalid branches die as early as possible.
    """

    def __init__(
        self,
        shape: ShapeLike,
        bound: int,
        mode: CoefficientMode = CoefficientMode.INTEGER,
        classifier: Optional[Callable[[VectorMatrix], NormalFormResult]] = None,
    ):
        if bound < 0:
            raise ValueError(f"entry bound must be non-negative, got {bound}")
        self.shape = as_shape(shape)
        self.bound = bound
        self.mode = mode
        self.coefficients = coefficients_for_mode(mode)
        self.classifier = classifier or classify
        self.values = list(self.coefficients.entry_range(bound))
        self.plan = [(i, t) for t in range(1, self.shape.m) for i in range(t)]
        self.scanned = 0

    def block_choices(self, length: int) -> List[Block]:
        return list(itertools.product(self.values, repeat=length))

    def first_choices(self) -> List[Block]:
        """Values of the first block in the plan, the unit of work handed to census workers."""
        if not self.plan:
            return []
        i, t = self.plan[0]
        return self.block_choices(self.shape.dims[t])

    def enumerate_valid(self, first: Optional[Sequence[Block]] = None) -> Iterator[VectorMatrix]:
        """Yields every valid matrix once; ``first`` restricts the first block to a slice of its values."""
        dims = self.shape.dims
        m = len(dims)
        blocks: List[List[Optional[Block]]] = [
            [(1,) * dims[j] if i == j else None for j in range(m)] for i in range(m)
        ]
        if not self.plan:
            self.scanned += 1
            yield self._matrix(blocks)
            return
        choices = {d: self.block_choices(d) for d in set(dims)}
        yield from self._search(blocks, 0, choices, list(first) if first is not None else None)

    def _search(self, blocks, step: int, choices: Dict[int, List[Block]], first) -> Iterator[VectorMatrix]:
        if step == len(self.plan):
            yield self._matrix(blocks)
            return
        dims = self.shape.dims
        i, t = self.plan[step]
        uppers = first if step == 0 and first is not None else choices[dims[t]]
        for upper in uppers:
            blocks[i][t] = upper
            for lower in choices[dims[i]]:
                self.scanned += 1
                blocks[t][i] = lower
                if self._completed_minors_ok(blocks, i, t):
                    yield from self._search(blocks, step + 1, choices, None)
        blocks[i][t] = blocks[t][i] = None

    def _completed_minors_ok(self, blocks, i: int, t: int) -> bool:
        dims = self.shape.dims
        for size in range(i + 1):
            for rest in itertools.combinations(range(i), size):
                subset = rest + (i, t)
                for k in itertools.product(*(range(dims[s]) for s in subset)):
                    value = determinant([[blocks[a][b][kb] for b, kb in zip(subset, k)] for a in subset])
                    if not self.coefficients.is_unit_minor(value):
                        return False
        return True

    def _matrix(self, blocks) -> VectorMatrix:
        return VectorMatrix(
            shape=self.shape,
            mode=self.mode,
            blocks=tuple(tuple(tuple(b) for b in row) for row in blocks),
        )

    def run(self, dedupe: bool = False, first: Optional[Sequence[Block]] = None) -> CensusReport:
        """Classifies every valid matrix of this search (or of one slice of it)."""
        self.scanned = 0
        tallies = {"valid": 0, "unipotent": 0, "cyclic": 0, "general_non_bott": 0}
        representatives: Dict[str, CensusEntry] = {}

        for A in self.enumerate_valid(first):
            result = self.classifier(A)
            counter = STATUS_COUNTERS.get(result.status)
            if counter is None:
                raise InvariantViolation(f"enumerated matrix classified as {result.status.value}: {A.to_json()}")
            tallies["valid"] += 1
            tallies[counter] += 1
            if dedupe:
                canonical = canonical_form(A)
                representatives.setdefault(canonical.to_json(), CensusEntry(status=result.status, matrix=canonical))

        ordered = [representatives[key] for key in sorted(representatives)] if dedupe else None
        return CensusReport(
            shape=self.shape,
            bound=self.bound,
            mode=self.mode,
            counts=CensusCounts(scanned=self.scanned, **tallies),
            orbits=len(ordered) if dedupe else None,
            representatives=ordered,
        )


def _run_slice(dims: Tuple[int, ...], bound: int, mode: str, dedupe: bool, first: List[Block]) -> CensusReport:
    return CensusEngine(Shape(dims), bound, CoefficientMode(mode)).run(dedupe=dedupe, first=first)


def census(
    shape: ShapeLike,
    bound: int,
    dedupe: bool = False,
    mode: CoefficientMode = CoefficientMode.INTEGER,
    jobs: int = 1,
) -> CensusReport:
    """Counts valid matrices by classification; ``jobs`` > 1 splits the first block across processes."""
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    engine = CensusEngine(shape, bound, mode)
    shape = engine.shape
    logger.info("census: shape=%s bound=%d mode=%s jobs=%d", list(shape.dims), bound, mode.value, jobs)

    first = engine.first_choices()
    if jobs > 1 and not first:
        logger.warning("census: shape %s has no off-diagonal blocks; --jobs ignored", list(shape.dims))
    if jobs <= 1 or len(first) < 2:
        report = engine.run(dedupe=dedupe)
    else:
        slices = [first[w::jobs] for w in range(jobs) if first[w::jobs]]
        with ProcessPoolExecutor(max_workers=len(slices)) as pool:
            parts = list(pool.map(
                _run_slice,
                [shape.dims] * len(slices),
                [bound] * len(slices),
                [mode.value] * len(slices),
                [dedupe] * len(slices),
                slices,
            ))
        report = parts[0]
        for part in parts[1:]:
            report = report.merge(part)

    logger.info("census: %s", report.counts.model_dump())
    return report


def enumerate_valid(
    shape: ShapeLike,
    bound: int,
    mode: CoefficientMode = CoefficientMode.INTEGER,
) -> Iterator[VectorMatrix]:
    return CensusEngine(shape, bound, mode).enumerate_valid()


def enumerate_naive(
    shape: ShapeLike,
    bound: int,
    mode: CoefficientMode = CoefficientMode.INTEGER,
) -> Iterator[VectorMatrix]:
    """Every normalized matrix in the box, filtered by is_valid; the reference for the pruned search."""
    shape = as_shape(shape)
    dims = shape.dims
    m = len(dims)
    values = list(coefficients_for_mode(mode).entry_range(bound))
    positions = [(i, j) for i in range(m) for j in range(m) if i != j]
    for assignment in itertools.product(*(itertools.product(values, repeat=dims[j]) for _, j in positions)):
        chosen = dict(zip(positions, assignment))
        blocks = tuple(
            tuple((1,) * dims[j] if i == j else chosen[(i, j)] for j in range(m))
            for i in range(m)
        )
        A = VectorMatrix(shape=shape, mode=mode, blocks=blocks)
        if is_valid(A).valid:
            yield A


def shape_preserving_permutations(dims: Sequence[int]) -> Iterator[Permutation]:
    """Permutations sigma with n_{sigma^-1(i)} = n_i, the conjugations that keep the shape."""
    m = len(dims)
    if m > PERMUTATION_GUARD:
        raise PermutationSearchExceeded(f"{m} factors exceed the permutation guard of {PERMUTATION_GUARD}")
    for images in itertools.permutations(range(1, m + 1)):
        if all(dims[images[i] - 1] == dims[i] for i in range(m)):
            yield Permutation(images)


def canonical_form(A: VectorMatrix) -> VectorMatrix:
    """Conjugate with the smallest canonical JSON among the shape-preserving conjugates."""
    return min(
        (conjugate(A, sigma) for sigma in shape_preserving_permutations(A.dims)),
        key=lambda B: B.to_json(),
    )


def write_representatives(report: CensusReport, out_dir: str) -> List[Path]:
    """One matrix JSON file per representative, named by position and status."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for index, entry in enumerate(report.representatives or [], start=1):
        path = directory / f"{index:04d}_{entry.status.value}.json"
        path.write_text(entry.matrix.to_json() + "\n")
        written.append(path)
    logger.info("census: wrote %d representatives to %s", len(written), directory)
    return written

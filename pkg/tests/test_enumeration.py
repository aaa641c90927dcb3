import json

import pytest
from unittest.mock import MagicMock

from src.enumeration import (
    CensusEngine,
    canonical_form,
    census,
    enumerate_naive,
    enumerate_valid,
    shape_preserving_permutations,
    write_representatives,
)
from src.exceptions import InvariantViolation, PermutationSearchExceeded
from src.isotropy import is_action_free
from src.models import (
    CensusCounts,
    CensusReport,
    ClassificationStatus,
    CoefficientMode,
    NormalFormResult,
    Permutation,
    VectorMatrix,
)
from src.normal_form import conjugate
from tests.factories import CYCLIC_SQUARE, matrix, square


@pytest.fixture
def square_census():
    return census((1, 1), 2, dedupe=True)


def test_square_census_counts(square_census):
    counts = square_census.counts
    assert counts.scanned == 25
    assert counts.valid == 13
    assert counts.unipotent == 9
    assert counts.cyclic == 4
    assert counts.general_non_bott == 0


def test_square_census_orbits(square_census):
    assert square_census.orbits == 7
    statuses = [entry.status for entry in square_census.representatives]
    assert statuses.count(ClassificationStatus.UNIPOTENT) == 5
    assert statuses.count(ClassificationStatus.CYCLIC) == 2


def test_small_bounds():
    assert census((1, 1), 1).counts.valid == 5
    single = census((1,), 3)
    assert single.counts.model_dump() == {
        "scanned": 1, "valid": 1, "unipotent": 1, "cyclic": 0, "general_non_bott": 0,
    }
    assert single.orbits is None
    assert single.representatives is None


def test_zero_bound_leaves_only_the_product():
    report = census((1, 2, 1), 0)
    assert report.counts.valid == 1
    assert list(enumerate_valid((1, 2, 1), 0)) == [VectorMatrix.identity((1, 2, 1))]


def test_negative_bound():
    with pytest.raises(ValueError):
        CensusEngine((1, 1), -1)


def test_census_needs_at_least_one_job():
    with pytest.raises(ValueError, match="jobs must be positive"):
        census((1, 1), 1, jobs=0)


def test_counts_must_partition():
    with pytest.raises(ValueError):
        CensusCounts(valid=2, unipotent=1)


@pytest.mark.parametrize("dims,bound,mode", [
    ((1, 1), 1, CoefficientMode.INTEGER),
    ((1, 1), 2, CoefficientMode.INTEGER),
    ((1, 1), 3, CoefficientMode.INTEGER),
    ((2, 1), 1, CoefficientMode.INTEGER),
    ((1, 1, 1), 1, CoefficientMode.INTEGER),
    ((2, 1), 1, CoefficientMode.GF2),
    ((1, 1, 1), 1, CoefficientMode.GF2),
])
def test_pruned_search_matches_the_naive_filter(dims, bound, mode):
    pruned = [A.to_json() for A in enumerate_valid(dims, bound, mode)]
    naive = [A.to_json() for A in enumerate_naive(dims, bound, mode)]
    assert len(pruned) == len(set(pruned))
    assert sorted(pruned) == sorted(naive)


def test_pruning_scans_fewer_candidates_than_the_box():
    engine = CensusEngine((1, 1, 1), 2)
    valid = sum(1 for _ in engine.enumerate_valid())
    assert valid == census((1, 1, 1), 2).counts.valid
    assert engine.scanned < 5 ** 6


def test_small_cover_census():
    report = census((1, 1, 1), 1, mode=CoefficientMode.GF2)
    assert report.mode is CoefficientMode.GF2
    assert report.counts.valid == report.counts.unipotent
    assert report.counts.cyclic == report.counts.general_non_bott == 0
    assert census((1, 1), 5, mode=CoefficientMode.GF2).counts.valid == 3


def test_shape_order_does_not_change_counts():
    forward = census((2, 1), 1).counts
    backward = census((1, 2), 1).counts
    assert forward.valid == backward.valid
    assert forward.unipotent == backward.unipotent
    assert forward.cyclic == backward.cyclic


def test_enumerated_matrices_act_freely():
    for A in enumerate_valid((2, 1), 1):
        assert is_action_free(A)


def test_parallel_census_matches_serial():
    serial = census((1, 1, 1), 1, dedupe=True)
    parallel = census((1, 1, 1), 1, dedupe=True, jobs=2)
    assert parallel.counts == serial.counts
    assert parallel.representatives == serial.representatives


def test_merge_rejects_different_searches():
    with pytest.raises(ValueError):
        census((1, 1), 1).merge(census((1, 1), 2))


def test_merge_sums_counts():
    first = CensusReport(shape=(1, 1), bound=1, counts=CensusCounts(scanned=3, valid=2, unipotent=2))
    second = CensusReport(shape=(1, 1), bound=1, counts=CensusCounts(scanned=4, valid=1, cyclic=1))
    merged = first.merge(second)
    assert merged.counts == CensusCounts(scanned=7, valid=3, unipotent=2, cyclic=1)
    assert merged.representatives is None


def test_invalid_classification_is_an_invariant_violation():
    classifier = MagicMock(return_value=NormalFormResult(status=ClassificationStatus.INVALID))
    engine = CensusEngine((1, 1), 1, classifier=classifier)
    with pytest.raises(InvariantViolation):
        engine.run()
    classifier.assert_called_once()


def test_injected_classifier_drives_counts():
    classifier = MagicMock(return_value=NormalFormResult(status=ClassificationStatus.NON_BOTT))
    report = CensusEngine((1, 1), 1, classifier=classifier).run()
    assert report.counts.general_non_bott == 5
    assert classifier.call_count == 5


def test_shape_preserving_permutations():
    assert list(shape_preserving_permutations((1, 2, 1))) == [Permutation((1, 2, 3)), Permutation((3, 2, 1))]
    assert len(list(shape_preserving_permutations((1, 1, 1)))) == 6
    with pytest.raises(PermutationSearchExceeded):
        list(shape_preserving_permutations((1,) * 11))


def test_canonical_form_is_constant_on_orbits():
    A = matrix((1, 1, 1), [[(1,), (1,), (0,)], [(0,), (1,), (2,)], [(0,), (0,), (1,)]])
    canonical = canonical_form(A)
    for sigma in shape_preserving_permutations(A.dims):
        assert canonical_form(conjugate(A, sigma)) == canonical


def test_canonical_form_of_cyclic_square():
    assert canonical_form(CYCLIC_SQUARE) == canonical_form(square(2, 1))


def test_write_representatives(tmp_path, square_census):
    written = write_representatives(square_census, str(tmp_path / "reps"))
    assert len(written) == 7
    assert sorted(p.name for p in written) == [p.name for p in written]
    assert sum(p.name.endswith("_cyclic.json") for p in written) == 2
    first = VectorMatrix.model_validate(json.loads(written[0].read_text()))
    assert first == square_census.representatives[0].matrix


def test_write_without_dedupe_writes_nothing(tmp_path):
    assert write_representatives(census((1, 1), 1), str(tmp_path)) == []

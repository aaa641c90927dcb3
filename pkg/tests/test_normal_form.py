import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from src.charmat import iter_principal_minors, minor_spectrum
from src.enumeration import enumerate_valid
from src.exceptions import (
    InvariantViolation,
    MatrixFormatError,
    NotNormalized,
    NotUnipotent,
    PermutationSearchExceeded,
)
from src.models import (
    BottTowerDescription,
    ClassificationStatus,
    CoefficientMode,
    Permutation,
    VectorMatrix,
)
from src.normal_form import (
    bott_tower,
    classify,
    conjugate,
    cyclic_components,
    is_cyclic_form,
    is_upper_triangular,
    tower_matrix,
)
from tests.factories import CYCLIC_SQUARE, NON_BOTT_CUBE, PRISM, hirzebruch, matrix, square


def _all_permutations(m):
    return [Permutation(p) for p in itertools.permutations(range(1, m + 1))]


def test_conjugate_by_identity():
    assert conjugate(PRISM, Permutation.identity(2)) == PRISM


def test_swap_moves_the_small_simplex_first():
    swapped = conjugate(PRISM, Permutation((2, 1)))
    assert swapped == matrix((1, 2), [[(1,), (3, 4)], [(5,), (1, 1)]])


def test_conjugation_is_a_group_action():
    A = matrix((1, 2, 1), [
        [(1,), (2, 0), (1,)],
        [(0,), (1, 1), (3,)],
        [(0,), (1, -1), (1,)],
    ])
    for sigma in _all_permutations(3):
        assert conjugate(conjugate(A, sigma), sigma.inverse()) == A


def test_conjugate_rejects_wrong_size():
    with pytest.raises(MatrixFormatError):
        conjugate(PRISM, Permutation.identity(3))


def test_minor_spectrum_is_conjugation_invariant():
    """Proper minors and determinants are unchanged by conjugation."""
    perms = _all_permutations(3)
    for entries in itertools.product((-1, 0, 1), repeat=6):
        it = iter(entries)
        A = matrix((1, 1, 1), [[(1,) if i == j else (next(it),) for j in range(3)] for i in range(3)])
        spectrum = minor_spectrum(A)
        for sigma in perms:
            assert minor_spectrum(conjugate(A, sigma)) == spectrum


def test_triangular_square_is_unipotent():
    result = classify(square(3, 0))
    assert result.status is ClassificationStatus.UNIPOTENT
    assert result.sigma == Permutation.identity(2)
    assert result.normal_form == square(3, 0)


def test_lower_triangular_square_is_conjugated():
    result = classify(square(0, 3))
    assert result.status is ClassificationStatus.UNIPOTENT
    assert result.sigma == Permutation((2, 1))
    assert result.normal_form == square(3, 0)


def test_cyclic_square():
    result = classify(CYCLIC_SQUARE)
    assert result.status is ClassificationStatus.CYCLIC
    assert result.certificates.components == [1, 2]
    assert result.certificates.component_product == 2
    assert is_cyclic_form(result.normal_form)


def test_non_bott_cube():
    result = classify(NON_BOTT_CUBE)
    assert result.status is ClassificationStatus.NON_BOTT
    assert result.normal_form is None
    assert result.certificates.witness.subset == (1, 2)
    assert result.certificates.witness.value == -1


def test_invalid_matrix_carries_violation():
    result = classify(square(1, 1))
    assert result.status is ClassificationStatus.INVALID
    assert result.certificates.violation.value == 0


def test_classify_requires_normalized_input():
    with pytest.raises(NotNormalized):
        classify(matrix((1, 1), [[(1,), (0,)], [(0,), (-1,)]]))


def test_zero_diagonal_is_invalid_rather_than_unnormalized():
    result = classify(matrix((1, 1), [[(1,), (0,)], [(0,), (0,)]]))
    assert result.status is ClassificationStatus.INVALID


@pytest.mark.parametrize("dims,bound", [((1, 1), 2), ((2, 1), 2), ((1, 2), 2), ((1, 1, 1), 2)])
def test_census_matrices_reach_their_normal_forms(dims, bound):
    """Minors all 1 give a triangular form; proper minors 1 with a det -1 give a cyclic form."""
    for A in enumerate_valid(dims, bound):
        records = list(iter_principal_minors(A))
        proper_ones = all(r.value == 1 for r in records if len(r.subset) < A.m)
        all_ones = proper_ones and all(r.value == 1 for r in records)
        result = classify(A)
        if all_ones:
            assert result.status is ClassificationStatus.UNIPOTENT
            assert is_upper_triangular(result.normal_form)
            assert conjugate(A, result.sigma) == result.normal_form
        elif proper_ones:
            assert result.status is ClassificationStatus.CYCLIC
            assert is_cyclic_form(result.normal_form)
            assert math.prod(cyclic_components(result.normal_form)) == (-1) ** A.m * 2
        else:
            assert result.status is ClassificationStatus.NON_BOTT


@pytest.mark.parametrize("dims", [(1, 1), (1, 1, 1), (2, 1), (2, 2)])
def test_small_covers_are_all_bott(dims):
    for A in enumerate_valid(dims, 1, CoefficientMode.GF2):
        assert classify(A).status is ClassificationStatus.UNIPOTENT


def test_cycle_with_unit_minors_is_an_invariant_violation(monkeypatch):
    import src.normal_form as normal_form
    monkeypatch.setattr(normal_form, "iter_principal_minors", lambda A, deduplicate=False: iter(()))
    with pytest.raises(InvariantViolation):
        classify(CYCLIC_SQUARE)


def test_permutation_guard(monkeypatch):
    import src.normal_form as normal_form
    monkeypatch.setattr(normal_form, "PERMUTATION_GUARD", 1)
    with pytest.raises(PermutationSearchExceeded):
        classify(CYCLIC_SQUARE)


def test_product_tower():
    tower = bott_tower(VectorMatrix.identity((2, 3)))
    assert tower.field == "C"
    assert [stage.fiber for stage in tower.stages] == ["CP^2", "CP^3"]
    assert tower.stages[0].exponents == []
    assert tower.stages[1].exponents == [(0, 0, 0)]
    assert all(stage.bundle == "trivial" for stage in tower.stages)


def test_hirzebruch_tower():
    tower = bott_tower(hirzebruch(3))
    second = tower.stages[1]
    assert second.fiber_dim == 1
    assert second.exponents == [(3,)]
    assert second.bundle == "xi_2 = (xi_1^2)^[3]"


def test_tower_with_projective_plane_fiber():
    tower = bott_tower(matrix((1, 2), [[(1,), (1, 2)], [(0,), (1, 1)]]))
    assert tower.stages[1].fiber == "CP^2"
    assert tower.stages[1].exponents == [(1, 2)]


def test_tower_records_original_factors():
    tower = bott_tower(square(0, 3))
    assert [stage.factor for stage in tower.stages] == [2, 1]
    assert tower.sigma == Permutation((2, 1))


def test_small_cover_tower_is_real():
    tower = bott_tower(square(1, 0, CoefficientMode.GF2))
    assert tower.field == "R"
    assert [stage.fiber for stage in tower.stages] == ["RP^1", "RP^1"]


def test_tower_requires_unipotent_matrix():
    with pytest.raises(NotUnipotent):
        bott_tower(CYCLIC_SQUARE)
    with pytest.raises(NotUnipotent):
        bott_tower(NON_BOTT_CUBE)


def test_tower_stage_counts_are_checked():
    with pytest.raises(ValueError):
        BottTowerDescription.model_validate({
            "field": "C",
            "sigma": [1],
            "stages": [{"stage": 1, "factor": 1, "fiber_dim": 1, "fiber": "CP^1", "exponents": [[1]], "bundle": ""}],
        })


@st.composite
def triangular_matrices(draw):
    dims = draw(st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4))
    m = len(dims)
    blocks = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                row.append((1,) * dims[j])
            elif i < j:
                row.append(tuple(draw(st.lists(st.integers(-3, 3), min_size=dims[j], max_size=dims[j]))))
            else:
                row.append((0,) * dims[j])
        blocks.append(row)
    return matrix(dims, blocks)


@settings(deadline=None, max_examples=60)
@given(triangular_matrices())
def test_tower_round_trip(A):
    assert tower_matrix(bott_tower(A)) == A

import io
import json
from pathlib import Path

import pytest

from src.exceptions import InvariantViolation
from src.main import EXIT_INVARIANT, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, run
from src.models import VectorMatrix
from tests.factories import CYCLIC_SQUARE, NON_BOTT_CUBE, hirzebruch, matrix, square

GOLDEN = json.loads((Path(__file__).parent / "golden" / "cli_schema.json").read_text())

HIRZEBRUCH = hirzebruch(1).to_json()


def invoke(argv, text=""):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(argv, stdin=io.StringIO(text), stdout=stdout, stderr=stderr)
    body = json.loads(stdout.getvalue()) if stdout.getvalue() else None
    return code, body, stderr.getvalue()


@pytest.mark.parametrize("name,argv", [
    ("validate", ["validate"]),
    ("minors", ["minors"]),
    ("normalize", ["normalize"]),
    ("classify", ["classify"]),
    ("tower", ["tower"]),
    ("cohomology", ["cohomology"]),
    ("betti", ["betti"]),
    ("restrict", ["restrict", "--factor", "2"]),
    ("nilpotent-search", ["nilpotent-search"]),
    ("product-search", ["product-search"]),
    ("isotropy --pattern", ["isotropy", "--pattern", "[[1],[0]]"]),
])
def test_output_keys_are_stable(name, argv):
    code, body, _ = invoke(argv, HIRZEBRUCH)
    assert code == EXIT_OK
    assert sorted(body) == GOLDEN[name]


def test_census_keys(tmp_path):
    code, body, _ = invoke(["census", "--shape", "1,1", "--bound", "2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert sorted(body) == GOLDEN["census"]
    assert body["counts"]["valid"] == 13
    assert body["orbits"] == 7
    assert len(list(tmp_path.glob("*.json"))) == 7


def test_census_without_dedupe():
    code, body, _ = invoke(["census", "--shape", "1,1", "--bound", "1", "--gf2"])
    assert code == EXIT_OK
    assert body["mode"] == "gf2"
    assert body["counts"]["valid"] == 3
    assert body["representatives"] is None


def test_validate():
    assert invoke(["validate"], CYCLIC_SQUARE.to_json())[:2] == (EXIT_OK, {"valid": True})
    code, body, _ = invoke(["validate"], square(1, 1).to_json())
    assert code == EXIT_NEGATIVE
    assert body["valid"] is False
    assert body["certificate"]["value"] == 0


def test_validate_from_file(tmp_path):
    path = tmp_path / "matrix.json"
    path.write_text(CYCLIC_SQUARE.to_json())
    assert invoke(["validate", "--file", str(path)])[0] == EXIT_OK
    assert invoke(["validate", "--file", str(tmp_path / "missing.json")])[0] == EXIT_USAGE


def test_gf2_flag_reduces_the_matrix():
    code, body, _ = invoke(["validate", "--gf2"], CYCLIC_SQUARE.to_json())
    assert code == EXIT_OK
    code, body, _ = invoke(["validate", "--gf2"], square(1, 1).to_json())
    assert code == EXIT_NEGATIVE


def test_malformed_json_reports_position():
    code, body, err = invoke(["validate"], '{"shape": [1, 1],\n "blocks": [')
    assert code == EXIT_USAGE
    assert body is None
    assert "malformed JSON at line 2" in err


def test_bad_block_lengths():
    bad = json.dumps({"shape": [2, 1], "blocks": [[[1, 1], [0]], [[0], [1]]]})
    code, _, err = invoke(["validate"], bad)
    assert code == EXIT_USAGE
    assert "invalid input" in err


def test_unknown_command():
    assert invoke(["frobnicate"])[0] == EXIT_USAGE


def test_normalize_output_feeds_other_commands():
    A = matrix((1, 1), [[(-1,), (2,)], [(0,), (1,)]])
    code, body, _ = invoke(["normalize"], A.to_json())
    assert code == EXIT_OK
    assert body["flips"] == [[1, 1]]
    assert VectorMatrix.model_validate(body).is_normalized
    code, classified, _ = invoke(["classify"], json.dumps(body))
    assert code == EXIT_OK
    assert classified["status"] == "unipotent"


def test_classify_statuses():
    assert invoke(["classify"], CYCLIC_SQUARE.to_json())[1]["status"] == "cyclic"
    assert invoke(["classify"], NON_BOTT_CUBE.to_json())[1]["status"] == "non_bott"
    code, body, _ = invoke(["classify"], square(1, 1).to_json())
    assert code == EXIT_NEGATIVE
    assert body["status"] == "invalid"


def test_unnormalized_input_is_a_precondition_failure():
    code, body, _ = invoke(["classify"], matrix((1, 1), [[(1,), (0,)], [(0,), (-1,)]]).to_json())
    assert code == EXIT_NEGATIVE
    assert body["error"] == "NotNormalized"


def test_tower_of_a_cyclic_matrix():
    code, body, _ = invoke(["tower"], CYCLIC_SQUARE.to_json())
    assert code == EXIT_NEGATIVE
    assert body["error"] == "NotUnipotent"


def test_cohomology_of_an_invalid_matrix_carries_the_certificate():
    code, body, _ = invoke(["cohomology"], square(1, 1).to_json())
    assert code == EXIT_NEGATIVE
    assert body["error"] == "MatrixNotValid"
    assert body["certificate"]["value"] == 0


def test_cohomology_with_integer_coefficients():
    code, body, _ = invoke(["cohomology", "--coefficients", "z"], HIRZEBRUCH)
    assert code == EXIT_OK
    assert body["coefficients"] == "integer"
    assert body["torsion"] == {}


def test_unknown_coefficients():
    assert invoke(["cohomology", "--coefficients", "octonions"], HIRZEBRUCH)[0] == EXIT_USAGE


def test_betti_and_restrict():
    assert invoke(["betti"], NON_BOTT_CUBE.to_json())[1] == {"ranks": [1, 3, 3, 1]}
    code, body, _ = invoke(["restrict", "--factor", "1"], HIRZEBRUCH)
    assert body["removed_factor"] == 1
    assert body["ranks"] == [1, 1]
    assert invoke(["restrict", "--factor", "5"], HIRZEBRUCH)[0] == EXIT_USAGE


def test_nilpotent_search():
    code, body, _ = invoke(["nilpotent-search"], HIRZEBRUCH)
    assert code == EXIT_OK
    assert body["status"] == "found"
    assert body["witnesses"] == [["1", "0"], ["1", "2"]]
    code, body, _ = invoke(["nilpotent-search"], CYCLIC_SQUARE.to_json())
    assert code == EXIT_NEGATIVE
    assert body["status"] == "disproved"


def test_search_height_from_environment(monkeypatch):
    monkeypatch.setenv("QTLAB_HEIGHT", "3")
    assert invoke(["nilpotent-search"], HIRZEBRUCH)[1]["height"] == 3
    assert invoke(["nilpotent-search", "--height", "5"], HIRZEBRUCH)[1]["height"] == 5
    monkeypatch.setenv("QTLAB_HEIGHT", "tall")
    assert invoke(["nilpotent-search"], HIRZEBRUCH)[0] == EXIT_USAGE


def test_product_search():
    code, body, _ = invoke(["product-search"], HIRZEBRUCH)
    assert code == EXIT_OK
    assert body["witness"]["coefficients"] == [["1", "0"], ["1", "2"]]
    code, body, _ = invoke(["product-search"], CYCLIC_SQUARE.to_json())
    assert code == EXIT_NEGATIVE
    assert body["status"] == "disproved"


def test_isotropy():
    code, body, _ = invoke(["isotropy"], CYCLIC_SQUARE.to_json())
    assert (code, body) == (EXIT_OK, {"free": True, "pattern": None, "isotropy": None})
    code, body, _ = invoke(["isotropy"], square(1, 1).to_json())
    assert code == EXIT_NEGATIVE
    assert sorted(body) == GOLDEN["isotropy"]
    assert body["pattern"] == [[1], [1]]
    assert body["isotropy"]["free_rank"] == 1
    code, body, _ = invoke(["isotropy", "--pattern", "[[1],[1]]"], square(1, 3).to_json())
    assert body == {"free_rank": 0, "torsion": [2], "trivial": False}


def test_invariant_violation_exits_with_three(monkeypatch):
    def broken(A):
        raise InvariantViolation("boom")

    monkeypatch.setattr("src.main.classify", broken)
    code, body, err = invoke(["classify"], HIRZEBRUCH)
    assert code == EXIT_INVARIANT
    assert body is None
    assert "InvariantViolation" in err


@pytest.mark.parametrize("argv", [["--help"], ["classify", "--help"], []])
def test_help_and_usage_stay_off_stdout(argv):
    code, body, err = invoke(argv, HIRZEBRUCH)
    assert code == EXIT_USAGE
    assert body is None
    assert "usage" in err


@pytest.mark.parametrize("argv", [
    ["nilpotent-search", "--degree", "0"],
    ["nilpotent-search", "--height", "0"],
    ["product-search", "--height", "0"],
])
def test_explicit_zero_is_not_replaced_by_the_default(argv):
    code, body, err = invoke(argv, HIRZEBRUCH)
    assert code == EXIT_USAGE
    assert body is None
    assert "must be positive" in err


def test_census_rejects_zero_jobs():
    code, body, err = invoke(["census", "--shape", "1,1", "--jobs", "0"])
    assert code == EXIT_USAGE
    assert "jobs must be positive" in err

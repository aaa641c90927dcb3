import argparse
import json
import logging
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Tuple

from pydantic import ValidationError

from . import config
from .charmat import is_valid, normalize_signs, principal_minors, to_mode
from .cohomology.ring import build_ring, facial_restriction, poincare_ranks, ring_payload
from .cohomology.search import product_structure, search_nilpotents
from .enumeration import census, write_representatives
from .exceptions import InvariantViolation, MatrixFormatError, MatrixNotValid, QtlabError
from .isotropy import find_isotropic_pattern, isotropy_of_pattern
from .models import (
    ClassificationStatus,
    CoefficientMode,
    CoordinatePattern,
    SearchStatus,
    Shape,
    VectorMatrix,
)
from .normal_form import bott_tower, classify

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3

Outcome = Tuple[Dict[str, Any], int]


def configure_logging(verbose: bool) -> None:
    level = logging.INFO if verbose else config.log_level()
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)
    logging.getLogger().setLevel(level)


def read_matrix(args: argparse.Namespace, stdin: TextIO) -> VectorMatrix:
    text = Path(args.file).read_text() if args.file else stdin.read()
    A = VectorMatrix.model_validate(json.loads(text))
    if args.gf2:
        A = to_mode(A, CoefficientMode.GF2)
    return A


def _dump(model) -> Dict[str, Any]:
    return model.model_dump(mode="json")


def _height(args: argparse.Namespace) -> int:
    return args.height if args.height is not None else config.search_height()


def _jobs(args: argparse.Namespace) -> int:
    return args.jobs if args.jobs is not None else config.census_jobs()


# --- Subcommands ---

def cmd_validate(args, stdin) -> Outcome:
    report = is_valid(read_matrix(args, stdin))
    return report.model_dump(mode="json", exclude_none=True), EXIT_OK if report.valid else EXIT_NEGATIVE


def cmd_minors(args, stdin) -> Outcome:
    return _dump(principal_minors(read_matrix(args, stdin), deduplicate=args.deduplicate)), EXIT_OK


def cmd_normalize(args, stdin) -> Outcome:
    # Matrix keys at the top level, plus the flips.
    normalization = normalize_signs(read_matrix(args, stdin))
    payload = _dump(normalization.matrix)
    payload["flips"] = [list(flip) for flip in normalization.flips]
    return payload, EXIT_OK


def cmd_classify(args, stdin) -> Outcome:
    result = classify(read_matrix(args, stdin))
    code = EXIT_NEGATIVE if result.status is ClassificationStatus.INVALID else EXIT_OK
    return _dump(result), code


def cmd_tower(args, stdin) -> Outcome:
    return _dump(bott_tower(read_matrix(args, stdin))), EXIT_OK


def cmd_cohomology(args, stdin) -> Outcome:
    return ring_payload(build_ring(read_matrix(args, stdin), args.coefficients)), EXIT_OK


def cmd_betti(args, stdin) -> Outcome:
    return {"ranks": poincare_ranks(build_ring(read_matrix(args, stdin), args.coefficients))}, EXIT_OK


def cmd_restrict(args, stdin) -> Outcome:
    payload = ring_payload(facial_restriction(read_matrix(args, stdin), args.factor, args.coefficients))
    payload["removed_factor"] = args.factor
    return payload, EXIT_OK


def cmd_nilpotent_search(args, stdin) -> Outcome:
    A = read_matrix(args, stdin)
    degree = args.degree if args.degree is not None else min(A.dims)
    support = [int(j) for j in args.support.split(",") if j.strip()] if args.support else None
    result = search_nilpotents(build_ring(A, "rational"), degree, _height(args), support)
    if result.witnesses:
        status = SearchStatus.FOUND
    elif result.disproved:
        status = SearchStatus.DISPROVED
    else:
        status = SearchStatus.NONE_UP_TO_BOUND
    payload = _dump(result)
    payload["status"] = status.value
    return payload, EXIT_OK if status is SearchStatus.FOUND else EXIT_NEGATIVE


def cmd_product_search(args, stdin) -> Outcome:
    outcome = product_structure(read_matrix(args, stdin), _height(args))
    return _dump(outcome), EXIT_OK if outcome.status is SearchStatus.FOUND else EXIT_NEGATIVE


def cmd_isotropy(args, stdin) -> Outcome:
    A = read_matrix(args, stdin)
    if args.pattern:
        pattern = CoordinatePattern(coordinates=json.loads(args.pattern))
        return _dump(isotropy_of_pattern(A, pattern)), EXIT_OK
    found = find_isotropic_pattern(A)
    if found is None:
        return {"free": True, "pattern": None, "isotropy": None}, EXIT_OK
    pattern, group = found
    return {"free": False, "pattern": _dump(pattern)["coordinates"], "isotropy": _dump(group)}, EXIT_NEGATIVE


def cmd_census(args, stdin) -> Outcome:
    mode = CoefficientMode.GF2 if args.gf2 else CoefficientMode.INTEGER
    dedupe = args.dedupe or bool(args.out)
    report = census(Shape.parse(args.shape), args.bound, dedupe=dedupe, mode=mode, jobs=_jobs(args))
    if args.out:
        write_representatives(report, args.out)
    return _dump(report), EXIT_OK


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtlab",
        description="Characteristic matrices of quasitoric manifolds and small covers over products of simplices.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level on stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    matrix_input = argparse.ArgumentParser(add_help=False)
    matrix_input.add_argument("--file", help="matrix JSON file (default: stdin)")
    matrix_input.add_argument("--gf2", action="store_true", help="reduce the matrix mod 2 (small cover mode)")

    ring_input = argparse.ArgumentParser(add_help=False)
    ring_input.add_argument("--coefficients", default="", help="integer, rational or gf2 (aliases: z, q, z2, ...)")

    search_input = argparse.ArgumentParser(add_help=False)
    search_input.add_argument("--height", type=int, help="height bound H (default: QTLAB_HEIGHT or 8)")

    def add(name, handler, help_text, parents=(matrix_input,)):
        sub = commands.add_parser(name, parents=list(parents), help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    add("validate", cmd_validate, "check every principal minor")
    minors = add("minors", cmd_minors, "list principal minors")
    minors.add_argument("--deduplicate", action="store_true", help="skip minors repeated across multi-indices")
    add("normalize", cmd_normalize, "flip columns so the diagonal is all +1")
    add("classify", cmd_classify, "unipotent / cyclic / non-Bott / invalid")
    add("tower", cmd_tower, "generalized Bott tower of a unipotent matrix")
    add("cohomology", cmd_cohomology, "relations, bases and ranks of the cohomology ring", (matrix_input, ring_input))
    add("betti", cmd_betti, "graded ranks of the cohomology ring", (matrix_input, ring_input))
    restrict = add("restrict", cmd_restrict, "ring of a facial submanifold", (matrix_input, ring_input))
    restrict.add_argument("--factor", type=int, required=True, help="1-based factor to delete")
    nilpotent = add("nilpotent-search", cmd_nilpotent_search, "classes x in H^2 with x^(N+1) = 0",
                    (matrix_input, search_input))
    nilpotent.add_argument("--degree", type=int, help="N (default: smallest n_i)")
    nilpotent.add_argument("--support", help="comma separated 1-based generators (default: those with n_j <= N)")
    add("product-search", cmd_product_search, "look for a product structure over Q", (matrix_input, search_input))
    isotropy = add("isotropy", cmd_isotropy, "isotropy of the K-action")
    isotropy.add_argument("--pattern", help="nonzero coordinates per factor as JSON, e.g. [[0],[1]]")

    census_cmd = commands.add_parser("census", help="exhaustive census for a shape and entry bound")
    census_cmd.set_defaults(handler=cmd_census)
    census_cmd.add_argument("--shape", required=True, help="comma separated n_i, e.g. 1,1,2")
    census_cmd.add_argument("--bound", type=int, default=1, help="off-diagonal entries range over [-B, B]")
    census_cmd.add_argument("--dedupe", action="store_true", help="group by conjugation orbit")
    census_cmd.add_argument("--gf2", action="store_true", help="small cover census, entries in {0,1}")
    census_cmd.add_argument("--jobs", type=int, help="worker processes (default: QTLAB_JOBS or 1)")
    census_cmd.add_argument("--out", help="directory for one JSON file per representative (implies --dedupe)")
    return parser


def _error_body(exc: Exception) -> Dict[str, Any]:
    body = {"error": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, MatrixNotValid) and exc.certificate is not None:
        body["certificate"] = _dump(exc.certificate)
    return body


def run(argv=None, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    # Usage and help text go to stderr; stdout only ever carries JSON.
    try:
        with redirect_stdout(stderr), redirect_stderr(stderr):
            args = build_parser().parse_args(argv)
    except SystemExit:
        return EXIT_USAGE

    try:
        configure_logging(args.verbose)
        payload, code = args.handler(args, stdin)
    except json.JSONDecodeError as e:
        stderr.write(f"error: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}\n")
        return EXIT_USAGE
    except ValidationError as e:
        stderr.write(f"error: invalid input: {e}\n")
        return EXIT_USAGE
    except InvariantViolation as e:
        logger.error("Invariant violated: %s", e)
        stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return EXIT_INVARIANT
    except (MatrixFormatError, IndexError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except QtlabError as e:
        payload, code = _error_body(e), EXIT_NEGATIVE
    except ValueError as e:
        stderr.write(f"error: {e}\n")
        return EXIT_USAGE

    stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line entry point for Loccsmith.

    python -m src.main validate problem.json
    python -m src.main synth --catalog s3-table1-row1 --dim 3
    python -m src.main simulate --catalog eq66
    python -m src.main report --catalog all
    python -m src.main list
    python -m src.main export eq60 --out eq60.json
"""
import argparse
import sys
from enum import IntEnum
from typing import Optional, Sequence, Tuple

import numpy as np

from . import models
from .core import catalog_module, settings_module, unitary_module
from .core.logging_module import get_logger, log_shutdown, log_startup, setup_logging
from .integrations.problem_files import problem_files, report_module

logger = get_logger('loccsmith.main')


class ExitCode(IntEnum):
    SUCCESS = 0
    VERIFICATION_FAILED = 1
    INPUT_ERROR = 2


# Errors that mean the input could not be turned into a valid problem
INPUT_ERRORS = (
    models.ProblemFileError,
    models.ShapeError,
    models.PreconditionError,
    models.DomainValidationError,
    models.UnknownEntryError,
    ValueError,
)


# ============================================================================
# INPUT RESOLUTION
# ============================================================================

def _catalog_params(args) -> dict:
    """Builder keywords given on the command line."""
    return {"phases": tuple(args.phases)} if getattr(args, "phases", None) else {}


def _load(args) -> Tuple[str, object, Optional[object]]:
    """
    Resolve the positional path or --catalog into (name, form, problem file).

    Problem-file options fill in settings the command line left unset.
    """
    if args.catalog:
        entry = catalog_module.lookup(args.catalog)
        params = _catalog_params(args)
        return entry.name, entry.build(args.dim, **params), problem_files.export_entry(entry, args.dim, **params)
    if not args.path:
        raise models.ProblemFileError("give a problem file path or --catalog NAME")
    problem = problem_files.load(args.path)
    options = problem.options
    settings_module.update({
        "residual_tol": options.tolerance if args.tolerance is None else None,
        "rank_rel_tol": options.rankTol if args.rank_tol is None else None,
        "seed": options.seed if args.seed is None else None,
        "estimator_restarts": options.restarts if args.restarts is None else None,
    })
    instance = problem_files.build(problem)
    return instance.name or args.path, instance.form, problem


def _apply_overrides(args) -> None:
    settings_module.update({
        "residual_tol": getattr(args, "tolerance", None),
        "rank_rel_tol": getattr(args, "rank_tol", None),
        "seed": getattr(args, "seed", None),
        "estimator_restarts": getattr(args, "restarts", None),
    })


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_validate(args) -> ExitCode:
    """Run every structural validator on a problem; 1 if any check fails."""
    if args.catalog:
        entry = catalog_module.lookup(args.catalog)
        problem = problem_files.export_entry(entry, args.dim, **_catalog_params(args))
    elif args.path:
        problem = problem_files.load(args.path)
    else:
        raise models.ProblemFileError("give a problem file path or --catalog NAME")
    instance = problem_files.build(problem)
    report = problem_files.validate(instance)
    print(report.summary())
    if args.json_out:
        report_module.write_json(report_module.validation_schema(instance.name, report), args.json_out)
    return ExitCode.SUCCESS if report.ok else ExitCode.VERIFICATION_FAILED


def cmd_synth(args) -> ExitCode:
    """Assemble U, M, C and the W family; 1 if U or M is not unitary."""
    name, form, problem = _load(args)
    result = report_module.synthesize(form)
    print(report_module.synthesis_text(name, result, show_matrices=args.matrices))

    tol = settings_module.residual_tol
    ok = result.unitarity_residual < tol and result.condition_residual < tol
    if args.estimate:
        resources = unitary_module.resource_bound_check(
            result.U, result.d_A, result.d_B,
            result.group_order, float(np.log2(result.group_order)),
        )
        print(f"  entangling strength: {resources.entangling_strength:.6f} ebits "
              f"(bound {resources.resource_entanglement:.6f})")
        for failure in resources.failures:
            print(f"  FAIL: {failure}")
        ok = ok and resources.passed
    if args.json_out:
        report_module.write_json(report_module.synthesis_schema(name, result, problem), args.json_out)
    return ExitCode.SUCCESS if ok else ExitCode.VERIFICATION_FAILED


def cmd_simulate(args) -> ExitCode:
    """Run all measurement branches; 0 iff the protocol passes."""
    name, form, _ = _load(args)
    result = report_module.simulate(form)
    print(report_module.simulation_text(name, result))
    if args.json_out:
        report_module.write_json(report_module.simulation_schema(name, result), args.json_out)
    return ExitCode.SUCCESS if result.passed else ExitCode.VERIFICATION_FAILED


def cmd_report(args) -> ExitCode:
    """Reproduction table of Schmidt ranks; 1 on any mismatch."""
    if args.catalog not in (None, "all"):
        entry = catalog_module.lookup(args.catalog)
        report = catalog_module.verify(entry.name, args.dim)
        print(report.summary())
        return ExitCode.SUCCESS if report.ok else ExitCode.VERIFICATION_FAILED

    rows = report_module.reproduction_rows()
    print(report_module.reproduction_text(rows))
    document = report_module.reproduction_schema(rows)
    if args.json_out:
        report_module.write_json(document, args.json_out)
    return ExitCode.SUCCESS if document.allMatch else ExitCode.VERIFICATION_FAILED


def cmd_list(args) -> ExitCode:
    for entry in catalog_module.entries():
        aliases = f" (alias {', '.join(entry.aliases)})" if entry.aliases else ""
        dims = ",".join(str(d) for d in entry.dims)
        print(f"{entry.name:<26} {entry.kind.value:<10} dims {dims:<6} {entry.description}{aliases}")
    return ExitCode.SUCCESS


def cmd_export(args) -> ExitCode:
    entry = catalog_module.lookup(args.name)
    problem = problem_files.export_entry(entry, args.dim, **_catalog_params(args))
    if args.out:
        problem_files.save(problem, args.out)
        print(f"Wrote {entry.name} to {args.out}")
    else:
        print(problem_files.dump(problem))
    return ExitCode.SUCCESS


# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def _add_common(parser: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        parser.add_argument("path", nargs="?", help="Problem file (JSON)")
        parser.add_argument("--catalog", help="Use a built-in catalog entry instead of a file")
        parser.add_argument("--dim", type=int, help="Dimension parameter of the catalog entry")
        parser.add_argument("--phases", type=float, nargs=4, metavar="PHI", help="Phases for pauli-double")
    parser.add_argument("--tolerance", type=float, help="Residual gate (default 1e-9)")
    parser.add_argument("--rank-tol", type=float, help="Relative threshold for ranks (default 1e-8)")
    parser.add_argument("--seed", type=int, help="Seed for random inputs and restarts")
    parser.add_argument("--restarts", type=int, help="Entangling-strength estimator restarts (default 32)")
    parser.add_argument("--json-out", help="Write a machine-readable report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loccsmith",
        description="Synthesize, simulate and verify nonlocal unitaries built from group representations",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="Run the structural validators on a problem")
    _add_common(validate)
    validate.set_defaults(handler=cmd_validate)

    synth = sub.add_parser("synth", help="Assemble U, M, C and the W family")
    _add_common(synth)
    synth.add_argument("--matrices", action="store_true", help="Print U, M and C")
    synth.add_argument("--estimate", action="store_true", help="Also estimate the entangling strength")
    synth.set_defaults(handler=cmd_synth)

    simulate = sub.add_parser("simulate", help="Simulate every measurement branch of the protocol")
    _add_common(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    report = sub.add_parser("report", help="Reproduce the Schmidt-rank table")
    report.add_argument("--catalog", default="all", help="'all' or a single entry to verify")
    report.add_argument("--dim", type=int)
    _add_common(report, with_input=False)
    report.set_defaults(handler=cmd_report)

    listing = sub.add_parser("list", help="List catalog entries")
    listing.set_defaults(handler=cmd_list)

    export = sub.add_parser("export", help="Write a catalog entry as a problem file")
    export.add_argument("name")
    export.add_argument("--dim", type=int)
    export.add_argument("--phases", type=float, nargs=4, metavar="PHI", help="Phases for pauli-double")
    export.add_argument("--out", help="Output path (default: stdout)")
    export.set_defaults(handler=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(
        level=args.log_level or settings_module.get("log_level"),
        format_json=settings_module.get("log_format") == "json",
    )

    exit_code = ExitCode.INPUT_ERROR
    try:
        _apply_overrides(args)
        log_startup(args.command, settings_module.get_all())
        exit_code = args.handler(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        logger.error("%s failed on input: %s", args.command, exc)
    finally:
        settings_module.reset()
        log_shutdown(int(exit_code))
    return int(exit_code)


if __name__ == "__main__":
    sys.exit(main())

"""
Report Module

Turns synthesis results, validation reports and protocol transcripts into
the text printed by the CLI and the JSON documents written by --json-out.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from ... import models, schemas
from ...core import (
    algebra_module,
    catalog_module,
    protocol_module,
    representation_module,
    settings_module,
    unitary_module,
)
from ...core.catalog_module import COEFFICIENT_RANKS
from ...core.logging_module import get_logger

logger = get_logger('loccsmith.integrations.problem_files')

# Block-construction entries listed after the coefficient-table rows
BLOCK_ENTRIES = ("eq60", "eq63", "eq65", "eq66")


def _pairs(m) -> List[List[Tuple[float, float]]]:
    arr = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[(float(z.real), float(z.imag)) for z in row] for row in arr]


@dataclass
class Synthesis:
    """Assembled operators of one form object."""
    form_type: models.FormKind
    d_A: int
    d_B: int
    group_order: int
    U: np.ndarray
    M: np.ndarray
    W: np.ndarray
    schmidt_rank: int
    span_dimension: int
    unitarity_residual: float
    condition_residual: float
    C: Optional[np.ndarray] = None


@dataclass
class Simulation:
    """A transcript together with its information-absence verdict."""
    transcript: models.ProtocolTranscript
    information: models.InformationReport
    passed: bool


class ReportModule:
    """
    Report building for the CLI.
    """

    # ========================================================================
    # SYNTHESIS
    # ========================================================================

    def synthesize(self, form, rank_tol: Optional[float] = None) -> Synthesis:
        """
        Assemble U, M, the W family and (for double forms) C.

        Controlled forms are rewritten over the cyclic group first so that
        M and W are available for them too.
        """
        c_operator = None
        if isinstance(form, models.DoubleUnitary):
            kind = models.FormKind.DOUBLE
            u, c_operator = unitary_module.assemble_double(form)
            gfu = unitary_module.double_as_group_form(form)
            condition = unitary_module.check_c_condition(form)
        elif isinstance(form, models.ControlledUnitary):
            kind = models.FormKind.CONTROLLED
            u = form.assembled
            gfu = unitary_module.controlled_to_group(form)
            condition = unitary_module.validate_controlled(form.projectors, form.unitaries).worst_residual
        else:
            kind = models.FormKind.GROUP
            u = form.assembled
            gfu = form
            condition = unitary_module.check_W_condition(form.rep.factor_system, form.wfam)

        m_operator = unitary_module.assemble_M(gfu.rep.factor_system, gfu.wfam)
        return Synthesis(
            form_type=kind,
            d_A=form.d_A,
            d_B=form.d_B,
            group_order=gfu.rep.group.order,
            U=u,
            M=m_operator,
            W=gfu.wfam.matrices,
            schmidt_rank=algebra_module.schmidt_rank(u, form.d_A, form.d_B, rank_tol),
            span_dimension=representation_module.span_dimension(gfu.rep, rank_tol),
            unitarity_residual=algebra_module.unitarity_residual(u),
            condition_residual=float(condition),
            C=c_operator,
        )

    def synthesis_text(self, name: str, result: Synthesis, show_matrices: bool = False) -> str:
        lines = [
            f"{name or 'problem'} ({result.form_type.value})",
            f"  d_A = {result.d_A}, d_B = {result.d_B}, |G| = {result.group_order}",
            f"  Schmidt rank:        {result.schmidt_rank}",
            f"  span dimension:      {result.span_dimension}",
            f"  unitarity residual:  {result.unitarity_residual:.3e}",
            f"  condition residual:  {result.condition_residual:.3e}",
        ]
        if show_matrices:
            lines.append("  U =")
            lines.append(algebra_module.format_matrix(result.U))
            lines.append("  M =")
            lines.append(algebra_module.format_matrix(result.M))
            if result.C is not None:
                lines.append("  C =")
                lines.append(algebra_module.format_matrix(result.C))
            for f, w in enumerate(result.W):
                lines.append(f"  W({f}) =")
                lines.append(algebra_module.format_matrix(w))
        return "\n".join(lines)

    def synthesis_schema(self, name: str, result: Synthesis,
                         problem: Optional[schemas.ProblemFile] = None) -> schemas.SynthesisReportSchema:
        return schemas.SynthesisReportSchema(
            name=name,
            formType=result.form_type.value,
            dA=result.d_A,
            dB=result.d_B,
            groupOrder=result.group_order,
            schmidtRank=result.schmidt_rank,
            spanDimension=result.span_dimension,
            unitarityResidual=result.unitarity_residual,
            conditionResidual=result.condition_residual,
            U=_pairs(result.U),
            M=_pairs(result.M),
            C=_pairs(result.C) if result.C is not None else None,
            W=[_pairs(w) for w in result.W],
            problem=problem,
        )

    # ========================================================================
    # VALIDATION
    # ========================================================================

    def validation_schema(self, name: str, report: models.ValidationReport) -> schemas.ValidationReportSchema:
        return schemas.ValidationReportSchema(
            name=name,
            ok=report.ok,
            worstResidual=report.worst_residual,
            worstAt=list(report.worst_at),
            violations=[
                schemas.ViolationSchema(kind=v.kind, elements=list(v.elements), residual=v.residual, message=v.message)
                for v in report.violations
            ],
        )

    # ========================================================================
    # SIMULATION
    # ========================================================================

    def simulate(self, form, seed: Optional[int] = None, tol: Optional[float] = None) -> Simulation:
        """
        Run every branch on a seeded random input and judge the transcript.

        The run passes when the information-absence check passes, every
        Kraus operator matches U/N within tol, and M was unitary.
        """
        tol = settings_module.resolve("residual_tol", tol)
        seed = settings_module.resolve("seed", seed)
        rng = np.random.default_rng(seed)
        state = algebra_module.random_state((form.d_A, form.d_B), rng)
        transcript = protocol_module.simulate(form, state)
        information = protocol_module.information_absence_check(transcript, tol)
        passed = information.passed and transcript.worst_residual < tol and not transcript.flagged_non_unitary
        if not passed:
            logger.warning("Protocol run failed: %s", information.summary())
        return Simulation(transcript, information, passed)

    def simulation_text(self, name: str, result: Simulation) -> str:
        transcript = result.transcript
        spread = result.information.probability_spread
        lines = [
            f"{name or 'problem'} ({transcript.variant.value} protocol, N = {transcript.n})",
            f"  branches:              {len(transcript.branches)}",
            f"  worst Kraus residual:  {transcript.worst_residual:.3e}",
            f"  completeness residual: {transcript.completeness_residual():.3e}",
            f"  probability spread:    {spread:.3e}" if spread is not None else "  probability spread:    n/a",
            f"  classical bits:        {transcript.classical_bits:g}",
            f"  information absence:   {result.information.summary()}",
        ]
        if transcript.flagged_non_unitary:
            lines.append("  WARNING: M is not unitary, the protocol is not physical")
        lines.append(f"  verdict:               {'PASS' if result.passed else 'FAIL'}")
        return "\n".join(lines)

    def simulation_schema(self, name: str, result: Simulation) -> schemas.SimulationReportSchema:
        transcript = result.transcript
        return schemas.SimulationReportSchema(
            name=name,
            variant=transcript.variant.value,
            branchCount=len(transcript.branches),
            passed=result.passed,
            flaggedNonUnitary=transcript.flagged_non_unitary,
            worstResidual=transcript.worst_residual,
            completenessResidual=transcript.completeness_residual(),
            probabilitySpread=result.information.probability_spread,
            classicalBits=transcript.classical_bits,
            branches=[
                schemas.BranchSchema(
                    outcomeA=b.outcome_a,
                    outcomeB=b.outcome_b,
                    residual=b.residual,
                    phase=(float(complex(b.phase).real), float(complex(b.phase).imag)),
                    probability=b.probability,
                )
                for b in transcript.branches
            ],
        )

    # ========================================================================
    # REPRODUCTION TABLE
    # ========================================================================

    def reproduction_rows(self, rank_tol: Optional[float] = None) -> List[schemas.ReproductionRowSchema]:
        """Computed against expected Schmidt ranks for the coefficient table and the block sets."""
        rows = []
        targets = [(f"s3-table1-row{row}", dim) for row in sorted(COEFFICIENT_RANKS) for dim in (3, 4)]
        targets += [(name, None) for name in BLOCK_ENTRIES]
        for name, dim in targets:
            entry = catalog_module.lookup(name)
            dim = dim if dim is not None else entry.default_dim
            form = entry.build(dim)
            matrix = catalog_module.assembled_matrix(form)
            computed = algebra_module.schmidt_rank(matrix, form.d_A, form.d_B, rank_tol)
            expected = entry.expected_schmidt_rank[dim]
            rows.append(schemas.ReproductionRowSchema(
                name=name, dim=dim, expected=expected, computed=computed, match=computed == expected,
            ))
        return rows

    def reproduction_schema(self, rows: Sequence[schemas.ReproductionRowSchema]) -> schemas.ReproductionReportSchema:
        return schemas.ReproductionReportSchema(rows=list(rows), allMatch=all(r.match for r in rows))

    def reproduction_text(self, rows: Sequence[schemas.ReproductionRowSchema]) -> str:
        by_key = {(r.name, r.dim): r for r in rows}
        lines = ["S3 double forms                       SR(d=3)    SR(d=4)"]
        for row in sorted(COEFFICIENT_RANKS):
            name = f"s3-table1-row{row}"
            cells = []
            for dim in (3, 4):
                r = by_key.get((name, dim))
                cells.append(f"{r.computed} ({'ok' if r.match else f'expected {r.expected}'})" if r else "-")
            coefficients = ", ".join(
                algebra_module.format_complex(c, digits=4)
                for c in catalog_module.lookup(name).extras["coefficients"]
            )
            lines.append(f"  row {row}  c = ({coefficients})")
            lines.append(f"  {'':36}{cells[0]:<11}{cells[1]}")
        lines.append("")
        lines.append("Block constructions                   rank")
        for r in rows:
            if r.name in BLOCK_ENTRIES:
                verdict = "ok" if r.match else f"MISMATCH, expected {r.expected}"
                lines.append(f"  {r.name:<8} d = {r.dim:<24}{r.computed} ({verdict})")
        return "\n".join(lines)

    # ========================================================================
    # OUTPUT
    # ========================================================================

    @staticmethod
    def write_json(document: BaseModel, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(document.model_dump_json(indent=2, exclude_none=True), encoding="utf-8")
        logger.info("Wrote %s", path)
        return path


# Singleton instance for easy import
report_module = ReportModule()

"""
Problem File Integration

Reads and writes the JSON problem-file format and turns its sections into
domain objects:

- Loading with schema validation (errors carry the JSON location)
- Building groups, factor systems, irrep sets and form objects
- Running every structural validator on a loaded problem
- Exporting catalog entries and form objects back to problem files
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import ValidationError

from ... import models, schemas
from ...core import (
    fourier_module,
    group_module,
    representation_module,
    settings_module,
    unitary_module,
)
from ...core.logging_module import get_logger

logger = get_logger('loccsmith.integrations.problem_files')

# Phases are written as exact roots of unity when they match one this closely
ROOT_OF_UNITY_TOL = 1e-13
MAX_ROOT_DENOMINATOR = 24


@dataclass
class ProblemInstance:
    """A loaded problem with its sections built into domain objects."""
    name: str
    group: models.FiniteGroup
    factor_system: models.FactorSystem
    form: Any
    irrep_set: Optional[models.IrrepSet] = None
    blocks: Any = None
    options: schemas.OptionsSection = field(default_factory=schemas.OptionsSection)


class ProblemFileIntegration:
    """
    Problem-file reader, builder, validator and writer.
    """

    # ========================================================================
    # COMPLEX VALUES
    # ========================================================================

    @staticmethod
    def decode_complex(value: schemas.ComplexValue) -> complex:
        if isinstance(value, schemas.RootOfUnity):
            k, n = value.rootOfUnity
            return complex(np.exp(2j * np.pi * (k % n) / n))
        if isinstance(value, (tuple, list)):
            return complex(value[0], value[1])
        return complex(value)

    @staticmethod
    def decode_matrix(rows) -> np.ndarray:
        return np.array([[ProblemFileIntegration.decode_complex(v) for v in row] for row in rows], dtype=complex)

    @staticmethod
    def decode_stack(matrices) -> np.ndarray:
        decoded = [ProblemFileIntegration.decode_matrix(m) for m in matrices]
        shapes = {m.shape for m in decoded}
        if len(shapes) != 1:
            raise models.ShapeError(f"Matrices in one family have different shapes {sorted(shapes)}")
        return np.stack(decoded)

    @staticmethod
    def encode_complex(z: complex) -> List[float]:
        z = complex(z)
        return [float(z.real), float(z.imag)]

    @staticmethod
    def encode_phase(z: complex) -> Union[List[float], dict]:
        """Exact {'rootOfUnity': [k, n]} when z is a small root of unity, else [re, im]."""
        z = complex(z)
        if abs(abs(z) - 1.0) < ROOT_OF_UNITY_TOL:
            angle = np.angle(z) / (2 * np.pi)
            for n in range(1, MAX_ROOT_DENOMINATOR + 1):
                k = int(round(angle * n)) % n
                if abs(np.exp(2j * np.pi * k / n) - z) < ROOT_OF_UNITY_TOL:
                    return {"rootOfUnity": [k, n]}
        return ProblemFileIntegration.encode_complex(z)

    @staticmethod
    def encode_matrix(m) -> List[List[List[float]]]:
        arr = np.atleast_2d(np.asarray(m, dtype=complex))
        return [[ProblemFileIntegration.encode_complex(z) for z in row] for row in arr]

    # ========================================================================
    # LOADING
    # ========================================================================

    @staticmethod
    def parse(text: str) -> schemas.ProblemFile:
        """
        Parse problem-file text.

        Raises:
            ProblemFileError: With the JSON path (or line/column) of the first error
        """
        try:
            return schemas.ProblemFile.model_validate_json(text)
        except ValidationError as exc:
            first = exc.errors()[0]
            location = ".".join(str(part) for part in first.get("loc", ())) or "document"
            raise models.ProblemFileError(first.get("msg", str(exc)), location) from exc

    @staticmethod
    def load(path: Union[str, Path]) -> schemas.ProblemFile:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise models.ProblemFileError(str(exc), str(path)) from exc
        problem = ProblemFileIntegration.parse(text)
        logger.info("Loaded problem file %s (%s)", path, problem.form.type)
        return problem

    @staticmethod
    def save(problem: schemas.ProblemFile, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(problem.model_dump_json(indent=2, exclude_none=True), encoding="utf-8")
        return path

    # ========================================================================
    # BUILDING
    # ========================================================================

    @staticmethod
    def _rep(section: schemas.RepSection, group: models.FiniteGroup,
             default_fs: models.FactorSystem) -> models.ProjectiveRep:
        fs = default_fs
        if section.factorSystem is not None:
            fs = models.FactorSystem(group, ProblemFileIntegration.decode_matrix(section.factorSystem.mu))
        return models.ProjectiveRep(group, fs, ProblemFileIntegration.decode_stack(section.matrices))

    def _irrep_set(self, sections: List[schemas.IrrepSection], group: models.FiniteGroup,
                   fs: models.FactorSystem, name: str) -> models.IrrepSet:
        irreps = []
        for i, section in enumerate(sections):
            mats = self.decode_stack(section.matrices)
            if mats.shape[1:] != (section.dim, section.dim):
                raise models.ShapeError(f"irrep {i + 1} declares dim {section.dim}, matrices are {mats.shape[1:]}")
            irreps.append(models.Irrep(i + 1, models.ProjectiveRep(group, fs, mats)))
        return models.IrrepSet(group, fs, tuple(irreps), name=name)

    def build(self, problem: schemas.ProblemFile) -> ProblemInstance:
        """
        Turn a parsed problem into domain objects.

        Structural validity (cocycle rule, unitarity, ...) is not checked
        here; see validate().

        Raises:
            ShapeError: If sizes of the sections do not fit together
        """
        labels = tuple(problem.group.labels) if problem.group.labels else ()
        group = models.FiniteGroup(np.array(problem.group.table, dtype=int), labels, name=problem.group.name)
        if problem.factorSystem is not None:
            fs = models.FactorSystem(group, self.decode_matrix(problem.factorSystem.mu))
        else:
            fs = group_module.trivial_factor_system(group)

        section = problem.form
        rep_a = rep_b = None
        if isinstance(section, (schemas.DoubleSection, schemas.RBlocksSection)):
            rep_a = self._rep(section.repA, group, fs)
            rep_b = self._rep(section.repB, group, fs)

        irrep_set = None
        if problem.irreps:
            if problem.irrepsFactorSystem is not None:
                irrep_fs = models.FactorSystem(group, self.decode_matrix(problem.irrepsFactorSystem.mu))
            elif rep_a is not None:
                irrep_fs = group_module.multiply_factor_systems(rep_a.factor_system, rep_b.factor_system)
            else:
                irrep_fs = fs
            irrep_set = self._irrep_set(problem.irreps, group, irrep_fs, problem.name)

        blocks = None
        if isinstance(section, schemas.GroupFormSection):
            rep = self._rep(section.rep, group, fs)
            form = unitary_module.assemble_group_unitary(rep, models.WFamily(self.decode_stack(section.w)))
        elif isinstance(section, schemas.ControlledSection):
            form = unitary_module.controlled_form(
                [self.decode_matrix(p) for p in section.projectors],
                [self.decode_matrix(v) for v in section.unitaries],
            )
        elif isinstance(section, schemas.DoubleSection):
            coefficients = np.array([self.decode_complex(c) for c in section.coefficients])
            form = unitary_module.make_double(coefficients, rep_a, rep_b)
        elif isinstance(section, schemas.QBlocksSection):
            blocks = models.QBlockFamily(irrep_set, tuple(self.decode_matrix(b) for b in section.blocks), section.dB)
            rep, _ = representation_module.block_diagonal_rep(irrep_set, models.MultiplicityPattern(tuple(section.pattern)))
            form = unitary_module.assemble_group_unitary(rep, fourier_module.synthesize_W(blocks))
        else:
            blocks = models.RBlockFamily(irrep_set, tuple(self.decode_matrix(b) for b in section.blocks))
            form = unitary_module.make_double(fourier_module.synthesize_c(blocks), rep_a, rep_b)

        return ProblemInstance(problem.name, group, fs, form, irrep_set, blocks, problem.options)

    # ========================================================================
    # VALIDATION
    # ========================================================================

    def validate(self, instance: ProblemInstance) -> models.ValidationReport:
        """
        Run every structural validator that applies to the problem.

        Covers the group axioms, the factor system, the irrep set when
        present, and the invariants of the form section.
        """
        tol = settings_module.residual_tol
        report = models.ValidationReport(subject=f"problem {instance.name}".strip())
        report.extend(group_module.validate_group(instance.group))
        if not report.ok:
            return report
        report.extend(group_module.validate_factor_system(instance.factor_system))
        if instance.irrep_set is not None:
            report.extend(representation_module.validate_irrep_set(instance.irrep_set))

        form = instance.form
        if isinstance(instance.blocks, models.QBlockFamily):
            report.extend(fourier_module.validate_q_blocks(instance.blocks))
        elif isinstance(instance.blocks, models.RBlockFamily):
            report.extend(fourier_module.validate_r_blocks(instance.blocks))
            mismatch = group_module.factor_system_distance(instance.blocks.irrep_set.factor_system, form.gamma)
            report.observe(mismatch)
            if mismatch > tol:
                report.add("factor-system", (), mismatch, "R-block irreps are not over mu * nu")

        if isinstance(form, models.GroupFormUnitary):
            report.extend(representation_module.validate_projective_rep(form.rep))
            condition = unitary_module.check_W_condition(form.rep.factor_system, form.wfam)
            report.observe(condition)
            if condition > tol:
                report.add("w-condition", (), condition, "W family does not make M unitary")
        elif isinstance(form, models.ControlledUnitary):
            report.extend(unitary_module.validate_controlled(form.projectors, form.unitaries))
        elif isinstance(form, models.DoubleUnitary):
            report.extend(representation_module.validate_projective_rep(form.rep_a))
            report.extend(representation_module.validate_projective_rep(form.rep_b))
            condition = unitary_module.check_c_condition(form)
            report.observe(condition)
            if condition > tol:
                report.add("c-condition", (), condition, "coefficients do not make C unitary")

        if not report.ok:
            logger.warning("Problem %s failed validation with %d violation(s)", instance.name, len(report.violations))
        return report

    # ========================================================================
    # EXPORT
    # ========================================================================

    def _group_section(self, group: models.FiniteGroup) -> dict:
        return {"table": group.table.tolist(), "labels": list(group.labels), "name": group.name}

    def _fs_section(self, fs: models.FactorSystem) -> dict:
        return {"mu": [[self.encode_phase(z) for z in row] for row in fs.mu]}

    def _rep_section(self, rep: models.ProjectiveRep, with_fs: bool = False) -> dict:
        section = {"matrices": [self.encode_matrix(m) for m in rep.matrices]}
        if with_fs:
            section["factorSystem"] = self._fs_section(rep.factor_system)
        return section

    def problem_from_form(self, form, name: str = "") -> schemas.ProblemFile:
        """Serialize a group-form, controlled or double-form object."""
        if isinstance(form, models.GroupFormUnitary):
            document = {
                "group": self._group_section(form.rep.group),
                "factorSystem": self._fs_section(form.rep.factor_system),
                "form": {
                    "type": "groupForm",
                    "rep": self._rep_section(form.rep),
                    "w": [self.encode_matrix(w) for w in form.wfam.matrices],
                },
            }
        elif isinstance(form, models.DoubleUnitary):
            document = {
                "group": self._group_section(form.group),
                "factorSystem": self._fs_section(form.rep_a.factor_system),
                "form": {
                    "type": "double",
                    "coefficients": [self.encode_complex(c) for c in form.coefficients],
                    "repA": self._rep_section(form.rep_a),
                    "repB": self._rep_section(form.rep_b, with_fs=True),
                },
            }
        elif isinstance(form, models.ControlledUnitary):
            document = {
                "group": self._group_section(group_module.cyclic(form.n)),
                "form": {
                    "type": "controlled",
                    "projectors": [self.encode_matrix(p) for p in form.projectors],
                    "unitaries": [self.encode_matrix(v) for v in form.unitaries],
                },
            }
        else:
            raise TypeError(f"Cannot export {type(form).__name__}")
        document["name"] = name
        return schemas.ProblemFile.model_validate(document)

    def problem_from_r_blocks(self, du: models.DoubleUnitary, irrep_set: models.IrrepSet,
                              name: str = "") -> schemas.ProblemFile:
        """
        Serialize a double form as R blocks over irreps of the product factor system.

        Raises:
            DomainValidationError: If the irreps are not over mu * nu of the form
        """
        if group_module.factor_system_distance(irrep_set.factor_system, du.gamma) > settings_module.cocycle_tol:
            raise models.DomainValidationError("R-block irreps must be over mu * nu of the form")
        blocks = fourier_module.extract_R(du.coefficients, irrep_set)
        document = {
            "name": name,
            "group": self._group_section(du.group),
            "factorSystem": self._fs_section(du.rep_a.factor_system),
            "irrepsFactorSystem": self._fs_section(irrep_set.factor_system),
            "irreps": [
                {"dim": irrep.dim, "matrices": [self.encode_matrix(m) for m in irrep.matrices]}
                for irrep in irrep_set.irreps
            ],
            "form": {
                "type": "rBlocks",
                "blocks": [self.encode_matrix(b) for b in blocks.blocks],
                "repA": self._rep_section(du.rep_a),
                "repB": self._rep_section(du.rep_b, with_fs=True),
            },
        }
        return schemas.ProblemFile.model_validate(document)

    def export_entry(self, entry: models.CatalogEntry, dim: Optional[int] = None, **params) -> schemas.ProblemFile:
        return self.problem_from_form(entry.build(dim, **params), name=entry.name)

    def dump(self, problem: schemas.ProblemFile) -> str:
        return json.dumps(problem.model_dump(exclude_none=True), indent=2)


# Singleton instance for easy import
problem_files = ProblemFileIntegration()

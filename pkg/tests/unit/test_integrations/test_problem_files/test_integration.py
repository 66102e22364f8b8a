"""
Unit tests for the problem file integration.

Tests the complex-value codec, parsing with error locations, building form
objects from every section type, validation and export.
"""

import json

import numpy as np
import pytest

from src import models, schemas
from src.core import catalog_module, fourier_module, representation_module, unitary_module
from src.integrations.problem_files import ProblemInstance, problem_files

Z2_TABLE = [[0, 1], [1, 0]]
Z2_IRREPS = [
    {"dim": 1, "matrices": [[[1]], [[1]]]},
    {"dim": 1, "matrices": [[[1]], [[-1]]]},
]
PAULI_X = [[0, 1], [1, 0]]
IDENTITY_2 = [[1, 0], [0, 1]]


def _rotation(angle):
    return np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])


def _document(form, **extra):
    document = {"name": "test", "group": {"table": Z2_TABLE}, "form": form}
    document.update(extra)
    return document


def _parse(document) -> schemas.ProblemFile:
    return problem_files.parse(json.dumps(document))


class TestComplexCodec:
    """Test complex values in the three accepted spellings."""

    @pytest.mark.unit
    @pytest.mark.parametrize("raw,expected", [
        ([0.5, -2.0], 0.5 - 2j),
        (3.0, 3.0),
        ({"rootOfUnity": [1, 4]}, 1j),
        ({"rootOfUnity": [-1, 3]}, np.exp(-2j * np.pi / 3)),
    ])
    def test_decode(self, raw, expected):
        value = schemas.ProblemFile.model_validate(
            _document({"type": "double", "coefficients": [raw, 0.0],
                       "repA": {"matrices": [[[1]], [[1]]]}, "repB": {"matrices": [[[1]], [[1]]]}})
        ).form.coefficients[0]

        assert problem_files.decode_complex(value) == pytest.approx(expected)

    @pytest.mark.unit
    def test_denominator_must_be_positive(self):
        with pytest.raises(models.ProblemFileError):
            _parse(_document({"type": "double", "coefficients": [{"rootOfUnity": [1, 0]}, 0.0],
                              "repA": {"matrices": [[[1]], [[1]]]}, "repB": {"matrices": [[[1]], [[1]]]}}))

    @pytest.mark.unit
    @pytest.mark.parametrize("z,expected", [
        (1.0, {"rootOfUnity": [0, 1]}),
        (-1.0, {"rootOfUnity": [1, 2]}),
        (np.exp(-2j * np.pi / 3), {"rootOfUnity": [2, 3]}),
        (np.exp(2j * np.pi * 5 / 8), {"rootOfUnity": [5, 8]}),
    ])
    def test_roots_of_unity_are_written_exactly(self, z, expected):
        assert problem_files.encode_phase(z) == expected

    @pytest.mark.unit
    def test_other_phases_are_written_as_pairs(self):
        assert problem_files.encode_phase(np.exp(0.3j)) == pytest.approx([np.cos(0.3), np.sin(0.3)])
        assert problem_files.encode_phase(0.5) == [0.5, 0.0]

    @pytest.mark.unit
    def test_stack_with_mixed_shapes_is_rejected(self):
        with pytest.raises(models.ShapeError):
            problem_files.decode_stack([[[1.0]], [[1.0, 0.0], [0.0, 1.0]]])


class TestParsing:
    """Test schema errors and their locations."""

    @pytest.mark.unit
    def test_missing_form_names_the_field(self):
        with pytest.raises(models.ProblemFileError) as exc_info:
            _parse({"group": {"table": Z2_TABLE}})

        assert exc_info.value.location == "form"

    @pytest.mark.unit
    def test_unknown_form_type(self):
        with pytest.raises(models.ProblemFileError) as exc_info:
            _parse(_document({"type": "triple"}))

        assert exc_info.value.location.startswith("form")

    @pytest.mark.unit
    def test_ragged_table_is_rejected(self):
        with pytest.raises(models.ProblemFileError) as exc_info:
            _parse({"group": {"table": [[0, 1], [1]]},
                    "form": {"type": "controlled", "projectors": [IDENTITY_2], "unitaries": [IDENTITY_2]}})

        assert exc_info.value.location == "group"

    @pytest.mark.unit
    def test_invalid_json(self):
        with pytest.raises(models.ProblemFileError):
            problem_files.parse("{not json")

    @pytest.mark.unit
    def test_block_forms_need_irreps(self):
        with pytest.raises(models.ProblemFileError, match="irreps"):
            _parse(_document({"type": "qBlocks", "pattern": [1, 1], "dB": 1, "blocks": [[[1]], [[1]]]}))

    @pytest.mark.unit
    def test_coefficient_count_must_match_order(self):
        with pytest.raises(models.ProblemFileError, match="coefficients"):
            _parse(_document({"type": "double", "coefficients": [1.0],
                              "repA": {"matrices": [[[1]], [[1]]]}, "repB": {"matrices": [[[1]], [[1]]]}}))

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(models.ProblemFileError):
            problem_files.load(tmp_path / "absent.json")

    @pytest.mark.unit
    def test_options_are_read(self):
        problem = _parse(_document(
            {"type": "controlled", "projectors": [IDENTITY_2], "unitaries": [PAULI_X]},
            options={"tolerance": 1e-6, "seed": 4},
        ))

        assert problem.options.tolerance == 1e-6
        assert problem.options.seed == 4
        assert problem.options.restarts is None


class TestBuilding:
    """Test section types turning into form objects."""

    @pytest.mark.unit
    def test_controlled_section(self):
        problem = _parse(_document({
            "type": "controlled",
            "projectors": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
            "unitaries": [IDENTITY_2, PAULI_X],
        }))

        instance = problem_files.build(problem)

        assert isinstance(instance.form, models.ControlledUnitary)
        assert problem_files.validate(instance).ok

    @pytest.mark.unit
    def test_q_blocks_section(self):
        problem = _parse(_document(
            {"type": "qBlocks", "pattern": [1, 1], "dB": 1, "blocks": [[[1]], [[[0, 1]]]]},
            irreps=Z2_IRREPS,
        ))

        instance = problem_files.build(problem)

        assert isinstance(instance.blocks, models.QBlockFamily)
        assert np.allclose(instance.form.assembled, np.diag([1, 1j]))
        assert problem_files.validate(instance).ok

    @pytest.mark.unit
    def test_r_blocks_section(self):
        """R = (1, -1) puts all weight on the non-identity element: U = X (x) X."""
        rep = {"matrices": [IDENTITY_2, PAULI_X]}
        problem = _parse(_document(
            {"type": "rBlocks", "blocks": [[[1]], [[-1]]], "repA": rep, "repB": rep},
            irreps=Z2_IRREPS,
        ))

        instance = problem_files.build(problem)
        u, _ = unitary_module.assemble_double(instance.form)

        assert np.allclose(u, np.kron(PAULI_X, PAULI_X))
        assert problem_files.validate(instance).ok

    @pytest.mark.unit
    def test_irrep_dim_must_match_matrices(self):
        irreps = [dict(Z2_IRREPS[0], dim=2), Z2_IRREPS[1]]
        problem = _parse(_document(
            {"type": "qBlocks", "pattern": [1, 1], "dB": 1, "blocks": [[[1]], [[1]]]},
            irreps=irreps,
        ))

        with pytest.raises(models.ShapeError):
            problem_files.build(problem)


class TestValidation:
    """Test structural validation of built problems."""

    @pytest.mark.unit
    def test_broken_cocycle_is_reported(self):
        problem = problem_files.export_entry(catalog_module.lookup("xz-2"))
        document = problem.model_dump(exclude_none=True)
        document["factorSystem"]["mu"][1][1] = [0.0, 1.0]

        report = problem_files.validate(problem_files.build(schemas.ProblemFile.model_validate(document)))

        assert not report.ok
        assert "cocycle" in report.kinds()

    @pytest.mark.unit
    def test_non_associative_group_stops_early(self):
        table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
        eye = np.eye(5).tolist()
        problem = _parse({"group": {"table": table},
                          "form": {"type": "controlled", "projectors": [eye], "unitaries": [[[1]]]}})

        report = problem_files.validate(problem_files.build(problem))

        assert report.kinds() == ["associativity"]

    @pytest.mark.unit
    def test_random_w_fails_the_w_condition(self, rng):
        gfu = catalog_module.build("xz-2")
        w = models.WFamily(rng.normal(size=(4, 2, 2)))
        instance = ProblemInstance("random-w", gfu.rep.group, gfu.rep.factor_system,
                                   unitary_module.assemble_group_unitary(gfu.rep, w))

        report = problem_files.validate(instance)

        assert report.kinds() == ["w-condition"]

    @pytest.mark.unit
    def test_bad_coefficients_fail_the_c_condition(self):
        rep = {"matrices": [IDENTITY_2, PAULI_X]}
        problem = _parse(_document({"type": "double", "coefficients": [0.5, 0.5], "repA": rep, "repB": rep}))

        report = problem_files.validate(problem_files.build(problem))

        assert "c-condition" in report.kinds()


class TestExport:
    """Test catalog entries and form objects written as problem files."""

    @pytest.mark.unit
    @pytest.mark.parametrize("name", ["eq60", "pauli-double", "cnot-controlled", "d4-projective", "d4-double"])
    def test_exported_entry_rebuilds_the_same_unitary(self, name, tmp_path):
        entry = catalog_module.lookup(name)
        path = problem_files.save(problem_files.export_entry(entry), tmp_path / f"{name}.json")

        instance = problem_files.build(problem_files.load(path))

        expected = catalog_module.assembled_matrix(entry.build())
        assert np.max(np.abs(catalog_module.assembled_matrix(instance.form) - expected)) < 1e-12
        assert problem_files.validate(instance).ok
        assert instance.name == entry.name

    @pytest.mark.unit
    def test_d4_double_round_trips_through_r_blocks(self, tmp_path):
        du = catalog_module.build("d4-double")
        problem = problem_files.problem_from_r_blocks(du, representation_module.dihedral_irreps(4), name="d4-double")
        path = problem_files.save(problem, tmp_path / "d4-double-blocks.json")

        instance = problem_files.build(problem_files.load(path))

        assert isinstance(instance.blocks, models.RBlockFamily)
        assert np.allclose(instance.irrep_set.factor_system.mu, 1.0)
        assert np.max(np.abs(instance.form.coefficients - du.coefficients)) < 1e-12
        assert problem_files.validate(instance).ok

    @pytest.mark.unit
    def test_r_block_irreps_default_to_the_product_factor_system(self):
        """Projective A side and ordinary B side: the irreps are over mu."""
        projective = representation_module.dihedral4_projective_irreps()
        rep_a, _ = representation_module.block_diagonal_rep(projective, models.MultiplicityPattern((1, 1)))
        rep_b, _ = representation_module.block_diagonal_rep(
            representation_module.dihedral_irreps(4), models.MultiplicityPattern((0, 0, 0, 0, 1)))
        blocks = (_rotation(0.3), np.exp(0.2j) * np.array([[1, 0], [0, -1]]))
        du = unitary_module.make_double(
            fourier_module.synthesize_c(models.RBlockFamily(projective, blocks)), rep_a, rep_b)
        document = problem_files.problem_from_r_blocks(du, projective).model_dump(exclude_none=True)
        del document["irrepsFactorSystem"]

        instance = problem_files.build(schemas.ProblemFile.model_validate(document))

        assert np.allclose(instance.irrep_set.factor_system.mu, projective.factor_system.mu)
        assert np.max(np.abs(instance.form.coefficients - du.coefficients)) < 1e-12
        assert problem_files.validate(instance).ok

    @pytest.mark.unit
    def test_r_blocks_need_irreps_over_the_product_factor_system(self):
        with pytest.raises(models.DomainValidationError):
            problem_files.problem_from_r_blocks(
                catalog_module.build("d4-double"), representation_module.dihedral4_projective_irreps())

    @pytest.mark.unit
    def test_declared_irrep_factor_system_is_checked(self):
        du = catalog_module.build("d4-double")
        document = problem_files.problem_from_r_blocks(du, representation_module.dihedral_irreps(4)).model_dump(
            exclude_none=True)
        document["irrepsFactorSystem"] = document["factorSystem"]

        report = problem_files.validate(problem_files.build(schemas.ProblemFile.model_validate(document)))

        assert "factor-system" in report.kinds()

    @pytest.mark.unit
    def test_dump_is_valid_json(self):
        text = problem_files.dump(problem_files.export_entry(catalog_module.lookup("xz-2")))

        assert json.loads(text)["form"]["type"] == "groupForm"
        assert problem_files.parse(text).group.table == [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]

    @pytest.mark.unit
    def test_unsupported_object_cannot_be_exported(self):
        with pytest.raises(TypeError):
            problem_files.problem_from_form(np.eye(2))

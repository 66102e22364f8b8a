"""
Unit tests for fourier_module.

Tests the hat Fourier matrix, Q/W and R/c transforms and B-block handling.
"""

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from src import models
from src.core import algebra_module, fourier_module, representation_module
from tests.conftest import builtin_irrep_sets, random_q_family


class TestHatFourierMatrix:
    """Test the unitary Fourier matrix of an irrep set."""

    @pytest.mark.unit
    @pytest.mark.parametrize("irrep_set", builtin_irrep_sets(), ids=lambda s: s.name)
    def test_hat_matrix_is_unitary(self, irrep_set):
        hat = fourier_module.hat_fourier_matrix(irrep_set)

        assert hat.shape == (irrep_set.group.order,) * 2
        assert algebra_module.unitarity_residual(hat) < 1e-10

    @pytest.mark.unit
    def test_z2_hat_matrix_is_hadamard(self, z2_irreps):
        hat = fourier_module.hat_fourier_matrix(z2_irreps)

        assert np.allclose(hat, np.array([[1, 1], [1, -1]]) / np.sqrt(2))

    @pytest.mark.unit
    def test_invalid_irrep_set_is_rejected(self, s3_irreps):
        partial = models.IrrepSet(s3_irreps.group, s3_irreps.factor_system, s3_irreps.irreps[:2])

        with pytest.raises(models.DomainValidationError):
            fourier_module.hat_fourier_matrix(partial)


class TestOperatorTransforms:
    """Test Q <-> W transforms."""

    @pytest.mark.unit
    @hyp_settings(max_examples=15, deadline=None, derandomize=True)
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1), d_b=st.integers(1, 3))
    def test_extract_inverts_synthesize_on_s3(self, seed, d_b):
        """Q -> W -> Q is the identity on complete irrep sets."""
        rng = np.random.default_rng(seed)
        irreps = representation_module.symmetric3_irreps()
        q = random_q_family(irreps, d_b, rng)

        back = fourier_module.extract_Q(fourier_module.synthesize_W(q), irreps)

        for original, recovered in zip(q.blocks, back.blocks):
            assert np.max(np.abs(original - recovered)) < 1e-10

    @pytest.mark.unit
    def test_synthesize_inverts_extract_on_projective_set(self, d4_projective_irreps, rng):
        w = models.WFamily(rng.normal(size=(8, 2, 2)) + 1j * rng.normal(size=(8, 2, 2)))

        back = fourier_module.synthesize_W(fourier_module.extract_Q(w, d4_projective_irreps))

        assert np.max(np.abs(back.matrices - w.matrices)) < 1e-10

    @pytest.mark.unit
    def test_identity_blocks_give_delta_at_identity(self, s3_irreps):
        """Q = I for every irrep means W(f) = delta(f, e) I."""
        q = models.QBlockFamily(s3_irreps, tuple(np.eye(d * 2) for d in s3_irreps.dims), 2)

        w = fourier_module.synthesize_W(q)

        assert np.allclose(w.matrices[0], np.eye(2))
        assert np.allclose(w.matrices[1:], 0)

    @pytest.mark.unit
    def test_block_count_must_match_irreps(self, s3_irreps):
        q = models.QBlockFamily(s3_irreps, (np.eye(1), np.eye(1)), 1)

        with pytest.raises(models.ShapeError):
            fourier_module.synthesize_W(q)

    @pytest.mark.unit
    def test_block_size_is_checked(self, s3_irreps):
        q = models.QBlockFamily(s3_irreps, (np.eye(2), np.eye(2), np.eye(2)), 2)

        with pytest.raises(models.ShapeError):
            fourier_module.synthesize_W(q)

    @pytest.mark.unit
    def test_validate_q_blocks_flags_non_unitary_block(self, s3_irreps):
        q = models.QBlockFamily(s3_irreps, (np.eye(1), 2 * np.eye(1), np.eye(2)), 1)

        report = fourier_module.validate_q_blocks(q)

        assert not report.ok
        assert report.violations[0].elements == (2,)


class TestScalarTransforms:
    """Test R <-> c transforms."""

    @pytest.mark.unit
    def test_extract_r_inverts_synthesize_c(self, s3_irreps, random_unitary):
        r = models.RBlockFamily(s3_irreps, tuple(random_unitary(d) for d in s3_irreps.dims))

        back = fourier_module.extract_R(fourier_module.synthesize_c(r), s3_irreps)

        for original, recovered in zip(r.blocks, back.blocks):
            assert np.max(np.abs(original - recovered)) < 1e-10
        assert fourier_module.validate_r_blocks(back).ok

    @pytest.mark.unit
    def test_extract_r_checks_length(self, s3_irreps):
        with pytest.raises(models.ShapeError):
            fourier_module.extract_R(np.ones(4), s3_irreps)

    @pytest.mark.unit
    def test_delta_coefficients_have_identity_r_blocks(self, d4_irreps):
        c = np.zeros(8)
        c[0] = 1.0

        r = fourier_module.extract_R(c, d4_irreps)

        assert all(np.allclose(block, np.eye(block.shape[0])) for block in r.blocks)


class TestBBlocks:
    """Test B-block extraction and packing."""

    @pytest.mark.unit
    def test_blocks_round_trip_through_q(self, s3_irreps, rng):
        q = random_q_family(s3_irreps, 2, rng)
        w = fourier_module.synthesize_W(q)

        table = fourier_module.extract_blocks_B(w, s3_irreps)
        packed = fourier_module.q_from_blocks(table.blocks, s3_irreps, 2)

        assert len(table.blocks) == 1 + 1 + 4
        for original, recovered in zip(q.blocks, packed.blocks):
            assert np.max(np.abs(original - recovered)) < 1e-10

    @pytest.mark.unit
    def test_missing_irrep_filled_with_identity(self, s3_irreps):
        blocks = {(3, 0, 0): np.eye(2), (3, 1, 1): np.eye(2)}

        q = fourier_module.q_from_blocks(blocks, s3_irreps, 2)

        assert np.allclose(q.blocks[0], np.eye(2))
        assert np.allclose(q.blocks[1], np.eye(2))
        assert np.allclose(q.blocks[2], np.eye(4))

    @pytest.mark.unit
    def test_unknown_irrep_label_is_rejected(self, s3_irreps):
        with pytest.raises(KeyError):
            fourier_module.q_from_blocks({(9, 0, 0): np.eye(2)}, s3_irreps, 2)

    @pytest.mark.unit
    def test_independent_block_count_of_catalog_blocks(self, s3_irreps):
        """The five dyad blocks of the qutrit construction are independent."""
        from src.core.catalog_module import s3_qutrit_blocks

        q = fourier_module.q_from_blocks(s3_qutrit_blocks(), s3_irreps, 3)
        w = fourier_module.synthesize_W(q)

        table = fourier_module.extract_blocks_B(w, s3_irreps)

        assert fourier_module.independent_block_count(table, labels=(2, 3)) == 5
        assert table.keys_for((2,)) == [(2, 0, 0)]

    @pytest.mark.unit
    def test_independent_block_count_empty_selection(self, s3_irreps, rng):
        w = fourier_module.synthesize_W(random_q_family(s3_irreps, 1, rng))

        table = fourier_module.extract_blocks_B(w, s3_irreps)

        assert fourier_module.independent_block_count(table, labels=()) == 0

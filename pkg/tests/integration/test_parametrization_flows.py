"""
Integration tests for the Fourier parametrization of valid W families.

Covers the equivalence of unitary Q blocks, the W condition and unitary M;
its scalar counterpart for double forms; span-dimension counting over
every small multiplicity pattern; and the controlled/group conversions.
"""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from src import models
from src.core import (
    algebra_module,
    fourier_module,
    group_module,
    representation_module,
    unitary_module,
)
from tests.conftest import builtin_irrep_sets, random_q_family

TRIALS_PER_GROUP = 50


def _patterns(dims, max_total):
    """Every nonzero multiplicity pattern with sum n_l d_l <= max_total."""
    ranges = [range(max_total // d + 1) for d in dims]
    for pattern in product(*ranges):
        total = sum(n * d for n, d in zip(pattern, dims))
        if 0 < total <= max_total:
            yield pattern


def _three_conditions(irreps: models.IrrepSet, w: models.WFamily):
    """(W condition, M unitarity, Q-block unitarity) residuals."""
    fs = irreps.factor_system
    condition = unitary_module.check_W_condition(fs, w)
    m_residual = algebra_module.unitarity_residual(unitary_module.assemble_M(fs, w))
    q = fourier_module.extract_Q(w, irreps)
    q_residual = max(algebra_module.unitarity_residual(b) for b in q.blocks)
    return condition, m_residual, q_residual


class TestWFamilyEquivalence:
    """Unitary Q blocks, the W condition and unitary M stand or fall together."""

    @pytest.mark.integration
    @pytest.mark.slow
    @pytest.mark.parametrize("irreps", builtin_irrep_sets(), ids=lambda s: s.name)
    def test_unitary_q_blocks_satisfy_every_condition(self, irreps, rng):
        pattern = tuple(1 for _ in irreps.irreps)
        for _ in range(TRIALS_PER_GROUP):
            q = random_q_family(irreps, 2, rng)
            w = fourier_module.synthesize_W(q)

            condition, m_residual, q_residual = _three_conditions(irreps, w)

            assert condition < 1e-9
            assert m_residual < 1e-9
            assert q_residual < 1e-9
            rep, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern(pattern))
            assert unitary_module.assemble_group_unitary(rep, w).residual < 1e-9

    @pytest.mark.integration
    @pytest.mark.slow
    @pytest.mark.parametrize("irreps", builtin_irrep_sets(), ids=lambda s: s.name)
    def test_unstructured_w_fails_every_condition(self, irreps, rng):
        n = irreps.group.order
        for _ in range(TRIALS_PER_GROUP):
            w = models.WFamily(rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2)))

            residuals = _three_conditions(irreps, w)

            assert min(residuals) > 1e-3

    @pytest.mark.integration
    @pytest.mark.parametrize("n", [2, 3])
    def test_independent_u_with_unitary_target_forces_the_condition(self, n, rng):
        """The X^p Z^q span every operator on A, so any unitary has a W family, and it is valid."""
        rep = representation_module.xz_rep(n)
        assert representation_module.span_dimension(rep) == n * n

        for _ in range(10):
            target = algebra_module.random_unitary(2 * n, rng)
            # tr(U(f)^dagger U(g)) = n delta(f, g)
            u4 = target.reshape(n, 2, n, 2)
            w = models.WFamily(np.einsum('fji,jpiq->fpq', rep.matrices.conj(), u4) / n)

            gfu = unitary_module.assemble_group_unitary(rep, w)

            assert np.max(np.abs(gfu.assembled - target)) < 1e-10
            assert unitary_module.check_W_condition(rep.factor_system, w) < 1e-9


class TestCoefficientEquivalence:
    """The scalar analogue for double forms."""

    @pytest.mark.integration
    @pytest.mark.parametrize("irreps", [
        representation_module.symmetric3_irreps(),
        representation_module.dihedral_irreps(4),
        representation_module.cyclic_irreps(4),
    ], ids=lambda s: s.name)
    def test_unitary_r_blocks_give_unitary_c(self, irreps, rng):
        rep, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern(tuple(1 for _ in irreps.irreps)))
        for _ in range(TRIALS_PER_GROUP):
            r = models.RBlockFamily(irreps, tuple(algebra_module.random_unitary(d, rng) for d in irreps.dims))
            du = unitary_module.make_double(fourier_module.synthesize_c(r), rep, rep)

            u, c_operator = unitary_module.assemble_double(du)

            assert unitary_module.check_c_condition(du) < 1e-9
            assert algebra_module.unitarity_residual(c_operator) < 1e-9
            assert algebra_module.unitarity_residual(u) < 1e-9

    @pytest.mark.integration
    def test_random_coefficients_fail(self, s3_irreps, rng):
        rep = s3_irreps.by_label(3).rep
        for _ in range(TRIALS_PER_GROUP):
            c = rng.normal(size=6) + 1j * rng.normal(size=6)
            du = unitary_module.make_double(c, rep, rep)

            assert unitary_module.check_c_condition(du) > 1e-3
            assert algebra_module.unitarity_residual(unitary_module.c_operator(du)) > 1e-3


class TestSpanCounting:
    """span_dimension is the summed d_l^2 over the irreps that occur."""

    @pytest.mark.integration
    @pytest.mark.parametrize("irreps", [
        representation_module.symmetric3_irreps(),
        representation_module.dihedral_irreps(4),
        representation_module.dihedral4_projective_irreps(),
    ], ids=lambda s: s.name)
    def test_every_pattern_up_to_dimension_eight(self, irreps):
        dims = irreps.dims
        for pattern in _patterns(dims, 8):
            rep, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern(pattern))
            expected = sum(d * d for n, d in zip(pattern, dims) if n >= 1)

            assert representation_module.span_dimension(rep) == expected, pattern

    @pytest.mark.integration
    @hyp_settings(max_examples=30, deadline=None, derandomize=True)
    @given(pattern=st.lists(st.integers(0, 2), min_size=5, max_size=5).filter(any))
    def test_duplicates_never_change_the_span(self, pattern):
        irreps = representation_module.dihedral_irreps(4)
        once = tuple(min(n, 1) for n in pattern)

        rep, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern(tuple(pattern)))
        rep_once, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern(once))

        assert representation_module.span_dimension(rep) == representation_module.span_dimension(rep_once)


class TestFourierAndRegularRep:
    """Hat matrices and regular reps for every built-in irrep set."""

    @pytest.mark.integration
    @pytest.mark.parametrize("irreps", builtin_irrep_sets(), ids=lambda s: s.name)
    def test_hat_matrix_and_regular_rep(self, irreps):
        hat = fourier_module.hat_fourier_matrix(irreps)
        regular = representation_module.regular_projective_rep(irreps.group, irreps.factor_system)

        assert algebra_module.unitarity_residual(hat) < 1e-10
        report = representation_module.validate_projective_rep(regular, tol=1e-10)
        assert report.ok, report.summary()

    @pytest.mark.integration
    def test_regular_rep_of_xz_factor_system_on_z3_squared(self):
        _, fs = group_module.xz_factor_system(3)

        regular = representation_module.regular_projective_rep(fs.group, fs)

        assert representation_module.validate_projective_rep(regular, tol=1e-10).ok
        assert representation_module.span_dimension(regular) == 9


class TestConversions:
    """Controlled -> group -> controlled round trips."""

    @pytest.mark.integration
    def test_cnot_round_trip(self, cnot):
        gfu = unitary_module.controlled_to_group(cnot)
        back = unitary_module.group_to_controlled(gfu)

        assert gfu.rep.group.order == 2
        distance, _ = algebra_module.phase_aligned_distance(back.assembled, cnot.assembled)
        assert distance < 1e-10

    @pytest.mark.integration
    def test_random_four_outcome_round_trip(self, rng):
        basis = algebra_module.random_unitary(4, rng)
        projectors = [np.outer(basis[:, j], basis[:, j].conj()) for j in range(4)]
        unitaries = [algebra_module.random_unitary(3, rng) for _ in range(4)]
        cu = unitary_module.assemble_controlled(projectors, unitaries)

        gfu = unitary_module.controlled_to_group(cu)
        back = unitary_module.group_to_controlled(gfu, rng=rng)

        assert gfu.rep.group.order == 4
        assert group_module.is_abelian(gfu.rep.group)
        assert back.n == 4
        distance, _ = algebra_module.phase_aligned_distance(back.assembled, cu.assembled)
        assert distance < 1e-10

    @pytest.mark.integration
    def test_abelian_group_form_to_controlled(self, z4_irreps, rng):
        q = random_q_family(z4_irreps, 2, rng)
        rep, _ = representation_module.block_diagonal_rep(z4_irreps, models.MultiplicityPattern((1, 1, 0, 1)))
        gfu = unitary_module.assemble_group_unitary(rep, fourier_module.synthesize_W(q))

        cu = unitary_module.group_to_controlled(gfu, rng=rng)

        assert cu.n == 3
        assert unitary_module.validate_controlled(cu.projectors, cu.unitaries).ok
        assert np.max(np.abs(cu.assembled - gfu.assembled)) < 1e-10

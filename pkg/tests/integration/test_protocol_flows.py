"""
Integration tests for protocol simulation.

Random unitary Q blocks over every built-in group drive the full pipeline:
Fourier synthesis, group-form assembly, M, and exhaustive branch
simulation. Also covers the controlled protocol with higher-rank
projectors, the double protocol factorization, and negative controls.
"""

import numpy as np
import pytest

from src import models
from src.core import (
    algebra_module,
    catalog_module,
    fourier_module,
    protocol_module,
    representation_module,
    unitary_module,
)
from tests.conftest import group_form_from_q, random_q_family

FAMILIES_PER_GROUP = 20
INPUTS_PER_FAMILY = 5

# (irrep set factory, A-side multiplicity pattern)
GROUP_CASES = {
    "Z2": (lambda: representation_module.cyclic_irreps(2), (1, 1)),
    "Z3": (lambda: representation_module.cyclic_irreps(3), (1, 1, 1)),
    "Z4": (lambda: representation_module.cyclic_irreps(4), (1, 0, 1, 1)),
    "Z2xZ2-xz": (lambda: representation_module.xz_irreps(2), (1,)),
    "S3": (lambda: representation_module.symmetric3_irreps(), (1, 1, 1)),
    "D4-projective": (lambda: representation_module.dihedral4_projective_irreps(), (1, 1)),
}


def _random_controlled(d_a: int, ranks, d_b: int, rng: np.random.Generator) -> models.ControlledUnitary:
    """Projectors onto consecutive columns of a random unitary basis, random V_j."""
    basis = algebra_module.random_unitary(d_a, rng)
    projectors, start = [], 0
    for rank in ranks:
        columns = basis[:, start:start + rank]
        projectors.append(columns @ columns.conj().T)
        start += rank
    unitaries = [algebra_module.random_unitary(d_b, rng) for _ in ranks]
    return unitary_module.assemble_controlled(projectors, unitaries)


class TestGroupProtocolDeterminism:
    """Every branch of the group protocol implements the target unitary."""

    @pytest.mark.integration
    @pytest.mark.slow
    @pytest.mark.parametrize("case", list(GROUP_CASES))
    def test_random_q_families(self, case, rng):
        make_irreps, pattern = GROUP_CASES[case]
        irreps = make_irreps()
        n = irreps.group.order

        for _ in range(FAMILIES_PER_GROUP):
            gfu = group_form_from_q(irreps, pattern, random_q_family(irreps, 2, rng))
            transcript = protocol_module.simulate(gfu)

            assert len(transcript.branches) == n * n
            assert transcript.worst_residual < 1e-9
            assert protocol_module.information_absence_check(transcript).passed

            for _ in range(INPUTS_PER_FAMILY):
                state = algebra_module.random_state((gfu.d_A, gfu.d_B), rng).amplitudes
                probabilities = transcript.branch_probabilities(state)
                assert np.max(np.abs(probabilities - 1 / n**2)) < 1e-9

                expected = gfu.assembled @ state
                for record in transcript.branches:
                    output = record.kraus @ state
                    output = output / np.linalg.norm(output)
                    assert abs(np.vdot(output, expected)) > 1 - 1e-9

    @pytest.mark.integration
    def test_identity_target_returns_the_input(self, s3_irreps, rng):
        """W(e) = I, W(f) = 0 otherwise: every branch leaves the input alone up to phase."""
        w = np.zeros((6, 2, 2), dtype=complex)
        w[0] = np.eye(2)
        rep, _ = representation_module.block_diagonal_rep(s3_irreps, models.MultiplicityPattern((0, 1, 1)))
        gfu = unitary_module.assemble_group_unitary(rep, models.WFamily(w))
        state = algebra_module.random_state((3, 2), rng)

        transcript = protocol_module.simulate(gfu, state=state)

        for record in transcript.branches:
            assert abs(abs(np.vdot(state.amplitudes, record.output)) - 1 / 6) < 1e-10

    @pytest.mark.integration
    def test_alternative_unbiased_basis(self, z3_irreps, rng):
        """Any F with entries of magnitude N^-1/2 works, not only the DFT."""
        phases = np.diag(np.exp(2j * np.pi * rng.random(3)))
        f_matrix = phases @ protocol_module.build_F(3)
        gfu = group_form_from_q(z3_irreps, (1, 1, 1), random_q_family(z3_irreps, 2, rng))

        transcript = protocol_module.simulate(gfu, f_matrix=f_matrix)

        assert transcript.worst_residual < 1e-9


class TestNegativeControls:
    """Broken M operators must be caught."""

    @pytest.mark.integration
    @pytest.mark.slow
    def test_perturbed_w_always_fails(self, z3_irreps, rng):
        for _ in range(100):
            gfu = group_form_from_q(z3_irreps, (1, 1, 1), random_q_family(z3_irreps, 2, rng))
            w = gfu.wfam.matrices.copy()
            bump = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            w[rng.integers(3)] += 0.1 * bump / np.linalg.norm(bump)
            broken = unitary_module.assemble_group_unitary(gfu.rep, models.WFamily(w))

            transcript = protocol_module.simulate(broken)
            intended = protocol_module.simulate_group_protocol(
                protocol_module.group_protocol_spec(broken, target=gfu.assembled))

            assert not protocol_module.information_absence_check(transcript).passed
            assert transcript.worst_residual > 1e-3
            assert intended.worst_residual > 1e-3

    @pytest.mark.integration
    def test_random_unitary_m_fails(self, s3_irreps, rng, random_unitary):
        """A unitary M that is not built from a W family still breaks proportionality."""
        gfu = group_form_from_q(s3_irreps, (0, 1, 1), random_q_family(s3_irreps, 2, rng))
        spec = protocol_module.group_protocol_spec(gfu, m_override=random_unitary(12))

        transcript = protocol_module.simulate_group_protocol(spec)

        assert not spec.flagged_non_unitary
        assert not protocol_module.information_absence_check(transcript).passed


class TestControlledProtocol:
    """Controlled protocol with rank-1 and higher-rank projectors."""

    @pytest.mark.integration
    def test_rank_two_projectors_with_random_v(self, rng):
        cu = _random_controlled(4, (2, 2), 2, rng)

        transcript = protocol_module.simulate(cu, state=algebra_module.random_state((4, 2), rng))

        assert len(transcript.branches) == 4
        assert transcript.worst_residual < 1e-9
        assert protocol_module.information_absence_check(transcript).passed

    @pytest.mark.integration
    def test_qutrit_rank_one_projectors(self, rng):
        cu = _random_controlled(3, (1, 1, 1), 3, rng)

        transcript = protocol_module.simulate(cu, state=algebra_module.random_state((3, 3), rng))

        assert len(transcript.branches) == 9
        assert protocol_module.information_absence_check(transcript).passed

    @pytest.mark.integration
    def test_controlled_and_group_protocols_agree_on_u(self, rng):
        """Both protocols for the same unitary implement it, with N^2 branches each."""
        cu = _random_controlled(4, (1, 1, 1, 1), 2, rng)
        gfu = unitary_module.controlled_to_group(cu)

        controlled = protocol_module.simulate(cu)
        group = protocol_module.simulate(gfu)

        assert len(controlled.branches) == len(group.branches) == 16
        assert controlled.worst_residual < 1e-9
        assert group.worst_residual < 1e-9


class TestDoubleFactorization:
    """M = CtrlV^dagger (C (x) I) CtrlV on random S3 double forms."""

    @pytest.mark.integration
    @pytest.mark.slow
    def test_random_s3_double_forms(self, s3_irreps, rng):
        patterns = [(0, 1, 1), (1, 1, 1), (0, 0, 1), (2, 0, 1)]
        for trial in range(20):
            r = models.RBlockFamily(s3_irreps, tuple(algebra_module.random_unitary(d, rng) for d in s3_irreps.dims))
            rep_a, _ = representation_module.block_diagonal_rep(s3_irreps, models.MultiplicityPattern(patterns[trial % 4]))
            rep_b, _ = representation_module.block_diagonal_rep(
                s3_irreps, models.MultiplicityPattern(patterns[(trial + 1) % 4])
            )
            du = unitary_module.make_double(fourier_module.synthesize_c(r), rep_a, rep_b)
            gfu = unitary_module.double_as_group_form(du)

            generic = unitary_module.assemble_M(gfu.rep.factor_system, gfu.wfam)
            assert np.max(np.abs(unitary_module.factorized_M(du) - generic)) < 1e-10

            double = protocol_module.simulate(du)
            group = protocol_module.simulate(gfu)
            assert double.worst_residual < 1e-9
            for a, b in zip(double.branches, group.branches):
                assert np.max(np.abs(a.kraus - b.kraus)) < 1e-10

    @pytest.mark.integration
    def test_projective_double_form(self):
        """The D4 double form has a nontrivial A-side factor system and still works."""
        du = catalog_module.build("d4-double")

        transcript = protocol_module.simulate(du)

        assert len(transcript.branches) == 64
        assert transcript.worst_residual < 1e-9
        assert protocol_module.information_absence_check(transcript).passed

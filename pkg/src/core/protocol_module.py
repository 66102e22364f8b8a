"""
Core Protocol Module

Exhaustive simulation of the entanglement-assisted protocols that carry
out a nonlocal unitary with local operations, classical communication and
a maximally entangled resource of Schmidt rank N:

    controlled  ctrl-X^j on Aa, measure a -> l, X^l on b, ctrl-V on bB,
                F on b, measure b -> m, Z_m on A
    group       ctrl-U(f) on Aa, F on a, measure a -> h, Z(h) on b,
                M on bB, measure b -> g, U(g)^dagger on A
    double      the group protocol with M realized as CtrlV^dagger (C (x) I) CtrlV

Measurements are deferred: the state tensor carries a spare input axis
holding the identity, so slicing the ancilla axes at the end of each branch
gives that branch's Kraus operator directly. No sampling is done; all N^2
branches are enumerated.

This is CORE functionality - required for Loccsmith to work.
"""

from itertools import combinations
from typing import Optional, Union

import numpy as np

from .. import models
from .algebra_module import algebra_module
from .logging_module import get_logger
from .settings_module import settings_module
from .unitary_module import unitary_module

logger = get_logger('loccsmith.core.protocol')

InputState = Optional[Union[models.StateVector, np.ndarray]]


def _input_vector(state: InputState, dim: int) -> Optional[np.ndarray]:
    if state is None:
        return None
    amplitudes = state.amplitudes if isinstance(state, models.StateVector) else np.asarray(state, dtype=complex)
    amplitudes = amplitudes.reshape(-1)
    if amplitudes.size != dim:
        raise models.ShapeError(f"Input state has {amplitudes.size} amplitudes, protocol acts on dimension {dim}")
    if abs(np.linalg.norm(amplitudes) - 1.0) > settings_module.get("norm_tol"):
        raise models.DomainValidationError("Input state is not normalized")
    return amplitudes


def _resource_tensor(d_a: int, d_b: int, n: int) -> np.ndarray:
    """psi[A, B, a, b, (i,p)] = delta(A,i) delta(B,p) delta(a,b) / sqrt(N)."""
    dim = d_a * d_b
    psi = np.zeros((d_a, d_b, n, n, dim), dtype=complex)
    inputs = np.eye(dim).reshape(d_a, d_b, dim)
    for k in range(n):
        psi[:, :, k, k, :] = inputs / np.sqrt(n)
    return psi


def _shift_powers(n: int) -> np.ndarray:
    """X^j for j = 0..N-1 with X|k> = |k-1>."""
    shift = np.roll(np.eye(n), -1, axis=0)
    return np.stack([np.linalg.matrix_power(shift, j) for j in range(n)])


class ProtocolModule:
    """
    Core module for building and simulating the protocols.
    """

    # ========================================================================
    # GATES AND RESOURCES
    # ========================================================================

    @staticmethod
    def build_F(n: int) -> np.ndarray:
        """Discrete Fourier matrix F_mj = exp(2 pi i m j / N) / sqrt(N)."""
        if int(n) < 1:
            raise ValueError(f"Fourier matrix needs N >= 1, got {n}")
        idx = np.arange(n)
        return np.exp(2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)

    @staticmethod
    def is_unbiased(f_matrix: np.ndarray, tol: Optional[float] = None) -> bool:
        """All entries of magnitude N^-1/2 and F unitary."""
        tol = settings_module.resolve("unitarity_tol", tol)
        f_matrix = np.asarray(f_matrix, dtype=complex)
        n = f_matrix.shape[0]
        magnitudes = np.max(np.abs(np.abs(f_matrix) - 1.0 / np.sqrt(n)))
        return bool(magnitudes < tol and algebra_module.unitarity_residual(f_matrix) < tol)

    @staticmethod
    def build_Zh(f_matrix: np.ndarray, h: int) -> np.ndarray:
        """
        Diagonal of Z(h): entries c / <h|F|f> with c = N^-1/2.

        Raises:
            DomainValidationError: If F is not unbiased (Z(h) would not be unitary)
        """
        f_matrix = np.asarray(f_matrix, dtype=complex)
        if not ProtocolModule.is_unbiased(f_matrix):
            raise models.DomainValidationError("F must be unitary with all entries of magnitude N^-1/2")
        n = f_matrix.shape[0]
        return (1.0 / np.sqrt(n)) / f_matrix[h]

    @staticmethod
    def build_Zm(f_matrix: np.ndarray, projectors, m: int) -> np.ndarray:
        """Correction sum_j (c / F_mj) P_j of the controlled protocol."""
        return sum(p * z for p, z in zip(projectors, ProtocolModule.build_Zh(f_matrix, m)))

    @staticmethod
    def maximally_entangled(n: int) -> models.EntangledResource:
        amplitudes = np.eye(n, dtype=complex).reshape(-1) / np.sqrt(n)
        return models.EntangledResource(n, models.StateVector((n, n), amplitudes))

    # ========================================================================
    # PROTOCOL SPECS
    # ========================================================================

    @staticmethod
    def _fourier_for(n: int, f_matrix: Optional[np.ndarray]) -> np.ndarray:
        if f_matrix is None:
            return ProtocolModule.build_F(n)
        f_matrix = np.asarray(f_matrix, dtype=complex)
        if f_matrix.shape != (n, n):
            raise models.ShapeError(f"F must be {n}x{n}, got {f_matrix.shape}")
        return f_matrix

    @staticmethod
    def _target_for(assembled: np.ndarray, target: Optional[np.ndarray]) -> np.ndarray:
        if target is None:
            return assembled
        target = np.asarray(target, dtype=complex)
        if target.shape != assembled.shape:
            raise models.ShapeError(f"target must be {assembled.shape}, got {target.shape}")
        return target

    @staticmethod
    def group_protocol_spec(gfu: models.GroupFormUnitary, f_matrix: Optional[np.ndarray] = None,
                            m_override: Optional[np.ndarray] = None,
                            target: Optional[np.ndarray] = None) -> models.ProtocolSpec:
        """
        Gates for the group protocol of a group-form unitary.

        ``m_override`` replaces M (negative controls); the run is then
        flagged when M is not unitary. ``target`` is the unitary the run is
        meant to implement and defaults to the assembled sum over f of
        U(f) (x) W(f).
        """
        rep = gfu.rep
        n = rep.group.order
        fourier = ProtocolModule._fourier_for(n, f_matrix)
        m_operator = unitary_module.assemble_M(rep.factor_system, gfu.wfam) if m_override is None \
            else np.asarray(m_override, dtype=complex)
        condition = unitary_module.check_W_condition(rep.factor_system, gfu.wfam)
        if m_override is not None:
            condition = algebra_module.unitarity_residual(m_operator)
        flagged = condition > settings_module.residual_tol
        if flagged:
            logger.warning("Group protocol M is not unitary (residual %.3e)", condition)
        target = ProtocolModule._target_for(gfu.assembled, target)
        return models.ProtocolSpec(
            variant=models.ProtocolVariant.GROUP,
            form=gfu,
            target=target,
            d_A=gfu.d_A,
            d_B=gfu.d_B,
            n=n,
            fourier=fourier,
            phase_gates=tuple(ProtocolModule.build_Zh(fourier, h) for h in range(n)),
            rep=rep,
            m_operator=m_operator,
            flagged_non_unitary=flagged,
            condition_residual=condition,
            target_residual=algebra_module.unitarity_residual(target),
        )

    @staticmethod
    def double_protocol_spec(du: models.DoubleUnitary, f_matrix: Optional[np.ndarray] = None) -> models.ProtocolSpec:
        """Gates for the double protocol: CtrlV, C and CtrlV^dagger in place of M."""
        target, c_operator = unitary_module.assemble_double(du)
        n = du.group.order
        fourier = ProtocolModule._fourier_for(n, f_matrix)
        condition = unitary_module.check_c_condition(du)
        flagged = condition > settings_module.residual_tol
        if flagged:
            logger.warning("Double protocol C is not unitary (residual %.3e)", condition)
        return models.ProtocolSpec(
            variant=models.ProtocolVariant.DOUBLE,
            form=du,
            target=target,
            d_A=du.d_A,
            d_B=du.d_B,
            n=n,
            fourier=fourier,
            phase_gates=tuple(ProtocolModule.build_Zh(fourier, h) for h in range(n)),
            rep=du.rep_a,
            c_operator=c_operator,
            ctrl_unitaries=du.rep_b.matrices,
            flagged_non_unitary=flagged,
            condition_residual=condition,
            target_residual=algebra_module.unitarity_residual(target),
        )

    @staticmethod
    def controlled_protocol_spec(cu: models.ControlledUnitary,
                                 f_matrix: Optional[np.ndarray] = None) -> models.ProtocolSpec:
        n = cu.n
        fourier = ProtocolModule._fourier_for(n, f_matrix)
        residual = algebra_module.unitarity_residual(cu.assembled)
        return models.ProtocolSpec(
            variant=models.ProtocolVariant.CONTROLLED,
            form=cu,
            target=cu.assembled,
            d_A=cu.d_A,
            d_B=cu.d_B,
            n=n,
            fourier=fourier,
            phase_gates=tuple(ProtocolModule.build_Zm(fourier, cu.projectors, m) for m in range(n)),
            ctrl_unitaries=np.stack(cu.unitaries),
            flagged_non_unitary=residual > settings_module.residual_tol,
            condition_residual=residual,
            target_residual=residual,
        )

    @staticmethod
    def spec_for(form, f_matrix: Optional[np.ndarray] = None) -> models.ProtocolSpec:
        """Pick the protocol that matches a form object."""
        if isinstance(form, models.ProtocolSpec):
            return form
        if isinstance(form, models.GroupFormUnitary):
            return ProtocolModule.group_protocol_spec(form, f_matrix)
        if isinstance(form, models.DoubleUnitary):
            return ProtocolModule.double_protocol_spec(form, f_matrix)
        if isinstance(form, models.ControlledUnitary):
            return ProtocolModule.controlled_protocol_spec(form, f_matrix)
        raise TypeError(f"No protocol for {type(form).__name__}")

    # ========================================================================
    # SIMULATION
    # ========================================================================

    @staticmethod
    def _record(spec: models.ProtocolSpec, outcome_a: int, outcome_b: int, final: np.ndarray,
                state: Optional[np.ndarray]) -> models.BranchRecord:
        dim = spec.d_A * spec.d_B
        kraus = final.reshape(dim, dim)
        distance, phase = algebra_module.phase_aligned_distance(kraus, spec.target / spec.n)
        residual = max(distance, spec.target_residual)
        output = probability = None
        if state is not None:
            output = kraus @ state
            probability = float(np.vdot(output, output).real)
        return models.BranchRecord(outcome_a, outcome_b, kraus, phase, residual, output, probability)

    @staticmethod
    def _transcript(spec: models.ProtocolSpec, branches) -> models.ProtocolTranscript:
        transcript = models.ProtocolTranscript(
            variant=spec.variant,
            branches=tuple(branches),
            target=spec.target,
            n=spec.n,
            flagged_non_unitary=spec.flagged_non_unitary,
        )
        logger.info(
            "Simulated %s protocol: %d branches, worst residual %.3e%s",
            spec.variant.value, len(transcript.branches), transcript.worst_residual,
            " (flagged non-unitary)" if spec.flagged_non_unitary else "",
        )
        return transcript

    @staticmethod
    def _apply_b_operator(spec: models.ProtocolSpec, phi: np.ndarray) -> np.ndarray:
        """M on (b, B) for a state phi[A, B, b, I], or its factorized form."""
        n, d_b = spec.n, spec.d_B
        if spec.variant == models.ProtocolVariant.GROUP:
            m4 = spec.m_operator.reshape(n, d_b, n, d_b)
            return np.einsum('gpfq,AqfI->ApgI', m4, phi)
        vs = spec.ctrl_unitaries
        phi = np.einsum('fpq,AqfI->ApfI', vs, phi)
        phi = np.einsum('gf,ApfI->ApgI', spec.c_operator, phi)
        return np.einsum('gqp,AqgI->ApgI', vs.conj(), phi)

    @staticmethod
    def simulate_group_protocol(spec: Union[models.ProtocolSpec, models.GroupFormUnitary],
                                state: InputState = None) -> models.ProtocolTranscript:
        """
        Run the group protocol over every outcome pair (h, g).

        Args:
            spec: Group or double protocol spec, or a group-form unitary
            state: Optional normalized input on H_A (x) H_B; each branch then
                also records its output vector and probability

        Returns:
            Transcript with one record per (h, g); a non-unitary M still
            produces a transcript, flagged non-unitary
        """
        spec = ProtocolModule.spec_for(spec)
        if spec.variant == models.ProtocolVariant.CONTROLLED:
            raise TypeError("Use simulate_controlled_protocol for controlled specs")
        d_a, d_b, n = spec.d_A, spec.d_B, spec.n
        vector = _input_vector(state, d_a * d_b)
        u_mats = spec.rep.matrices

        psi = _resource_tensor(d_a, d_b, n)
        psi = np.einsum('fij,jBfbI->iBfbI', u_mats, psi)
        psi = np.einsum('hf,ABfbI->ABhbI', spec.fourier, psi)

        branches = []
        for h in range(n):
            phi = psi[:, :, h, :, :] * spec.phase_gates[h][None, None, :, None]
            phi = ProtocolModule._apply_b_operator(spec, phi)
            for g in range(n):
                final = np.einsum('ji,jBI->iBI', u_mats[g].conj(), phi[:, :, g, :])
                branches.append(ProtocolModule._record(spec, h, g, final, vector))
        return ProtocolModule._transcript(spec, branches)

    @staticmethod
    def simulate_double_protocol(spec: Union[models.ProtocolSpec, models.DoubleUnitary],
                                 state: InputState = None) -> models.ProtocolTranscript:
        """
        The group protocol with M built from CtrlV, C and CtrlV^dagger.
        """
        spec = ProtocolModule.spec_for(spec)
        if spec.variant != models.ProtocolVariant.DOUBLE:
            raise TypeError(f"Expected a double protocol spec, got {spec.variant.value}")
        return ProtocolModule.simulate_group_protocol(spec, state)

    @staticmethod
    def simulate_controlled_protocol(spec: Union[models.ProtocolSpec, models.ControlledUnitary],
                                     state: InputState = None) -> models.ProtocolTranscript:
        """
        Run the controlled protocol over every outcome pair (l, m).

        Works for projectors of any rank; with N = 1 it reduces to applying
        V_0 on B.
        """
        spec = ProtocolModule.spec_for(spec)
        if spec.variant != models.ProtocolVariant.CONTROLLED:
            raise TypeError(f"Expected a controlled protocol spec, got {spec.variant.value}")
        cu: models.ControlledUnitary = spec.form
        d_a, d_b, n = spec.d_A, spec.d_B, spec.n
        vector = _input_vector(state, d_a * d_b)
        projectors = np.stack(cu.projectors)
        shifts = _shift_powers(n)

        psi = _resource_tensor(d_a, d_b, n)
        psi = np.einsum('jAC,jac,CBcbI->ABabI', projectors, shifts, psi)

        branches = []
        for l in range(n):
            phi = np.einsum('bc,ABcI->ABbI', shifts[l], psi[:, :, l, :, :])
            phi = np.einsum('jpq,AqjI->ApjI', spec.ctrl_unitaries, phi)
            phi = np.einsum('mj,ABjI->ABmI', spec.fourier, phi)
            for m in range(n):
                final = np.einsum('iA,ABI->iBI', spec.phase_gates[m], phi[:, :, m, :])
                branches.append(ProtocolModule._record(spec, l, m, final, vector))
        return ProtocolModule._transcript(spec, branches)

    @staticmethod
    def simulate(form, state: InputState = None, f_matrix: Optional[np.ndarray] = None) -> models.ProtocolTranscript:
        """Build the matching spec for a form object and run it."""
        spec = ProtocolModule.spec_for(form, f_matrix)
        if spec.variant == models.ProtocolVariant.CONTROLLED:
            return ProtocolModule.simulate_controlled_protocol(spec, state)
        return ProtocolModule.simulate_group_protocol(spec, state)

    # ========================================================================
    # INFORMATION ABSENCE
    # ========================================================================

    @staticmethod
    def information_absence_check(transcript: models.ProtocolTranscript,
                                  tol: Optional[float] = None) -> models.InformationReport:
        """
        Check that no branch reveals anything about the input.

        Passes iff every Kraus operator K is a multiple of an isometry
        (K^dagger K = |c|^2 I) and all nonzero branches are proportional to
        each other up to phase after normalization.
        """
        tol = settings_module.resolve("residual_tol", tol)
        dim = transcript.target.shape[1]
        eye = np.eye(dim)
        worst_isometry = 0.0
        normalized = []
        for index, record in enumerate(transcript.branches):
            gram = record.kraus.conj().T @ record.kraus
            weight = np.trace(gram).real / dim
            worst_isometry = max(worst_isometry, float(np.max(np.abs(gram - weight * eye))))
            norm = np.linalg.norm(record.kraus)
            if norm > 1e-12:
                normalized.append((index, record.kraus / norm))

        worst_pair = (0, 0)
        worst_proportionality = 0.0
        for (i, ki), (j, kj) in combinations(normalized, 2):
            distance, _ = algebra_module.phase_aligned_distance(ki, kj)
            if distance > worst_proportionality:
                worst_proportionality, worst_pair = distance, (i, j)

        probabilities = [r.probability for r in transcript.branches if r.probability is not None]
        spread = float(max(probabilities) - min(probabilities)) if probabilities else None

        passed = worst_isometry < tol and worst_proportionality < tol
        report = models.InformationReport(
            passed=passed,
            branch_count=len(transcript.branches),
            worst_isometry_residual=worst_isometry,
            worst_proportionality_residual=worst_proportionality,
            worst_pair=worst_pair,
            probability_spread=spread,
        )
        if not passed:
            logger.warning("Information absence check failed: %s", report.summary())
        return report


# Singleton instance for easy import
protocol_module = ProtocolModule()

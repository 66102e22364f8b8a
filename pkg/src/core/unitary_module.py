"""
Core Unitary Module

Assembly and cross-validation of the three expansion forms of a bipartite
unitary:

    group form      U = sum_f U(f) (x) W(f)
    controlled      U = sum_j P_j (x) V_j
    double form     U = sum_f c(f) U(f) (x) V(f)

plus the protocol operators M and C, conversions between the controlled
and group forms, and the Schmidt-rank / entangling-strength bounds that a
resource state must meet.

This is CORE functionality - required for Loccsmith to work.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import minimize

from .. import models
from .algebra_module import algebra_module
from .group_module import group_module
from .logging_module import get_logger
from .representation_module import representation_module
from .settings_module import settings_module

logger = get_logger('loccsmith.core.unitary')


def _delta_identity(n: int, d: int) -> np.ndarray:
    target = np.zeros((n, d, d), dtype=complex)
    target[0] = np.eye(d)
    return target


class UnitaryModule:
    """
    Core module for bipartite unitaries in group, controlled and double form.
    """

    # ========================================================================
    # GROUP FORM
    # ========================================================================

    @staticmethod
    def assemble_group_unitary(rep: models.ProjectiveRep, w: models.WFamily) -> models.GroupFormUnitary:
        """
        Assemble U = sum_f U(f) (x) W(f).

        Args:
            rep: Projective rep on H_A
            w: Operators on H_B, one per group element

        Returns:
            GroupFormUnitary with the assembled matrix and its unitarity residual

        Raises:
            ShapeError: If the family size differs from the group order
        """
        if len(w) != rep.group.order:
            raise models.ShapeError(f"W family has {len(w)} members for a group of order {rep.group.order}")
        d_a, d_b = rep.dim, w.d_B
        assembled = np.einsum('fij,fpq->ipjq', rep.matrices, w.matrices).reshape(d_a * d_b, d_a * d_b)
        return models.GroupFormUnitary(rep, w, assembled, algebra_module.unitarity_residual(assembled))

    @staticmethod
    def w_condition_residuals(factor_system: models.FactorSystem, w: models.WFamily) -> np.ndarray:
        """
        Per-g max-abs of sum_f conj(mu(f,g)) W(f)^dagger W(fg) - delta(e,g) I.
        """
        group = factor_system.group
        if len(w) != group.order:
            raise models.ShapeError(f"W family has {len(w)} members for a group of order {group.order}")
        mats = w.matrices
        daggers = mats.conj().transpose(0, 2, 1)
        sums = np.einsum('fg,fab,fgbc->gac', factor_system.mu.conj(), daggers, mats[group.table])
        return np.max(np.abs(sums - _delta_identity(group.order, w.d_B)), axis=(1, 2))

    @staticmethod
    def check_W_condition(factor_system: models.FactorSystem, w: models.WFamily) -> float:
        """Worst residual over g of the W unitarity condition."""
        return float(np.max(UnitaryModule.w_condition_residuals(factor_system, w)))

    @staticmethod
    def assemble_M(factor_system: models.FactorSystem, w: models.WFamily) -> np.ndarray:
        """
        M = sum_f R(f) (x) W(f); block (g, f) is mu(g, g^-1 f) W(g^-1 f).
        """
        group = factor_system.group
        if len(w) != group.order:
            raise models.ShapeError(f"W family has {len(w)} members for a group of order {group.order}")
        regular = representation_module.regular_projective_rep(group, factor_system)
        n, d_b = group.order, w.d_B
        return np.einsum('hgf,hpq->gpfq', regular.matrices, w.matrices).reshape(n * d_b, n * d_b)

    # ========================================================================
    # CONTROLLED FORM
    # ========================================================================

    @staticmethod
    def validate_controlled(projectors: Sequence[np.ndarray], unitaries: Sequence[np.ndarray],
                            tol: Optional[float] = None) -> models.ValidationReport:
        """
        Check that {P_j} is an orthogonal decomposition of the identity and
        each V_j is unitary.
        """
        tol = settings_module.resolve("unitarity_tol", tol)
        report = models.ValidationReport(subject="controlled unitary")
        if not projectors or len(projectors) != len(unitaries):
            report.add("count", (len(projectors), len(unitaries)), 1.0, "need one unitary per projector")
            return report
        ps = [np.asarray(p, dtype=complex) for p in projectors]
        d_a = ps[0].shape[0]
        for j, p in enumerate(ps):
            if p.shape != (d_a, d_a):
                report.add("shape", (j,), 1.0, f"P_{j} has shape {p.shape}, expected {(d_a, d_a)}")
                return report
            hermiticity = float(np.max(np.abs(p - p.conj().T)))
            report.observe(hermiticity, (j,))
            if hermiticity > tol:
                report.add("hermitian", (j,), hermiticity, f"P_{j} is not Hermitian")
        for j, pj in enumerate(ps):
            for k, pk in enumerate(ps):
                expected = pj if j == k else np.zeros_like(pj)
                residual = float(np.max(np.abs(pj @ pk - expected)))
                report.observe(residual, (j, k))
                if residual > tol:
                    report.add("orthogonality", (j, k), residual, f"P_{j} P_{k} != delta P_{j}")
        completeness = float(np.max(np.abs(sum(ps) - np.eye(d_a))))
        report.observe(completeness, ())
        if completeness > tol:
            report.add("completeness", (), completeness, "projectors do not sum to the identity")

        d_b = np.asarray(unitaries[0]).shape[0]
        for j, v in enumerate(unitaries):
            v = np.asarray(v, dtype=complex)
            if v.shape != (d_b, d_b):
                report.add("shape", (j,), 1.0, f"V_{j} has shape {v.shape}, expected {(d_b, d_b)}")
                continue
            residual = algebra_module.unitarity_residual(v)
            report.observe(residual, (j,))
            if residual > tol:
                report.add("unitarity", (j,), residual, f"V_{j} is not unitary")
        return report

    @staticmethod
    def assemble_controlled(projectors: Sequence[np.ndarray], unitaries: Sequence[np.ndarray]) -> models.ControlledUnitary:
        """
        Assemble U = sum_j P_j (x) V_j; projectors may have any rank.

        Raises:
            DomainValidationError: If the projector or unitary axioms fail
        """
        report = UnitaryModule.validate_controlled(projectors, unitaries)
        if not report.ok:
            raise models.DomainValidationError(report.summary())
        return UnitaryModule.controlled_form(projectors, unitaries)

    @staticmethod
    def controlled_form(projectors, unitaries) -> models.ControlledUnitary:
        """Assemble without validating; see assemble_controlled for the checked version."""
        ps = tuple(np.asarray(p, dtype=complex) for p in projectors)
        vs = tuple(np.asarray(v, dtype=complex) for v in unitaries)
        assembled = sum(np.kron(p, v) for p, v in zip(ps, vs))
        return models.ControlledUnitary(ps, vs, assembled)

    @staticmethod
    def controlled_to_group(cu: models.ControlledUnitary) -> models.GroupFormUnitary:
        """
        Rewrite sum_j P_j (x) V_j over the cyclic group Z_N.

        U(j) = sum_k omega^(jk) P_k and W(j) = (1/N) sum_k omega^(-jk) V_k.
        """
        n = cu.n
        omega = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
        ps = np.stack(cu.projectors)
        vs = np.stack(cu.unitaries)
        u_mats = np.einsum('jk,kab->jab', omega, ps)
        w_mats = np.einsum('jk,kab->jab', omega.conj(), vs) / n
        group = group_module.cyclic(n)
        rep = models.ProjectiveRep(group, group_module.trivial_factor_system(group), u_mats)
        return UnitaryModule.assemble_group_unitary(rep, models.WFamily(w_mats))

    @staticmethod
    def group_to_controlled(gfu: models.GroupFormUnitary, rng: Optional[np.random.Generator] = None,
                            attempts: int = 5) -> models.ControlledUnitary:
        """
        Rewrite a group form with commuting U(f) as a controlled unitary.

        The U(f) are diagonalized together through a random Hermitian
        combination; basis vectors whose eigenvalue patterns over f agree
        are merged into one projector P, and V = sum_f e^(i phi(f)) W(f).

        Raises:
            PreconditionError: If some U(f), U(g) do not commute
        """
        mats = gfu.rep.matrices
        n, d_a = mats.shape[0], mats.shape[1]
        commute_tol = settings_module.get("commute_tol")
        commutators = np.einsum('fab,gbc->fgac', mats, mats) - np.einsum('gab,fbc->fgac', mats, mats)
        worst = float(np.max(np.abs(commutators))) if n else 0.0
        if worst > commute_tol:
            raise models.PreconditionError(f"U(f) do not commute (worst commutator {worst:.3e})")

        rng = rng if rng is not None else np.random.default_rng(settings_module.seed)
        diagonal_tol = settings_module.get("diagonal_tol")
        for attempt in range(attempts):
            z = rng.normal(size=n) + 1j * rng.normal(size=n)
            combo = np.einsum('f,fab->ab', z, mats)
            hermitian = combo + combo.conj().T
            _, basis = np.linalg.eigh(hermitian)
            rotated = np.einsum('ai,fab,bj->fij', basis.conj(), mats, basis)
            off_diagonal = rotated - np.einsum('fii->fi', rotated)[:, :, None] * np.eye(d_a)
            if np.max(np.abs(off_diagonal)) < diagonal_tol:
                break
            logger.debug("Simultaneous diagonalization attempt %d failed, retrying", attempt + 1)
        else:
            raise models.PreconditionError("Could not diagonalize the U(f) simultaneously")

        eigenvalues = np.einsum('fii->if', rotated)  # row i: pattern over f of basis vector i
        match_tol = settings_module.get("phase_match_tol")
        groups: List[List[int]] = []
        for i in range(d_a):
            for members in groups:
                if np.max(np.abs(eigenvalues[i] - eigenvalues[members[0]])) < match_tol:
                    members.append(i)
                    break
            else:
                groups.append([i])

        projectors, unitaries = [], []
        for members in groups:
            vectors = basis[:, members]
            projectors.append(vectors @ vectors.conj().T)
            unitaries.append(np.einsum('f,fpq->pq', eigenvalues[members[0]], gfu.wfam.matrices))
        return UnitaryModule.controlled_form(projectors, unitaries)

    # ========================================================================
    # DOUBLE FORM
    # ========================================================================

    @staticmethod
    def make_double(coefficients, rep_a: models.ProjectiveRep, rep_b: models.ProjectiveRep) -> models.DoubleUnitary:
        """Build a DoubleUnitary with gamma = mu * nu."""
        gamma = group_module.multiply_factor_systems(rep_a.factor_system, rep_b.factor_system)
        return models.DoubleUnitary(coefficients, rep_a, rep_b, gamma)

    @staticmethod
    def _check_double(du: models.DoubleUnitary) -> None:
        if not du.rep_a.group.same_as(du.rep_b.group):
            raise models.DomainValidationError("U(f) and V(f) represent different groups")
        if du.coefficients.size != du.group.order:
            raise models.ShapeError(f"{du.coefficients.size} coefficients for a group of order {du.group.order}")
        product = group_module.multiply_factor_systems(du.rep_a.factor_system, du.rep_b.factor_system)
        mismatch = group_module.factor_system_distance(product, du.gamma)
        if mismatch > settings_module.cocycle_tol:
            raise models.DomainValidationError(f"gamma differs from mu*nu by {mismatch:.3e}")

    @staticmethod
    def c_operator(du: models.DoubleUnitary) -> np.ndarray:
        """C = sum_h c(h) R_gamma(h); entry (g, f) is gamma(g, g^-1 f) c(g^-1 f)."""
        regular = representation_module.regular_projective_rep(du.group, du.gamma)
        return np.einsum('h,hgf->gf', du.coefficients, regular.matrices)

    @staticmethod
    def assemble_double(du: models.DoubleUnitary) -> Tuple[np.ndarray, np.ndarray]:
        """
        Assemble U = sum_f c(f) U(f) (x) V(f) and the operator C.

        Returns:
            (U, C)

        Raises:
            DomainValidationError: If gamma is not mu*nu or the groups differ
        """
        UnitaryModule._check_double(du)
        d_a, d_b = du.d_A, du.d_B
        assembled = np.einsum('f,fij,fpq->ipjq', du.coefficients, du.rep_a.matrices, du.rep_b.matrices)
        return assembled.reshape(d_a * d_b, d_a * d_b), UnitaryModule.c_operator(du)

    @staticmethod
    def double_as_group_form(du: models.DoubleUnitary) -> models.GroupFormUnitary:
        """The same unitary as a group form with W(f) = c(f) V(f)."""
        w = models.WFamily(du.coefficients[:, None, None] * du.rep_b.matrices)
        return UnitaryModule.assemble_group_unitary(du.rep_a, w)

    @staticmethod
    def controlled_v(du: models.DoubleUnitary) -> np.ndarray:
        """sum_f |f><f| (x) V(f)."""
        return block_diag(*du.rep_b.matrices)

    @staticmethod
    def factorized_M(du: models.DoubleUnitary) -> np.ndarray:
        """CtrlV^dagger (C (x) I) CtrlV, equal to M for W(f) = c(f) V(f)."""
        UnitaryModule._check_double(du)
        ctrl = UnitaryModule.controlled_v(du)
        c_op = UnitaryModule.c_operator(du)
        return ctrl.conj().T @ np.kron(c_op, np.eye(du.d_B)) @ ctrl

    @staticmethod
    def c_condition_residuals(du: models.DoubleUnitary) -> np.ndarray:
        """Per-g |sum_f conj(gamma(f,g)) conj(c(f)) c(fg) - delta(e,g)|."""
        table = du.group.table
        c = du.coefficients
        sums = np.einsum('fg,f,fg->g', du.gamma.mu.conj(), c.conj(), c[table])
        delta = np.zeros(du.group.order)
        delta[0] = 1.0
        return np.abs(sums - delta)

    @staticmethod
    def check_c_condition(du: models.DoubleUnitary) -> float:
        return float(np.max(UnitaryModule.c_condition_residuals(du)))

    @staticmethod
    def pauli_double_coefficients(alpha: float, beta: float, gamma: float, delta: float) -> np.ndarray:
        """
        Closed-form c(p,q) for two qubits, index p*2 + q:
        [e^ia + (-1)^p e^ib + (-1)^q e^ig + (-1)^(p+q) e^id] / 4.
        """
        c = np.zeros(4, dtype=complex)
        for p in range(2):
            for q in range(2):
                c[2 * p + q] = (
                    np.exp(1j * alpha) + (-1) ** p * np.exp(1j * beta)
                    + (-1) ** q * np.exp(1j * gamma) + (-1) ** (p + q) * np.exp(1j * delta)
                ) / 4
        return c

    # ========================================================================
    # RESOURCE BOUNDS
    # ========================================================================

    @staticmethod
    def schmidt_rank(u, d_a: int, d_b: int, rel_tol: Optional[float] = None) -> int:
        return algebra_module.schmidt_rank(u, d_a, d_b, rel_tol)

    @staticmethod
    def _output_entropy(u4: np.ndarray, x: np.ndarray, d_a: int, d_b: int) -> float:
        na, nb = d_a * d_a, d_b * d_b
        sigma = (x[:na] + 1j * x[na:2 * na]).reshape(d_a, d_a)
        tau = (x[2 * na:2 * na + nb] + 1j * x[2 * na + nb:]).reshape(d_b, d_b)
        sigma = sigma / np.linalg.norm(sigma)
        tau = tau / np.linalg.norm(tau)
        out = np.einsum('xyab,ai,bj->xiyj', u4, sigma, tau).reshape(na, nb)
        return algebra_module.entropy_of_matrix(out)

    @staticmethod
    def entangling_strength_estimate(u, d_a: int, d_b: int, restarts: Optional[int] = None,
                                     seed: Optional[int] = None) -> float:
        """
        Lower bound, in ebits, on the entanglement u can create from product states.

        Ancillas of dimension d_A and d_B are attached; the product input
        |sigma>_{A A'} (x) |tau>_{B B'} is refined with Powell's
        derivative-free method from `restarts` random starting points drawn
        from one seeded generator. The result is the running maximum, so it
        never decreases as restarts grow.

        Raises:
            DomainValidationError: If u is not unitary
        """
        restarts = settings_module.resolve("estimator_restarts", restarts)
        seed = settings_module.resolve("seed", seed)
        u = np.asarray(u, dtype=complex)
        residual = algebra_module.unitarity_residual(u)
        if residual > settings_module.unitarity_tol * 100:
            raise models.DomainValidationError(f"Entangling strength needs a unitary (residual {residual:.3e})")
        if u.shape != (d_a * d_b, d_a * d_b):
            raise models.ShapeError(f"Operator of shape {u.shape} does not act on dims ({d_a},{d_b})")

        u4 = u.reshape(d_a, d_b, d_a, d_b)
        size = 2 * (d_a * d_a + d_b * d_b)
        options = {
            "xtol": settings_module.get("estimator_xtol"),
            "ftol": 1e-12,
            "maxfev": settings_module.get("estimator_max_evaluations"),
        }
        rng = np.random.default_rng(seed)
        best = 0.0
        for attempt in range(int(restarts)):
            start = rng.normal(size=size)
            result = minimize(
                lambda x: -UnitaryModule._output_entropy(u4, x, d_a, d_b),
                start,
                method="Powell",
                options=options,
            )
            value = max(-float(result.fun), UnitaryModule._output_entropy(u4, start, d_a, d_b))
            best = max(best, value)
            logger.debug("Estimator restart %d: %.9f (best %.9f)", attempt, value, best)
        return best

    @staticmethod
    def resource_bound_check(u, d_a: int, d_b: int, resource_schmidt_rank: int, resource_entanglement: float,
                             restarts: Optional[int] = None, seed: Optional[int] = None) -> models.ResourceReport:
        """
        Compare a unitary's needs with a resource state.

        Passes iff the operator Schmidt rank is at most the resource's
        Schmidt rank and the estimated entangling strength is at most the
        resource's entanglement (+1e-6).
        """
        rank = algebra_module.schmidt_rank(u, d_a, d_b)
        strength = UnitaryModule.entangling_strength_estimate(u, d_a, d_b, restarts, seed)
        failures = []
        if rank > resource_schmidt_rank:
            failures.append(f"Schmidt rank {rank} exceeds resource Schmidt rank {resource_schmidt_rank}")
        if strength > resource_entanglement + 1e-6:
            failures.append(f"entangling strength {strength:.6f} exceeds resource entanglement {resource_entanglement:.6f}")
        return models.ResourceReport(
            passed=not failures,
            schmidt_rank=rank,
            resource_schmidt_rank=int(resource_schmidt_rank),
            entangling_strength=strength,
            resource_entanglement=float(resource_entanglement),
            failures=tuple(failures),
        )


# Singleton instance for easy import
unitary_module = UnitaryModule()

"""
Core Representation Module

Projective unitary representations U(f)U(g) = mu(f,g)U(fg): validation,
the projective regular representation, block-diagonal assembly from
irreducibles, span-dimension counting, the orthogonality check on irrep
sets, and the built-in irrep sets for the groups the protocols use.

This is CORE functionality - required for Loccsmith to work.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from .. import models
from .algebra_module import algebra_module
from .group_module import group_module, SYMMETRIC3_PERMUTATIONS
from .logging_module import get_logger
from .settings_module import settings_module

logger = get_logger('loccsmith.core.representation')

# Orthonormal basis of the complement of (1,1,1); rows span the standard rep of S3
_S3_STANDARD_BASIS = np.array([
    [1.0, -1.0, 0.0],
    [1.0, 1.0, -2.0],
]) / np.array([[np.sqrt(2.0)], [np.sqrt(6.0)]])


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


_REFLECTION = np.diag([1.0, -1.0])


class RepresentationModule:
    """
    Core module for projective representations and irrep sets.

    Irrep labels are 1-based and follow the order of the set.
    """

    # ========================================================================
    # CONSTRUCTION
    # ========================================================================

    @staticmethod
    def make_rep(factor_system: models.FactorSystem, matrices) -> models.ProjectiveRep:
        return models.ProjectiveRep(factor_system.group, factor_system, matrices)

    @staticmethod
    def derive_factor_system(group: models.FiniteGroup, matrices) -> models.FactorSystem:
        """
        Read mu(f,g) = tr(U(f)U(g)U(fg)^dagger)/d off a family of unitaries.
        """
        mats = np.asarray(matrices, dtype=complex)
        d = mats.shape[1]
        products = np.einsum('fab,gbc->fgac', mats, mats)
        targets = mats[group.table]
        mu = np.einsum('fgac,fgac->fg', products, targets.conj()) / d
        return models.FactorSystem(group, mu)

    @staticmethod
    def rep_from_matrices(group: models.FiniteGroup, matrices) -> models.ProjectiveRep:
        """Wrap matrices as a projective rep with their derived factor system."""
        return models.ProjectiveRep(group, RepresentationModule.derive_factor_system(group, matrices), matrices)

    @staticmethod
    def regular_projective_rep(group: models.FiniteGroup, factor_system: models.FactorSystem) -> models.ProjectiveRep:
        """
        R(f) = sum_g mu(g,f) |g><gf|.

        Args:
            group: Group whose order fixes the dimension
            factor_system: Valid factor system on that group

        Returns:
            |G|-dimensional projective rep with factor system mu

        Raises:
            DomainValidationError: If the factor system lives on another group
        """
        if not group.same_as(factor_system.group):
            raise models.DomainValidationError("Factor system does not belong to the group")
        n = group.order
        mats = np.zeros((n, n, n), dtype=complex)
        rows = np.arange(n)
        for f in range(n):
            mats[f, rows, group.table[:, f]] = factor_system.mu[:, f]
        return models.ProjectiveRep(group, factor_system, mats)

    @staticmethod
    def tensor_reps(r1: models.ProjectiveRep, r2: models.ProjectiveRep) -> models.ProjectiveRep:
        """U(f) (x) V(f), with factor system mu*nu."""
        gamma = group_module.multiply_factor_systems(r1.factor_system, r2.factor_system)
        mats = np.einsum('fab,fcd->facbd', r1.matrices, r2.matrices).reshape(
            r1.group.order, r1.dim * r2.dim, r1.dim * r2.dim
        )
        return models.ProjectiveRep(r1.group, gamma, mats)

    @staticmethod
    def rephase_rep(rep: models.ProjectiveRep, phases) -> models.ProjectiveRep:
        """phi(f) U(f), carrying the rephased factor system."""
        phi = np.asarray(phases, dtype=complex)
        return models.ProjectiveRep(
            rep.group,
            group_module.rephase_factor_system(rep.factor_system, phi),
            rep.matrices * phi[:, None, None],
        )

    @staticmethod
    def block_diagonal_rep(irrep_set: models.IrrepSet,
                           pattern: models.MultiplicityPattern) -> Tuple[models.ProjectiveRep, List[np.ndarray]]:
        """
        U(f) = (+)_lambda (+)_eta D^(lambda)(f), irrep lambda repeated n_lambda times.

        Args:
            irrep_set: Irreps sharing one factor system
            pattern: Multiplicity per irrep, in set order

        Returns:
            (rep, projectors) with one diagonal projector per (lambda, eta) block

        Raises:
            ShapeError: Pattern length differs from the number of irreps
            DomainValidationError: Negative or all-zero multiplicities
        """
        counts = tuple(int(c) for c in pattern.counts)
        if len(counts) != len(irrep_set.irreps):
            raise models.ShapeError(f"Pattern has {len(counts)} entries for {len(irrep_set.irreps)} irreps")
        if any(c < 0 for c in counts):
            raise models.DomainValidationError(f"Multiplicities must be nonnegative, got {counts}")
        if not any(counts):
            raise models.DomainValidationError("Multiplicity pattern is all zero")

        blocks = [irrep.matrices for irrep, c in zip(irrep_set.irreps, counts) for _ in range(c)]
        n = irrep_set.group.order
        mats = np.stack([block_diag(*(b[f] for b in blocks)) for f in range(n)])

        total = mats.shape[1]
        projectors = []
        offset = 0
        for b in blocks:
            d = b.shape[1]
            diag = np.zeros(total)
            diag[offset:offset + d] = 1.0
            projectors.append(np.diag(diag).astype(complex))
            offset += d
        return models.ProjectiveRep(irrep_set.group, irrep_set.factor_system, mats), projectors

    # ========================================================================
    # VALIDATION AND COUNTING
    # ========================================================================

    @staticmethod
    def validate_projective_rep(rep: models.ProjectiveRep, tol: Optional[float] = None) -> models.ValidationReport:
        """
        Check unitarity of every U(f), U(e) = I and U(f)U(g) = mu(f,g)U(fg).

        Returns:
            Report with the worst residual and the offending pair
        """
        tol = settings_module.resolve("unitarity_tol", tol)
        report = models.ValidationReport(subject="projective representation")
        group = rep.group
        if not group.same_as(rep.factor_system.group):
            report.add("group", (), 1.0, "factor system belongs to a different group")
            return report

        mats = rep.matrices
        d = rep.dim
        eye = np.eye(d)
        for f in range(group.order):
            residual = float(np.max(np.abs(mats[f].conj().T @ mats[f] - eye)))
            report.observe(residual, (f,))
            if residual > tol:
                report.add("unitarity", (f,), residual, f"U({group.labels[f]}) is not unitary")

        identity_residual = float(np.max(np.abs(mats[0] - eye)))
        if identity_residual > tol:
            report.add("identity", (0,), identity_residual, "U(e) differs from the identity")

        products = np.einsum('fab,gbc->fgac', mats, mats)
        expected = rep.factor_system.mu[:, :, None, None] * mats[group.table]
        residual = np.max(np.abs(products - expected), axis=(2, 3))
        worst = np.unravel_index(np.argmax(residual), residual.shape)
        report.observe(float(residual[worst]), worst)
        for f, g in np.argwhere(residual > tol)[:25]:
            report.add("multiplication", (f, g), residual[f, g],
                       f"U({group.labels[f]})U({group.labels[g]}) != mu U({group.labels[group.table[f, g]]})")
        return report

    @staticmethod
    def span_dimension(rep: models.ProjectiveRep, rel_tol: Optional[float] = None) -> int:
        """Number of linearly independent U(f)."""
        return algebra_module.rank_with_threshold(rep.matrices.reshape(rep.group.order, -1), rel_tol)

    @staticmethod
    def hat_rows(irrep_set: models.IrrepSet) -> np.ndarray:
        """Rows sqrt(d/N) D_jk(f) for K = (lambda, j, k), lambda outermost."""
        n = irrep_set.group.order
        rows = []
        for irrep in irrep_set.irreps:
            d = irrep.dim
            rows.append(np.sqrt(d / n) * irrep.matrices.transpose(1, 2, 0).reshape(d * d, n))
        return np.vstack(rows)

    @staticmethod
    def validate_irrep_set(irrep_set: models.IrrepSet, tol: Optional[float] = None) -> models.ValidationReport:
        """
        Check sum d^2 = |G|, each irrep, and the orthogonality relations.

        Orthogonality is checked as orthonormality of the rows of the hat
        Fourier matrix; a violation names the two row indices K, K'.
        """
        tol = settings_module.resolve("unitarity_tol", tol)
        report = models.ValidationReport(subject=f"irrep set {irrep_set.name}".strip())
        n = irrep_set.group.order

        total = sum(d * d for d in irrep_set.dims)
        if total != n:
            report.add("dimension-count", (total, n), float(abs(total - n)), f"sum of d^2 is {total}, group order is {n}")

        for irrep in irrep_set.irreps:
            if not irrep.rep.factor_system.group.same_as(irrep_set.group):
                report.add("group", (irrep.label,), 1.0, f"irrep {irrep.label} is on another group")
                continue
            distance = group_module.factor_system_distance(irrep.rep.factor_system, irrep_set.factor_system)
            if distance > tol:
                report.add("factor-system", (irrep.label,), distance, f"irrep {irrep.label} has a different factor system")
            sub = RepresentationModule.validate_projective_rep(irrep.rep, tol)
            for v in sub.violations:
                report.add(v.kind, (irrep.label,) + v.elements, v.residual, f"irrep {irrep.label}: {v.message}")

        rows = RepresentationModule.hat_rows(irrep_set)
        gram = np.abs(rows @ rows.conj().T - np.eye(rows.shape[0]))
        worst = np.unravel_index(np.argmax(gram), gram.shape)
        report.observe(float(gram[worst]), worst)
        for k1, k2 in np.argwhere(np.triu(gram) > tol)[:25]:
            report.add("orthogonality", (k1, k2), gram[k1, k2], f"rows {k1} and {k2} are not orthonormal")

        if not report.ok:
            logger.warning("Irrep set %s failed validation: %s", irrep_set.name, report.kinds())
        return report

    # ========================================================================
    # BUILT-IN IRREP SETS
    # ========================================================================

    @staticmethod
    def _irrep_set(group, factor_system, matrix_list, name) -> models.IrrepSet:
        irreps = tuple(
            models.Irrep(label=i + 1, rep=models.ProjectiveRep(group, factor_system, mats))
            for i, mats in enumerate(matrix_list)
        )
        return models.IrrepSet(group, factor_system, irreps, name=name)

    @staticmethod
    def cyclic_irreps(n: int) -> models.IrrepSet:
        """Characters a -> exp(2 pi i k a / n), k = 0..n-1."""
        group = group_module.cyclic(n)
        a = np.arange(n)
        mats = [np.exp(2j * np.pi * k * a / n).reshape(n, 1, 1) for k in range(n)]
        return RepresentationModule._irrep_set(group, group_module.trivial_factor_system(group), mats, f"Z{n}")

    @staticmethod
    def direct_product_irreps(s1: models.IrrepSet, s2: models.IrrepSet) -> models.IrrepSet:
        """Tensor products D1 (x) D2, first factor's label outermost."""
        group = group_module.direct_product(s1.group, s2.group)
        fs = group_module.direct_product_factor_system(group, s1.factor_system, s2.factor_system)
        mats = []
        for i1 in s1.irreps:
            for i2 in s2.irreps:
                d = i1.dim * i2.dim
                kron = np.einsum('aij,bkl->abikjl', i1.matrices, i2.matrices)
                mats.append(kron.reshape(group.order, d, d))
        return RepresentationModule._irrep_set(group, fs, mats, f"{s1.name}x{s2.name}")

    @staticmethod
    def symmetric3_irreps() -> models.IrrepSet:
        """Trivial, sign and the real orthogonal 2-dim standard rep of S3."""
        group = group_module.symmetric3()
        trivial, sign, standard = [], [], []
        for perm in SYMMETRIC3_PERMUTATIONS:
            permutation = np.zeros((3, 3))
            permutation[list(perm), [0, 1, 2]] = 1.0
            trivial.append([[1.0]])
            sign.append([[np.linalg.det(permutation)]])
            standard.append(_S3_STANDARD_BASIS @ permutation @ _S3_STANDARD_BASIS.T)
        mats = [np.array(trivial), np.round(np.array(sign)), np.array(standard)]
        return RepresentationModule._irrep_set(group, group_module.trivial_factor_system(group), mats, "S3")

    @staticmethod
    def dihedral_irreps(n: int) -> models.IrrepSet:
        """
        Ordinary irreps of D_n: the 1-dim characters, then the 2-dim
        rotation-reflection reps r^a s^b -> Rot(2 pi k a / n) S^b.
        """
        group = group_module.dihedral(n)
        a = np.arange(2 * n) % n
        b = np.arange(2 * n) // n
        mats = []
        rotation_signs = (1, -1) if n % 2 == 0 else (1,)
        for eps_r in rotation_signs:
            for eps_s in (1, -1):
                mats.append((float(eps_r) ** a * float(eps_s) ** b).astype(complex).reshape(2 * n, 1, 1))
        for k in range(1, (n - 1) // 2 + 1):
            mats.append(np.stack([
                _rotation(2 * np.pi * k * a[f] / n) @ np.linalg.matrix_power(_REFLECTION, b[f])
                for f in range(2 * n)
            ]))
        return RepresentationModule._irrep_set(group, group_module.trivial_factor_system(group), mats, f"D{n}")

    @staticmethod
    def dihedral4_projective_irreps() -> models.IrrepSet:
        """
        The two 2-dim projective irreps of D4 with a nontrivial +-1 factor system.

        r^a s^b -> Rot(k pi a / 4) S^b for k = 1, 3. Since Rot(k pi) = -I for
        odd k, the product picks up (-1)^m whenever the rotation exponent
        wraps m times past 4; both irreps share that factor system and are
        told apart by tr U(r) = +-sqrt(2).
        """
        group = group_module.dihedral(4)
        a = np.arange(8) % 4
        b = np.arange(8) // 4
        # raw exponent a + (-1)^b c before reduction mod 4
        raw = a[:, None] + np.where(b[:, None] == 0, 1, -1) * a[None, :]
        fs = group_module.factor_system_from_exponents(group, np.floor_divide(raw, 4), 2)
        mats = [
            np.stack([_rotation(k * np.pi * a[f] / 4) @ np.linalg.matrix_power(_REFLECTION, b[f]) for f in range(8)])
            for k in (1, 3)
        ]
        return RepresentationModule._irrep_set(group, fs, mats, "D4-projective")

    @staticmethod
    def xz_matrices(n: int) -> np.ndarray:
        """X^p Z^q for (p, q) in lexicographic order, X|k> = |k-1>, Z|k> = omega^k |k>."""
        omega = np.exp(2j * np.pi / n)
        shift = np.roll(np.eye(n), -1, axis=0)  # column k has its 1 in row k-1
        clock = np.diag(omega ** np.arange(n))
        return np.stack([
            np.linalg.matrix_power(shift, p) @ np.linalg.matrix_power(clock, q)
            for p in range(n) for q in range(n)
        ])

    @staticmethod
    def xz_rep(n: int) -> models.ProjectiveRep:
        group, fs = group_module.xz_factor_system(n)
        return models.ProjectiveRep(group, fs, RepresentationModule.xz_matrices(n))

    @staticmethod
    def xz_irreps(n: int) -> models.IrrepSet:
        """The X^p Z^q family is the single irrep for its factor system."""
        rep = RepresentationModule.xz_rep(n)
        return models.IrrepSet(rep.group, rep.factor_system, (models.Irrep(1, rep),), name=f"XZ{n}")


# Singleton instance for easy import
representation_module = RepresentationModule()

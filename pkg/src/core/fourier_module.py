"""
Core Fourier Module

Group Fourier transform between families of operators indexed by group
elements and blocks indexed by irreps.

    forward   Q^(l) = sum_f D^(l)(f) (x) W(f)
    inverse   W_pq(f) = sum_l (d_l/N) sum_jk conj(D^(l)_jk(f)) Q^(l)_{jp;kq}

The scalar version maps R^(l) blocks to coefficients c(f). The B-block
view B^(l j k)_pq = Q^(l)_{jp;kq} exposes the operator Schmidt rank of the
assembled unitary as a count of linearly independent blocks.

This is CORE functionality - required for Loccsmith to work.
"""

from typing import Dict, Mapping, Optional, Sequence

import numpy as np

from .. import models
from .algebra_module import algebra_module
from .logging_module import get_logger
from .representation_module import representation_module
from .settings_module import settings_module

logger = get_logger('loccsmith.core.fourier')


class FourierModule:
    """
    Core module for the group Fourier transform.
    """

    @staticmethod
    def hat_fourier_matrix(irrep_set: models.IrrepSet) -> np.ndarray:
        """
        Unitary |G| x |G| matrix with entries sqrt(d/N) D_jk(f).

        Args:
            irrep_set: Complete set of irreps

        Returns:
            Matrix with rows K = (lambda, j, k), lambda outermost, columns f

        Raises:
            DomainValidationError: If the irrep set fails validation
        """
        report = representation_module.validate_irrep_set(irrep_set)
        if not report.ok:
            raise models.DomainValidationError(report.summary())
        return representation_module.hat_rows(irrep_set)

    # ========================================================================
    # OPERATOR FAMILIES
    # ========================================================================

    @staticmethod
    def synthesize_W(q: models.QBlockFamily) -> models.WFamily:
        """
        Inverse transform of Q blocks into the family W(f).

        Every irrep needs a block; pass identity for irreps the A-side
        representation leaves out.
        """
        irrep_set = q.irrep_set
        if len(q.blocks) != len(irrep_set.irreps):
            raise models.ShapeError(f"{len(q.blocks)} Q blocks for {len(irrep_set.irreps)} irreps")
        n = irrep_set.group.order
        d_b = q.d_B
        w = np.zeros((n, d_b, d_b), dtype=complex)
        for irrep, block in zip(irrep_set.irreps, q.blocks):
            d = irrep.dim
            block = np.asarray(block, dtype=complex)
            if block.shape != (d * d_b, d * d_b):
                raise models.ShapeError(f"Q block for irrep {irrep.label} must be {d * d_b}-square, got {block.shape}")
            q4 = block.reshape(d, d_b, d, d_b)
            w += (d / n) * np.einsum('fjk,jpkq->fpq', irrep.matrices.conj(), q4)
        return models.WFamily(w)

    @staticmethod
    def extract_Q(w: models.WFamily, irrep_set: models.IrrepSet) -> models.QBlockFamily:
        """Forward transform Q^(l) = sum_f D^(l)(f) (x) W(f)."""
        if len(w) != irrep_set.group.order:
            raise models.ShapeError(f"W family has {len(w)} members for a group of order {irrep_set.group.order}")
        d_b = w.d_B
        blocks = []
        for irrep in irrep_set.irreps:
            d = irrep.dim
            q4 = np.einsum('fjk,fpq->jpkq', irrep.matrices, w.matrices)
            blocks.append(q4.reshape(d * d_b, d * d_b))
        return models.QBlockFamily(irrep_set, tuple(blocks), d_b)

    @staticmethod
    def validate_q_blocks(q: models.QBlockFamily, tol: Optional[float] = None) -> models.ValidationReport:
        tol = settings_module.resolve("unitarity_tol", tol)
        report = models.ValidationReport(subject="Q blocks")
        for irrep, block in zip(q.irrep_set.irreps, q.blocks):
            residual = algebra_module.unitarity_residual(block)
            report.observe(residual, (irrep.label,))
            if residual > tol:
                report.add("unitarity", (irrep.label,), residual, f"Q block {irrep.label} is not unitary")
        return report

    # ========================================================================
    # SCALAR COEFFICIENTS
    # ========================================================================

    @staticmethod
    def synthesize_c(r: models.RBlockFamily) -> np.ndarray:
        """
        Coefficients c(f) = sum_l (d_l/N) sum_jk conj(D^(l)_jk(f)) R^(l)_jk.
        """
        irrep_set = r.irrep_set
        if len(r.blocks) != len(irrep_set.irreps):
            raise models.ShapeError(f"{len(r.blocks)} R blocks for {len(irrep_set.irreps)} irreps")
        n = irrep_set.group.order
        c = np.zeros(n, dtype=complex)
        for irrep, block in zip(irrep_set.irreps, r.blocks):
            block = np.asarray(block, dtype=complex).reshape(irrep.dim, irrep.dim)
            c += (irrep.dim / n) * np.einsum('fjk,jk->f', irrep.matrices.conj(), block)
        return c

    @staticmethod
    def extract_R(c, irrep_set: models.IrrepSet) -> models.RBlockFamily:
        """R^(l) = sum_f c(f) D^(l)(f)."""
        coefficients = np.asarray(c, dtype=complex).reshape(-1)
        if coefficients.size != irrep_set.group.order:
            raise models.ShapeError(f"{coefficients.size} coefficients for a group of order {irrep_set.group.order}")
        blocks = tuple(np.einsum('f,fjk->jk', coefficients, irrep.matrices) for irrep in irrep_set.irreps)
        return models.RBlockFamily(irrep_set, blocks)

    @staticmethod
    def validate_r_blocks(r: models.RBlockFamily, tol: Optional[float] = None) -> models.ValidationReport:
        tol = settings_module.resolve("unitarity_tol", tol)
        report = models.ValidationReport(subject="R blocks")
        for irrep, block in zip(r.irrep_set.irreps, r.blocks):
            residual = algebra_module.unitarity_residual(block)
            report.observe(residual, (irrep.label,))
            if residual > tol:
                report.add("unitarity", (irrep.label,), residual, f"R block {irrep.label} is not unitary")
        return report

    # ========================================================================
    # B BLOCKS
    # ========================================================================

    @staticmethod
    def extract_blocks_B(w: models.WFamily, irrep_set: models.IrrepSet) -> models.BBlockTable:
        """B^(l j k)_pq = Q^(l)_{jp;kq}, keyed (label, j, k) with 0-based j, k."""
        q = FourierModule.extract_Q(w, irrep_set)
        d_b = q.d_B
        blocks: Dict[models.BlockKey, np.ndarray] = {}
        for irrep, block in zip(irrep_set.irreps, q.blocks):
            q4 = block.reshape(irrep.dim, d_b, irrep.dim, d_b)
            for j in range(irrep.dim):
                for k in range(irrep.dim):
                    blocks[(irrep.label, j, k)] = q4[j, :, k, :].copy()
        return models.BBlockTable(irrep_set, blocks)

    @staticmethod
    def q_from_blocks(blocks: Mapping[models.BlockKey, np.ndarray], irrep_set: models.IrrepSet,
                      d_b: int) -> models.QBlockFamily:
        """
        Pack B blocks into Q^(l). Irreps with no blocks get the identity;
        missing (j, k) entries of a listed irrep are zero.
        """
        known = set(irrep_set.labels)
        for key in blocks:
            if key[0] not in known:
                raise KeyError(f"Block {key} refers to an unknown irrep")
        q_blocks = []
        for irrep in irrep_set.irreps:
            d = irrep.dim
            mine = {key: b for key, b in blocks.items() if key[0] == irrep.label}
            if not mine:
                q_blocks.append(np.eye(d * d_b, dtype=complex))
                continue
            q4 = np.zeros((d, d_b, d, d_b), dtype=complex)
            for (_, j, k), b in mine.items():
                b = np.asarray(b, dtype=complex)
                if b.shape != (d_b, d_b) or not (0 <= j < d and 0 <= k < d):
                    raise models.ShapeError(f"Block {(irrep.label, j, k)} does not fit irrep of dim {d} with d_B={d_b}")
                q4[j, :, k, :] = b
            q_blocks.append(q4.reshape(d * d_b, d * d_b))
        return models.QBlockFamily(irrep_set, tuple(q_blocks), d_b)

    @staticmethod
    def independent_block_count(table: models.BBlockTable, labels: Optional[Sequence[int]] = None,
                                rel_tol: Optional[float] = None) -> int:
        """Rank of the flattened B blocks of the given irreps (all by default)."""
        keys = table.keys_for(labels)
        if not keys:
            return 0
        stacked = np.stack([table.blocks[key].reshape(-1) for key in keys])
        return algebra_module.rank_with_threshold(stacked, rel_tol)


# Singleton instance for easy import
fourier_module = FourierModule()

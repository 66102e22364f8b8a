"""
Core Algebra Module

Dense complex-matrix kernel used by every other module: tensor products,
unitarity residuals, thresholded rank, the operator Schmidt decomposition
and the entanglement entropy of pure bipartite states.

All matrices are numpy arrays of dtype complex. Bipartite operators on
H_A (x) H_B use row-major indices with the A index outermost, so entry
((i,p),(j,q)) sits at row i*d_B + p, column j*d_B + q.

This is CORE functionality - required for Loccsmith to work.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from .. import models
from .logging_module import get_logger
from .settings_module import settings_module

logger = get_logger('loccsmith.core.algebra')


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise models.ShapeError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise models.DomainValidationError(f"{name} has non-finite entries")
    return arr


class AlgebraModule:
    """
    Core module for the small dense linear algebra the protocols need.

    Every method is pure; inputs are never modified.
    """

    # ========================================================================
    # PRODUCTS AND RESIDUALS
    # ========================================================================

    @staticmethod
    def tensor_product(a, b) -> np.ndarray:
        """
        Kronecker product a (x) b.

        Args:
            a: Matrix on the first factor
            b: Matrix on the second factor

        Returns:
            Matrix with entry ((i,p),(j,q)) = a[i,j] * b[p,q]
        """
        return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))

    @staticmethod
    def unitarity_residual(m) -> float:
        """
        Max-abs entry of m^dagger m - I.

        Raises:
            ShapeError: If m is not square
        """
        arr = _as_matrix(m)
        if arr.shape[0] != arr.shape[1]:
            raise models.ShapeError(f"Unitarity needs a square matrix, got {arr.shape}")
        return float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))))

    @staticmethod
    def is_unitary(m, tol: Optional[float] = None) -> bool:
        tol = settings_module.resolve("unitarity_tol", tol)
        return AlgebraModule.unitarity_residual(m) < tol

    @staticmethod
    def phase_aligned_distance(a, b) -> Tuple[float, complex]:
        """
        Distance between two matrices up to a global phase.

        The phase is taken as arg tr(b^dagger a), which minimizes the
        Frobenius distance; the returned distance is the max-abs entry of
        a - phase * b.

        Returns:
            (distance, phase) with |phase| = 1
        """
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if a.shape != b.shape:
            raise models.ShapeError(f"Cannot compare shapes {a.shape} and {b.shape}")
        overlap = np.vdot(b, a)
        phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0 + 0j
        return float(np.max(np.abs(a - phase * b))), complex(phase)

    @staticmethod
    def equal_up_to_phase(a, b, tol: Optional[float] = None) -> bool:
        tol = settings_module.resolve("residual_tol", tol)
        return AlgebraModule.phase_aligned_distance(a, b)[0] < tol

    # ========================================================================
    # RANK AND SCHMIDT DECOMPOSITION
    # ========================================================================

    @staticmethod
    def singular_values(m) -> np.ndarray:
        return np.linalg.svd(_as_matrix(m), compute_uv=False)

    @staticmethod
    def rank_with_threshold(m, rel_tol: Optional[float] = None) -> int:
        """
        Count singular values above rel_tol times the largest one.

        Args:
            m: Any matrix
            rel_tol: Relative threshold in (0, 1); defaults to rank_rel_tol

        Returns:
            Numerical rank, 0 for the zero matrix
        """
        rel_tol = settings_module.resolve("rank_rel_tol", rel_tol)
        if not 0 < rel_tol < 1:
            raise ValueError(f"relTol must lie in (0, 1), got {rel_tol}")
        values = AlgebraModule.singular_values(m)
        if values.size == 0 or values[0] == 0:
            return 0
        return int(np.count_nonzero(values > rel_tol * values[0]))

    @staticmethod
    def realign(u, d_a: int, d_b: int) -> np.ndarray:
        """
        Reshape a bipartite operator into its d_A^2 x d_B^2 coefficient matrix.

        Entry u[(i,p),(j,q)] moves to row (i,j), column (p,q).

        Raises:
            ShapeError: If u is not (d_A*d_B)-square
        """
        arr = _as_matrix(u, "u")
        size = d_a * d_b
        if arr.shape != (size, size):
            raise models.ShapeError(f"Expected a {size}x{size} operator for dims ({d_a},{d_b}), got {arr.shape}")
        return arr.reshape(d_a, d_b, d_a, d_b).transpose(0, 2, 1, 3).reshape(d_a * d_a, d_b * d_b)

    @staticmethod
    def operator_schmidt(u, d_a: int, d_b: int, rel_tol: Optional[float] = None) -> models.SchmidtDecomposition:
        """
        Operator Schmidt decomposition u = sum_k s_k A_k (x) B_k.

        The A_k (and B_k) are orthonormal under the trace inner product.
        Terms with s_k below rel_tol times the largest are dropped, so the
        number of terms is the operator Schmidt rank.

        Args:
            u: (d_A*d_B)-square operator
            d_a: Dimension of the A factor
            d_b: Dimension of the B factor
            rel_tol: Rank threshold; defaults to rank_rel_tol

        Returns:
            SchmidtDecomposition with descending coefficients

        Raises:
            ShapeError: On dimension mismatch
        """
        rel_tol = settings_module.resolve("rank_rel_tol", rel_tol)
        coefficients = AlgebraModule.realign(u, d_a, d_b)
        left, values, right = np.linalg.svd(coefficients)
        keep = int(np.count_nonzero(values > rel_tol * values[0])) if values[0] > 0 else 0
        return models.SchmidtDecomposition(
            coefficients=values[:keep].copy(),
            left=tuple(left[:, k].reshape(d_a, d_a) for k in range(keep)),
            right=tuple(right[k].reshape(d_b, d_b) for k in range(keep)),
        )

    @staticmethod
    def schmidt_rank(u, d_a: int, d_b: int, rel_tol: Optional[float] = None) -> int:
        return AlgebraModule.rank_with_threshold(AlgebraModule.realign(u, d_a, d_b), rel_tol)

    # ========================================================================
    # STATES
    # ========================================================================

    @staticmethod
    def basis_state(dims: Sequence[int], index: int) -> models.StateVector:
        amplitudes = np.zeros(int(np.prod(dims)), dtype=complex)
        amplitudes[index] = 1.0
        return models.StateVector(tuple(dims), amplitudes)

    @staticmethod
    def random_state(dims: Sequence[int], rng: np.random.Generator) -> models.StateVector:
        size = int(np.prod(dims))
        raw = rng.normal(size=size) + 1j * rng.normal(size=size)
        return models.StateVector(tuple(dims), raw).normalized()

    @staticmethod
    def entanglement_entropy(state: models.StateVector, cut_after: int) -> float:
        """
        Entropy in bits of the reduced state across a bipartition.

        Args:
            state: Normalized pure state
            cut_after: Number of leading subsystems on the left of the cut

        Returns:
            -sum lambda log2 lambda over squared Schmidt coefficients

        Raises:
            ValueError: If the cut leaves one side empty
            DomainValidationError: If the state is not normalized
        """
        if not 0 < cut_after < len(state.dims):
            raise ValueError(f"Cut after {cut_after} does not split dims {state.dims}")
        norm_tol = settings_module.get("norm_tol")
        if abs(state.norm - 1.0) > norm_tol:
            raise models.DomainValidationError(f"State norm {state.norm:.12f} deviates from 1")
        left = int(np.prod(state.dims[:cut_after]))
        return AlgebraModule.entropy_of_matrix(state.amplitudes.reshape(left, -1))

    @staticmethod
    def entropy_of_matrix(psi: np.ndarray) -> float:
        """Entropy of a bipartite pure state given as its coefficient matrix."""
        weights = np.linalg.svd(psi, compute_uv=False) ** 2
        weights = weights[weights > 1e-300]
        weights = weights / weights.sum()
        return float(max(0.0, -np.sum(weights * np.log2(weights))))

    # ========================================================================
    # RANDOM UNITARIES AND FORMATTING
    # ========================================================================

    @staticmethod
    def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
        """Haar-random unitary of the given dimension."""
        if dim == 1:
            return np.array([[np.exp(2j * np.pi * rng.random())]])
        return unitary_group.rvs(dim, random_state=rng)

    @staticmethod
    def format_complex(z: complex, digits: int = 12) -> str:
        """Render z as 'a+bi' with the given significant digits."""
        z = complex(z)
        re = 0.0 if abs(z.real) < 10 ** (-digits) else z.real
        im = 0.0 if abs(z.imag) < 10 ** (-digits) else z.imag
        sign = "-" if im < 0 else "+"
        return f"{re:.{digits}g}{sign}{abs(im):.{digits}g}i"

    @staticmethod
    def format_matrix(m, digits: int = 12) -> str:
        arr = np.atleast_2d(np.asarray(m, dtype=complex))
        return "\n".join(
            "  ".join(AlgebraModule.format_complex(z, digits) for z in row) for row in arr
        )


# Singleton instance for easy import
algebra_module = AlgebraModule()

"""
Pytest Configuration and Shared Fixtures

Fixtures defined here are available to all tests.
"""

import logging

import numpy as np
import pytest

from src import models
from src.core import (
    algebra_module,
    catalog_module,
    fourier_module,
    representation_module,
    settings_module,
    unitary_module,
)


# ============================================================================
# SETTINGS
# ============================================================================

@pytest.fixture(autouse=True)
def fresh_settings():
    """
    Undo runtime setting overrides after every test.

    The CLI and some tests change tolerances on the shared singleton.
    """
    yield
    settings_module.reset()


@pytest.fixture(autouse=True)
def restore_root_logging():
    """main() reconfigures the root logger; put the handlers back afterwards."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


# ============================================================================
# RANDOMNESS
# ============================================================================

@pytest.fixture
def rng():
    """Seeded generator; every test sees the same stream."""
    return np.random.default_rng(20240611)


@pytest.fixture
def random_unitary(rng):
    """Factory for Haar-random unitaries drawn from the seeded generator."""
    def make(dim: int) -> np.ndarray:
        return algebra_module.random_unitary(dim, rng)
    return make


def random_q_family(irrep_set: models.IrrepSet, d_b: int, rng: np.random.Generator) -> models.QBlockFamily:
    """One Haar-random unitary Q block per irrep."""
    blocks = tuple(algebra_module.random_unitary(d * d_b, rng) for d in irrep_set.dims)
    return models.QBlockFamily(irrep_set, blocks, d_b)


def group_form_from_q(irrep_set: models.IrrepSet, pattern, q: models.QBlockFamily) -> models.GroupFormUnitary:
    """Block-diagonal A-side rep with the pattern, W synthesized from Q."""
    rep, _ = representation_module.block_diagonal_rep(irrep_set, models.MultiplicityPattern(tuple(pattern)))
    return unitary_module.assemble_group_unitary(rep, fourier_module.synthesize_W(q))


# ============================================================================
# IRREP SETS
# ============================================================================

@pytest.fixture
def z2_irreps():
    return representation_module.cyclic_irreps(2)


@pytest.fixture
def z3_irreps():
    return representation_module.cyclic_irreps(3)


@pytest.fixture
def z4_irreps():
    return representation_module.cyclic_irreps(4)


@pytest.fixture
def xz2_irreps():
    return representation_module.xz_irreps(2)


@pytest.fixture
def s3_irreps():
    return representation_module.symmetric3_irreps()


@pytest.fixture
def d4_irreps():
    return representation_module.dihedral_irreps(4)


@pytest.fixture
def d4_projective_irreps():
    return representation_module.dihedral4_projective_irreps()


def builtin_irrep_sets():
    """Every built-in irrep set, for parametrized sweeps."""
    return [
        representation_module.cyclic_irreps(2),
        representation_module.cyclic_irreps(3),
        representation_module.cyclic_irreps(4),
        representation_module.direct_product_irreps(
            representation_module.cyclic_irreps(2), representation_module.cyclic_irreps(2)
        ),
        representation_module.xz_irreps(2),
        representation_module.xz_irreps(3),
        representation_module.symmetric3_irreps(),
        representation_module.dihedral_irreps(3),
        representation_module.dihedral_irreps(4),
        representation_module.dihedral4_projective_irreps(),
    ]


# ============================================================================
# CATALOG
# ============================================================================

@pytest.fixture
def cnot():
    return catalog_module.build("cnot-controlled")


@pytest.fixture
def s3_qutrit_form():
    return catalog_module.build("eq60")


@pytest.fixture
def coefficient_row1():
    return catalog_module.lookup("s3-table1-row1")


# ============================================================================
# COMMON MATRICES
# ============================================================================

@pytest.fixture
def cnot_matrix():
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@pytest.fixture
def swap_matrix():
    return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

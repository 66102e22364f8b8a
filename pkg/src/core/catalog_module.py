"""
Core Catalog Module

Named, ready-to-run instances of the worked examples: the X/Z family,
two-qubit double forms, the S3 and D4 block constructions, the four S3
coefficient rows and a few controlled gates. Each entry records where it
comes from and the properties it must satisfy (group order and operator
Schmidt rank per dimension).

Dyads |a><b| are written with 1-based kets, stored at indices a-1, b-1.
Block keys "l j k" are 1-based as well and become (l, j-1, k-1).

This is CORE functionality - required for Loccsmith to work.
"""

from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from .. import models
from .algebra_module import algebra_module
from .fourier_module import fourier_module
from .logging_module import get_logger
from .representation_module import representation_module
from .settings_module import settings_module
from .unitary_module import unitary_module

logger = get_logger('loccsmith.core.catalog')


# ============================================================================
# LITERAL DATA
# ============================================================================

_R3 = np.sqrt(3.0)

# Coefficients c(f) over S3 in the order e, (123), (132), (12), (23), (13)
COEFFICIENT_ROWS: Dict[int, np.ndarray] = {
    1: np.array([2 / 3, -1 / 3, -1 / 3, -1 / 3, -1 / 3, -1 / 3], dtype=complex),
    2: np.array([2 / 3, 1 / 6, 1 / 6, -1j / _R3, 1j / (2 * _R3), 1j / (2 * _R3)], dtype=complex),
    3: np.array([1 / 3, 1 / 3, 1 / 3, 1 / _R3, -1 / _R3, 0], dtype=complex),
    4: np.array([1 / 6, -1 / 3, -1 / 3, -1j * _R3 / 2, 0, 0], dtype=complex),
}

# Expected operator Schmidt rank at d = 3 and d = 4
COEFFICIENT_RANKS: Dict[int, Dict[int, int]] = {
    1: {3: 5, 4: 6},
    2: {3: 5, 4: 6},
    3: {3: 5, 4: 5},
    4: {3: 4, 4: 4},
}

PAULI_DOUBLE_PHASES = (0.3, 1.1, -0.7, 2.0)

# One-dimensional R blocks, then the 2x2 block as (phase, rotation angle)
D4_DOUBLE_PHASES = (0.4, 1.3, -0.9, 2.2)
D4_DOUBLE_BLOCK = (0.5, 0.7)


def _kb(d: int, a: int, b: int) -> np.ndarray:
    """|a><b| in dimension d, kets 1-based."""
    m = np.zeros((d, d), dtype=complex)
    m[a - 1, b - 1] = 1.0
    return m


def _keyed(blocks: Mapping[str, np.ndarray]) -> Dict[models.BlockKey, np.ndarray]:
    return {(int(key[0]), int(key[1]) - 1, int(key[2]) - 1): block for key, block in blocks.items()}


def s3_qutrit_blocks() -> Dict[models.BlockKey, np.ndarray]:
    d = 3
    return _keyed({
        "211": np.eye(d, dtype=complex),
        "311": _kb(d, 1, 1) + _kb(d, 2, 2),
        "312": _kb(d, 3, 2),
        "321": _kb(d, 2, 3),
        "322": _kb(d, 1, 1) + _kb(d, 3, 3),
    })


def s3_ququart_blocks() -> Dict[models.BlockKey, np.ndarray]:
    d = 4
    return _keyed({
        "111": np.eye(d, dtype=complex),
        "211": np.diag([1, 1, -1, -1]).astype(complex),
        "311": _kb(d, 1, 1) - _kb(d, 2, 2),
        "312": _kb(d, 3, 1) + _kb(d, 4, 2),
        "321": _kb(d, 1, 3) + _kb(d, 2, 4),
        "322": _kb(d, 3, 3) - _kb(d, 4, 4),
    })


def d4_projective_qutrit_blocks() -> Dict[models.BlockKey, np.ndarray]:
    d = 3
    return _keyed({
        "111": _kb(d, 1, 1) + _kb(d, 2, 2),
        "112": _kb(d, 3, 1),
        "121": _kb(d, 1, 3),
        "122": _kb(d, 2, 2) + _kb(d, 3, 3),
        "211": _kb(d, 1, 1) + _kb(d, 3, 2),
        "212": _kb(d, 2, 1),
        "221": _kb(d, 2, 3),
        "222": _kb(d, 1, 3) + _kb(d, 3, 2),
    })


def d4_projective_ququart_blocks() -> Dict[models.BlockKey, np.ndarray]:
    d = 4
    return _keyed({
        "111": _kb(d, 1, 1) + _kb(d, 2, 2),
        "112": _kb(d, 3, 1) + _kb(d, 4, 2),
        "121": _kb(d, 1, 3) + _kb(d, 2, 4),
        "122": _kb(d, 3, 3) - _kb(d, 4, 4),
        "211": _kb(d, 1, 1) + _kb(d, 3, 3),
        "212": _kb(d, 2, 1) + _kb(d, 4, 3),
        "221": _kb(d, 1, 2) + _kb(d, 3, 4),
        "222": _kb(d, 2, 2) + _kb(d, 4, 4),
    })


# ============================================================================
# BUILDERS
# ============================================================================

def _block_group_form(irrep_set: models.IrrepSet, pattern: Sequence[int],
                      blocks: Mapping[models.BlockKey, np.ndarray], d_b: int) -> models.GroupFormUnitary:
    rep, _ = representation_module.block_diagonal_rep(irrep_set, models.MultiplicityPattern(tuple(pattern)))
    q = fourier_module.q_from_blocks(blocks, irrep_set, d_b)
    return unitary_module.assemble_group_unitary(rep, fourier_module.synthesize_W(q))


def _swap(n: int) -> np.ndarray:
    return np.eye(n * n).reshape(n, n, n, n).transpose(0, 1, 3, 2).reshape(n * n, n * n).astype(complex)


def build_xz(n: int, d_a: Optional[int]) -> models.GroupFormUnitary:
    """X^p Z^q on d_A = m*n with W(f) = U(f)^dagger / n; SWAP on each n x n copy."""
    d_a = d_a or n
    if d_a % n:
        raise ValueError(f"d_A = {d_a} is not a multiple of n = {n}")
    irreps = representation_module.xz_irreps(n)
    rep, _ = representation_module.block_diagonal_rep(irreps, models.MultiplicityPattern((d_a // n,)))
    w = fourier_module.synthesize_W(models.QBlockFamily(irreps, (_swap(n),), n))
    return unitary_module.assemble_group_unitary(rep, w)


def build_pauli_double(phases: Sequence[float] = PAULI_DOUBLE_PHASES) -> models.DoubleUnitary:
    """Two-qubit double form from the four phases (alpha, beta, gamma, delta)."""
    phases = tuple(float(p) for p in phases)
    if len(phases) != 4:
        raise ValueError(f"pauli-double takes 4 phases, got {len(phases)}")
    rep = representation_module.xz_rep(2)
    return unitary_module.make_double(unitary_module.pauli_double_coefficients(*phases), rep, rep)


def build_coefficient_row(row: int, dim: Optional[int]) -> models.DoubleUnitary:
    """Row of the S3 coefficient table on d = 3 (irreps 2, 3) or d = 4 (all irreps)."""
    dim = dim or 3
    patterns = {3: (0, 1, 1), 4: (1, 1, 1)}
    if dim not in patterns:
        raise ValueError(f"S3 double forms exist for d = 3 or 4, not {dim}")
    rep, _ = representation_module.block_diagonal_rep(
        representation_module.symmetric3_irreps(), models.MultiplicityPattern(patterns[dim])
    )
    return unitary_module.make_double(COEFFICIENT_ROWS[row], rep, rep)


def build_d4_projective(d_b: Optional[int]) -> models.GroupFormUnitary:
    d_b = d_b or 4
    blocks = {3: d4_projective_qutrit_blocks, 4: d4_projective_ququart_blocks}
    if d_b not in blocks:
        raise ValueError(f"D4 projective block sets exist for d_B = 3 or 4, not {d_b}")
    return _block_group_form(representation_module.dihedral4_projective_irreps(), (1, 1), blocks[d_b](), d_b)


def build_d4_double(_: Optional[int] = None) -> models.DoubleUnitary:
    """
    Double form on the 4-dim projective rep of D4 used on both sides.

    The factor system is +-1 valued, so the product factor system mu * mu
    is trivial and the coefficients come from ordinary D4 R blocks.
    """
    projective = representation_module.dihedral4_projective_irreps()
    rep_a, _ = representation_module.block_diagonal_rep(projective, models.MultiplicityPattern((1, 1)))

    ordinary = representation_module.dihedral_irreps(4)
    phase, angle = D4_DOUBLE_BLOCK
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    blocks = tuple(np.array([[np.exp(1j * p)]]) for p in D4_DOUBLE_PHASES) + (np.exp(1j * phase) * rotation,)
    c = fourier_module.synthesize_c(models.RBlockFamily(ordinary, blocks))
    return unitary_module.make_double(c, rep_a, rep_a)


def build_controlled(projectors: Sequence[np.ndarray], unitaries: Sequence[np.ndarray]) -> models.ControlledUnitary:
    return unitary_module.assemble_controlled(projectors, unitaries)


def _cnot(_: Optional[int] = None) -> models.ControlledUnitary:
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return build_controlled([_kb(2, 1, 1), _kb(2, 2, 2)], [np.eye(2), x])


def _qutrit_phase(_: Optional[int] = None) -> models.ControlledUnitary:
    omega = np.exp(2j * np.pi / 3)
    return build_controlled(
        [_kb(3, j, j) for j in (1, 2, 3)],
        [np.diag(omega ** (j * np.arange(3))) for j in range(3)],
    )


def _rank2_controlled(_: Optional[int] = None) -> models.ControlledUnitary:
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return build_controlled([np.diag([1, 1, 0, 0]), np.diag([0, 0, 1, 1])], [np.eye(2), x])


# ============================================================================
# MODULE
# ============================================================================

class CatalogModule:
    """
    Core module holding the registry of worked examples.

    The registry is filled once at construction and read-only afterwards.
    """

    def __init__(self):
        self._entries: Dict[str, models.CatalogEntry] = {}
        self._aliases: Dict[str, str] = {}
        for entry in self._default_entries():
            self.register(entry)
        logger.info("Catalog ready with %d entries", len(self._entries))

    def register(self, entry: models.CatalogEntry) -> None:
        self._entries[entry.name] = entry
        for alias in entry.aliases:
            self._aliases[alias] = entry.name

    @staticmethod
    def _default_entries() -> List[models.CatalogEntry]:
        entries = [
            models.CatalogEntry(
                name=f"xz-{n}",
                kind=models.FormKind.GROUP,
                description=f"SWAP of two {n}-level systems via X^p Z^q on Z{n}xZ{n}; dim is d_A",
                provenance="X/Z family over Z_n x Z_n with the omega^(-q p') factor system",
                builder=lambda d, n=n: build_xz(n, d),
                group_order=n * n,
                default_dim=n,
                dims=(n, 2 * n),
                expected_schmidt_rank={n: n * n, 2 * n: n * n},
            )
            for n in (2, 3)
        ]
        entries.append(models.CatalogEntry(
            name="pauli-double",
            kind=models.FormKind.DOUBLE,
            description="Two-qubit double form, phases (0.3, 1.1, -0.7, 2.0) unless given",
            provenance="Closed-form c(p,q) over Z2xZ2",
            builder=lambda d, phases=PAULI_DOUBLE_PHASES: build_pauli_double(phases),
            group_order=4,
            default_dim=2,
            dims=(2,),
            expected_schmidt_rank={2: 4},
            extras={"phases": PAULI_DOUBLE_PHASES},
            parameters=("phases",),
        ))
        entries.append(models.CatalogEntry(
            name="s3-qutrit",
            kind=models.FormKind.GROUP,
            description="S3 on d_A = 3 (irreps 2 and 3) with five dyad blocks, d_B = 3",
            provenance="S3 block construction on a qutrit pair",
            builder=lambda d: _block_group_form(representation_module.symmetric3_irreps(), (0, 1, 1), s3_qutrit_blocks(), 3),
            group_order=6,
            default_dim=3,
            dims=(3,),
            expected_schmidt_rank={3: 5},
            aliases=("eq60",),
            extras={"blocks": s3_qutrit_blocks(), "pattern": (0, 1, 1)},
        ))
        entries.append(models.CatalogEntry(
            name="s3-d4dim",
            kind=models.FormKind.GROUP,
            description="S3 on d_A = 4 (all irreps) with six blocks, d_B = 4",
            provenance="S3 block construction on a pair of ququarts",
            builder=lambda d: _block_group_form(representation_module.symmetric3_irreps(), (1, 1, 1), s3_ququart_blocks(), 4),
            group_order=6,
            default_dim=4,
            dims=(4,),
            expected_schmidt_rank={4: 6},
            aliases=("eq63",),
            extras={"blocks": s3_ququart_blocks(), "pattern": (1, 1, 1)},
        ))
        for row in (1, 2, 3, 4):
            entries.append(models.CatalogEntry(
                name=f"s3-table1-row{row}",
                kind=models.FormKind.DOUBLE,
                description=f"S3 double form, coefficient row {row}; dim is d = d_A = d_B (3 or 4)",
                provenance="S3 coefficient table with Schmidt ranks at d = 3 and d = 4",
                builder=lambda d, row=row: build_coefficient_row(row, d),
                group_order=6,
                default_dim=3,
                dims=(3, 4),
                expected_schmidt_rank=dict(COEFFICIENT_RANKS[row]),
                extras={"coefficients": COEFFICIENT_ROWS[row]},
            ))
        entries.append(models.CatalogEntry(
            name="d4-projective",
            kind=models.FormKind.GROUP,
            description="D4 projective irreps on d_A = 4; dim is d_B (3 or 4)",
            provenance="D4 with its nontrivial factor system, block sets for d_B = 3 and 4",
            builder=build_d4_projective,
            group_order=8,
            default_dim=4,
            dims=(3, 4),
            expected_schmidt_rank={3: 8, 4: 8},
        ))
        for name, d_b, blocks in (("eq65", 3, d4_projective_qutrit_blocks), ("eq66", 4, d4_projective_ququart_blocks)):
            entries.append(models.CatalogEntry(
                name=name,
                kind=models.FormKind.GROUP,
                description=f"D4 projective block set with d_B = {d_b}",
                provenance="D4 projective block construction",
                builder=lambda d, d_b=d_b: build_d4_projective(d_b),
                group_order=8,
                default_dim=d_b,
                dims=(d_b,),
                expected_schmidt_rank={d_b: 8},
                extras={"blocks": blocks(), "pattern": (1, 1)},
            ))
        entries.append(models.CatalogEntry(
            name="d4-double",
            kind=models.FormKind.DOUBLE,
            description="D4 double form on the 4-dim projective rep, whose product factor system is trivial",
            provenance="D4 double form from ordinary R blocks",
            builder=build_d4_double,
            group_order=8,
            default_dim=4,
            dims=(4,),
            expected_schmidt_rank={4: 8},
        ))
        entries.extend([
            models.CatalogEntry(
                name="cnot-controlled",
                kind=models.FormKind.CONTROLLED,
                description="CNOT as P0 (x) I + P1 (x) X",
                provenance="Controlled-unitary protocol, N = 2",
                builder=_cnot,
                group_order=2,
                default_dim=2,
                dims=(2,),
                expected_schmidt_rank={2: 2},
            ),
            models.CatalogEntry(
                name="qutrit-controlled-phase",
                kind=models.FormKind.CONTROLLED,
                description="sum_j |j><j| (x) Z^j on two qutrits",
                provenance="Controlled-unitary protocol, N = 3",
                builder=_qutrit_phase,
                group_order=3,
                default_dim=3,
                dims=(3,),
                expected_schmidt_rank={3: 3},
            ),
            models.CatalogEntry(
                name="rank2-controlled",
                kind=models.FormKind.CONTROLLED,
                description="Rank-2 projectors on d_A = 4 controlling I and X on a qubit",
                provenance="Controlled-unitary protocol with higher-rank projectors",
                builder=_rank2_controlled,
                group_order=2,
                default_dim=4,
                dims=(4,),
                expected_schmidt_rank={4: 2},
            ),
        ])
        return entries

    # ========================================================================
    # LOOKUP
    # ========================================================================

    def lookup(self, name: str) -> models.CatalogEntry:
        """
        Get an entry by name or alias.

        Raises:
            UnknownEntryError: If nothing is registered under the name
        """
        key = self._aliases.get(name, name)
        if key not in self._entries:
            raise models.UnknownEntryError(f"No catalog entry named '{name}'")
        return self._entries[key]

    def list_names(self, include_aliases: bool = False) -> List[str]:
        names = list(self._entries)
        if include_aliases:
            names.extend(self._aliases)
        return sorted(names)

    def entries(self) -> List[models.CatalogEntry]:
        return [self._entries[name] for name in self.list_names()]

    def build(self, name: str, dim: Optional[int] = None, **params):
        return self.lookup(name).build(dim, **params)

    # ========================================================================
    # VERIFICATION
    # ========================================================================

    @staticmethod
    def assembled_matrix(form) -> np.ndarray:
        if isinstance(form, models.DoubleUnitary):
            return unitary_module.assemble_double(form)[0]
        return form.assembled

    @staticmethod
    def dimensions(form):
        return form.d_A, form.d_B

    def verify(self, name: str, dim: Optional[int] = None) -> models.ValidationReport:
        """
        Check an entry against its declared expectations.

        Covers unitarity of the assembled matrix, the declared Schmidt rank,
        the group order and the W / c condition of the form.
        """
        entry = self.lookup(name)
        dim = dim if dim is not None else entry.default_dim
        form = entry.build(dim)
        report = models.ValidationReport(subject=f"catalog {entry.name} (dim {dim})")

        matrix = self.assembled_matrix(form)
        residual = algebra_module.unitarity_residual(matrix)
        report.observe(residual)
        if residual > settings_module.unitarity_tol:
            report.add("unitarity", (), residual, "assembled matrix is not unitary")

        d_a, d_b = self.dimensions(form)
        expected = entry.expected_schmidt_rank.get(dim)
        if expected is not None:
            rank = algebra_module.schmidt_rank(matrix, d_a, d_b)
            if rank != expected:
                report.add("schmidt-rank", (rank, expected), float(abs(rank - expected)),
                           f"Schmidt rank {rank}, expected {expected}")

        if isinstance(form, models.DoubleUnitary):
            order = form.group.order
            condition = unitary_module.check_c_condition(form)
        elif isinstance(form, models.GroupFormUnitary):
            order = form.rep.group.order
            condition = unitary_module.check_W_condition(form.rep.factor_system, form.wfam)
        else:
            order = form.n
            condition = 0.0
        report.observe(condition)
        if condition > settings_module.unitarity_tol:
            report.add("condition", (), condition, "W / c unitarity condition fails")
        if order != entry.group_order:
            report.add("group-order", (order, entry.group_order), 1.0, f"group order {order}, expected {entry.group_order}")
        return report


# Singleton instance for easy import
catalog_module = CatalogModule()

"""Domain models for Loccsmith.

Groups, factor systems, representations, the three expansion forms of a
bipartite unitary, protocol transcripts and the reports produced by the
validators. Everything here is an immutable value object; the arithmetic
lives in ``src.core``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np


# ============================================================================
# ERRORS
# ============================================================================

class ShapeError(ValueError):
    """Dimension mismatch, non-square input or impossible reshape."""


class DomainValidationError(ValueError):
    """A domain object fails its structural invariants."""


class PreconditionError(ValueError):
    """An operation was called outside its precondition."""


class UnknownEntryError(KeyError):
    """Catalog lookup of an unregistered name."""


class ProblemFileError(ValueError):
    """A problem file could not be read or does not match the schema."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# ============================================================================
# REPORTS
# ============================================================================

@dataclass(frozen=True)
class Violation:
    """One failed check: what kind, where, and by how much."""
    kind: str
    elements: Tuple[int, ...]
    residual: float
    message: str

    def __str__(self) -> str:
        where = ",".join(str(e) for e in self.elements)
        return f"[{self.kind}] at ({where}): {self.message} (residual {self.residual:.3e})"


@dataclass
class ValidationReport:
    """Accumulates violations; empty iff the checked object is valid."""
    subject: str = ""
    violations: List[Violation] = field(default_factory=list)
    worst_residual: float = 0.0
    worst_at: Tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def observe(self, residual: float, at: Tuple[int, ...] = ()) -> None:
        """Track the worst residual seen, whether or not it is a violation."""
        if residual > self.worst_residual:
            self.worst_residual = float(residual)
            self.worst_at = tuple(int(a) for a in at)

    def add(self, kind: str, elements: Sequence[int], residual: float, message: str) -> None:
        at = tuple(int(e) for e in elements)
        self.violations.append(Violation(kind, at, float(residual), message))
        self.observe(residual, at)

    def extend(self, other: "ValidationReport") -> "ValidationReport":
        self.violations.extend(other.violations)
        if other.worst_residual > self.worst_residual:
            self.worst_residual = other.worst_residual
            self.worst_at = other.worst_at
        return self

    def kinds(self) -> List[str]:
        return sorted({v.kind for v in self.violations})

    def summary(self) -> str:
        label = self.subject or "report"
        if self.ok:
            return f"{label}: OK (worst residual {self.worst_residual:.3e})"
        lines = [f"{label}: {len(self.violations)} violation(s)"]
        lines.extend(f"  {v}" for v in self.violations)
        return "\n".join(lines)


@dataclass(frozen=True)
class InformationReport:
    """Outcome of the information-absence check on a transcript."""
    passed: bool
    branch_count: int
    worst_isometry_residual: float
    worst_proportionality_residual: float
    worst_pair: Tuple[int, int]
    probability_spread: Optional[float] = None

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = (
            f"{verdict}: {self.branch_count} branches, "
            f"isometry residual {self.worst_isometry_residual:.3e}, "
            f"proportionality residual {self.worst_proportionality_residual:.3e}"
        )
        if self.probability_spread is not None:
            text += f", probability spread {self.probability_spread:.3e}"
        return text


@dataclass(frozen=True)
class ResourceReport:
    """Comparison of a unitary's entanglement needs with a resource state."""
    passed: bool
    schmidt_rank: int
    resource_schmidt_rank: int
    entangling_strength: float
    resource_entanglement: float
    failures: Tuple[str, ...] = ()


# ============================================================================
# ALGEBRA
# ============================================================================

@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state on a product of subsystems, amplitudes row-major."""
    dims: Tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(self.dims)):
            raise ShapeError(
                f"State of dims {self.dims} needs {int(np.prod(self.dims))} amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm
        if norm == 0:
            raise DomainValidationError("Cannot normalize the zero vector")
        return StateVector(self.dims, self.amplitudes / norm)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Operator (or vector) Schmidt terms, coefficients sorted descending."""
    coefficients: np.ndarray
    left: Tuple[np.ndarray, ...]
    right: Tuple[np.ndarray, ...]

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def terms(self) -> List[Tuple[float, np.ndarray, np.ndarray]]:
        return list(zip(self.coefficients.tolist(), self.left, self.right))

    def reconstruct(self) -> np.ndarray:
        if not self.coefficients.size:
            return np.zeros((1, 1), dtype=complex)
        return sum(s * np.kron(a, b) for s, a, b in self.terms)


# ============================================================================
# GROUPS AND REPRESENTATIONS
# ============================================================================

@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Finite group as a multiplication table; element 0 is the identity.

    ``table[f][g]`` is the index of the product fg. ``inverses[f]`` is -1
    when a (malformed) table has no inverse for f.
    """
    table: np.ndarray
    labels: Tuple[str, ...] = ()
    name: str = ""
    inverses: np.ndarray = field(default=None)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=int)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise ShapeError(f"Multiplication table must be square and nonempty, got shape {table.shape}")
        object.__setattr__(self, "table", table)
        n = table.shape[0]
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        elif len(self.labels) != n:
            raise ShapeError(f"{len(self.labels)} labels for a group of order {n}")
        if self.inverses is None:
            inverses = np.full(n, -1, dtype=int)
            for f in range(n):
                hits = np.flatnonzero(table[f] == 0)
                if hits.size:
                    inverses[f] = hits[0]
            object.__setattr__(self, "inverses", inverses)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    @property
    def identity(self) -> int:
        return 0

    def multiply(self, f: int, g: int) -> int:
        return int(self.table[f, g])

    def inverse(self, f: int) -> int:
        return int(self.inverses[f])

    def same_as(self, other: "FiniteGroup") -> bool:
        return self is other or np.array_equal(self.table, other.table)


@dataclass(frozen=True, eq=False)
class FactorSystem:
    """Unit-modulus phases mu(f, g) twisting the group law."""
    group: FiniteGroup
    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=complex)
        n = self.group.order
        if mu.shape != (n, n):
            raise ShapeError(f"Factor system must be {n}x{n}, got {mu.shape}")
        object.__setattr__(self, "mu", mu)

    def __call__(self, f: int, g: int) -> complex:
        return complex(self.mu[f, g])


@dataclass(frozen=True, eq=False)
class ProjectiveRep:
    """Unitaries U(f), stacked as an (N, d, d) array, obeying U(f)U(g) = mu(f,g)U(fg)."""
    group: FiniteGroup
    factor_system: FactorSystem
    matrices: np.ndarray

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        n = self.group.order
        if mats.ndim != 3 or mats.shape[0] != n or mats.shape[1] != mats.shape[2]:
            raise ShapeError(f"Representation needs {n} square matrices, got array of shape {mats.shape}")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[1])

    def __getitem__(self, f: int) -> np.ndarray:
        return self.matrices[f]


@dataclass(frozen=True, eq=False)
class Irrep:
    """Irreducible projective representation with a 1-based label."""
    label: int
    rep: ProjectiveRep

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def matrices(self) -> np.ndarray:
        return self.rep.matrices


@dataclass(frozen=True, eq=False)
class IrrepSet:
    """Complete list of inequivalent irreps sharing one factor system."""
    group: FiniteGroup
    factor_system: FactorSystem
    irreps: Tuple[Irrep, ...]
    name: str = ""

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(irrep.dim for irrep in self.irreps)

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(irrep.label for irrep in self.irreps)

    def by_label(self, label: int) -> Irrep:
        for irrep in self.irreps:
            if irrep.label == label:
                return irrep
        raise KeyError(f"No irrep labelled {label} in {self.name or 'irrep set'}")


@dataclass(frozen=True)
class MultiplicityPattern:
    """How often each irrep occurs in a block-diagonal representation."""
    counts: Tuple[int, ...]

    def dimension(self, irrep_set: IrrepSet) -> int:
        return int(sum(n * d for n, d in zip(self.counts, irrep_set.dims)))

    def present(self, irrep_set: IrrepSet) -> Tuple[int, ...]:
        """Labels of the irreps that actually occur."""
        return tuple(irrep.label for irrep, n in zip(irrep_set.irreps, self.counts) if n > 0)


# ============================================================================
# FOURIER BLOCKS
# ============================================================================

@dataclass(frozen=True, eq=False)
class QBlockFamily:
    """One (d_lambda*d_B)-square block per irrep, in irrep order."""
    irrep_set: IrrepSet
    blocks: Tuple[np.ndarray, ...]
    d_B: int


@dataclass(frozen=True, eq=False)
class RBlockFamily:
    """One d_lambda-square block per irrep, in irrep order."""
    irrep_set: IrrepSet
    blocks: Tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class WFamily:
    """Operators W(f) on the B side, stacked as (N, d_B, d_B)."""
    matrices: np.ndarray

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ShapeError(f"W family must be an (N, d, d) array, got shape {mats.shape}")
        object.__setattr__(self, "matrices", mats)

    @property
    def d_B(self) -> int:
        return int(self.matrices.shape[1])

    def __len__(self) -> int:
        return int(self.matrices.shape[0])


BlockKey = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class BBlockTable:
    """Blocks B^(lambda j k) keyed by (label, j, k) with 0-based j, k."""
    irrep_set: IrrepSet
    blocks: Dict[BlockKey, np.ndarray]

    def keys_for(self, labels: Optional[Sequence[int]] = None) -> List[BlockKey]:
        wanted = set(labels) if labels is not None else None
        return [key for key in self.blocks if wanted is None or key[0] in wanted]


# ============================================================================
# EXPANSION FORMS
# ============================================================================

@dataclass(frozen=True, eq=False)
class GroupFormUnitary:
    """U = sum_f U(f) (x) W(f)."""
    rep: ProjectiveRep
    wfam: WFamily
    assembled: np.ndarray
    residual: float

    @property
    def d_A(self) -> int:
        return self.rep.dim

    @property
    def d_B(self) -> int:
        return self.wfam.d_B


@dataclass(frozen=True, eq=False)
class ControlledUnitary:
    """U = sum_j P_j (x) V_j with {P_j} an orthogonal decomposition of the identity."""
    projectors: Tuple[np.ndarray, ...]
    unitaries: Tuple[np.ndarray, ...]
    assembled: np.ndarray

    @property
    def n(self) -> int:
        return len(self.projectors)

    @property
    def d_A(self) -> int:
        return int(self.projectors[0].shape[0])

    @property
    def d_B(self) -> int:
        return int(self.unitaries[0].shape[0])


@dataclass(frozen=True, eq=False)
class DoubleUnitary:
    """U = sum_f c(f) U(f) (x) V(f); gamma is the product factor system."""
    coefficients: np.ndarray
    rep_a: ProjectiveRep
    rep_b: ProjectiveRep
    gamma: FactorSystem

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=complex).reshape(-1))

    @property
    def group(self) -> FiniteGroup:
        return self.rep_a.group

    @property
    def d_A(self) -> int:
        return self.rep_a.dim

    @property
    def d_B(self) -> int:
        return self.rep_b.dim


# ============================================================================
# PROTOCOLS
# ============================================================================

class ProtocolVariant(str, Enum):
    CONTROLLED = "controlled"
    GROUP = "group"
    DOUBLE = "double"


@dataclass(frozen=True, eq=False)
class EntangledResource:
    """Maximally entangled state of Schmidt rank N on dims (N, N)."""
    schmidt_rank: int
    state: StateVector


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """Everything a circuit run needs, with gates precomputed.

    ``phase_gates`` holds Z(h) for the group variants and Z_m for the
    controlled variant, each as the diagonal (group) or full matrix (controlled).
    """
    variant: ProtocolVariant
    form: Any
    target: np.ndarray
    d_A: int
    d_B: int
    n: int
    fourier: np.ndarray
    phase_gates: Tuple[np.ndarray, ...]
    rep: Optional[ProjectiveRep] = None
    m_operator: Optional[np.ndarray] = None
    c_operator: Optional[np.ndarray] = None
    ctrl_unitaries: Optional[np.ndarray] = None
    flagged_non_unitary: bool = False
    condition_residual: float = 0.0
    # unitarity residual of target; a branch can never score below it
    target_residual: float = 0.0


@dataclass(frozen=True, eq=False)
class BranchRecord:
    """Kraus operator of one measurement branch (outcome_a, outcome_b)."""
    outcome_a: int
    outcome_b: int
    kraus: np.ndarray
    phase: complex
    residual: float
    output: Optional[np.ndarray] = None
    probability: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ProtocolTranscript:
    """All branches of one exhaustive protocol simulation."""
    variant: ProtocolVariant
    branches: Tuple[BranchRecord, ...]
    target: np.ndarray
    n: int
    flagged_non_unitary: bool = False

    @property
    def worst_residual(self) -> float:
        return max((b.residual for b in self.branches), default=0.0)

    @property
    def classical_bits(self) -> float:
        return 2.0 * float(np.log2(self.n)) if self.n > 1 else 0.0

    def branch(self, outcome_a: int, outcome_b: int) -> BranchRecord:
        for record in self.branches:
            if record.outcome_a == outcome_a and record.outcome_b == outcome_b:
                return record
        raise KeyError((outcome_a, outcome_b))

    def completeness_residual(self) -> float:
        """max-abs of sum_branches K^dagger K - I."""
        dim = self.target.shape[1]
        total = np.zeros((dim, dim), dtype=complex)
        for record in self.branches:
            total += record.kraus.conj().T @ record.kraus
        return float(np.max(np.abs(total - np.eye(dim))))

    def branch_probabilities(self, state: np.ndarray) -> np.ndarray:
        psi = np.asarray(state, dtype=complex).reshape(-1)
        return np.array([np.linalg.norm(b.kraus @ psi) ** 2 for b in self.branches])


# ============================================================================
# CATALOG
# ============================================================================

class FormKind(str, Enum):
    GROUP = "groupForm"
    CONTROLLED = "controlled"
    DOUBLE = "double"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A named worked example together with what it is expected to satisfy.

    ``builder`` takes the dimension parameter (``None`` for the default) and
    returns the fully instantiated form object. Names in ``parameters`` are
    extra keyword arguments the builder accepts, with defaults in ``extras``.
    """
    name: str
    kind: FormKind
    description: str
    provenance: str
    builder: Callable[[Optional[int]], Any]
    group_order: int
    default_dim: Optional[int] = None
    dims: Tuple[int, ...] = ()
    expected_schmidt_rank: Dict[int, int] = field(default_factory=dict)
    aliases: Tuple[str, ...] = ()
    extras: Dict[str, Any] = field(default_factory=dict)
    parameters: Tuple[str, ...] = ()

    def build(self, dim: Optional[int] = None, **params: Any) -> Any:
        if dim is not None and self.dims and dim not in self.dims:
            raise ValueError(f"Catalog entry '{self.name}' supports dims {self.dims}, not {dim}")
        unknown = sorted(set(params) - set(self.parameters))
        if unknown:
            raise ValueError(f"Catalog entry '{self.name}' takes no parameter(s) {', '.join(unknown)}")
        return self.builder(dim if dim is not None else self.default_dim, **params)

    @property
    def construction(self) -> Any:
        return self.build()

"""
Core Group Module

Finite groups as multiplication tables and factor systems (2-cocycles) on
them: constructors for the families the protocols use, validators for the
group axioms and the cocycle rule, and the coboundary search that makes a
factor system trivial by rephasing.

Factor systems that come from roots of unity are built from integer
exponents so that cocycle residuals stay at machine precision.

This is CORE functionality - required for Loccsmith to work.
"""

import itertools
from collections import deque
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .. import models
from .logging_module import get_logger
from .settings_module import settings_module

logger = get_logger('loccsmith.core.group')

# Violations beyond this many per axiom are counted but not listed
MAX_LISTED_VIOLATIONS = 25

# Table order for S3: e, (123), (132), (12), (23), (13)
SYMMETRIC3_PERMUTATIONS = (
    (0, 1, 2),
    (1, 2, 0),
    (2, 0, 1),
    (1, 0, 2),
    (0, 2, 1),
    (2, 1, 0),
)
SYMMETRIC3_LABELS = ("e", "(123)", "(132)", "(12)", "(23)", "(13)")


class GroupModule:
    """
    Core module for finite groups and factor systems.

    Elements are dense indices 0..N-1 with the identity at 0.
    """

    # ========================================================================
    # GROUP CONSTRUCTORS
    # ========================================================================

    @staticmethod
    def build_group(kind: str, n: Optional[int] = None,
                    factors: Optional[Tuple[models.FiniteGroup, models.FiniteGroup]] = None) -> models.FiniteGroup:
        """
        Build a group of the requested isomorphism type.

        Args:
            kind: 'cyclic', 'dihedral', 'symmetric3' or 'direct_product'
            n: Order parameter for cyclic and dihedral groups
            factors: The two groups for a direct product

        Returns:
            Valid FiniteGroup

        Raises:
            ValueError: Unknown kind or n < 1
        """
        if kind == "cyclic":
            return GroupModule.cyclic(n)
        if kind == "dihedral":
            return GroupModule.dihedral(n)
        if kind == "symmetric3":
            return GroupModule.symmetric3()
        if kind == "direct_product":
            if not factors or len(factors) != 2:
                raise ValueError("direct_product needs exactly two factor groups")
            return GroupModule.direct_product(*factors)
        raise ValueError(f"Unknown group kind '{kind}'")

    @staticmethod
    def _check_n(n: Optional[int]) -> int:
        if n is None or int(n) < 1:
            raise ValueError(f"Group parameter n must be >= 1, got {n}")
        return int(n)

    @staticmethod
    def cyclic(n: int) -> models.FiniteGroup:
        n = GroupModule._check_n(n)
        idx = np.arange(n)
        table = (idx[:, None] + idx[None, :]) % n
        return models.FiniteGroup(table, tuple(str(k) for k in range(n)), name=f"Z{n}")

    @staticmethod
    def dihedral(n: int) -> models.FiniteGroup:
        """
        Dihedral group of order 2n; element r^a s^b has index a + n*b.

        Uses s r = r^-1 s, so (r^a s^b)(r^c s^d) = r^(a + (-1)^b c) s^(b+d).
        """
        n = GroupModule._check_n(n)
        table = np.zeros((2 * n, 2 * n), dtype=int)
        for a, b, c, d in itertools.product(range(n), range(2), range(n), range(2)):
            rot = (a + (c if b == 0 else -c)) % n
            table[a + n * b, c + n * d] = rot + n * ((b + d) % 2)

        def label(a: int, b: int) -> str:
            rot = "" if a == 0 else ("r" if a == 1 else f"r^{a}")
            text = rot + ("s" if b else "")
            return text or "e"

        labels = tuple(label(i % n, i // n) for i in range(2 * n))
        return models.FiniteGroup(table, labels, name=f"D{n}")

    @staticmethod
    def symmetric3() -> models.FiniteGroup:
        """S3 in the order e, (123), (132), (12), (23), (13); fg applies g first."""
        perms = SYMMETRIC3_PERMUTATIONS
        index = {p: i for i, p in enumerate(perms)}
        table = np.zeros((6, 6), dtype=int)
        for f, pf in enumerate(perms):
            for g, pg in enumerate(perms):
                table[f, g] = index[tuple(pf[pg[x]] for x in range(3))]
        return models.FiniteGroup(table, SYMMETRIC3_LABELS, name="S3")

    @staticmethod
    def direct_product(g1: models.FiniteGroup, g2: models.FiniteGroup) -> models.FiniteGroup:
        """G1 x G2 with element (a, b) at index a*|G2| + b."""
        n2 = g2.order
        table = (g1.table[:, None, :, None] * n2 + g2.table[None, :, None, :]).reshape(
            g1.order * n2, g1.order * n2
        )
        labels = tuple(f"({la},{lb})" for la in g1.labels for lb in g2.labels)
        return models.FiniteGroup(table, labels, name=f"{g1.name}x{g2.name}")

    # ========================================================================
    # GROUP QUERIES
    # ========================================================================

    @staticmethod
    def is_abelian(group: models.FiniteGroup) -> bool:
        return bool(np.array_equal(group.table, group.table.T))

    @staticmethod
    def power(group: models.FiniteGroup, f: int, k: int) -> int:
        result = 0
        for _ in range(k):
            result = group.multiply(result, f)
        return result

    @staticmethod
    def element_order(group: models.FiniteGroup, f: int) -> int:
        power, k = f, 1
        while power != 0:
            power = group.multiply(power, f)
            k += 1
            if k > group.order:
                raise models.DomainValidationError(f"Element {f} has no finite order in this table")
        return k

    @staticmethod
    def generated_subgroup(group: models.FiniteGroup, generators: Sequence[int]) -> set:
        reached = {0}
        frontier = deque([0])
        while frontier:
            f = frontier.popleft()
            for s in generators:
                fs = group.multiply(f, s)
                if fs not in reached:
                    reached.add(fs)
                    frontier.append(fs)
        return reached

    @staticmethod
    def generators(group: models.FiniteGroup) -> List[int]:
        """Greedy generating set, preferring elements of large order."""
        candidates = sorted(range(1, group.order), key=lambda f: (-GroupModule.element_order(group, f), f))
        chosen: List[int] = []
        reached = {0}
        for f in candidates:
            if len(reached) == group.order:
                break
            if f not in reached:
                chosen.append(f)
                reached = GroupModule.generated_subgroup(group, chosen)
        return chosen

    # ========================================================================
    # GROUP VALIDATION
    # ========================================================================

    @staticmethod
    def validate_group(group: models.FiniteGroup) -> models.ValidationReport:
        """
        Check closure, associativity, identity and inverses.

        Args:
            group: Table to check

        Returns:
            Report listing every violated axiom with the offending elements
        """
        report = models.ValidationReport(subject=f"group {group.name}".strip())
        table = group.table
        n = group.order

        closed = (table >= 0) & (table < n)
        for f, g in np.argwhere(~closed)[:MAX_LISTED_VIOLATIONS]:
            report.add("closure", (f, g), 1.0, f"product {f}*{g} = {table[f, g]} is not an element")
        safe = np.where(closed, table, 0)

        left = safe[safe]  # left[f, g, h] = (fg)h
        right = safe[np.arange(n)[:, None, None], safe[None, :, :]]  # f(gh)
        valid_triples = closed[:, :, None] & closed[None, :, :]
        bad = np.argwhere((left != right) & valid_triples)
        for f, g, h in bad[:MAX_LISTED_VIOLATIONS]:
            report.add("associativity", (f, g, h), 1.0, f"(fg)h = {left[f, g, h]} but f(gh) = {right[f, g, h]}")
        if len(bad) > MAX_LISTED_VIOLATIONS:
            logger.debug("%d further associativity violations not listed", len(bad) - MAX_LISTED_VIOLATIONS)

        for f in range(n):
            if table[0, f] != f or table[f, 0] != f:
                report.add("identity", (f,), 1.0, f"element 0 does not act as identity on {f}")
        for f in range(n):
            if not np.any((table[f] == 0) & (table[:, f] == 0)):
                report.add("inverse", (f,), 1.0, f"element {f} has no two-sided inverse")

        if not report.ok:
            logger.warning("Group %s failed validation: %s", group.name, report.kinds())
        return report

    # ========================================================================
    # FACTOR SYSTEMS
    # ========================================================================

    @staticmethod
    def trivial_factor_system(group: models.FiniteGroup) -> models.FactorSystem:
        return models.FactorSystem(group, np.ones((group.order, group.order), dtype=complex))

    @staticmethod
    def factor_system_from_exponents(group: models.FiniteGroup, exponents, denominator: int) -> models.FactorSystem:
        """mu(f,g) = exp(2 pi i k(f,g)/denominator) for integer exponents k."""
        k = np.mod(np.asarray(exponents, dtype=int), denominator)
        return models.FactorSystem(group, np.exp(2j * np.pi * k / denominator))

    @staticmethod
    def xz_factor_system(n: int) -> Tuple[models.FiniteGroup, models.FactorSystem]:
        """
        Z_n x Z_n with mu((p,q),(p',q')) = omega^(-q p').

        Elements (p, q) are ordered lexicographically, index p*n + q.
        """
        if int(n) < 2:
            raise ValueError(f"xz factor system needs n >= 2, got {n}")
        cyclic = GroupModule.cyclic(n)
        group = GroupModule.direct_product(cyclic, cyclic)
        idx = np.arange(n * n)
        p, q = idx // n, idx % n
        exponents = -np.outer(q, p)
        return group, GroupModule.factor_system_from_exponents(group, exponents, n)

    @staticmethod
    def direct_product_factor_system(group: models.FiniteGroup, fs1: models.FactorSystem,
                                     fs2: models.FactorSystem) -> models.FactorSystem:
        """mu((a,b),(a',b')) = mu1(a,a') mu2(b,b') on the product group."""
        n1, n2 = fs1.group.order, fs2.group.order
        if group.order != n1 * n2:
            raise models.ShapeError(f"Product group of order {group.order} does not match {n1}x{n2}")
        mu = (fs1.mu[:, None, :, None] * fs2.mu[None, :, None, :]).reshape(n1 * n2, n1 * n2)
        return models.FactorSystem(group, mu)

    @staticmethod
    def multiply_factor_systems(fs1: models.FactorSystem, fs2: models.FactorSystem) -> models.FactorSystem:
        """gamma = mu * nu, the factor system of U(f) (x) V(f)."""
        if not fs1.group.same_as(fs2.group):
            raise models.DomainValidationError("Factor systems live on different groups")
        return models.FactorSystem(fs1.group, fs1.mu * fs2.mu)

    @staticmethod
    def rephase_factor_system(fs: models.FactorSystem, phases) -> models.FactorSystem:
        """Factor system of phi(f) U(f): mu(f,g) phi(f) phi(g) / phi(fg)."""
        phi = np.asarray(phases, dtype=complex)
        table = fs.group.table
        return models.FactorSystem(fs.group, fs.mu * np.outer(phi, phi) / phi[table])

    @staticmethod
    def factor_system_distance(fs1: models.FactorSystem, fs2: models.FactorSystem) -> float:
        return float(np.max(np.abs(fs1.mu - fs2.mu)))

    @staticmethod
    def validate_factor_system(fs: models.FactorSystem, tol: Optional[float] = None) -> models.ValidationReport:
        """
        Check unit modulus, normalization and the cocycle rule.

        The cocycle rule mu(h,f) mu(hf,g) = mu(h,fg) mu(f,g) is checked over
        all N^3 triples.

        Args:
            fs: Factor system on a valid group
            tol: Cocycle and normalization tolerance; defaults to cocycle_tol

        Returns:
            Report naming each violating element, pair or triple
        """
        tol = settings_module.resolve("cocycle_tol", tol)
        modulus_tol = settings_module.get("unit_modulus_tol")
        report = models.ValidationReport(subject="factor system")
        mu = fs.mu
        table = fs.group.table

        if not np.all(np.isfinite(mu)):
            report.add("finite", (), float("inf"), "factor system has non-finite entries")
            return report

        modulus = np.abs(np.abs(mu) - 1.0)
        for f, g in np.argwhere(modulus > modulus_tol)[:MAX_LISTED_VIOLATIONS]:
            report.add("unit-modulus", (f, g), modulus[f, g], f"|mu({f},{g})| = {abs(mu[f, g]):.15f}")

        for f in range(fs.group.order):
            for kind, value, pair in (("normalization", mu[0, f], (0, f)), ("normalization", mu[f, 0], (f, 0))):
                deviation = abs(value - 1.0)
                report.observe(deviation, pair)
                if deviation > tol:
                    report.add(kind, pair, deviation, f"mu{pair} = {value:.6g}, expected 1")

        lhs = mu[:, :, None] * mu[table][:, :, :]  # mu(h,f) mu(hf,g)
        rhs = mu[:, table] * mu[None, :, :]  # mu(h,fg) mu(f,g)
        residual = np.abs(lhs - rhs)
        worst = np.unravel_index(np.argmax(residual), residual.shape)
        report.observe(float(residual[worst]), worst)
        for h, f, g in np.argwhere(residual > tol)[:MAX_LISTED_VIOLATIONS]:
            report.add("cocycle", (h, f, g), residual[h, f, g], f"cocycle rule fails for (h,f,g) = ({h},{f},{g})")

        if not report.ok:
            logger.warning("Factor system failed validation: %s", report.kinds())
        return report

    @staticmethod
    def trivializing_phases(fs: models.FactorSystem, tol: Optional[float] = None) -> Optional[np.ndarray]:
        """
        Find phases phi with mu(f,g) phi(f) phi(g) / phi(fg) = 1 for all f, g.

        For a generator s of order m the condition forces phi(s)^m to equal
        the inverse of prod_{j<m} mu(s^j, s), leaving m candidates per
        generator. Each combination is propagated over the Cayley graph and
        checked against every pair.

        Returns:
            Phases indexed by element, or None if mu is not a coboundary
        """
        tol = settings_module.resolve("cocycle_tol", tol)
        group = fs.group
        mu = fs.mu
        gens = GroupModule.generators(group)

        candidate_lists = []
        for s in gens:
            m = GroupModule.element_order(group, s)
            product = 1.0 + 0j
            power = s
            for _ in range(1, m):
                product *= mu[power, s]
                power = group.multiply(power, s)
            base = (1.0 / product) ** (1.0 / m)
            candidate_lists.append([base * np.exp(2j * np.pi * k / m) for k in range(m)])

        for choice in itertools.product(*candidate_lists):
            phi = np.full(group.order, np.nan, dtype=complex)
            phi[0] = 1.0
            frontier = deque([0])
            while frontier:
                f = frontier.popleft()
                for s, value in zip(gens, choice):
                    fs_idx = group.multiply(f, s)
                    if np.isnan(phi[fs_idx]):
                        phi[fs_idx] = mu[f, s] * phi[f] * value
                        frontier.append(fs_idx)
            if np.any(np.isnan(phi)):
                continue
            check = mu * np.outer(phi, phi) / phi[group.table]
            if np.max(np.abs(check - 1.0)) < max(tol, 1e-9):
                return phi

        logger.warning("Factor system on %s is not a coboundary", group.name or "group")
        return None


# Singleton instance for easy import
group_module = GroupModule()

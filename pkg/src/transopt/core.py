"""Domain model for balanced transportation problems.

Every cost, supply, demand and flow quantity is a `fractions.Fraction`, so
feasibility and optimality checks are equality-exact: integer data stays
integer-valued through every operation and no tolerance ever enters a
comparison.  Floats are converted to their exact binary rational value on
input.

All types are immutable after construction; all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

Cell = tuple[int, int]
Numberish = int | float | str | Fraction

__all__ = [
    "BalanceError",
    "Cell",
    "CyclicBasisError",
    "DegenerateBasisError",
    "DualCertificate",
    "FeasibilityReport",
    "Numberish",
    "OptimalityReport",
    "TransportInstance",
    "TransportPlan",
    "as_fraction",
    "as_matrix",
    "as_vector",
    "compute_duals_from_plan",
    "dual_objective",
    "is_feasible",
    "new_instance",
    "plan_cost",
    "verify_optimal",
]


class BalanceError(ValueError):
    """Total supply differs from total demand."""

    def __init__(self, supply_total: Fraction, demand_total: Fraction) -> None:
        super().__init__(
            "unbalanced instance: total supply %s != total demand %s"
            % (supply_total, demand_total)
        )
        self.supply_total = supply_total
        self.demand_total = demand_total


class CyclicBasisError(ValueError):
    """The given basis cells contain a cycle, so they are not a basic solution."""


class DegenerateBasisError(ValueError):
    """The basis graph is disconnected; hint cells are needed to span it."""


def as_fraction(value: Numberish) -> Fraction:
    """Convert a number to an exact Fraction.

    Accepts ints, Fractions, strings like "3" or "-5/7", and finite floats
    (converted to their exact binary value).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"entries must be finite, got {value!r}")
        return Fraction(value)
    return Fraction(value)


def as_vector(values: Iterable[Numberish]) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


def as_matrix(rows: Sequence[Sequence[Numberish]]) -> tuple[tuple[Fraction, ...], ...]:
    """Normalize a rectangular matrix to a tuple-of-tuples of Fractions."""
    if len(rows) == 0:
        raise ValueError("matrix must have at least one row")
    out = tuple(as_vector(row) for row in rows)
    width = len(out[0])
    if width == 0:
        raise ValueError("matrix must have at least one column")
    for k, row in enumerate(out):
        if len(row) != width:
            raise ValueError(f"row {k} has {len(row)} entries, expected {width}")
    return out


@dataclass(frozen=True)
class TransportInstance:
    """A balanced transportation problem: cost matrix, supplies, demands."""

    cost: tuple[tuple[Fraction, ...], ...]
    supply: tuple[Fraction, ...]
    demand: tuple[Fraction, ...]
    total: Fraction  # common value of total supply and total demand

    @property
    def m(self) -> int:
        return len(self.supply)

    @property
    def n(self) -> int:
        return len(self.demand)


class TransportPlan:
    """A sparse flow assignment; only strictly positive quantities are stored."""

    __slots__ = ("_entries",)

    def __init__(
        self,
        entries: Mapping[Cell, Numberish] | Iterable[tuple[Cell, Numberish]] = (),
    ) -> None:
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict[Cell, Fraction] = {}
        for (i, j), quantity in items:
            q = as_fraction(quantity)
            if q < 0:
                raise ValueError(f"negative quantity {q} at cell ({i}, {j})")
            if q > 0:
                clean[(int(i), int(j))] = q
        self._entries = MappingProxyType(clean)

    @property
    def entries(self) -> Mapping[Cell, Fraction]:
        return self._entries

    def quantity(self, i: int, j: int) -> Fraction:
        return self._entries.get((i, j), Fraction(0))

    def cells(self) -> list[Cell]:
        """Support cells in row-major order."""
        return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TransportPlan):
            return dict(self._entries) == dict(other._entries)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._entries.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"({i}, {j}): {q}" for (i, j), q in sorted(self._entries.items()))
        return f"TransportPlan({{{body}}})"


@dataclass(frozen=True)
class DualCertificate:
    """Row potentials alpha and column potentials beta.

    Certifies optimality of a feasible plan when alpha[i] + beta[j] <= cost[i][j]
    holds everywhere, with equality on every cell carrying positive flow.
    """

    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_vector(self.alpha))
        object.__setattr__(self, "beta", as_vector(self.beta))


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of a feasibility check; truthy iff the plan is feasible.

    Violations are ("row"|"column", index, residual) triples, rows first,
    where residual = required total - shipped total.
    """

    feasible: bool
    violations: tuple[tuple[str, int, Fraction], ...] = ()

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def first_violation(self) -> tuple[str, int, Fraction] | None:
        return self.violations[0] if self.violations else None


@dataclass(frozen=True)
class OptimalityReport:
    """Outcome of a certificate check; truthy iff the certificate verifies.

    A violation is ("dual"|"slack", i, j, alpha_i + beta_j, cost_ij): "dual"
    means the potentials exceed the cost at (i, j); "slack" means a cell with
    positive flow is not tight.
    """

    optimal: bool
    violation: tuple[str, int, int, Fraction, Fraction] | None = None

    def __bool__(self) -> bool:
        return self.optimal


def new_instance(
    cost: Sequence[Sequence[Numberish]],
    supply: Iterable[Numberish],
    demand: Iterable[Numberish],
) -> TransportInstance:
    """Validate and build a balanced transportation instance."""
    cost_m = as_matrix(cost)
    supply_v = as_vector(supply)
    demand_v = as_vector(demand)
    if len(cost_m) != len(supply_v):
        raise ValueError(
            f"cost matrix has {len(cost_m)} rows but there are {len(supply_v)} supplies"
        )
    if len(cost_m[0]) != len(demand_v):
        raise ValueError(
            f"cost matrix has {len(cost_m[0])} columns but there are {len(demand_v)} demands"
        )
    for i, a in enumerate(supply_v):
        if a < 0:
            raise ValueError(f"supply {i} is negative: {a}")
    for j, b in enumerate(demand_v):
        if b < 0:
            raise ValueError(f"demand {j} is negative: {b}")
    total_supply = sum(supply_v, Fraction(0))
    total_demand = sum(demand_v, Fraction(0))
    if total_supply != total_demand:
        raise BalanceError(total_supply, total_demand)
    return TransportInstance(cost_m, supply_v, demand_v, total_supply)


def _check_plan_indices(instance: TransportInstance, plan: TransportPlan) -> None:
    for i, j in plan.entries:
        if not (0 <= i < instance.m and 0 <= j < instance.n):
            raise IndexError(
                f"plan cell ({i}, {j}) out of range for a "
                f"{instance.m}x{instance.n} instance"
            )


def plan_cost(instance: TransportInstance, plan: TransportPlan) -> Fraction:
    """Total shipping cost of a plan: sum of cost[i][j] * quantity over its support."""
    _check_plan_indices(instance, plan)
    return sum(
        (instance.cost[i][j] * q for (i, j), q in plan.entries.items()), Fraction(0)
    )


def is_feasible(instance: TransportInstance, plan: TransportPlan) -> FeasibilityReport:
    """Check that row sums equal supplies and column sums equal demands exactly."""
    _check_plan_indices(instance, plan)
    row_sums = [Fraction(0)] * instance.m
    col_sums = [Fraction(0)] * instance.n
    for (i, j), q in plan.entries.items():
        row_sums[i] += q
        col_sums[j] += q
    violations: list[tuple[str, int, Fraction]] = []
    for i in range(instance.m):
        if row_sums[i] != instance.supply[i]:
            violations.append(("row", i, instance.supply[i] - row_sums[i]))
    for j in range(instance.n):
        if col_sums[j] != instance.demand[j]:
            violations.append(("column", j, instance.demand[j] - col_sums[j]))
    return FeasibilityReport(not violations, tuple(violations))


def verify_optimal(
    instance: TransportInstance, plan: TransportPlan, cert: DualCertificate
) -> OptimalityReport:
    """Check a dual certificate against a feasible plan.

    Returns a truthy report iff alpha[i] + beta[j] <= cost[i][j] holds on every
    cell with equality on the plan's support.  The first violated cell in
    row-major order is reported.  An infeasible plan is rejected outright.
    """
    if len(cert.alpha) != instance.m or len(cert.beta) != instance.n:
        raise ValueError(
            f"certificate shape ({len(cert.alpha)}, {len(cert.beta)}) does not "
            f"match instance ({instance.m}, {instance.n})"
        )
    feas = is_feasible(instance, plan)
    if not feas:
        kind, index, residual = feas.first_violation
        raise ValueError(
            f"plan is infeasible ({kind} {index} has residual {residual}); "
            "cannot certify optimality"
        )
    support = plan.entries
    for i in range(instance.m):
        for j in range(instance.n):
            lhs = cert.alpha[i] + cert.beta[j]
            cij = instance.cost[i][j]
            if lhs > cij:
                return OptimalityReport(False, ("dual", i, j, lhs, cij))
            if lhs != cij and (i, j) in support:
                return OptimalityReport(False, ("slack", i, j, lhs, cij))
    return OptimalityReport(True, None)


def dual_objective(instance: TransportInstance, cert: DualCertificate) -> Fraction:
    """Value of the dual objective: sum alpha_i * supply_i + sum beta_j * demand_j."""
    total = Fraction(0)
    for a, s in zip(cert.alpha, instance.supply):
        total += a * s
    for b, d in zip(cert.beta, instance.demand):
        total += b * d
    return total


def compute_duals_from_plan(
    instance: TransportInstance,
    plan: TransportPlan,
    basis_hint: Iterable[Cell] | None = None,
) -> DualCertificate:
    """Solve the tight-cell equations alpha_i + beta_j = cost[i][j] along the basis.

    The basis is the plan's support plus any `basis_hint` cells (zero-flow basic
    cells for degenerate plans).  It must form a spanning tree of the bipartite
    row/column graph: a cycle raises CyclicBasisError, a disconnected graph
    raises DegenerateBasisError.  alpha[0] = 0 normalizes the one-dimensional
    null space.
    """
    _check_plan_indices(instance, plan)
    m, n = instance.m, instance.n
    cells = set(plan.entries)
    for i, j in basis_hint or ():
        if not (0 <= i < m and 0 <= j < n):
            raise IndexError(f"hint cell ({i}, {j}) out of range")
        cells.add((int(i), int(j)))

    # Union-find over the m row nodes and n column nodes; a cell is an edge.
    parent = list(range(m + n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in sorted(cells):
        ri, cj = find(i), find(m + j)
        if ri == cj:
            raise CyclicBasisError(
                f"basis cells contain a cycle (closed at cell ({i}, {j})); "
                "not a basic solution"
            )
        parent[ri] = cj

    roots = {find(x) for x in range(m + n)}
    if len(roots) > 1:
        raise DegenerateBasisError(
            f"basis graph has {len(roots)} components; the plan is degenerate, "
            "pass basis_hint cells to connect all rows and columns"
        )

    adjacency: dict[int, list[tuple[int, Cell]]] = {x: [] for x in range(m + n)}
    for i, j in sorted(cells):
        adjacency[i].append((m + j, (i, j)))
        adjacency[m + j].append((i, (i, j)))

    potential: list[Fraction | None] = [None] * (m + n)
    potential[0] = Fraction(0)
    stack = [0]
    while stack:
        node = stack.pop()
        for neighbor, (i, j) in adjacency[node]:
            if potential[neighbor] is None:
                potential[neighbor] = instance.cost[i][j] - potential[node]
                stack.append(neighbor)

    alpha = tuple(potential[:m])
    beta = tuple(potential[m:])
    return DualCertificate(alpha, beta)

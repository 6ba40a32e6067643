"""Weighted Hungarian method for balanced transportation problems.

The loop alternates two steps on a reduced cost matrix: cover all zeros with
rows and columns of minimum total weight (row i weighs supply[i], column j
weighs demand[j]), then, while the cover weight is below the balanced total,
subtract the minimum uncovered entry from uncovered cells and add it to
doubly-covered ones.  The min-weight cover is computed as a minimum cut of a
flow network whose arcs are the zero cells, which also hands us a maximum
flow; when that flow saturates every marginal it *is* a feasible plan
supported on zeros, and the accumulated reductions are a dual certificate.

Extraction always uses the max flow.  The textbook alternative (repeatedly
picking rows/columns with a single zero) is not used: it can deadlock on ties,
while the flow is guaranteed whenever the cover weight equals the total.

Assignment problems are the unit-marginal special case, and any transportation
problem expands to one by replicating row i supply[i] times and column j
demand[j] times; both directions are provided for cross-validation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import (
    Cell,
    DualCertificate,
    Numberish,
    TransportInstance,
    TransportPlan,
    as_matrix,
    as_vector,
    new_instance,
    plan_cost,
    verify_optimal,
)

__all__ = [
    "HungarianIteration",
    "LineCover",
    "SolveTrace",
    "ZeroFlowNetwork",
    "aggregate_assignment_solution",
    "delta_adjust",
    "expand_to_assignment",
    "extract_plan_from_zeros",
    "first_uncovered_zero",
    "line_cover",
    "min_weight_zero_cover",
    "reduce_matrix",
    "solve_assignment",
    "solve_weighted_hungarian",
]

Matrix = tuple[tuple[Fraction, ...], ...]
CoverHook = Callable[[int, Matrix, "LineCover"], "tuple[Iterable[int], Iterable[int]] | None"]


@dataclass(frozen=True)
class LineCover:
    """A weighted set of covering lines: row indices, column indices, and
    their total weight (sum of covered supplies plus covered demands)."""

    rows: frozenset[int]
    cols: frozenset[int]
    weight: Fraction


def line_cover(
    rows: Iterable[int],
    cols: Iterable[int],
    supply: Sequence[Fraction],
    demand: Sequence[Fraction],
) -> LineCover:
    row_set = frozenset(int(i) for i in rows)
    col_set = frozenset(int(j) for j in cols)
    for i in row_set:
        if not 0 <= i < len(supply):
            raise IndexError(f"covered row {i} out of range")
    for j in col_set:
        if not 0 <= j < len(demand):
            raise IndexError(f"covered column {j} out of range")
    weight = sum((supply[i] for i in row_set), Fraction(0)) + sum(
        (demand[j] for j in col_set), Fraction(0)
    )
    return LineCover(row_set, col_set, weight)


def first_uncovered_zero(matrix: Matrix, cover: LineCover) -> Cell | None:
    """First zero cell (row-major) not lying in a covered row or column."""
    for i, row in enumerate(matrix):
        if i in cover.rows:
            continue
        for j, value in enumerate(row):
            if value == 0 and j not in cover.cols:
                return (i, j)
    return None


@dataclass(frozen=True)
class HungarianIteration:
    """One pass of the cover step: the matrix it saw, the cover found, the
    max-flow value on the zero network, and the delta applied (None on the
    terminal pass)."""

    matrix: Matrix
    cover: LineCover
    flow_value: Fraction
    delta: Fraction | None


@dataclass(frozen=True)
class SolveTrace:
    """Full record of a solve: every iteration plus the extracted solution.

    `scale` is the factor that made the cost matrix integer before the loop;
    iteration matrices and deltas are in scaled units (scale is 1 for integer
    costs), while `plan` and `certificate` are in original units.
    """

    scale: int
    iterations: tuple[HungarianIteration, ...]
    plan: TransportPlan
    certificate: DualCertificate


class ZeroFlowNetwork:
    """Flow network over the zero cells of a reduced matrix.

    Source feeds each row with capacity supply[i]; each column drains to the
    sink with capacity demand[j]; every zero cell (i, j) carries an arc from
    row i to column j with capacity one more than the balanced total, which no
    flow can saturate, so a zero arc never crosses the canonical minimum cut.

    Max flow is computed with shortest augmenting paths, neighbors scanned in
    ascending node order, so flows and cuts are deterministic.
    """

    def __init__(
        self,
        reduced: Matrix,
        supply: Sequence[Fraction],
        demand: Sequence[Fraction],
    ) -> None:
        self.m = len(supply)
        self.n = len(demand)
        self.supply = tuple(supply)
        self.demand = tuple(demand)
        total = sum(supply, Fraction(0))
        size = self.m + self.n + 2
        self.source = 0
        self.sink = size - 1
        # residual[u][v] = remaining capacity of arc u -> v
        self.residual = [[Fraction(0)] * size for _ in range(size)]
        for i in range(self.m):
            self.residual[self.source][1 + i] = supply[i]
        for j in range(self.n):
            self.residual[1 + self.m + j][self.sink] = demand[j]
        self.zero_cells = []
        unbounded = total + 1
        for i, row in enumerate(reduced):
            for j, value in enumerate(row):
                if value == 0:
                    self.residual[1 + i][1 + self.m + j] = unbounded
                    self.zero_cells.append((i, j))
        self._flow_value: Fraction | None = None

    def _augmenting_path(self) -> list[int] | None:
        parent = [-1] * len(self.residual)
        parent[self.source] = self.source
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            if u == self.sink:
                break
            for v, cap in enumerate(self.residual[u]):
                if cap > 0 and parent[v] < 0:
                    parent[v] = u
                    queue.append(v)
        if parent[self.sink] < 0:
            return None
        path = [self.sink]
        while path[-1] != self.source:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    def max_flow(self) -> Fraction:
        """Run augmenting paths to completion; idempotent."""
        if self._flow_value is not None:
            return self._flow_value
        total = Fraction(0)
        while True:
            path = self._augmenting_path()
            if path is None:
                break
            bottleneck = min(
                self.residual[u][v] for u, v in zip(path, path[1:])
            )
            for u, v in zip(path, path[1:]):
                self.residual[u][v] -= bottleneck
                self.residual[v][u] += bottleneck
            total += bottleneck
        self._flow_value = total
        return total

    def zero_cell_flow(self) -> dict[Cell, Fraction]:
        """Flow routed through each zero cell (positive entries only)."""
        self.max_flow()
        flow: dict[Cell, Fraction] = {}
        for i, j in self.zero_cells:
            # flow on the arc equals the reverse residual it created
            q = self.residual[1 + self.m + j][1 + i]
            if q > 0:
                flow[(i, j)] = q
        return flow

    def source_side(self) -> set[int]:
        """Nodes reachable from the source in the final residual graph."""
        self.max_flow()
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for v, cap in enumerate(self.residual[u]):
                if cap > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def min_cut_cover(self) -> LineCover:
        """Canonical minimum cut read as covering lines: rows the source can
        no longer reach, columns it still can."""
        reachable = self.source_side()
        rows = [i for i in range(self.m) if 1 + i not in reachable]
        cols = [j for j in range(self.n) if 1 + self.m + j in reachable]
        return line_cover(rows, cols, self.supply, self.demand)


def reduce_matrix(
    cost: Sequence[Sequence[Numberish]],
) -> tuple[Matrix, tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Subtract each row's minimum, then each column's minimum.

    Returns the reduced matrix (nonnegative, a zero in every row and column)
    together with the row and column offsets, which already form a dual-
    feasible starting certificate.
    """
    matrix = as_matrix(cost)
    row_offsets = tuple(min(row) for row in matrix)
    rows_done = tuple(
        tuple(value - offset for value in row)
        for row, offset in zip(matrix, row_offsets)
    )
    col_offsets = tuple(min(col) for col in zip(*rows_done))
    reduced = tuple(
        tuple(value - offset for value, offset in zip(row, col_offsets))
        for row in rows_done
    )
    return reduced, row_offsets, col_offsets


def _require_integer_marginals(
    supply: Sequence[Fraction], demand: Sequence[Fraction]
) -> None:
    for label, values in (("supply", supply), ("demand", demand)):
        for k, v in enumerate(values):
            if v.denominator != 1:
                raise ValueError(f"{label} {k} is not an integer: {v}")


def min_weight_zero_cover(
    reduced: Sequence[Sequence[Numberish]],
    supply: Iterable[Numberish],
    demand: Iterable[Numberish],
) -> tuple[LineCover, Fraction, dict[Cell, Fraction]]:
    """Minimum-weight line cover of the zeros, via max-flow/min-cut.

    Returns the cover, the max-flow value (equal to the cover weight), and the
    flow routed through each zero cell, which the extraction step reuses.
    """
    matrix = as_matrix(reduced)
    supply_v = as_vector(supply)
    demand_v = as_vector(demand)
    _require_integer_marginals(supply_v, demand_v)
    if len(matrix) != len(supply_v) or len(matrix[0]) != len(demand_v):
        raise ValueError("matrix shape does not match supply/demand lengths")
    network = ZeroFlowNetwork(matrix, supply_v, demand_v)
    flow_value = network.max_flow()
    cover = network.min_cut_cover()
    if cover.weight != flow_value:
        raise RuntimeError(
            f"min-cut weight {cover.weight} differs from max-flow {flow_value}"
        )
    leak = first_uncovered_zero(matrix, cover)
    if leak is not None:
        raise RuntimeError(f"derived cover misses the zero at {leak}")
    return cover, flow_value, network.zero_cell_flow()


def delta_adjust(
    reduced: Sequence[Sequence[Numberish]], cover: LineCover
) -> tuple[Matrix, Fraction]:
    """Subtract the minimum uncovered entry from all uncovered cells and add
    it to all doubly-covered cells; singly-covered cells are unchanged."""
    matrix = as_matrix(reduced)
    leak = first_uncovered_zero(matrix, cover)
    if leak is not None:
        raise ValueError(f"cover leaves the zero at {leak} uncovered")
    uncovered = [
        matrix[i][j]
        for i in range(len(matrix))
        if i not in cover.rows
        for j in range(len(matrix[0]))
        if j not in cover.cols
    ]
    if not uncovered:
        raise ValueError("every cell is covered; nothing to adjust")
    delta = min(uncovered)
    assert delta > 0  # zeros are all covered

    def adjust(i: int, j: int, value: Fraction) -> Fraction:
        covered_row = i in cover.rows
        covered_col = j in cover.cols
        if covered_row and covered_col:
            return value + delta
        if covered_row or covered_col:
            return value
        return value - delta

    adjusted = tuple(
        tuple(adjust(i, j, value) for j, value in enumerate(row))
        for i, row in enumerate(matrix)
    )
    return adjusted, delta


def extract_plan_from_zeros(
    reduced: Sequence[Sequence[Numberish]],
    supply: Iterable[Numberish],
    demand: Iterable[Numberish],
    zero_flow: dict[Cell, Fraction],
) -> TransportPlan:
    """Turn a saturating zero-network flow into a plan.

    Requires the flow to saturate the balanced total (the cover step
    guarantees that exactly when the final cover weight reaches it).
    """
    matrix = as_matrix(reduced)
    supply_v = as_vector(supply)
    demand_v = as_vector(demand)
    required = sum(supply_v, Fraction(0))
    routed = sum(zero_flow.values(), Fraction(0))
    if routed != required:
        raise ValueError(f"zero flow routes {routed}, expected the balanced total {required}")
    for (i, j), q in zero_flow.items():
        if matrix[i][j] != 0:
            raise ValueError(f"flow of {q} on nonzero cell ({i}, {j})")
    plan = TransportPlan(zero_flow)
    return plan


def solve_weighted_hungarian(
    instance: TransportInstance,
    cover_hook: CoverHook | None = None,
) -> tuple[TransportPlan, DualCertificate, SolveTrace]:
    """Solve a balanced transportation problem with integer marginals.

    Reduces the cost matrix, then repeats cover / adjust until the cover
    weight reaches the balanced total; the final flow is the plan and the
    accumulated offsets are the certificate (checked before returning).
    Non-integer costs are scaled to integers first, which bounds the
    iteration count; the plan and certificate come back in original units.

    `cover_hook(iteration_index, matrix, cover)` may return replacement
    (rows, cols) for any iteration's cover - e.g. to pin a published cover in
    a regression test - or None to keep the computed one.  A replacement must
    still cover every zero.
    """
    supply, demand = instance.supply, instance.demand
    _require_integer_marginals(supply, demand)

    scale = math.lcm(*(c.denominator for row in instance.cost for c in row))
    scaled_cost = tuple(tuple(c * scale for c in row) for row in instance.cost)

    reduced, row_offsets, col_offsets = reduce_matrix(scaled_cost)
    alpha = list(row_offsets)
    beta = list(col_offsets)

    iterations: list[HungarianIteration] = []
    while True:
        cover, flow_value, zero_flow = min_weight_zero_cover(reduced, supply, demand)
        if cover_hook is not None:
            override = cover_hook(len(iterations), reduced, cover)
            if override is not None:
                rows, cols = override
                cover = line_cover(rows, cols, supply, demand)
                leak = first_uncovered_zero(reduced, cover)
                if leak is not None:
                    raise ValueError(
                        f"cover_hook cover leaves the zero at {leak} uncovered"
                    )
        if flow_value == instance.total:
            iterations.append(HungarianIteration(reduced, cover, flow_value, None))
            break
        adjusted, delta = delta_adjust(reduced, cover)
        iterations.append(HungarianIteration(reduced, cover, flow_value, delta))
        for i in range(instance.m):
            if i not in cover.rows:
                alpha[i] += delta
        for j in cover.cols:
            beta[j] -= delta
        reduced = adjusted

    plan = extract_plan_from_zeros(reduced, supply, demand, zero_flow)
    certificate = DualCertificate(
        tuple(a / scale for a in alpha),
        tuple(b / scale for b in beta),
    )
    report = verify_optimal(instance, plan, certificate)
    if not report:
        raise RuntimeError(f"internal error: certificate check failed: {report.violation}")
    trace = SolveTrace(scale, tuple(iterations), plan, certificate)
    return plan, certificate, trace


def expand_to_assignment(
    instance: TransportInstance, max_total: int = 64
) -> tuple[Matrix, tuple[int, ...], tuple[int, ...]]:
    """Blow a transportation instance up to an equivalent square assignment
    problem by replicating row i supply[i] times and column j demand[j] times.

    Returns the expanded matrix plus the maps from expanded row/column index
    back to the original row/column.  This is a cross-validation device, so
    the order is capped (default 64) against accidental quadratic blowup.
    """
    _require_integer_marginals(instance.supply, instance.demand)
    order = int(instance.total)
    if order > max_total:
        raise ValueError(f"expansion cap exceeded: balanced total {order} > {max_total}")
    row_map = tuple(
        i for i in range(instance.m) for _ in range(int(instance.supply[i]))
    )
    col_map = tuple(
        j for j in range(instance.n) for _ in range(int(instance.demand[j]))
    )
    expanded = tuple(
        tuple(instance.cost[i][j] for j in col_map) for i in row_map
    )
    return expanded, row_map, col_map


def solve_assignment(
    cost: Sequence[Sequence[Numberish]],
) -> tuple[tuple[int, ...], Fraction]:
    """Minimum-cost assignment on a square matrix: the unit-marginal case.

    Returns the permutation (row i is assigned column perm[i]) and its exact
    total cost.
    """
    matrix = as_matrix(cost)
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("assignment cost matrix must be square")
    unit = [1] * n
    instance = new_instance(matrix, unit, unit)
    plan, _, _ = solve_weighted_hungarian(instance)
    perm = [-1] * n
    for (i, j), q in plan.entries.items():
        assert q == 1
        perm[i] = j
    return tuple(perm), plan_cost(instance, plan)


def aggregate_assignment_solution(
    permutation: Sequence[int],
    row_map: Sequence[int],
    col_map: Sequence[int],
) -> TransportPlan:
    """Collapse a solution of the expanded assignment problem back to a plan:
    quantity (i, j) counts the expanded rows of i assigned into columns of j."""
    if len(permutation) != len(row_map) or len(permutation) != len(col_map):
        raise ValueError("permutation and block maps must all have the expanded order")
    counts: dict[Cell, int] = {}
    for p, q in enumerate(permutation):
        cell = (row_map[p], col_map[q])
        counts[cell] = counts.get(cell, 0) + 1
    return TransportPlan(counts)

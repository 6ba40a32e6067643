import random
from fractions import Fraction

import pytest

from helpers import random_instance
from transopt import (
    TransportPlan,
    enumerate_assignment,
    enumerate_optimum,
    is_feasible,
    new_instance,
    plan_cost,
)


class TestEnumerateOptimum:
    def test_one_by_one(self):
        result = enumerate_optimum(new_instance([[4]], [5], [5]))
        assert result.optimum == 20
        assert result.plan == TransportPlan({(0, 0): 5})
        assert result.optimal_count == 1

    def test_diagonal_zeros(self):
        result = enumerate_optimum(new_instance([[0, 1], [1, 0]], [1, 1], [1, 1]))
        assert result.optimum == 0
        assert result.plan == TransportPlan({(0, 0): 1, (1, 1): 1})

    def test_unit_marginals_match_permutation_oracle(self):
        rng = random.Random(41)
        for _ in range(15):
            n = rng.randint(1, 3)
            matrix = [[rng.randint(-5, 9) for _ in range(n)] for _ in range(n)]
            inst = new_instance(matrix, [1] * n, [1] * n)
            _, best = enumerate_assignment(matrix)
            assert enumerate_optimum(inst).optimum == best

    def test_worked_example_leading_submatrix_unit_marginals(self):
        from helpers import WORKED_COST

        leading = [row[:3] for row in WORKED_COST]
        inst = new_instance(leading, [1, 1, 1], [1, 1, 1])
        _, best = enumerate_assignment(leading)
        assert enumerate_optimum(inst).optimum == best

    def test_tie_breaks_to_lexicographically_smallest(self):
        result = enumerate_optimum(new_instance([[0, 0], [0, 0]], [1, 1], [1, 1]))
        # flattened (x00, x01, x10, x11) = (0, 1, 1, 0) precedes (1, 0, 0, 1)
        assert result.plan == TransportPlan({(0, 1): 1, (1, 0): 1})
        assert result.optimal_count == 2

    def test_total_guard(self, worked_instance):
        with pytest.raises(ValueError, match="size guard"):
            enumerate_optimum(worked_instance)

    def test_raised_guard_admits_the_worked_example(self, worked_instance):
        assert enumerate_optimum(worked_instance, max_total=15).optimum == 47

    def test_cell_guard(self):
        inst = new_instance([[0] * 5] * 4, [1, 1, 1, 1], [1, 1, 1, 1, 0])
        with pytest.raises(ValueError, match="cells"):
            enumerate_optimum(inst)

    def test_non_integer_marginals_rejected(self):
        inst = new_instance([[0]], [Fraction(1, 2)], [Fraction(1, 2)])
        with pytest.raises(ValueError, match="not an integer"):
            enumerate_optimum(inst)

    def test_plan_is_always_feasible_and_optimum_a_lower_bound(self):
        rng = random.Random(43)
        for _ in range(20):
            inst = random_instance(rng, cost_low=-5)
            result = enumerate_optimum(inst)
            assert is_feasible(inst, result.plan)
            assert plan_cost(inst, result.plan) == result.optimum
            assert result.optimal_count >= 1


class TestEnumerateAssignment:
    def test_single_cell(self):
        assert enumerate_assignment([[1]]) == ((0,), 1)

    def test_two_by_two(self):
        assert enumerate_assignment([[1, 2], [2, 1]]) == ((0, 1), 2)

    def test_tie_breaks_lexicographically(self):
        perm, cost = enumerate_assignment([[0, 0], [0, 0]])
        assert perm == (0, 1)
        assert cost == 0

    def test_size_guard(self):
        with pytest.raises(ValueError, match="size guard"):
            enumerate_assignment([[0] * 9] * 9)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            enumerate_assignment([[1, 2]])

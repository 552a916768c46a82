"""Weighted square-product counts: oracle equivalence, scaling, fitting."""

import math
from fractions import Fraction

import numpy as np
import pytest

from qmoments import arith, squarecount
from qmoments.errors import BudgetExceeded, ValidationError


class TestOracle:
    def test_all_ones_bounds(self):
        for k in (1, 2, 3, 4):
            res = squarecount.count_oracle(k, (1,) * k)
            assert res.value == 1 and res.tuple_count == 1

    def test_two_by_two(self):
        res = squarecount.count_oracle(2, (2, 2))
        # contributing tuples: (1,1) weight 1 and (2,2) weight 2/3
        assert res.value == Fraction(5, 3)
        assert res.tuple_count == 2

    def test_value_never_exceeds_tuple_count(self):
        for bounds in [(3, 9), (7, 7), (4, 5, 6)]:
            res = squarecount.count_oracle(len(bounds), bounds)
            assert 0 < res.value <= res.tuple_count

    def test_product_cap(self):
        with pytest.raises(ValidationError):
            squarecount.count_oracle(2, (10 ** 6, 10 ** 6))


class TestFastEqualsOracle:
    def test_small_sweep_k2(self):
        for b1 in range(1, 13):
            for b2 in range(1, 13):
                assert (
                    squarecount.count_fast(2, (b1, b2)).value
                    == squarecount.count_oracle(2, (b1, b2)).value
                )

    def test_k3_spot(self):
        a = squarecount.count_oracle(3, (10, 10, 10))
        b = squarecount.count_fast(3, (10, 10, 10))
        assert a.value == b.value and a.tuple_count == b.tuple_count

    def test_k4_spot(self):
        a = squarecount.count_oracle(4, (6, 5, 4, 7))
        b = squarecount.count_fast(4, (6, 5, 4, 7))
        assert a.value == b.value and a.tuple_count == b.tuple_count

    def test_prefix_table_matches_per_vector_oracle(self):
        table = squarecount.oracle_prefix_table(2, (9, 9))
        for b1 in range(1, 10):
            for b2 in range(1, 10):
                assert table[b1 - 1, b2 - 1] == squarecount.count_oracle(2, (b1, b2)).value


class TestStructure:
    def test_bound_permutation_symmetry(self):
        base = squarecount.count_fast(3, (4, 9, 17)).value
        for perm in [(9, 4, 17), (17, 9, 4), (4, 17, 9)]:
            assert squarecount.count_fast(3, perm).value == base

    def test_monotone_in_bounds(self):
        lo = squarecount.count_fast(2, (8, 8)).value
        hi = squarecount.count_fast(2, (9, 9)).value
        assert hi >= lo

    def test_coordinate_one_reduction(self):
        for bounds in [(5, 7), (12, 12), (9, 30)]:
            k3 = squarecount.count_fast(3, bounds + (1,))
            k2 = squarecount.count_fast(2, bounds)
            assert k3.value == k2.value and k3.tuple_count == k2.tuple_count

    def test_single_coordinate_squares(self):
        y = 50
        expected = sum(
            (arith.radical_weight(c * c) for c in range(1, math.isqrt(y) + 1)),
            Fraction(0),
        )
        res = squarecount.count_fast(1, (y,))
        assert res.value == expected
        assert res.tuple_count == math.isqrt(y)

    def test_second_coordinate_forced_to_one(self):
        y = 40
        expected = sum(
            (arith.radical_weight(n) for n in range(1, y + 1) if math.isqrt(n) ** 2 == n),
            Fraction(0),
        )
        assert squarecount.count_fast(2, (y, 1)).value == expected

    def test_threads_bit_identical(self):
        vals = {squarecount.count_fast(3, (15, 20, 25), threads=w).value for w in (1, 2, 8)}
        assert len(vals) == 1

    def test_budget_refusal(self):
        with pytest.raises(BudgetExceeded):
            squarecount.count_fast(2, (10 ** 6, 10 ** 6))

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            squarecount.count_fast(7, (2,) * 7)
        with pytest.raises(ValidationError):
            squarecount.count_fast(2, (10 ** 7, 2))
        with pytest.raises(ValidationError):
            squarecount.count_fast(2, (0, 3))


class TestFloatMirror:
    def test_matches_exact(self):
        for bounds in [(30, 47), (100, 100), (250, 3)]:
            exact = float(squarecount.count_fast(2, bounds).value)
            approx = squarecount.weighted_square_count_float(2, bounds)
            assert approx == pytest.approx(exact, rel=1e-12)

    def test_growth_shape(self):
        # T_2(Y)/Y should grow roughly linearly in log Y
        t3 = squarecount.weighted_square_count_float(2, (10 ** 3, 10 ** 3)) / 10 ** 3
        t5 = squarecount.weighted_square_count_float(2, (10 ** 5, 10 ** 5)) / 10 ** 5
        assert t5 > t3 > 0


class TestFit:
    def test_synthetic_recovery(self):
        # exact degree-1 data in log Y is reproduced to machine precision
        grid = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
        a, b = 0.375, -1.25
        values = [a * math.log(y) + b for y in grid]
        fit = squarecount.fit_log_polynomial(2, grid, values)
        assert fit.leading == pytest.approx(a, rel=1e-12)
        assert fit.coefficients[0] == pytest.approx(b, rel=1e-10)
        assert fit.residual < 1e-10

    def test_residual_shrinks_when_small_y_dropped(self):
        full = squarecount.fit_leading(2, [10 ** 2, 316, 10 ** 3, 3162, 10 ** 4, 31623])
        tail = squarecount.fit_leading(2, [10 ** 3, 3162, 10 ** 4, 31623, 10 ** 5, 316228])
        assert tail.residual < full.residual

    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            squarecount.fit_leading(2, [100, 100, 200])
        with pytest.raises(ValidationError):
            squarecount.fit_leading(2, [150, 300])
        with pytest.raises(ValidationError):
            squarecount.fit_leading(2, [50, 150, 300, 900])

    def test_degree_matches_pair_count(self):
        # k = 3 routes through the exact counter, so the grid stays small
        grid = [100, 140, 200, 280, 400]
        fit = squarecount.fit_leading(3, grid)
        assert fit.degree == 3
        assert len(fit.coefficients) == 4
        assert np.isfinite(fit.residual)
